"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line (printed in the terminal summary)
before asserting, so the full table appears even when a criterion fails.
"""
import time

import numpy as np
import pytest

from marcwt.cli import main
from marcwt.core_it import ConditionalPmf, JointPmf, compose, cond_mutual_info, marginalize
from marcwt.gauss_it import GaussianScenario
from marcwt.geometry import RatePentagon, area, contains, hull_union, membership, pentagon_vertices, support_deficit
from marcwt.regions_dm import degraded_channel, outer_sweep, theorem1_pentagon
from marcwt.regions_gauss import (
    baseline_oracle,
    baseline_region,
    cf_oracle,
    cf_pentagon,
    cf_region,
    df_pentagon,
    df_pentagon_oracle,
    df_region,
    evaluate,
    nf_oracle,
    nf_region,
    outer_region,
)

from conftest import random_joint, random_kernel
from test_gauss_it import random_scenario
from test_regions_dm import mac_wt_caps, mac_wt_factorization, marc_df_caps, random_t1

NRS = {2: 5.0, 3: 2.3, 4: 1.6, 5: 0.0}
Q = 200.0


def preset(fig):
    return GaussianScenario(5, 6, 20, NRS[fig], 2, 14)


def record(log, number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    log.append(line)
    print(line)
    return ok


def test_criterion_1_oracle_equivalence(rng, acceptance_log):
    start = time.perf_counter()
    worst = {"df": 0.0, "nf": 0.0, "cf": 0.0, "baseline": 0.0}
    branch_ok = True
    for _ in range(100):
        s = random_scenario(rng)
        gamma = float(rng.uniform())
        worst["df"] = max(worst["df"], np.max(np.abs(np.subtract(df_pentagon(s, gamma).caps, df_pentagon_oracle(s, gamma).caps))))
        res, orc = nf_region(s), nf_oracle(s)
        branch_ok &= res.branch == orc.branch
        worst["nf"] = max(worst["nf"], np.max(np.abs(np.subtract(res.pentagon.caps, orc.pentagon.caps))))
        q, r_star = float(rng.uniform(1, 1000)), float(rng.uniform(0, 1))
        branch, cpent, _, _ = cf_oracle(s, q, r_star)
        branch_ok &= (branch == "G3") == (s.n1 <= s.n2)
        worst["cf"] = max(worst["cf"], np.max(np.abs(np.subtract(cf_pentagon(s, q, r_star).caps, cpent.caps))))
        worst["baseline"] = max(
            worst["baseline"], np.max(np.abs(np.subtract(baseline_region(s).caps, baseline_oracle(s).caps)))
        )
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) <= 1e-9 and branch_ok and elapsed < 5
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    record(acceptance_log, 1, ok, f"max |closed form - log-det| over 100 scenarios: {detail}; {elapsed:.2f} s")
    assert ok


def test_criterion_2_figure2_values(acceptance_log):
    s = preset(2)
    base = baseline_region(s)
    nf = nf_region(s)
    df = df_region(s)
    cf = cf_region(s, Q).region
    sums = {
        "baseline": (base.sum_cap, 0.932019),
        "nf": (nf.pentagon.sum_cap, 1.007972),
        "df": (df_pentagon(s, 1.0).sum_cap, 0.636841),
    }
    sums_ok = {k: abs(v - target) <= 1e-5 for k, (v, target) in sums.items()}
    b = pentagon_vertices(base)
    checks = {
        "baseline in nf": contains(nf.region, b, 1e-9),
        "baseline in cf": contains(cf, b, 1e-9),
        "cf in nf": contains(nf.region, cf, 1e-9),
        "area df < baseline": area(df) < area(b),
    }
    ok = all(sums_ok.values()) and all(checks.values())
    parts = [f"{k} sum {v:.6f} (target {t}, {'ok' if sums_ok[k] else 'off'})" for k, (v, t) in sums.items()]
    parts += [f"{k} {'ok' if v else 'no'}" for k, v in checks.items()]
    record(acceptance_log, 2, ok, "; ".join(parts))
    assert ok


def test_criterion_3_area_ordering(acceptance_log):
    areas = {}
    for fig in (3, 4, 5):
        s = preset(fig)
        areas[fig] = {k: area(evaluate(s, k, q=Q).region) for k in ("df", "nf", "cf", "baseline")}
    late = all(areas[f]["df"] > areas[f]["nf"] >= areas[f]["cf"] for f in (4, 5))
    a3 = areas[3]
    fig3 = a3["baseline"] < a3["df"] < a3["nf"]
    ok = late and fig3
    detail = "; ".join(
        f"Nr={NRS[f]}: df {a['df']:.5f} nf {a['nf']:.5f} cf {a['cf']:.5f} baseline {a['baseline']:.5f}"
        for f, a in areas.items()
    )
    record(acceptance_log, 3, ok, f"Nr 1.6/0 ordering {'ok' if late else 'no'}, Nr 2.3 ordering {'ok' if fig3 else 'no'}; {detail}")
    assert ok


def test_criterion_4_cf_tends_to_nf(acceptance_log):
    s = preset(2)
    cf = cf_region(s, 1e6).region
    nf = nf_region(s).region
    deficit = max(abs(support_deficit(nf, cf)), abs(support_deficit(cf, nf)))
    ok = deficit < 1e-3
    record(acceptance_log, 4, ok, f"max support deficit cf(Q=1e6) vs nf = {deficit:.2e} bits")
    assert ok


def test_criterion_5_inner_in_outer(acceptance_log):
    gaps, worst = [], -np.inf
    for fig in (2, 3, 4, 5):
        s = preset(fig)
        outer = outer_region(s, 11)
        inners = [evaluate(s, k, q=Q).region for k in ("df", "nf", "cf", "baseline")]
        worst = max(worst, max(support_deficit(outer, r) for r in inners))
        gaps.append(area(outer) - area(hull_union(inners)))
    decreasing = all(a > b for a, b in zip(gaps, gaps[1:]))
    ok = worst <= 1e-2 and decreasing
    record(
        acceptance_log,
        5,
        ok,
        f"worst inner-over-outer support deficit {worst:.3e}; gaps {', '.join(f'{g:.4f}' for g in gaps)}",
    )
    assert ok


def test_criterion_6_reduction_identities(rng, acceptance_log):
    worst3 = worst4 = 0.0
    for _ in range(50):
        f = random_t1(rng, z=1)
        worst3 = max(worst3, np.max(np.abs(np.subtract(theorem1_pentagon(f).caps, marc_df_caps(f)))))
        g = mac_wt_factorization(rng)
        worst4 = max(worst4, np.max(np.abs(np.subtract(theorem1_pentagon(g).caps, mac_wt_caps(g)))))
    ok = worst3 <= 1e-12 and worst4 <= 1e-12
    record(acceptance_log, 6, ok, f"constant Z max err {worst3:.1e}; degenerate relay max err {worst4:.1e} (50 each)")
    assert ok


def _core_trials(rng, n):
    failures = 0
    for _ in range(n):
        sizes = rng.integers(1, 4, size=3)
        p = random_joint(rng, (("A", int(sizes[0])), ("B", int(sizes[1])), ("C", int(sizes[2]))))
        i_ab = cond_mutual_info(p, "A", "B")
        i_ba = cond_mutual_info(p, "B", "A")
        i_a_bc = cond_mutual_info(p, "A", ("B", "C"))
        i_ac_b = cond_mutual_info(p, "A", "C", "B")
        chain = abs(i_a_bc - (i_ab + i_ac_b)) <= 1e-10
        symmetric = abs(i_ab - i_ba) <= 1e-12
        nonneg = min(i_ab, i_ac_b, i_a_bc) >= 0
        # Data processing on the Markov chain A -> B -> W.
        w = compose(marginalize(p, ("A", "B")), random_kernel(rng, (("B", int(sizes[1])),), (("W", 3),)))
        dpi = cond_mutual_info(w, "A", "W") <= cond_mutual_info(w, "A", "B") + 1e-12
        failures += not (chain and symmetric and nonneg and dpi)
    return failures


def _grid_agreement(rng, n_pentagons, step=1e-3):
    agree = total = 0
    for _ in range(n_pentagons):
        caps = rng.uniform(0.05, 4, size=3)
        p = RatePentagon(*caps)
        poly = pentagon_vertices(p)
        xs = np.arange(0, max(caps[:2]) + step, step)
        for row in np.array_split(xs, max(1, len(xs) // 500)):
            grid = np.stack(np.meshgrid(row, xs, indexing="ij"), axis=-1).reshape(-1, 2)
            ours = membership(poly, grid, tol=1e-9)
            truth = p.contains_point(grid[:, 0], grid[:, 1], tol=1e-9)
            agree += int(np.sum(ours == truth))
            total += len(grid)
    return agree / total


def _outer_inner_trials(rng, n):
    failures = 0
    inp = (("X1", 2), ("X2", 2), ("Xr", 2))
    for _ in range(n):
        main_ch = random_kernel(rng, inp, (("Y", 3), ("Yr", 2)))
        wire = random_kernel(rng, (("Y", 3),), (("Z", 2),))
        f = random_t1(rng, channel=degraded_channel(main_ch, wire))
        inner = pentagon_vertices(theorem1_pentagon(f))
        outer = outer_sweep(marginalize(f.joint, ("X1", "X2", "Xr")), main_ch, wire, u_sizes=(1, 2, 3, 4), steps=3)
        failures += not contains(outer, inner, 1e-9)
    return failures


def test_criterion_7_property_suite(rng, acceptance_log):
    core_fail = _core_trials(rng, 1000)
    agreement = _grid_agreement(rng, 4)
    outer_fail = _outer_inner_trials(rng, 50)
    ok = core_fail == 0 and agreement >= 0.9999 and outer_fail == 0
    record(
        acceptance_log,
        7,
        ok,
        f"core_it failures {core_fail}/1000; grid agreement {agreement:.6f}; outer-over-inner failures {outer_fail}/50",
    )
    assert ok


def test_criterion_8_determinism_and_runtime(tmp_path, acceptance_log):
    times = {}
    for fig in (2, 3, 4, 5):
        start = time.perf_counter()
        assert main(["figure", "--id", str(fig), "--out", str(tmp_path / f"fig{fig}")]) == 0
        times[fig] = time.perf_counter() - start
    assert main(["figure", "--id", "2", "--out", str(tmp_path / "again")]) == 0
    first = sorted((tmp_path / "fig2").iterdir())
    identical = [p.name for p in first] == sorted(p.name for p in (tmp_path / "again").iterdir()) and all(
        p.read_bytes() == (tmp_path / "again" / p.name).read_bytes() for p in first
    )
    ok = identical and max(times.values()) < 10
    timing = ", ".join(f"id {k} {v:.2f} s" for k, v in times.items())
    record(acceptance_log, 8, ok, f"repeat run byte-identical: {identical}; {timing}")
    assert ok
