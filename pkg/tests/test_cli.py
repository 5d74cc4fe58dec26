import json
import subprocess
import sys

import numpy as np
import pytest

from marcwt.cli import main
from marcwt.geometry import region_from_csv

from conftest import random_joint, random_kernel

IN = (("X1", 2), ("X2", 2), ("Xr", 2))
FIG2 = ["--p1", "5", "--p2", "6", "--pr", "20", "--nr", "5", "--n1", "2", "--n2", "14"]


def load(path):
    return json.loads(path.read_text())


def csv_region(path):
    return region_from_csv(path.read_text())


def test_gauss_all_fig2(tmp_path):
    assert main(["gauss", "--strategy", "all", *FIG2, "--q", "200", "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == sorted(f"{s}.{e}" for s in ("df", "nf", "cf", "outer", "baseline") for e in ("csv", "json"))
    area = {s: load(tmp_path / f"{s}.json")["area_bits2"] for s in ("df", "nf", "baseline")}
    assert area["nf"] > area["baseline"] > area["df"]
    doc = load(tmp_path / "nf.json")
    for key in ("strategy", "branch", "feasible", "caps_bits", "area_bits2", "params"):
        assert key in doc
    assert doc["branch"] == "G1" and doc["params"]["p1"] == 5
    assert doc["caps_bits"] == pytest.approx([0.818715, 0.878037, 1.007971], abs=1e-6)


def test_gauss_baseline_without_power(tmp_path):
    args = ["gauss", "--strategy", "baseline", "--p1", "0", "--p2", "0", "--pr", "20", "--nr", "5", "--n1", "2", "--n2", "14"]
    assert main([*args, "--out", str(tmp_path)]) == 0
    assert (tmp_path / "baseline.csv").read_text() == "R1_bits,R2_bits\n0,0\n"


def test_gauss_preset_fig5(tmp_path):
    assert main(["gauss", "--strategy", "all", "--preset", "fig5", "--out", str(tmp_path)]) == 0
    assert load(tmp_path / "df.json")["area_bits2"] > load(tmp_path / "nf.json")["area_bits2"]


def test_gauss_validation_errors(tmp_path, capsys):
    assert main(["gauss", "--strategy", "cf", *FIG2, "--out", str(tmp_path)]) == 2
    assert "q" in capsys.readouterr().err
    bad = FIG2.copy()
    bad[bad.index("--n1") + 1] = "-1"
    assert main(["gauss", "--strategy", "nf", *bad, "--out", str(tmp_path)]) == 2
    assert "n1" in capsys.readouterr().err
    assert main(["gauss", "--strategy", "df", *FIG2, "--gamma-steps", "20000", "--out", str(tmp_path)]) == 2
    assert "gamma-steps" in capsys.readouterr().err
    assert main(["gauss", "--strategy", "outer", *FIG2, "--outer-steps", "22", "--out", str(tmp_path)]) == 2
    assert not any(tmp_path.iterdir())


def test_gauss_outer_not_applicable(tmp_path, capsys):
    args = ["--p1", "5", "--p2", "6", "--pr", "20", "--nr", "5", "--n1", "14", "--n2", "2"]
    assert main(["gauss", "--strategy", "outer", *args, "--out", str(tmp_path)]) == 3
    assert "not applicable" in capsys.readouterr().err
    # With "all" the outer bound is skipped rather than fatal.
    assert main(["gauss", "--strategy", "all", *args, "--q", "200", "--out", str(tmp_path)]) == 0
    assert not (tmp_path / "outer.csv").exists()


def test_figure_outputs_and_ordering(tmp_path):
    assert main(["figure", "--id", "4", "--out", str(tmp_path)]) == 0
    summary = load(tmp_path / "figure4.json")
    a = summary["areas_bits2"]
    assert a["df"] > a["nf"] >= a["cf"]
    assert all(v <= 1e-2 for v in summary["outer_support_deficit_bits"].values())
    svg = (tmp_path / "figure4.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 5
    assert "R1 (bits)" in svg and "R2 (bits)" in svg


def test_figure_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["figure", "--id", "2", "--out", str(a)]) == 0
    assert main(["figure", "--id", "2", "--out", str(b)]) == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_figure_bad_id():
    with pytest.raises(SystemExit) as exc:
        main(["figure", "--id", "7", "--out", "x"])
    assert exc.value.code == 2


def t1_doc(rng):
    factors = {
        "V1": random_joint(rng, (("V1", 2),)),
        "V2": random_joint(rng, (("V2", 2),)),
        "X1": random_kernel(rng, (("V1", 2),), (("X1", 2),)),
        "X2": random_kernel(rng, (("V2", 2),), (("X2", 2),)),
        "Xr": random_kernel(rng, (("V1", 2), ("V2", 2)), (("Xr", 2),)),
        "channel": random_kernel(rng, IN, (("Y", 2), ("Yr", 2), ("Z", 1))),
    }
    return {"theorem": "T1", "factors": {k: v.to_dict() for k, v in factors.items()}}


def test_dm_constant_wiretapper(tmp_path, rng):
    from marcwt.regions_dm import DmFactorization
    from test_regions_dm import marc_df_caps

    doc = t1_doc(rng)
    spec = tmp_path / "t1.json"
    spec.write_text(json.dumps(doc))
    assert main(["dm", "--spec", str(spec), "--out", str(tmp_path / "out")]) == 0
    report = load(tmp_path / "out" / "T1.json")
    expected = marc_df_caps(DmFactorization.from_dict(doc))
    np.testing.assert_allclose(report["caps_bits"], expected, atol=1e-8)
    csv_region(tmp_path / "out" / "T1.csv")


def test_dm_malformed_probs(tmp_path, rng, capsys):
    doc = t1_doc(rng)
    doc["factors"]["V2"]["probs"] = [0.5, 0.4]
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps(doc))
    assert main(["dm", "--spec", str(spec), "--out", str(tmp_path / "out")]) == 2
    assert "/factors/V2" in capsys.readouterr().err


def test_dm_schema_pointer(tmp_path, rng, capsys):
    doc = t1_doc(rng)
    doc["factors"]["X1"]["probs"] = "oops"
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps(doc))
    assert main(["dm", "--spec", str(spec), "--out", str(tmp_path / "out")]) == 2
    assert "/factors/X1/probs" in capsys.readouterr().err


def test_dm_missing_file(tmp_path):
    assert main(["dm", "--spec", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 1


def test_dm_t3_infeasible(tmp_path):
    from marcwt.core_it import ConditionalPmf
    from marcwt.regions_dm import bernoulli

    # Noiseless channel to Y, Z sees Xr only, so the relay noise budget is tiny.
    channel = ConditionalPmf.from_function(IN, (("Y", 8), ("Yr", 4), ("Z", 2)), lambda a, b, r: (4 * a + 2 * b + r, 2 * a + b, r))
    copy = ConditionalPmf.from_function((("Yr", 4), ("Xr", 2)), (("Yhat", 4),), lambda yr, xr: yr)
    factors = {"X1": bernoulli("X1", 0.5), "X2": bernoulli("X2", 0.5), "Xr": bernoulli("Xr", 0.5), "channel": channel, "test_channel": copy}
    doc = {"theorem": "T3", "r_star": 0.0, "factors": {k: v.to_dict() for k, v in factors.items()}}
    spec = tmp_path / "t3.json"
    spec.write_text(json.dumps(doc))
    assert main(["dm", "--spec", str(spec), "--out", str(tmp_path / "out")]) == 0
    report = load(tmp_path / "out" / "T3.json")
    assert report["feasible"] is False and report["branch"] == "L3"
    assert (tmp_path / "out" / "T3.csv").read_text() == "R1_bits,R2_bits\n"


def test_dm_t41_not_degraded(tmp_path, rng, capsys):
    inputs = random_joint(rng, (("U", 2),) + IN)
    channel = random_kernel(rng, IN, (("Y", 2), ("Yr", 2), ("Z", 2)))
    doc = {"theorem": "T41", "factors": {"inputs": inputs.to_dict(), "channel": channel.to_dict()}}
    spec = tmp_path / "t41.json"
    spec.write_text(json.dumps(doc))
    assert main(["dm", "--spec", str(spec), "--out", str(tmp_path / "out")]) == 2
    assert "degradedness" in capsys.readouterr().err


@pytest.fixture(scope="module")
def fig2_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig2")
    assert main(["gauss", "--strategy", "all", "--preset", "fig2", "--out", str(out)]) == 0
    assert main(["gauss", "--strategy", "cf", "--preset", "fig2", "--q", "1e6", "--out", str(out / "bigq")]) == 0
    return out


def run_compare(a, b, capsys):
    assert main(["compare", str(a), str(b)]) == 0
    return json.loads(capsys.readouterr().out)


def test_compare_reflexive(fig2_dir, capsys):
    doc = run_compare(fig2_dir / "nf.csv", fig2_dir / "nf.csv", capsys)
    assert all(doc["a_in_b"].values()) and all(doc["b_in_a"].values())
    assert doc["max_support_deficit_a_over_b_bits"] == 0
    assert set(doc["a_in_b"]) == {"0.0", "1e-09", "0.01"}


def test_compare_nf_baseline(fig2_dir, capsys):
    doc = run_compare(fig2_dir / "nf.csv", fig2_dir / "baseline.csv", capsys)
    assert doc["b_in_a"]["1e-09"] and not doc["a_in_b"]["0.01"]


def test_compare_cf_limit(fig2_dir, capsys):
    doc = run_compare(fig2_dir / "bigq" / "cf.csv", fig2_dir / "nf.csv", capsys)
    assert doc["max_support_deficit_a_over_b_bits"] < 1e-3
    assert doc["max_support_deficit_b_over_a_bits"] < 1e-3


def test_compare_rejects_non_canonical(tmp_path, fig2_dir):
    bad = tmp_path / "bad.csv"
    bad.write_text("R1_bits,R2_bits\n0,0\n0,1\n1,0\n")
    assert main(["compare", str(bad), str(fig2_dir / "nf.csv")]) == 2
    assert main(["compare", str(tmp_path / "missing.csv"), str(fig2_dir / "nf.csv")]) == 1


def test_csv_round_trip(fig2_dir):
    from marcwt.geometry import region_to_csv

    text = (fig2_dir / "outer.csv").read_text()
    assert region_to_csv(region_from_csv(text)) == text


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "marcwt", "gauss", "--strategy", "nf", *FIG2, "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "nf.json").exists()
