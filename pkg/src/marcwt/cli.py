"""Command-line front end: ``marcwt gauss | figure | dm | compare``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import jsonschema

from . import geometry as geo
from .core_it import PmfError
from .gauss_it import GaussianScenario
from .regions_dm import (
    DmError,
    DmFactorization,
    theorem1_pentagon,
    theorem2_region,
    theorem3_region,
    theorem41_outer,
)
from .regions_gauss import (
    DEFAULT_GAMMA_STEPS,
    DEFAULT_OUTER_STEPS,
    DEFAULT_RSTAR_STEPS,
    STRATEGIES,
    NotApplicableError,
    StrategyResult,
    evaluate,
)

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_NOT_APPLICABLE = 0, 1, 2, 3

MAX_GAMMA_STEPS = 10_000
MAX_OUTER_STEPS = 21
MAX_RSTAR_STEPS = 10_000
TOLERANCES = (0.0, 1e-9, 1e-2)

FIGURE_Q = 200.0
FIGURE_NR = {2: 5.0, 3: 2.3, 4: 1.6, 5: 0.0}
PRESETS = {
    f"fig{k}": dict(p1=5.0, p2=6.0, pr=20.0, nr=nr, n1=2.0, n2=14.0, q=FIGURE_Q) for k, nr in FIGURE_NR.items()
}

COLORS = {"df": "#d62728", "nf": "#1f77b4", "cf": "#2ca02c", "outer": "#000000", "baseline": "#9467bd"}

DM_SCHEMA = {
    "type": "object",
    "required": ["theorem", "factors"],
    "properties": {
        "theorem": {"enum": ["T1", "T2", "T3", "T41"]},
        "r_star": {"type": "number", "minimum": 0},
        "factors": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["variables", "probs"],
                "properties": {
                    "variables": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["name", "size"],
                            "properties": {"name": {"type": "string"}, "size": {"type": "integer", "minimum": 1}},
                        },
                    },
                    "given": {"type": "array", "items": {"type": "string"}},
                    "probs": {"type": "array", "items": {"type": "number", "minimum": 0}},
                },
            },
        },
    },
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class ScenarioConfig:
    scenario: GaussianScenario
    strategy: str
    q: float | None = None
    grids: dict = field(
        default_factory=lambda: {
            "gamma_steps": DEFAULT_GAMMA_STEPS,
            "outer_steps": DEFAULT_OUTER_STEPS,
            "r_star_steps": DEFAULT_RSTAR_STEPS,
        }
    )

    def __post_init__(self):
        if self.strategy not in STRATEGIES + ("all",):
            raise CliError(f"strategy: unknown value {self.strategy!r}", EXIT_VALIDATION)
        if self.strategy in ("cf", "all"):
            if self.q is None:
                raise CliError("q: required for strategy cf", EXIT_VALIDATION)
            if not self.q > 0:
                raise CliError(f"q: must be > 0, got {self.q}", EXIT_VALIDATION)
        limits = {
            "gamma_steps": (2, MAX_GAMMA_STEPS),
            "outer_steps": (2, MAX_OUTER_STEPS),
            "r_star_steps": (1, MAX_RSTAR_STEPS),
        }
        for key, (lo, hi) in limits.items():
            value = self.grids[key]
            if not lo <= value <= hi:
                raise CliError(f"{key.replace('_', '-')}: must be in [{lo}, {hi}], got {value}", EXIT_VALIDATION)

    def strategies(self) -> tuple[str, ...]:
        return STRATEGIES if self.strategy == "all" else (self.strategy,)


# --- output helpers -------------------------------------------------------

def _round(x):
    if isinstance(x, float):
        if not math.isfinite(x):
            return None
        return float(geo.format_number(x))
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def _dumps(doc) -> str:
    return json.dumps(_round(doc), indent=2, allow_nan=False) + "\n"


def write_atomic(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report(result: StrategyResult, scenario: GaussianScenario | None = None) -> dict:
    params = dict(result.params)
    if scenario is not None:
        params = {**asdict(scenario), **params}
    doc = {
        "strategy": result.strategy,
        "branch": result.branch,
        "feasible": result.feasible,
        "caps_bits": list(result.caps) if result.caps is not None else None,
        "area_bits2": geo.area(result.region),
        "params": params,
        "n_vertices": len(result.region),
    }
    doc.update(result.extra)
    return doc


def write_result(out_dir: Path, result: StrategyResult, scenario: GaussianScenario):
    write_atomic(out_dir / f"{result.strategy}.csv", geo.region_to_csv(result.region))
    write_atomic(out_dir / f"{result.strategy}.json", _dumps(report(result, scenario)))


# --- commands -------------------------------------------------------------

def run_config(config: ScenarioConfig) -> dict[str, StrategyResult]:
    g = config.grids
    results = {}
    for strategy in config.strategies():
        if strategy == "outer" and not config.scenario.degraded:
            if config.strategy == "outer":
                raise CliError(
                    f"outer bound not applicable (non-degraded): n2={config.scenario.n2} < n1={config.scenario.n1}",
                    EXIT_NOT_APPLICABLE,
                )
            continue
        results[strategy] = evaluate(
            config.scenario,
            strategy,
            q=config.q,
            gamma_steps=g["gamma_steps"],
            outer_steps=g["outer_steps"],
            r_star_steps=g["r_star_steps"],
        )
    return results


def cmd_gauss(config: ScenarioConfig, out_path: Path) -> dict[str, StrategyResult]:
    results = run_config(config)
    for res in results.values():
        write_result(Path(out_path), res, config.scenario)
    return results


def figure_config(fig_id: int) -> ScenarioConfig:
    if fig_id not in FIGURE_NR:
        raise CliError(f"id: must be one of {sorted(FIGURE_NR)}, got {fig_id}", EXIT_VALIDATION)
    p = dict(PRESETS[f"fig{fig_id}"])
    q = p.pop("q")
    return ScenarioConfig(GaussianScenario(**p), "all", q=q)


def figure_summary(results: dict[str, StrategyResult]) -> dict:
    areas = {k: geo.area(r.region) for k, r in results.items()}
    inner = geo.hull_union([results[k].region for k in ("df", "nf", "cf", "baseline") if k in results])
    doc = {"areas_bits2": areas, "inner_hull_area_bits2": geo.area(inner)}
    if "outer" in results:
        outer = results["outer"].region
        doc["gap_bits2"] = areas["outer"] - geo.area(inner)
        doc["outer_support_deficit_bits"] = {
            k: geo.support_deficit(outer, results[k].region) for k in ("df", "nf", "cf", "baseline") if k in results
        }
    return doc


def cmd_figure(fig_id: int, out_dir: Path) -> dict[str, StrategyResult]:
    config = figure_config(fig_id)
    out_dir = Path(out_dir)
    results = cmd_gauss(config, out_dir)
    summary = {"figure": fig_id, "scenario": asdict(config.scenario), "q": config.q, **figure_summary(results)}
    write_atomic(out_dir / f"figure{fig_id}.json", _dumps(summary))
    title = f"Secrecy rate regions, Nr = {geo.format_number(config.scenario.nr)}"
    write_atomic(out_dir / f"figure{fig_id}.svg", render_svg(results, title))
    return results


def render_svg(results: dict[str, StrategyResult], title: str = "") -> str:
    """Plain-text SVG with one closed polyline per region on a 600x600 canvas."""
    size, margin = 600, 60
    frame = results.get("outer")
    regions = [frame.region] if frame is not None and not frame.region.is_empty else [r.region for r in results.values()]
    pts = [p for r in regions for p in r.vertices] or [(1.0, 1.0)]
    xmax = max(max(x for x, _ in pts), 1e-9) * 1.05
    ymax = max(max(y for _, y in pts), 1e-9) * 1.05
    span = size - 2 * margin

    def sx(x):
        return geo.format_number(margin + span * x / xmax)

    def sy(y):
        return geo.format_number(size - margin - span * y / ymax)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<line x1="{margin}" y1="{size - margin}" x2="{size - margin}" y2="{size - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{size - margin}" x2="{margin}" y2="{margin}" stroke="black"/>',
        f'<text x="{size // 2}" y="{size - 15}" text-anchor="middle" font-size="14">R1 (bits)</text>',
        f'<text x="18" y="{size // 2}" text-anchor="middle" font-size="14" transform="rotate(-90 18 {size // 2})">R2 (bits)</text>',
    ]
    if title:
        lines.append(f'<text x="{size // 2}" y="30" text-anchor="middle" font-size="16">{title}</text>')
    for k in range(6):
        tx, ty = xmax * k / 5, ymax * k / 5
        lines.append(f'<text x="{sx(tx)}" y="{size - margin + 18}" text-anchor="middle" font-size="11">{tx:.2f}</text>')
        lines.append(f'<text x="{margin - 8}" y="{sy(ty)}" text-anchor="end" font-size="11">{ty:.2f}</text>')
    for i, (name, res) in enumerate(results.items()):
        color = COLORS.get(name, "#7f7f7f")
        if not res.region.is_empty:
            verts = list(res.region.vertices) + [res.region.vertices[0]]
            coords = " ".join(f"{sx(x)},{sy(y)}" for x, y in verts)
            lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = margin + 18 * i
        lines.append(f'<line x1="{size - 170}" y1="{ly}" x2="{size - 145}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        lines.append(f'<text x="{size - 140}" y="{ly + 4}" font-size="12">{name}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _load_json(path: Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON: {exc}", EXIT_VALIDATION) from exc


def dm_report(f: DmFactorization) -> tuple[dict, geo.RateRegion]:
    doc = {"theorem": f.theorem, "branch": None, "feasible": True}
    if f.theorem == "T1":
        pent = theorem1_pentagon(f)
    elif f.theorem == "T2":
        res = theorem2_region(f)
        pent = res.pentagon
        doc.update(branch=res.branch, rr_bits=res.rr, tie=res.extra["tie"])
    elif f.theorem == "T3":
        res = theorem3_region(f)
        pent = res.pentagon
        doc.update(branch=res.branch, feasible=res.feasible, **res.extra)
    else:
        pent = theorem41_outer(f)
    region = geo.pentagon_vertices(pent) if doc["feasible"] else geo.RateRegion.empty()
    doc["caps_bits"] = list(pent.caps) if doc["feasible"] else None
    doc["empty"] = region.is_empty
    doc["area_bits2"] = geo.area(region)
    return doc, region


def cmd_dm(spec_path: Path, out_path: Path) -> dict:
    doc = _load_json(spec_path)
    errors = sorted(jsonschema.Draft7Validator(DM_SCHEMA).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        pointer = "/" + "/".join(str(p) for p in e.absolute_path)
        raise CliError(f"{pointer}: {e.message}", EXIT_VALIDATION)
    try:
        f = DmFactorization.from_dict(doc)
        report_doc, region = dm_report(f)
    except (DmError, PmfError) as exc:
        raise CliError(str(exc), EXIT_VALIDATION) from exc
    out = Path(out_path)
    write_atomic(out / f"{f.theorem}.csv", geo.region_to_csv(region))
    write_atomic(out / f"{f.theorem}.json", _dumps(report_doc))
    return report_doc


def _read_region(path: Path) -> geo.RateRegion:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    try:
        return geo.region_from_csv(text)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}", EXIT_VALIDATION) from exc


def compare_regions(a: geo.RateRegion, b: geo.RateRegion) -> dict:
    return {
        "area_a_bits2": geo.area(a),
        "area_b_bits2": geo.area(b),
        "a_in_b": {repr(t): geo.contains(b, a, t) for t in TOLERANCES},
        "b_in_a": {repr(t): geo.contains(a, b, t) for t in TOLERANCES},
        "max_support_deficit_a_over_b_bits": max(geo.support_deficit(b, a), 0.0),
        "max_support_deficit_b_over_a_bits": max(geo.support_deficit(a, b), 0.0),
        "directions": 181,
    }


def cmd_compare(a_path: Path, b_path: Path) -> dict:
    doc = compare_regions(_read_region(a_path), _read_region(b_path))
    return {"a": str(a_path), "b": str(b_path), **doc}


# --- argument parsing -----------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="marcwt", description="Secrecy rate regions of the multiple-access relay wiretap channel.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gauss", help="evaluate Gaussian regions for one scenario")
    g.add_argument("--strategy", required=True, choices=STRATEGIES + ("all",))
    g.add_argument("--preset", choices=sorted(PRESETS), help="start from a figure scenario; explicit values override")
    for name in ("p1", "p2", "pr", "nr", "n1", "n2", "q"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--gamma-steps", type=int, default=DEFAULT_GAMMA_STEPS)
    g.add_argument("--outer-steps", type=int, default=DEFAULT_OUTER_STEPS)
    g.add_argument("--rstar-steps", type=int, default=DEFAULT_RSTAR_STEPS)
    g.add_argument("--out", required=True, type=Path)

    f = sub.add_parser("figure", help="reproduce one of the four numerical examples")
    f.add_argument("--id", required=True, type=int, choices=sorted(FIGURE_NR))
    f.add_argument("--out", required=True, type=Path)

    d = sub.add_parser("dm", help="evaluate a discrete memoryless factorization from JSON")
    d.add_argument("--spec", required=True, type=Path)
    d.add_argument("--out", required=True, type=Path)

    c = sub.add_parser("compare", help="compare two region CSV files")
    c.add_argument("a", type=Path)
    c.add_argument("b", type=Path)
    return parser


def config_from_args(args) -> ScenarioConfig:
    values = dict(PRESETS[args.preset]) if args.preset else {}
    for name in ("p1", "p2", "pr", "nr", "n1", "n2", "q"):
        if getattr(args, name) is not None:
            values[name] = getattr(args, name)
    for name in ("p1", "p2", "pr", "nr", "n1", "n2"):
        if name not in values:
            raise CliError(f"{name}: required (give --{name} or --preset)", EXIT_VALIDATION)
    q = values.pop("q", None)
    try:
        scenario = GaussianScenario(**values)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_VALIDATION) from exc
    grids = {"gamma_steps": args.gamma_steps, "outer_steps": args.outer_steps, "r_star_steps": args.rstar_steps}
    return ScenarioConfig(scenario, args.strategy, q=q, grids=grids)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gauss":
            cmd_gauss(config_from_args(args), args.out)
        elif args.command == "figure":
            cmd_figure(args.id, args.out)
        elif args.command == "dm":
            cmd_dm(args.spec, args.out)
        elif args.command == "compare":
            sys.stdout.write(_dumps(cmd_compare(args.a, args.b)))
    except CliError as exc:
        print(f"marcwt: error: {exc}", file=sys.stderr)
        return exc.code
    except NotApplicableError as exc:
        print(f"marcwt: error: {exc}", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    except OSError as exc:
        print(f"marcwt: error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
