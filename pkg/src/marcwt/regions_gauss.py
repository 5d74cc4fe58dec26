"""Closed-form secrecy rate regions of the Gaussian multiple-access relay wiretap channel.

Strategies: decode-forward (``df``), noise-forward (``nf``), compress-forward
(``cf``), the degraded-case outer bound (``outer``) and the relay-free
multiple-access wiretap baseline (``baseline``). All rates are in bits per
channel use.

Each ``*_oracle`` function recomputes the same caps from the generic
discrete-memoryless formulas, with every mutual-information term evaluated
on an assembled Gaussian covariance by :mod:`marcwt.gauss_it`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .gauss_it import (
    DF,
    GaussianScenario,
    IndependentFullPower,
    IndependentWithCompression,
    assemble_covariance,
)
from .geometry import (
    RatePentagon,
    RateRegion,
    hull_points,
    hull_union,
    pentagon_corner_points,
    pentagon_vertices,
    support,
    union_envelope,
)

STRATEGIES = ("df", "nf", "cf", "outer", "baseline")

DEFAULT_GAMMA_STEPS = 101
DEFAULT_OUTER_STEPS = 11
DEFAULT_RSTAR_STEPS = 21


class NotApplicableError(ValueError):
    """The outer bound is only stated for n2 >= n1."""


def half_log(x: float) -> float:
    return 0.5 * math.log2(x)


def _relay_link(snr_num: float, nr: float) -> float:
    # A noiseless transmitter-relay link never binds the min.
    if nr == 0:
        return math.inf
    return half_log(1 + snr_num / nr)


# --- decode-forward -------------------------------------------------------

def df_pentagon(s: GaussianScenario, gamma: float) -> RatePentagon:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    total_z = s.p1 + s.p2 + s.pr + s.n2
    r1 = min(_relay_link(s.p1, s.nr), half_log(1 + (s.p1 + gamma * s.pr) / s.n1))
    r2 = min(_relay_link(s.p2, s.nr), half_log(1 + (s.p2 + (1 - gamma) * s.pr) / s.n1))
    rs = min(_relay_link(s.p1 + s.p2, s.nr), half_log(1 + (s.p1 + s.p2 + s.pr) / s.n1))
    return RatePentagon(
        r1 - half_log(total_z / (s.p2 + s.pr + s.n2)),
        r2 - half_log(total_z / (s.p1 + s.pr + s.n2)),
        rs - half_log(total_z / (s.pr + s.n2)),
    )


def gamma_grid(steps: int) -> np.ndarray:
    if steps < 2:
        raise ValueError("gamma_steps must be >= 2")
    return np.linspace(0.0, 1.0, steps)


def df_pentagons(s: GaussianScenario, gamma_steps: int = DEFAULT_GAMMA_STEPS) -> list[RatePentagon]:
    return [df_pentagon(s, float(g)) for g in gamma_grid(gamma_steps)]


def df_region(s: GaussianScenario, gamma_steps: int = DEFAULT_GAMMA_STEPS) -> RateRegion:
    """Time-sharing hull of the decode-forward pentagons over a uniform gamma grid."""
    return hull_union(df_pentagons(s, gamma_steps))


def df_pentagon_oracle(s: GaussianScenario, gamma: float, alpha: float = 1.0, beta: float = 1.0) -> RatePentagon:
    g = assemble_covariance(s, DF(gamma, alpha, beta))
    I = g.cond_mi
    if s.nr == 0:
        relay = (math.inf, math.inf, math.inf)
    else:
        relay = (
            I("X1", "Yr", ("Xr", "X2", "V1", "V2")),
            I("X2", "Yr", ("Xr", "X1", "V1", "V2")),
            I(("X1", "X2"), "Yr", ("Xr", "V1", "V2")),
        )
    return RatePentagon(
        min(relay[0], I(("X1", "Xr"), "Y", ("X2", "V2"))) - I("X1", "Z"),
        min(relay[1], I(("X2", "Xr"), "Y", ("X1", "V1"))) - I("X2", "Z"),
        min(relay[2], I(("X1", "X2", "Xr"), "Y")) - I(("X1", "X2"), "Z"),
    )


# --- noise-forward --------------------------------------------------------

@dataclass(frozen=True)
class NfResult:
    branch: str
    pentagon: RatePentagon
    rr: float

    @property
    def region(self) -> RateRegion:
        return pentagon_vertices(self.pentagon)


def relay_noise_rate(s: GaussianScenario) -> float:
    """min of the three relay-codeword rates that keep the wiretapper confused."""
    return min(
        half_log(1 + s.pr / (s.p1 + s.p2 + s.n1)),
        half_log(1 + s.pr / (s.p2 + s.n2)),
        half_log(1 + s.pr / (s.p1 + s.n2)),
    )


def nf_region(s: GaussianScenario) -> NfResult:
    if s.n1 <= s.n2:
        rr = relay_noise_rate(s)
        p = RatePentagon(
            half_log(1 + s.p1 / s.n1) - half_log(1 + (s.p1 + s.pr) / (s.p2 + s.n2)) + rr,
            half_log(1 + s.p2 / s.n1) - half_log(1 + (s.p2 + s.pr) / (s.p1 + s.n2)) + rr,
            half_log(1 + (s.p1 + s.p2) / s.n1) - half_log(1 + (s.p1 + s.p2 + s.pr) / s.n2) + rr,
        )
        return NfResult("G1", p, rr)
    p = RatePentagon(
        half_log(1 + s.p1 / s.n1) - half_log(1 + s.p1 / (s.p2 + s.n2)),
        half_log(1 + s.p2 / s.n1) - half_log(1 + s.p2 / (s.p1 + s.n2)),
        half_log(1 + (s.p1 + s.p2) / s.n1) - half_log(1 + (s.p1 + s.p2) / s.n2),
    )
    return NfResult("G2", p, half_log(1 + s.pr / (s.p1 + s.p2 + s.n1)))


def nf_oracle(s: GaussianScenario) -> NfResult:
    g = assemble_covariance(s, IndependentFullPower())
    I = g.cond_mi
    if I("Xr", "Y") >= I("Xr", "Z"):
        rr = min(I("Xr", "Y"), I("Xr", "Z", "X1"), I("Xr", "Z", "X2"))
        p = RatePentagon(
            I("X1", "Y", ("X2", "Xr")) - I(("X1", "Xr"), "Z") + rr,
            I("X2", "Y", ("X1", "Xr")) - I(("X2", "Xr"), "Z") + rr,
            I(("X1", "X2"), "Y", "Xr") - I(("X1", "X2", "Xr"), "Z") + rr,
        )
        return NfResult("G1", p, rr)
    p = RatePentagon(
        I("X1", "Y", ("X2", "Xr")) - I("X1", "Z", "Xr"),
        I("X2", "Y", ("X1", "Xr")) - I("X2", "Z", "Xr"),
        I(("X1", "X2"), "Y", "Xr") - I(("X1", "X2"), "Z", "Xr"),
    )
    return NfResult("G2", p, I("Xr", "Y"))


# --- compress-forward -----------------------------------------------------

@dataclass(frozen=True)
class CfResult:
    branch: str
    region: RateRegion
    feasible: bool
    pentagons: tuple[RatePentagon, ...] = ()
    r_star_grid: tuple[float, ...] = ()
    compression_rate: float = 0.0


def compression_rate(s: GaussianScenario, q: float) -> float:
    """Rate needed to describe Yhat = Y_r + Z_Q to the receiver, I(Y_r; Yhat | X_r)."""
    return half_log(1 + (s.p1 + s.p2 + s.nr) / q)


def _combined_gain(s: GaussianScenario, power: float, q: float) -> float:
    return half_log(1 + power * (q + s.n1 + s.nr) / (s.n1 * (s.nr + q)))


def cf_pentagon(s: GaussianScenario, q: float, r_star: float) -> RatePentagon:
    """One compress-forward pentagon; ``r_star`` is ignored on the G4 branch."""
    if not q > 0:
        raise ValueError(f"q must be > 0, got {q}")
    if s.n1 <= s.n2:
        return RatePentagon(
            _combined_gain(s, s.p1, q) - half_log(1 + (s.p1 + s.pr) / (s.p2 + s.n2)) + r_star,
            _combined_gain(s, s.p2, q) - half_log(1 + (s.p2 + s.pr) / (s.p1 + s.n2)) + r_star,
            _combined_gain(s, s.p1 + s.p2, q) - half_log(1 + (s.p1 + s.p2 + s.pr) / s.n2) + r_star,
        )
    return RatePentagon(
        _combined_gain(s, s.p1, q) - half_log(1 + s.p1 / (s.p2 + s.n2)),
        _combined_gain(s, s.p2, q) - half_log(1 + s.p2 / (s.p1 + s.n2)),
        _combined_gain(s, s.p1 + s.p2, q) - half_log(1 + (s.p1 + s.p2) / s.n2),
    )


def cf_g4_threshold(s: GaussianScenario) -> float:
    if s.pr == 0:
        return math.inf
    p = s.p1 + s.p2
    return (p * p + p * (s.nr + s.n1) + s.nr * s.n1) / s.pr


def cf_region(s: GaussianScenario, q: float, r_star_steps: int = DEFAULT_RSTAR_STEPS) -> CfResult:
    if not q > 0:
        raise ValueError(f"q must be > 0, got {q}")
    if r_star_steps < 1:
        raise ValueError("r_star_steps must be >= 1")
    cost = compression_rate(s, q)
    if s.n1 <= s.n2:
        r_star_max = relay_noise_rate(s) - cost
        if r_star_max < 0:
            return CfResult("G3", RateRegion.empty(), False, compression_rate=cost)
        if r_star_steps == 1:
            grid = np.array([r_star_max])
        else:
            grid = np.linspace(0.0, r_star_max, r_star_steps)
        pents = tuple(cf_pentagon(s, q, float(r)) for r in grid)
        return CfResult("G3", hull_union(pents), True, pents, tuple(float(r) for r in grid), cost)
    if q < cf_g4_threshold(s):
        return CfResult("G4", RateRegion.empty(), False, compression_rate=cost)
    p = cf_pentagon(s, q, 0.0)
    return CfResult("G4", pentagon_vertices(p), True, (p,), (), cost)


def cf_oracle(s: GaussianScenario, q: float, r_star: float) -> tuple[str, RatePentagon, float, float]:
    """Branch, pentagon, noise-rate budget and compression cost, all from log-determinants."""
    g = assemble_covariance(s, IndependentWithCompression(q))
    I = g.cond_mi
    cost = I("Yr", "Yhat", "Xr")
    obs = ("Y", "Yhat")
    if I("Xr", "Y") >= I("Xr", "Z"):
        budget = min(I("Xr", "Z", "X1"), I("Xr", "Z", "X2"), I("Xr", "Y"))
        p = RatePentagon(
            I("X1", obs, ("X2", "Xr")) - I(("X1", "Xr"), "Z") + r_star,
            I("X2", obs, ("X1", "Xr")) - I(("X2", "Xr"), "Z") + r_star,
            I(("X1", "X2"), obs, "Xr") - I(("X1", "X2", "Xr"), "Z") + r_star,
        )
        return "G3", p, budget, cost
    p = RatePentagon(
        I("X1", obs, ("X2", "Xr")) - I("X1", "Z", "Xr"),
        I("X2", obs, ("X1", "Xr")) - I("X2", "Z", "Xr"),
        I(("X1", "X2"), obs, "Xr") - I(("X1", "X2"), "Z", "Xr"),
    )
    return "G4", p, I("Xr", "Y"), cost


# --- outer bound ----------------------------------------------------------

@dataclass(frozen=True)
class OuterParams:
    alpha: float
    beta1: float
    beta2: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta1", "beta2", "gamma"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


def _outer_caps(s: GaussianScenario, alpha, beta1, beta2, gamma):
    """Vectorised outer-bound caps; arguments broadcast as numpy arrays."""
    alpha, beta1, beta2, gamma = (np.asarray(x, dtype=float) for x in (alpha, beta1, beta2, gamma))
    d1 = s.n2 + s.pr * (alpha + beta1 - alpha * beta1) + beta1 * s.p2
    d2 = s.n2 + s.pr * (alpha + beta2 - alpha * beta2) + beta2 * s.p1
    c = np.maximum(d1, d2)
    total = s.p1 + s.p2 + s.pr
    leak = c + gamma * (total + s.n2 - c)
    r1 = 0.5 * np.log2(1 + (d2 - s.n2) / s.n1) - 0.5 * np.log2(leak / d1)
    r2 = 0.5 * np.log2(1 + (d1 - s.n2) / s.n1) - 0.5 * np.log2(leak / d2)
    rs = 0.5 * np.log2((c + gamma * (total + s.n1 - c)) / s.n1) - 0.5 * np.log2(leak / (s.n2 + alpha * s.pr))
    return r1, r2, rs


def _require_degraded(s: GaussianScenario):
    if not s.degraded:
        raise NotApplicableError(
            f"outer bound not applicable (non-degraded): n2={s.n2} < n1={s.n1}"
        )


def outer_pentagon(s: GaussianScenario, p: OuterParams) -> RatePentagon:
    _require_degraded(s)
    r1, r2, rs = _outer_caps(s, p.alpha, p.beta1, p.beta2, p.gamma)
    return RatePentagon(float(r1), float(r2), float(rs))


def outer_grid(steps_per_axis: int) -> np.ndarray:
    if steps_per_axis < 2:
        raise ValueError("steps_per_axis must be >= 2")
    axis = np.linspace(0.0, 1.0, steps_per_axis)
    mesh = np.meshgrid(axis, axis, axis, axis, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def outer_region(s: GaussianScenario, steps_per_axis: int = DEFAULT_OUTER_STEPS) -> RateRegion:
    """Hull of outer-bound pentagons over a uniform (alpha, beta1, beta2, gamma) grid.

    A grid only samples the union, so the result is an inner approximation of
    the outer bound.
    """
    _require_degraded(s)
    params = outer_grid(steps_per_axis)
    caps = np.stack(_outer_caps(s, *params.T), axis=1)
    return hull_points(pentagon_corner_points(caps))


# --- baseline -------------------------------------------------------------

def baseline_region(s: GaussianScenario) -> RatePentagon:
    """Two-user Gaussian multiple-access wiretap region without a relay."""
    return RatePentagon(
        half_log(1 + s.p1 / s.n1) - half_log(1 + s.p1 / (s.n2 + s.p2)),
        half_log(1 + s.p2 / s.n1) - half_log(1 + s.p2 / (s.n2 + s.p1)),
        half_log(1 + (s.p1 + s.p2) / s.n1) - half_log(1 + (s.p1 + s.p2) / s.n2),
    )


def baseline_oracle(s: GaussianScenario) -> RatePentagon:
    # Silence the relay: same covariance machinery with pr = 0.
    silent = GaussianScenario(s.p1, s.p2, 0.0, max(s.nr, 1.0), s.n1, s.n2)
    I = assemble_covariance(silent, IndependentFullPower()).cond_mi
    return RatePentagon(
        I("X1", "Y", "X2") - I("X1", "Z"),
        I("X2", "Y", "X1") - I("X2", "Z"),
        I(("X1", "X2"), "Y") - I(("X1", "X2"), "Z"),
    )


# --- uniform front end ----------------------------------------------------

@dataclass
class StrategyResult:
    """One evaluated strategy with the metadata written to reports."""

    strategy: str
    region: RateRegion
    branch: str | None = None
    feasible: bool = True
    caps: tuple[float, float, float] | None = None
    params: dict[str, Any] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)


def region_caps(r: RateRegion) -> tuple[float, float, float]:
    """Axis and sum-rate extents of a region (support in (1,0), (0,1), (1,1))."""
    if r.is_empty:
        return (0.0, 0.0, 0.0)
    return (support(r, (1.0, 0.0)), support(r, (0.0, 1.0)), support(r, (1.0, 1.0)))


def evaluate(
    s: GaussianScenario,
    strategy: str,
    q: float | None = None,
    gamma_steps: int = DEFAULT_GAMMA_STEPS,
    outer_steps: int = DEFAULT_OUTER_STEPS,
    r_star_steps: int = DEFAULT_RSTAR_STEPS,
) -> StrategyResult:
    if strategy == "df":
        pents = df_pentagons(s, gamma_steps)
        region = hull_union(pents)
        env = union_envelope(pents)
        return StrategyResult(
            "df",
            region,
            caps=region_caps(region),
            params={"gamma_steps": gamma_steps, "alpha": 1.0, "beta": 1.0},
            extra={"caps_kind": "region_extent", "raw_union_envelope": env.tolist()},
        )
    if strategy == "nf":
        res = nf_region(s)
        return StrategyResult("nf", res.region, branch=res.branch, caps=res.pentagon.caps, extra={"rr_bits": res.rr, "caps_kind": "pentagon"})
    if strategy == "cf":
        if q is None:
            raise ValueError("cf needs the compression noise variance q")
        res = cf_region(s, q, r_star_steps)
        if res.feasible:
            caps = res.pentagons[-1].caps
        else:
            caps = None
        return StrategyResult(
            "cf",
            res.region,
            branch=res.branch,
            feasible=res.feasible,
            caps=caps,
            params={"q": q, "r_star_steps": r_star_steps},
            extra={"caps_kind": "pentagon_at_max_r_star", "compression_rate_bits": res.compression_rate, "r_star_grid": list(res.r_star_grid)},
        )
    if strategy == "outer":
        region = outer_region(s, outer_steps)
        return StrategyResult(
            "outer",
            region,
            caps=region_caps(region),
            params={"outer_steps": outer_steps},
            extra={"caps_kind": "region_extent", "approximation": "grid under-approximation of the parameter union"},
        )
    if strategy == "baseline":
        p = baseline_region(s)
        return StrategyResult("baseline", pentagon_vertices(p), caps=p.caps, extra={"caps_kind": "pentagon"})
    raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
