"""Secrecy rate regions of the discrete memoryless relay wiretap channel.

A :class:`DmFactorization` bundles the factors of one input distribution
and channel; the ``theorem*`` evaluators turn it into a rate pentagon using
exact mutual informations from :mod:`marcwt.core_it`.

Factor keys by theorem::

    T1   V1, V2, X1 (given V1), X2 (given V2), Xr (given V1, V2), channel
    T2   X1, X2, Xr, channel
    T3   X1, X2, Xr, channel, test_channel (Yhat given Yr, Xr)
    T41  inputs (joint over U, X1, X2, Xr), channel [, wiretap (Z given Y)]

``channel`` is P(Y, Yr, Z | X1, X2, Xr); for T41 it may instead be
P(Y, Yr | X1, X2, Xr) with a separate ``wiretap`` factor.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .core_it import ConditionalPmf, InfoCache, JointPmf, PmfError, compose, pmf_from_dict
from .geometry import RatePentagon, RateRegion, hull_union

THEOREMS = ("T1", "T2", "T3", "T41")
DEGRADED_TV_TOL = 1e-9
MAX_SWEEP_RESOLUTION = 21

INPUTS = ("X1", "X2", "Xr")
OUTPUTS = ("Y", "Yr", "Z")

# key -> (outputs, given); None for given means a plain joint pmf.
_LAYOUT = {
    "T1": {
        "V1": ({"V1"}, None),
        "V2": ({"V2"}, None),
        "X1": ({"X1"}, {"V1"}),
        "X2": ({"X2"}, {"V2"}),
        "Xr": ({"Xr"}, {"V1", "V2"}),
        "channel": (set(OUTPUTS), set(INPUTS)),
    },
    "T2": {
        "X1": ({"X1"}, None),
        "X2": ({"X2"}, None),
        "Xr": ({"Xr"}, None),
        "channel": (set(OUTPUTS), set(INPUTS)),
    },
    "T3": {
        "X1": ({"X1"}, None),
        "X2": ({"X2"}, None),
        "Xr": ({"Xr"}, None),
        "channel": (set(OUTPUTS), set(INPUTS)),
        "test_channel": ({"Yhat"}, {"Yr", "Xr"}),
    },
}
_ORDER = {
    "T1": ("V1", "V2", "X1", "X2", "Xr", "channel"),
    "T2": ("X1", "X2", "Xr", "channel"),
    "T3": ("X1", "X2", "Xr", "channel", "test_channel"),
}


class DmError(ValueError):
    """Malformed factorization, violated theorem precondition, or unsupported sweep."""


class SweepCapabilityError(DmError):
    pass


@dataclass(frozen=True, eq=False)
class DmFactorization:
    theorem: str
    factors: Mapping[str, JointPmf | ConditionalPmf]
    r_star: float | None = None
    _joint: JointPmf | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise DmError(f"theorem must be one of {THEOREMS}, got {self.theorem!r}")
        if self.theorem == "T41":
            joint = _compose_t41(self.factors)
        else:
            _check_layout(self.theorem, self.factors)
            joint = compose(*(self.factors[k] for k in _ORDER[self.theorem]))
        if self.theorem == "T3":
            if self.r_star is None or not self.r_star >= 0:
                raise DmError(f"T3 needs a noise rate r_star >= 0, got {self.r_star!r}")
        object.__setattr__(self, "_joint", joint)

    @property
    def joint(self) -> JointPmf:
        return self._joint

    @classmethod
    def from_dict(cls, doc: Mapping) -> "DmFactorization":
        """Parse the JSON document form; errors carry a JSON-pointer-like path."""
        if not isinstance(doc, Mapping):
            raise DmError("/: factorization document must be an object")
        theorem = doc.get("theorem")
        raw = doc.get("factors")
        if not isinstance(raw, Mapping):
            raise DmError("/factors: missing or not an object")
        factors = {}
        for name, fdoc in raw.items():
            try:
                factors[name] = pmf_from_dict(fdoc)
            except (PmfError, AttributeError) as exc:
                raise DmError(f"/factors/{name}: {exc}") from exc
        return cls(theorem, factors, doc.get("r_star"))


def _check_layout(theorem: str, factors: Mapping):
    layout = _LAYOUT[theorem]
    missing = sorted(set(layout) - set(factors))
    extra = sorted(set(factors) - set(layout))
    if missing or extra:
        raise DmError(f"{theorem} factors: missing {missing}, unexpected {extra}")
    for key, (outs, given) in layout.items():
        f = factors[key]
        if given is None:
            if not isinstance(f, JointPmf) or set(f.names) != outs:
                raise DmError(f"/factors/{key}: expected a pmf over {sorted(outs)}")
        else:
            if not isinstance(f, ConditionalPmf) or set(f.outputs) != outs or set(f.given) != given:
                raise DmError(f"/factors/{key}: expected P({','.join(sorted(outs))} | {','.join(sorted(given))})")


def _compose_t41(factors: Mapping) -> JointPmf:
    keys = set(factors)
    if not {"inputs", "channel"} <= keys or keys - {"inputs", "channel", "wiretap"}:
        raise DmError(f"T41 factors must be inputs, channel [, wiretap]; got {sorted(keys)}")
    inputs, channel = factors["inputs"], factors["channel"]
    if not isinstance(inputs, JointPmf) or set(inputs.names) != {"U", *INPUTS}:
        raise DmError("/factors/inputs: expected a joint pmf over U, X1, X2, Xr")
    if not isinstance(channel, ConditionalPmf) or set(channel.given) != set(INPUTS):
        raise DmError("/factors/channel: expected a channel given X1, X2, Xr")
    chain = [channel]
    if "wiretap" in factors:
        wt = factors["wiretap"]
        if not isinstance(wt, ConditionalPmf) or set(wt.given) != {"Y"} or set(wt.outputs) != {"Z"}:
            raise DmError("/factors/wiretap: expected P(Z | Y)")
        if set(channel.outputs) != {"Y", "Yr"}:
            raise DmError("/factors/channel: with a wiretap factor the channel outputs are Y, Yr")
        chain.append(wt)
    elif set(channel.outputs) != set(OUTPUTS):
        raise DmError("/factors/channel: expected outputs Y, Yr, Z")
    check_degraded(*chain)
    return compose(inputs, *chain)


def check_degraded(*channel: ConditionalPmf) -> float:
    """Verify (X1, X2, Xr, Yr) -> Y -> Z for every input; returns the total variation.

    The check runs under uniform inputs so that every input letter is tested.
    """
    sizes = dict(v for f in channel for v in f.variables)
    uniform = JointPmf.uniform([(n, sizes[n]) for n in INPUTS])
    joint = compose(uniform, *channel)
    axes = {n: i for i, n in enumerate(joint.names)}
    p = joint.probs
    z = axes["Z"]
    p_y_z = p.sum(axis=tuple(i for n, i in axes.items() if n not in ("Y", "Z")), keepdims=True)
    p_y = p_y_z.sum(axis=z, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        z_given_y = np.where(p_y > 0, p_y_z / p_y, 0.0)
    rest = p.sum(axis=z, keepdims=True)
    tv = 0.5 * float(np.abs(p - rest * z_given_y).sum())
    if tv > DEGRADED_TV_TOL:
        raise DmError(
            f"degradedness violated: P(Z | X1,X2,Xr,Yr,Y) differs from P(Z | Y) "
            f"(total variation {tv:.3g} > {DEGRADED_TV_TOL:g})"
        )
    return tv


# --- region evaluators ---------------------------------------------------

def _require(f: DmFactorization, theorem: str):
    if not isinstance(f, DmFactorization) or f.theorem != theorem:
        raise DmError(f"expected a {theorem} factorization")


def theorem1_pentagon(f: DmFactorization) -> RatePentagon:
    """Decode-forward pentagon; caps may be negative (empty region)."""
    _require(f, "T1")
    c = InfoCache(f.joint)
    I = c.I
    vv = ("V1", "V2")
    r1 = min(I("X1", "Yr", ("Xr", "X2") + vv), I(("X1", "Xr"), "Y", ("X2", "V2"))) - I("X1", "Z")
    r2 = min(I("X2", "Yr", ("Xr", "X1") + vv), I(("X2", "Xr"), "Y", ("X1", "V1"))) - I("X2", "Z")
    rs = min(I(("X1", "X2"), "Yr", ("Xr",) + vv), I(("X1", "X2", "Xr"), "Y")) - I(("X1", "X2"), "Z")
    return RatePentagon(r1, r2, rs)


@dataclass(frozen=True)
class BranchResult:
    branch: str
    pentagon: RatePentagon
    rr: float = 0.0
    feasible: bool = True
    extra: dict = field(default_factory=dict)


def _relay_rates(I):
    return I("Xr", "Y"), I("Xr", "Z")


def theorem2_region(f: DmFactorization) -> BranchResult:
    """Noise-forward pentagon on the branch picked by I(Xr;Y) vs I(Xr;Z); ties go to L1."""
    _require(f, "T2")
    I = InfoCache(f.joint).I
    xr_y, xr_z = _relay_rates(I)
    if xr_y >= xr_z:
        rr = min(xr_y, I("Xr", "Z", "X1"), I("Xr", "Z", "X2"))
        p = RatePentagon(
            I("X1", "Y", ("X2", "Xr")) - I(("X1", "Xr"), "Z") + rr,
            I("X2", "Y", ("X1", "Xr")) - I(("X2", "Xr"), "Z") + rr,
            I(("X1", "X2"), "Y", "Xr") - I(("X1", "X2", "Xr"), "Z") + rr,
        )
        return BranchResult("L1", p, rr, extra={"tie": xr_y == xr_z})
    p = RatePentagon(
        I("X1", "Y", ("X2", "Xr")) - I("X1", "Z", "Xr"),
        I("X2", "Y", ("X1", "Xr")) - I("X2", "Z", "Xr"),
        I(("X1", "X2"), "Y", "Xr") - I(("X1", "X2"), "Z", "Xr"),
    )
    return BranchResult("L2", p, xr_y, extra={"tie": False})


def _cf_terms(f: DmFactorization):
    I = InfoCache(f.joint).I
    obs = ("Y", "Yhat")
    xr_y, xr_z = _relay_rates(I)
    return I, obs, xr_y, xr_z, I("Yr", "Yhat", "Xr")


def theorem3_budget(f: DmFactorization) -> tuple[str, float]:
    """Branch and the largest feasible noise rate R* (negative when L3 is infeasible)."""
    _require(f, "T3")
    I, _, xr_y, xr_z, cost = _cf_terms(f)
    if xr_y >= xr_z:
        return "L3", min(I("Xr", "Z", "X1"), I("Xr", "Z", "X2"), xr_y) - cost
    return "L4", 0.0


def theorem3_region(f: DmFactorization, r_star: float | None = None) -> BranchResult:
    """Compress-forward pentagon; infeasible allocations yield feasible=False and no region."""
    _require(f, "T3")
    r_star = f.r_star if r_star is None else r_star
    if r_star < 0:
        raise DmError(f"r_star must be >= 0, got {r_star}")
    I, obs, xr_y, xr_z, cost = _cf_terms(f)
    empty = RatePentagon(-1.0, -1.0, -1.0)
    if xr_y >= xr_z:
        r_r1 = min(I("Xr", "Z", "X1"), I("Xr", "Z", "X2"), xr_y)
        extra = {"r_star_r1": r_r1, "compression_rate": cost, "r_star": r_star}
        if r_r1 - r_star < cost:
            return BranchResult("L3", empty, r_star, False, extra)
        p = RatePentagon(
            I("X1", obs, ("X2", "Xr")) - I(("X1", "Xr"), "Z") + r_star,
            I("X2", obs, ("X1", "Xr")) - I(("X2", "Xr"), "Z") + r_star,
            I(("X1", "X2"), obs, "Xr") - I(("X1", "X2", "Xr"), "Z") + r_star,
        )
        return BranchResult("L3", p, r_star, True, extra)
    extra = {"compression_rate": cost}
    if xr_y < cost:
        return BranchResult("L4", empty, 0.0, False, extra)
    p = RatePentagon(
        I("X1", obs, ("X2", "Xr")) - I("X1", "Z", "Xr"),
        I("X2", obs, ("X1", "Xr")) - I("X2", "Z", "Xr"),
        I(("X1", "X2"), obs, "Xr") - I(("X1", "X2"), "Z", "Xr"),
    )
    return BranchResult("L4", p, 0.0, True, extra)


def theorem3_rstar_sweep(f: DmFactorization, steps: int = 21) -> tuple[RateRegion, list[BranchResult]]:
    """Hull over a uniform R* grid on the feasible interval (single pentagon on L4)."""
    branch, r_max = theorem3_budget(f)
    if branch == "L4":
        res = theorem3_region(f, 0.0)
        return hull_union([res.pentagon] if res.feasible else []), [res]
    if r_max < 0:
        return RateRegion.empty(), [theorem3_region(f, 0.0)]
    grid = np.linspace(0.0, r_max, steps) if steps > 1 else np.array([r_max])
    results = [theorem3_region(f, float(r)) for r in grid]
    return hull_union([r.pentagon for r in results if r.feasible]), results


def theorem41_outer(f: DmFactorization) -> RatePentagon:
    """Degraded-channel outer bound for the supplied joint of U and the inputs."""
    _require(f, "T41")
    I = InfoCache(f.joint).I
    return RatePentagon(
        I(("X1", "Xr"), "Y", ("X2", "U")) - I("X1", "Z", "U"),
        I(("X2", "Xr"), "Y", ("X1", "U")) - I("X2", "Z", "U"),
        I(("X1", "X2", "Xr"), "Y", "U") - I(("X1", "X2"), "Z", "U"),
    )


# --- sweeps ----------------------------------------------------------------

def bernoulli(name: str, p: float) -> JointPmf:
    return JointPmf(((name, 2),), [1.0 - p, p])


def erasure_test_channel(yr_size: int, xr_size: int, eps: float) -> ConditionalPmf:
    """Yhat = Yr with probability 1 - eps, otherwise the extra erasure letter."""
    probs = np.zeros((yr_size, xr_size, yr_size + 1))
    for y in range(yr_size):
        probs[y, :, y] = 1.0 - eps
        probs[y, :, yr_size] += eps
    return ConditionalPmf((("Yr", yr_size), ("Xr", xr_size), ("Yhat", yr_size + 1)), ("Yr", "Xr"), probs)


def _trivial(name: str) -> JointPmf:
    return JointPmf(((name, 1),), [1.0])


def _independent_t1(channel: ConditionalPmf, p1: float, p2: float, pr: float) -> DmFactorization:
    # Trivial V1, V2: each input is drawn independently of the auxiliaries.
    def given_trivial(given, name, p):
        g = tuple((n, 1) for n in given)
        probs = np.array([1.0 - p, p]).reshape((1,) * len(g) + (2,))
        return ConditionalPmf(g + ((name, 2),), tuple(given), probs)

    factors = {
        "V1": _trivial("V1"),
        "V2": _trivial("V2"),
        "X1": given_trivial(("V1",), "X1", p1),
        "X2": given_trivial(("V2",), "X2", p2),
        "Xr": given_trivial(("V1", "V2"), "Xr", pr),
        "channel": channel,
    }
    return DmFactorization("T1", factors)


def sweep_best_region(channel: ConditionalPmf, theorem: str, grid_resolution: int = 11) -> RateRegion:
    """Hull of pentagons over a grid of binary input distributions.

    Inputs are independent Bernoulli(p1), Bernoulli(p2), Bernoulli(pr) with p
    on a uniform grid; the auxiliaries of T1 are trivial. For T3 the relay
    compresses with an erasure test channel whose erasure probability is also
    gridded, and uses the largest feasible R* (caps grow with R*). The result
    is a lower approximation of the union over all distributions.
    """
    if theorem not in ("T1", "T2", "T3"):
        raise DmError(f"sweep supports T1, T2, T3; got {theorem!r}")
    if not 2 <= grid_resolution <= MAX_SWEEP_RESOLUTION:
        raise SweepCapabilityError(f"grid_resolution must be in [2, {MAX_SWEEP_RESOLUTION}]")
    if not isinstance(channel, ConditionalPmf) or set(channel.given) != set(INPUTS):
        raise DmError("channel must be P(Y, Yr, Z | X1, X2, Xr)")
    sizes = dict(channel.variables)
    if any(sizes[n] != 2 for n in INPUTS):
        raise SweepCapabilityError("exhaustive sweeps need binary X1, X2, Xr")
    grid = np.linspace(0.0, 1.0, grid_resolution)
    pentagons = []
    for p1, p2, pr in itertools.product(grid, repeat=3):
        if theorem == "T1":
            pentagons.append(theorem1_pentagon(_independent_t1(channel, p1, p2, pr)))
            continue
        base = {"X1": bernoulli("X1", p1), "X2": bernoulli("X2", p2), "Xr": bernoulli("Xr", pr), "channel": channel}
        if theorem == "T2":
            pentagons.append(theorem2_region(DmFactorization("T2", base)).pentagon)
            continue
        for eps in grid:
            f = DmFactorization("T3", {**base, "test_channel": erasure_test_channel(sizes["Yr"], 2, eps)}, r_star=0.0)
            branch, r_max = theorem3_budget(f)
            res = theorem3_region(f, max(r_max, 0.0) if branch == "L3" else 0.0)
            if res.feasible:
                pentagons.append(res.pentagon)
    return hull_union(pentagons)


def degraded_channel(main: ConditionalPmf, wiretap: ConditionalPmf) -> ConditionalPmf:
    """Cascade P(Y, Yr | X1, X2, Xr) with P(Z | Y) into one P(Y, Yr, Z | X1, X2, Xr)."""
    if set(main.given) != set(INPUTS) or set(main.outputs) != {"Y", "Yr"}:
        raise DmError("main channel must be P(Y, Yr | X1, X2, Xr)")
    if set(wiretap.given) != {"Y"} or set(wiretap.outputs) != {"Z"}:
        raise DmError("wiretap channel must be P(Z | Y)")
    order = INPUTS + ("Y", "Yr")
    m = np.transpose(main.probs, [main.names.index(n) for n in order])
    w = np.transpose(wiretap.probs, [wiretap.names.index(n) for n in ("Y", "Z")])
    probs = np.einsum("abcde,df->abcdef", m, w)
    sizes = dict(main.variables) | dict(wiretap.variables)
    variables = tuple((n, sizes[n]) for n in order + ("Z",))
    return ConditionalPmf(variables, INPUTS, probs)


def _u_kernel(sizes: dict, u_size: int, label: str, t: float) -> ConditionalPmf:
    # Mix of uniform and a one-hot of (label index mod |U|).
    shape = tuple(sizes[n] for n in INPUTS)
    probs = np.full(shape + (u_size,), (1.0 - t) / u_size)
    for x in np.ndindex(*shape):
        k = int(np.ravel_multi_index(x, shape)) if label == "joint" else x[INPUTS.index(label)]
        probs[x + (k % u_size,)] += t
    variables = tuple((n, sizes[n]) for n in INPUTS) + (("U", u_size),)
    return ConditionalPmf(variables, INPUTS, probs)


def outer_sweep(
    inputs: JointPmf,
    channel: ConditionalPmf,
    wiretap: ConditionalPmf | None = None,
    u_sizes=(1, 2, 3, 4),
    steps: int = 5,
) -> RateRegion:
    """Hull of outer pentagons for a fixed input law over a small family of auxiliaries.

    U is drawn from X1, X2, Xr through kernels that blend a uniform law with
    a one-hot label (the joint input index, or one input, modulo |U|); the
    blend weight runs over ``steps`` points in [0, 1]. No cardinality bound
    on U is known, so this is a lower approximation of the union over U.
    """
    if max(u_sizes) > 4 or min(u_sizes) < 1:
        raise SweepCapabilityError("auxiliary cardinality must lie in 1..4")
    if set(inputs.names) != set(INPUTS):
        raise DmError("inputs must be a joint pmf over X1, X2, Xr")
    sizes = inputs.sizes
    pentagons = []
    for u in u_sizes:
        labels = ("joint",) if u == 1 else ("joint",) + INPUTS
        for label in labels:
            for t in np.linspace(0.0, 1.0, steps) if u > 1 else (0.0,):
                joint = compose(inputs, _u_kernel(sizes, u, label, float(t)))
                factors = {"inputs": joint, "channel": channel}
                if wiretap is not None:
                    factors["wiretap"] = wiretap
                pentagons.append(theorem41_outer(DmFactorization("T41", factors)))
    return hull_union(pentagons)
