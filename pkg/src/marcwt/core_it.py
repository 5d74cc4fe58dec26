"""Exact information measures over finite joint distributions.

All quantities are in bits. Distributions are dense numpy tensors with one
axis per named variable; conditional distributions (channels, encoders) are
kept separately as :class:`ConditionalPmf` and multiplied together with
:func:`compose`.
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

MAX_ENTRIES = 10**7
SUM_TOL = 1e-12
ZERO_PROB = 1e-15

Names = Union[str, Iterable[str]]


class PmfError(ValueError):
    """Raised for malformed distributions or invalid variable references."""


def _as_names(names: Names | None) -> tuple[str, ...]:
    if names is None:
        return ()
    if isinstance(names, str):
        return (names,)
    return tuple(names)


def _check_variables(variables) -> tuple[tuple[str, int], ...]:
    out = []
    for item in variables:
        name, size = item
        if not isinstance(name, str) or not name:
            raise PmfError(f"variable name must be a non-empty string, got {name!r}")
        if int(size) != size or size < 1:
            raise PmfError(f"alphabet size of {name!r} must be a positive integer, got {size!r}")
        out.append((name, int(size)))
    names = [n for n, _ in out]
    if len(set(names)) != len(names):
        raise PmfError(f"duplicate variable names in {names}")
    if not out:
        raise PmfError("a distribution needs at least one variable")
    n_entries = int(np.prod([s for _, s in out], dtype=object))
    if n_entries > MAX_ENTRIES:
        raise PmfError(f"alphabet product {n_entries} exceeds the cap of {MAX_ENTRIES} entries")
    return tuple(out)


def _as_tensor(probs, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.array(probs, dtype=float)
    n = int(np.prod(shape))
    if arr.size != n:
        raise PmfError(f"expected {n} probabilities for shape {shape}, got {arr.size}")
    arr = arr.reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise PmfError("probabilities must be finite")
    if np.any(arr < 0):
        raise PmfError(f"negative probability {arr.min():.3g}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class JointPmf:
    """A joint pmf over named finite variables.

    ``probs`` may be given flat (lexicographic, last variable fastest) or
    already shaped; it is stored shaped, one axis per variable.
    """

    variables: tuple[tuple[str, int], ...]
    probs: np.ndarray

    def __post_init__(self):
        variables = _check_variables(self.variables)
        probs = _as_tensor(self.probs, tuple(s for _, s in variables))
        total = probs.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise PmfError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "probs", probs)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.variables)

    @property
    def sizes(self) -> dict[str, int]:
        return dict(self.variables)

    @property
    def flat(self) -> np.ndarray:
        return self.probs.reshape(-1)

    def axes(self, names: Names) -> tuple[int, ...]:
        names = _as_names(names)
        index = {n: i for i, n in enumerate(self.names)}
        missing = [n for n in names if n not in index]
        if missing:
            raise PmfError(f"unknown variable(s) {missing}; have {list(self.names)}")
        return tuple(index[n] for n in names)

    def to_dict(self) -> dict:
        return {
            "variables": [{"name": n, "size": s} for n, s in self.variables],
            "probs": self.flat.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "JointPmf":
        variables, probs = _parse_doc(doc)
        if doc.get("given"):
            raise PmfError("joint pmf document must not declare 'given' variables")
        return cls(variables, probs)

    @classmethod
    def point_mass(cls, variables, index: Sequence[int]) -> "JointPmf":
        variables = _check_variables(variables)
        probs = np.zeros(tuple(s for _, s in variables))
        probs[tuple(index)] = 1.0
        return cls(variables, probs)

    @classmethod
    def uniform(cls, variables) -> "JointPmf":
        variables = _check_variables(variables)
        shape = tuple(s for _, s in variables)
        return cls(variables, np.full(shape, 1.0 / np.prod(shape)))


@dataclass(frozen=True, eq=False)
class ConditionalPmf:
    """A stochastic kernel P(outputs | given) stored as a tensor over all its variables.

    For every assignment of the ``given`` variables the entries over the
    remaining variables sum to one.
    """

    variables: tuple[tuple[str, int], ...]
    given: tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self):
        variables = _check_variables(self.variables)
        given = _as_names(self.given)
        names = [n for n, _ in variables]
        unknown = [g for g in given if g not in names]
        if unknown:
            raise PmfError(f"given variable(s) {unknown} not among {names}")
        if len(given) == len(names):
            raise PmfError("a conditional pmf needs at least one output variable")
        probs = _as_tensor(self.probs, tuple(s for _, s in variables))
        out_axes = tuple(i for i, n in enumerate(names) if n not in given)
        sums = probs.sum(axis=out_axes)
        if np.any(np.abs(sums - 1.0) > SUM_TOL):
            worst = float(np.max(np.abs(sums - 1.0)))
            raise PmfError(f"conditional rows must sum to 1 (worst deviation {worst:.3g})")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "given", given)
        object.__setattr__(self, "probs", probs)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.variables)

    @property
    def outputs(self) -> tuple[str, ...]:
        return tuple(n for n in self.names if n not in self.given)

    def to_dict(self) -> dict:
        return {
            "variables": [{"name": n, "size": s} for n, s in self.variables],
            "given": list(self.given),
            "probs": self.probs.reshape(-1).tolist(),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ConditionalPmf":
        variables, probs = _parse_doc(doc)
        return cls(variables, tuple(doc.get("given", ())), probs)

    @classmethod
    def from_function(cls, given, outputs, fn) -> "ConditionalPmf":
        """Deterministic kernel: ``fn(*given_values)`` returns the output tuple."""
        given = _check_variables(given)
        outputs = _check_variables(outputs)
        variables = given + outputs
        probs = np.zeros(tuple(s for _, s in variables))
        for g in np.ndindex(*(s for _, s in given)):
            out = fn(*g)
            if not isinstance(out, tuple):
                out = (out,)
            probs[g + tuple(out)] = 1.0
        return cls(variables, tuple(n for n, _ in given), probs)


def _parse_doc(doc: Mapping):
    try:
        variables = [(v["name"], v["size"]) for v in doc["variables"]]
        probs = doc["probs"]
    except (KeyError, TypeError) as exc:
        raise PmfError(f"pmf document needs 'variables' [{{name, size}}] and 'probs': {exc}") from exc
    return variables, probs


def pmf_from_dict(doc: Mapping) -> JointPmf | ConditionalPmf:
    """Load either kind of distribution from its JSON form."""
    if doc.get("given"):
        return ConditionalPmf.from_dict(doc)
    return JointPmf.from_dict(doc)


def compose(*factors: JointPmf | ConditionalPmf) -> JointPmf:
    """Multiply factors into a joint pmf, left to right.

    Every conditioning variable of a factor must have been introduced by an
    earlier factor, and no variable may be produced twice.
    """
    names: list[str] = []
    sizes: dict[str, int] = {}
    tensor = np.ones(())
    letters = string.ascii_letters
    for k, f in enumerate(factors):
        given = f.given if isinstance(f, ConditionalPmf) else ()
        for g in given:
            if g not in sizes:
                raise PmfError(f"factor {k} conditions on {g!r} before it is introduced")
        for n, s in f.variables:
            if n in sizes:
                if n not in given:
                    raise PmfError(f"variable {n!r} is produced by more than one factor")
                if sizes[n] != s:
                    raise PmfError(f"alphabet size mismatch for {n!r}: {sizes[n]} vs {s}")
        new = [(n, s) for n, s in f.variables if n not in sizes]
        if len(names) + len(new) > len(letters):
            raise PmfError("too many variables to compose")
        out_names = names + [n for n, _ in new]
        sub = {n: letters[i] for i, n in enumerate(out_names)}
        spec = "{},{}->{}".format(
            "".join(sub[n] for n in names),
            "".join(sub[n] for n in f.names),
            "".join(sub[n] for n in out_names),
        )
        tensor = np.einsum(spec, tensor, f.probs)
        names = out_names
        sizes.update(new)
        if tensor.size > MAX_ENTRIES:
            raise PmfError(f"composed alphabet exceeds the cap of {MAX_ENTRIES} entries")
    # Rounding in the factors can leave the product a few ulps off 1.
    tensor = tensor / tensor.sum()
    return JointPmf(tuple((n, sizes[n]) for n in names), tensor)


def marginalize(pmf: JointPmf, keep: Names) -> JointPmf:
    """Marginal of ``pmf`` over ``keep``, in the pmf's own variable order."""
    keep = _as_names(keep)
    if not keep:
        raise PmfError("marginalize needs at least one variable to keep")
    pmf.axes(keep)
    kept = [(n, s) for n, s in pmf.variables if n in keep]
    drop = tuple(i for i, n in enumerate(pmf.names) if n not in keep)
    probs = pmf.probs.sum(axis=drop) if drop else pmf.probs
    return JointPmf(tuple(kept), probs)


def _marginal_entropy(pmf: JointPmf, names: tuple[str, ...]) -> float:
    if not names:
        return 0.0
    axes = set(pmf.axes(names))
    drop = tuple(i for i in range(pmf.probs.ndim) if i not in axes)
    p = pmf.probs.sum(axis=drop) if drop else pmf.probs
    p = p[p > ZERO_PROB]
    return float(-np.sum(p * np.log2(p)))


def entropy(pmf: JointPmf, vars: Names) -> float:
    """Joint Shannon entropy H(vars) in bits."""
    names = _as_names(vars)
    if not names:
        raise PmfError("entropy of an empty variable set is undefined here")
    return max(_marginal_entropy(pmf, tuple(dict.fromkeys(names))), 0.0)


def cond_mutual_info(pmf: JointPmf, A: Names, B: Names, C: Names = ()) -> float:
    """I(A; B | C) in bits, by exact summation.

    >>> pmf = JointPmf.uniform([("X", 2), ("Y", 2)])
    >>> cond_mutual_info(pmf, "X", "Y")
    0.0
    """
    a, b, c = _as_names(A), _as_names(B), _as_names(C)
    _check_disjoint(pmf, a, b, c)
    value = (
        _marginal_entropy(pmf, a + c)
        + _marginal_entropy(pmf, b + c)
        - _marginal_entropy(pmf, c)
        - _marginal_entropy(pmf, a + b + c)
    )
    if -SUM_TOL < value < 0.0:
        value = 0.0
    return value


def _check_disjoint(pmf, a, b, c):
    if not a or not b:
        raise PmfError("mutual information needs non-empty A and B")
    pmf.axes(a + b + c)
    sa, sb, sc = set(a), set(b), set(c)
    overlap = (sa & sb) | (sa & sc) | (sb & sc)
    if overlap or len(sa) != len(a) or len(sb) != len(b) or len(sc) != len(c):
        raise PmfError(f"A, B, C must be pairwise disjoint (overlap: {sorted(overlap)})")


class InfoCache:
    """Memoised entropies of one pmf; cheap repeated I(.;.|.) evaluation."""

    def __init__(self, pmf: JointPmf):
        self.pmf = pmf
        self._h: dict[frozenset, float] = {}

    def H(self, names: tuple[str, ...]) -> float:
        key = frozenset(names)
        if key not in self._h:
            self._h[key] = _marginal_entropy(self.pmf, tuple(sorted(key)))
        return self._h[key]

    def I(self, A: Names, B: Names, C: Names = ()) -> float:
        a, b, c = _as_names(A), _as_names(B), _as_names(C)
        _check_disjoint(self.pmf, a, b, c)
        value = self.H(a + c) + self.H(b + c) - self.H(c) - self.H(a + b + c)
        if -SUM_TOL < value < 0.0:
            value = 0.0
        return value
