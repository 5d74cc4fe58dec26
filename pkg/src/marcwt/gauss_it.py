"""Jointly Gaussian model of the multiple-access relay wiretap channel.

Every variable is a linear combination of independent zero-mean Gaussian
sources, so the covariance is ``A diag(v) A^T`` and any conditional mutual
information follows from log-determinants of principal submatrices. This is
the independent check for the closed-form region caps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

PIVOT_TOL = 1e-12

BASE_VARIABLES = ("X1", "X2", "Xr", "Yr", "Y", "Z")


class SingularCovarianceError(ValueError):
    """Infinite or undefined mutual information (singular principal submatrix)."""


@dataclass(frozen=True)
class GaussianScenario:
    """Powers and noise variances of the Gaussian channel, in linear units."""

    p1: float
    p2: float
    pr: float
    nr: float
    n1: float
    n2: float

    def __post_init__(self):
        for name in ("p1", "p2", "pr", "nr", "n1", "n2"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValueError(f"{name} must be a finite number, got {value!r}")
        for name in ("p1", "p2", "pr", "nr"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("n1", "n2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")

    @property
    def degraded(self) -> bool:
        return self.n2 >= self.n1


@dataclass(frozen=True)
class DF:
    """Decode-forward superposition: X_r = V1 + V2 with V1 ~ N(0, gamma P_r)."""

    gamma: float
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        for name in ("gamma", "alpha", "beta"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class IndependentFullPower:
    """X1, X2, X_r independent, each at full power."""


@dataclass(frozen=True)
class IndependentWithCompression:
    """Independent full-power inputs plus the relay test channel Yhat = Y_r + Z_Q."""

    q: float

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError(f"compression noise variance q must be > 0, got {self.q}")


InputStructure = Union[DF, IndependentFullPower, IndependentWithCompression]


@dataclass(frozen=True, eq=False)
class JointGaussian:
    """Named zero-mean jointly Gaussian vector."""

    names: tuple[str, ...]
    cov: np.ndarray

    def index(self, names) -> tuple[int, ...]:
        if isinstance(names, str):
            names = (names,)
        lookup = {n: i for i, n in enumerate(self.names)}
        try:
            return tuple(lookup[n] for n in names)
        except KeyError as exc:
            raise KeyError(f"unknown variable {exc.args[0]!r}; have {self.names}") from None

    def var(self, name: str) -> float:
        i = self.index(name)[0]
        return float(self.cov[i, i])

    def covariance(self, a: str, b: str) -> float:
        i, j = self.index((a, b))
        return float(self.cov[i, j])

    def cond_mi(self, A, B, C=()) -> float:
        return gaussian_cond_mi(self.cov, self.index(A), self.index(B), self.index(C) if C else ())


def assemble_covariance(scenario: GaussianScenario, structure: InputStructure) -> JointGaussian:
    """Covariance of (X1, X2, Xr, Yr, Y, Z[, Yhat][, V1, V2]) under ``structure``."""
    s = scenario
    if isinstance(structure, DF):
        g, a, b = structure.gamma, structure.alpha, structure.beta
        sources = ["V1", "V2", "X10", "X20", "Zr", "Z1", "Z2"]
        variances = [g * s.pr, (1 - g) * s.pr, a * s.p1, b * s.p2, s.nr, s.n1, s.n2]
        # A vanished superposition component carries no correlation.
        c1 = math.sqrt((1 - a) * s.p1 / (g * s.pr)) if g * s.pr > 0 else 0.0
        c2 = math.sqrt((1 - b) * s.p2 / ((1 - g) * s.pr)) if (1 - g) * s.pr > 0 else 0.0
        x1 = {"V1": c1, "X10": 1.0}
        x2 = {"V2": c2, "X20": 1.0}
        xr = {"V1": 1.0, "V2": 1.0}
    elif isinstance(structure, (IndependentFullPower, IndependentWithCompression)):
        sources = ["X1", "X2", "Xr", "Zr", "Z1", "Z2"]
        variances = [s.p1, s.p2, s.pr, s.nr, s.n1, s.n2]
        x1, x2, xr = {"X1": 1.0}, {"X2": 1.0}, {"Xr": 1.0}
    else:
        raise TypeError(f"unknown input structure {structure!r}")

    def add(*terms):
        out: dict[str, float] = {}
        for t in terms:
            for k, v in t.items():
                out[k] = out.get(k, 0.0) + v
        return out

    rows = {
        "X1": x1,
        "X2": x2,
        "Xr": xr,
        "Yr": add(x1, x2, {"Zr": 1.0}),
        "Y": add(x1, x2, xr, {"Z1": 1.0}),
        "Z": add(x1, x2, xr, {"Z2": 1.0}),
    }
    names = list(BASE_VARIABLES)
    if isinstance(structure, IndependentWithCompression):
        sources.append("ZQ")
        variances.append(structure.q)
        rows["Yhat"] = add(rows["Yr"], {"ZQ": 1.0})
        names.append("Yhat")
    if isinstance(structure, DF):
        rows["V1"] = {"V1": 1.0}
        rows["V2"] = {"V2": 1.0}
        names += ["V1", "V2"]

    col = {src: j for j, src in enumerate(sources)}
    loading = np.zeros((len(names), len(sources)))
    for i, n in enumerate(names):
        for src, coef in rows[n].items():
            loading[i, col[src]] = coef
    cov = (loading * np.asarray(variances)) @ loading.T
    if np.any(np.diag(cov) < 0):
        raise ArithmeticError("negative variance in assembled covariance")
    cov.setflags(write=False)
    return JointGaussian(tuple(names), cov)


def _cholesky_pivots(sub: np.ndarray) -> np.ndarray:
    """Diagonal pivots of an unpivoted Cholesky factorization (no early exit)."""
    n = sub.shape[0]
    scale = max(float(np.max(np.abs(np.diag(sub)))), 1.0) if n else 1.0
    L = np.zeros_like(sub, dtype=float)
    pivots = np.zeros(n)
    for j in range(n):
        d = sub[j, j] - L[j, :j] @ L[j, :j]
        pivots[j] = d
        if d <= PIVOT_TOL * scale:
            continue
        L[j, j] = math.sqrt(d)
        for i in range(j + 1, n):
            L[i, j] = (sub[i, j] - L[i, :j] @ L[j, :j]) / L[j, j]
    return pivots / scale


def _log2det(cov: np.ndarray, idx: Sequence[int]) -> float:
    if not idx:
        return 0.0
    sub = cov[np.ix_(idx, idx)]
    pivots = _cholesky_pivots(sub)
    if np.any(pivots <= PIVOT_TOL):
        raise SingularCovarianceError("infinite or undefined mutual information: singular covariance block")
    scale = max(float(np.max(np.abs(np.diag(sub)))), 1.0)
    return float(np.sum(np.log2(pivots)) + len(idx) * math.log2(scale))


def _prune(cov: np.ndarray, idx: Sequence[int], base: Sequence[int] = ()) -> list[int]:
    """Drop variables of ``idx`` that are linear functions of ``base`` and earlier kept ones."""
    kept: list[int] = []
    for i in idx:
        trial = list(base) + kept + [i]
        if _cholesky_pivots(cov[np.ix_(trial, trial)])[-1] > PIVOT_TOL:
            kept.append(i)
    return kept


def gaussian_cond_mi(cov: np.ndarray, A: Sequence[int], B: Sequence[int], C: Sequence[int] = ()) -> float:
    """I(A; B | C) in bits for a zero-mean Gaussian vector with covariance ``cov``.

    Uses 0.5 log2(det S_AC det S_BC / (det S_C det S_ABC)). Variables that
    are exact linear functions of the conditioning set (or of their own
    group) change nothing and are dropped first; any remaining singular
    block, such as B being a deterministic function of A given C, raises
    :class:`SingularCovarianceError`.
    """
    cov = np.asarray(cov, dtype=float)
    A, B, C = list(A), list(B), list(C)
    if not A or not B:
        raise ValueError("A and B must be non-empty")
    if set(A) & set(B) or set(A) & set(C) or set(B) & set(C):
        raise ValueError("A, B and C must be pairwise disjoint")
    C = _prune(cov, C)
    A = _prune(cov, A, C)
    B = _prune(cov, B, C)
    if not A or not B:
        return 0.0
    value = 0.5 * (
        _log2det(cov, A + C) + _log2det(cov, B + C) - _log2det(cov, C) - _log2det(cov, A + B + C)
    )
    if value < -1e-9:
        raise ArithmeticError(f"negative mutual information {value}")
    return max(value, 0.0)
