"""Probability vectors, couplings, conditional matrices and the entropy
identities the rest of the package is built on.

All entropies are in nats unless a ``base`` is given. Functions accept either
the typed wrappers defined here or plain array-likes; plain inputs are
validated through :func:`make_distribution`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    EmptyInput,
    NegativeComponent,
    NotNormalized,
    ValidationError,
)

NEG_TOL = 1e-12
SUM_TOL = 1e-6
ROW_TOL = 1e-9

LOG_BASES = {"e": math.e, "2": 2.0, "10": 10.0}

Orientation = Literal["forward", "reverse"]


def log_scale(base: float | str | None) -> float:
    """Factor converting nats to ``base`` units."""
    if base is None:
        return 1.0
    if isinstance(base, str):
        if base not in LOG_BASES:
            raise DomainError(f"unknown log base {base!r}; expected one of {sorted(LOG_BASES)}")
        base = LOG_BASES[base]
    if base <= 0 or base == 1:
        raise DomainError(f"log base must be positive and != 1, got {base}")
    return 1.0 / math.log(base)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _clean_nonnegative(a: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{what} contains non-finite values")
    if np.any(a < -NEG_TOL):
        raise NegativeComponent(f"{what} has a component below zero: {a.min():.3g}")
    return np.where(a < 0, 0.0, a)


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability vector on the alphabet ``{0, ..., n-1}``.

    Inputs whose sum is within ``1e-6`` of one are rescaled to unit sum;
    anything further off is rejected.
    """

    p: np.ndarray

    def __post_init__(self):
        a = np.array(self.p, dtype=float).ravel()
        if a.size == 0:
            raise EmptyInput("distribution needs at least one component")
        a = _clean_nonnegative(a, "distribution")
        s = a.sum()
        if abs(s - 1.0) > SUM_TOL:
            raise NotNormalized(f"components sum to {s!r}, not 1")
        object.__setattr__(self, "p", _frozen(a / s))

    @property
    def n(self) -> int:
        return self.p.size

    def __len__(self) -> int:
        return self.p.size

    def __array__(self, dtype=None, copy=None):
        return self.p if dtype is None else self.p.astype(dtype)

    def __repr__(self) -> str:
        return f"Distribution({np.array2string(self.p, precision=6, separator=', ')})"


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """An ``n x m`` coupling matrix ``theta[i, j] = Pr(X=i, Y=j)``."""

    theta: np.ndarray

    def __post_init__(self):
        a = np.array(self.theta, dtype=float)
        if a.ndim != 2 or a.size == 0:
            raise EmptyInput("joint distribution must be a non-empty 2-D array")
        a = _clean_nonnegative(a, "joint distribution")
        s = a.sum()
        if abs(s - 1.0) > SUM_TOL:
            raise NotNormalized(f"joint entries sum to {s!r}, not 1")
        object.__setattr__(self, "theta", _frozen(a / s))

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    @property
    def m(self) -> int:
        return self.theta.shape[1]

    def row_marginal(self) -> Distribution:
        return Distribution(self.theta.sum(axis=1))

    def col_marginal(self) -> Distribution:
        return Distribution(self.theta.sum(axis=0))

    def __array__(self, dtype=None, copy=None):
        return self.theta if dtype is None else self.theta.astype(dtype)


@dataclass(frozen=True, eq=False)
class ConditionalMatrix:
    """A row-stochastic matrix.

    ``forward`` matrices hold the law of Y given X = i in row i (shape n x m);
    ``reverse`` matrices hold the law of X given Y = j (shape m x n).
    """

    rows: np.ndarray
    orientation: Orientation = "forward"

    def __post_init__(self):
        if self.orientation not in ("forward", "reverse"):
            raise ValidationError(f"bad orientation {self.orientation!r}")
        a = np.array(self.rows, dtype=float)
        if a.ndim != 2 or a.size == 0:
            raise EmptyInput("conditional matrix must be a non-empty 2-D array")
        a = _clean_nonnegative(a, "conditional matrix")
        s = a.sum(axis=1)
        bad = np.abs(s - 1.0) > ROW_TOL
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise NotNormalized(f"row {i} sums to {s[i]!r}, not 1")
        object.__setattr__(self, "rows", _frozen(a / s[:, None]))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows.shape

    def __array__(self, dtype=None, copy=None):
        return self.rows if dtype is None else self.rows.astype(dtype)


DistLike = Union[Distribution, Sequence[float], np.ndarray]


def make_distribution(values: DistLike) -> Distribution:
    if isinstance(values, Distribution):
        return values
    return Distribution(values)


def as_vector(x: DistLike) -> np.ndarray:
    """Validated probability vector as a read-only float array."""
    return make_distribution(x).p


def _as_forward(P) -> np.ndarray:
    if isinstance(P, ConditionalMatrix):
        if P.orientation != "forward":
            raise ValidationError("expected a forward-oriented conditional matrix")
        return P.rows
    return ConditionalMatrix(P).rows


def hsum(x: np.ndarray) -> float:
    """Sum of ``-x log x`` over the entries of a nonnegative array, in nats."""
    x = np.asarray(x, dtype=float)
    x = x[x > 0]
    return float(-np.dot(x, np.log(x)))


def point_entropy(r: float, base: float | str | None = None) -> float:
    """``-r log r`` with ``h(0) = 0``."""
    if not (-NEG_TOL <= r <= 1 + NEG_TOL):
        raise DomainError(f"point entropy is defined on [0, 1], got {r}")
    if r <= 0 or r >= 1:
        return 0.0
    return -r * math.log(r) * log_scale(base)


def entropy(x: Distribution | JointDistribution | DistLike, base: float | str | None = None) -> float:
    """Shannon entropy of a distribution or of a joint distribution."""
    if isinstance(x, JointDistribution):
        a = x.theta
    else:
        a = as_vector(x)
    return hsum(a) * log_scale(base)


def total_variation(phi: DistLike, psi: DistLike) -> float:
    a, b = as_vector(phi), as_vector(psi)
    if a.size != b.size:
        raise DimensionMismatch(f"total variation needs equal sizes, got {a.size} and {b.size}")
    return 0.5 * float(np.abs(a - b).sum())


def uniform(m: int) -> Distribution:
    if m < 1:
        raise DomainError(f"uniform distribution needs m >= 1, got {m}")
    return Distribution(np.full(m, 1.0 / m))


def joint_from_conditional(phi: DistLike, P) -> JointDistribution:
    """``Diag(phi) @ P``."""
    a = as_vector(phi)
    rows = _as_forward(P)
    if rows.shape[0] != a.size:
        raise DimensionMismatch(f"P has {rows.shape[0]} rows but phi has {a.size} components")
    return JointDistribution(a[:, None] * rows)


def conditional_from_joint(theta: JointDistribution, orientation: Orientation = "forward") -> ConditionalMatrix:
    """Conditional laws of a coupling.

    A row (or column) of zero mass is replaced by the other marginal, so the
    result is always stochastic.
    """
    if not isinstance(theta, JointDistribution):
        theta = JointDistribution(theta)
    t = theta.theta if orientation == "forward" else theta.theta.T
    mass = t.sum(axis=1)
    other = t.sum(axis=0)
    out = np.empty_like(t)
    pos = mass > 0
    out[pos] = t[pos] / mass[pos, None]
    out[~pos] = other / other.sum()
    return ConditionalMatrix(out, orientation)


def reverse_conditional(phi: DistLike, P) -> ConditionalMatrix:
    """``Q = Diag(psi)^-1 P^T Diag(phi)`` with ``psi = phi P``."""
    return conditional_from_joint(joint_from_conditional(phi, P), "reverse")


def conditional_entropy(phi: DistLike, P, base: float | str | None = None) -> float:
    """``sum_i phi_i H(p_i)``, the entropy of Y given X."""
    a = as_vector(phi)
    rows = P.rows if isinstance(P, ConditionalMatrix) else ConditionalMatrix(P).rows
    if rows.shape[0] != a.size:
        raise DimensionMismatch(f"P has {rows.shape[0]} rows but phi has {a.size} components")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(rows > 0, -rows * np.log(rows), 0.0)
    return float(a @ terms.sum(axis=1)) * log_scale(base)


def mutual_information(theta: JointDistribution, base: float | str | None = None) -> float:
    if not isinstance(theta, JointDistribution):
        theta = JointDistribution(theta)
    t = theta.theta
    nats = hsum(t.sum(axis=1)) + hsum(t.sum(axis=0)) - hsum(t)
    return nats * log_scale(base)
