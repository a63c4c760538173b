"""Order reduction by aggregation.

An aggregation of ``phi`` onto ``m`` labels sums disjoint groups of its
components. Among all aggregations, the one of largest entropy is also the
one closest to ``phi`` in the coupling metric, and the distance is simply
``H(phi) - H(psi_a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .binpack import best_fit_overstuff
from .core import DistLike, Distribution, as_vector, hsum, log_scale, make_distribution, uniform
from .errors import DimensionError, DomainError, InvalidPartition, SizeCapExceeded

DEFAULT_SIZE_CAP = 10**7
AGG_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Aggregation:
    """``psi_a[j]`` is the total of ``phi`` over ``{i : partition[i] == j}``."""

    phi: Distribution
    partition: np.ndarray
    psi_a: Distribution

    @property
    def source_n(self) -> int:
        return self.phi.n

    @property
    def target_m(self) -> int:
        return self.psi_a.n

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(i) for i in np.flatnonzero(self.partition == j)) for j in range(self.target_m))

    def entropy(self, base: float | str | None = None) -> float:
        return hsum(self.psi_a.p) * log_scale(base)

    def distance(self, base: float | str | None = None) -> float:
        """Coupling distance between ``phi`` and its aggregation."""
        return max(hsum(self.phi.p) - hsum(self.psi_a.p), 0.0) * log_scale(base)


def aggregate(phi: DistLike, partition: Sequence[int] | Sequence[Sequence[int]], m: int | None = None) -> Aggregation:
    """Aggregate ``phi`` along ``partition``.

    ``partition`` is either a label per component (``0 <= label < m``) or a
    list of ``m`` disjoint index blocks covering ``range(n)``.
    """
    d = make_distribution(phi)
    n = d.n
    parts = list(partition)
    if parts and not np.isscalar(parts[0]):
        labels = np.full(n, -1, dtype=int)
        for j, block in enumerate(parts):
            for i in block:
                if not 0 <= int(i) < n:
                    raise InvalidPartition(f"index {i} outside 0..{n - 1}")
                if labels[int(i)] >= 0:
                    raise InvalidPartition(f"index {i} appears in more than one block")
                labels[int(i)] = j
        if m is None:
            m = len(parts)
    else:
        labels = np.asarray(parts, dtype=int)
        if labels.shape != (n,):
            raise InvalidPartition(f"need one label per component ({n}), got {labels.size}")
        if m is None:
            m = int(labels.max()) + 1 if labels.size else 0
    if np.any(labels < 0):
        raise InvalidPartition(f"component {int(np.flatnonzero(labels < 0)[0])} is not covered")
    if m < 1 or np.any(labels >= m):
        raise InvalidPartition(f"labels must lie in 0..{m - 1}")
    psi = np.bincount(labels, weights=d.p, minlength=m)
    labels.setflags(write=False)
    return Aggregation(d, labels, Distribution(psi))


def is_aggregation(phi: DistLike, psi: DistLike, tol: float = AGG_TOL, size_cap: int = DEFAULT_SIZE_CAP) -> np.ndarray | None:
    """Labels witnessing that ``psi`` aggregates ``phi``, or None.

    Labels are tried in lexicographic order, so the witness returned is the
    lexicographically smallest one. Every bin must match within ``tol``.
    """
    a, b = as_vector(phi), as_vector(psi)
    n, m = a.size, b.size
    if m > n:
        raise DimensionError(f"cannot aggregate {n} components onto {m}")
    if float(m) ** n > size_cap:
        raise SizeCapExceeded("is_aggregation", float(m) ** n, size_cap)
    xs, caps = a.tolist(), b.tolist()
    loads = [0.0] * m
    cur = [0] * n

    def dfs(i: int) -> bool:
        if i == n:
            return all(abs(c - l) <= tol for c, l in zip(caps, loads))
        x = xs[i]
        for j in range(m):
            prev = loads[j]
            if prev + x > caps[j] + tol:
                continue
            loads[j] = prev + x
            cur[i] = j
            if dfs(i + 1):
                return True
            loads[j] = prev
        return False

    return np.array(cur, dtype=int) if dfs(0) else None


def greedy_reduce(phi: DistLike, m: int, presort: bool = False) -> Aggregation:
    """Best-fit aggregation onto ``m`` equal bins of size ``1/m``.

    With ``presort`` the components are packed largest first (stable order
    among equal values); labels always refer to the caller's ordering.
    """
    d = make_distribution(phi)
    if m < 1:
        raise DomainError(f"m must be at least 1, got {m}")
    if m > d.n:
        raise DimensionError(f"cannot reduce {d.n} components to {m}")
    order = np.argsort(-d.p, kind="stable") if presort else np.arange(d.n)
    res = best_fit_overstuff(d.p[order], uniform(m).p)
    labels = np.empty(d.n, dtype=int)
    labels[order] = res.assignment
    return aggregate(d, labels, m)


def exact_reduce(phi: DistLike, m: int, size_cap: int = DEFAULT_SIZE_CAP) -> Aggregation:
    """Aggregation onto at most ``m`` labels of largest entropy.

    Bin labels are interchangeable, so only restricted-growth label vectors
    (each new block gets the next unused label) are enumerated. Ties keep the
    lexicographically smallest label vector.
    """
    d = make_distribution(phi)
    n = d.n
    if m < 1:
        raise DomainError(f"m must be at least 1, got {m}")
    if m > n:
        raise DimensionError(f"cannot reduce {n} components to {m}")
    if float(m) ** n > size_cap:
        raise SizeCapExceeded("exact_reduce", float(m) ** n, size_cap)
    xs = d.p.tolist()
    loads = [0.0] * m
    cur = [0] * n
    best: list = [-math.inf, None]

    def h(x: float) -> float:
        return -x * math.log(x) if x > 0 else 0.0

    def dfs(i: int, used: int) -> None:
        if i == n:
            e = sum(h(x) for x in loads)
            if e > best[0] + 1e-13:
                best[0], best[1] = e, list(cur)
            return
        x = xs[i]
        for j in range(min(used + 1, m)):
            prev = loads[j]
            loads[j] = prev + x
            cur[i] = j
            dfs(i + 1, max(used, j + 1))
            loads[j] = prev

    dfs(0, 0)
    return aggregate(d, best[1], m)


def theorem9_check(phi: DistLike, capacities: DistLike) -> tuple[float, float, bool]:
    """Best-fit overstuffing distance to the bin sizes against ``m * max(phi) / 4``."""
    a, c = as_vector(phi), as_vector(capacities)
    res = best_fit_overstuff(a, c)
    rho = 0.5 * float(np.abs(res.loads - c).sum())
    bound = 0.25 * c.size * float(a.max())
    return rho, bound, rho <= bound + 1e-12


def lemma2_profile(c1: float, c2: float, b: float, lam: float, base: float | str | None = None) -> float:
    """``G(lam) = b H([lam, 1 - lam]) - H([c1 + lam b, c2 + (1 - lam) b])``."""
    if min(c1, c2, b) <= 0:
        raise DomainError("c1, c2 and b must be positive")
    if abs(c1 + c2 + b - 1.0) > 1e-9:
        raise DomainError(f"c1 + c2 + b must equal 1, got {c1 + c2 + b}")
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    g = b * hsum(np.array([lam, 1 - lam])) - hsum(np.array([c1 + lam * b, c2 + (1 - lam) * b]))
    return g * log_scale(base)
