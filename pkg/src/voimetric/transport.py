"""Exact minimum-entropy couplings for small alphabets.

The coupling problem is: among all joint distributions with marginals
``phi`` and ``psi`` find one of least entropy. Joint entropy is concave, so
the minimum sits at a vertex of the transportation polytope, and a vertex has
a forest as its support. Two exact routes exploit that:

* :func:`vertex_joints` lists every vertex by repeatedly saturating a single
  cell (exhausting a row or a column), memoised on the residual state.
* :func:`exact_metric` searches over conditional matrices: every row is
  either sent whole to one column, or is one of at most ``m - 1`` split rows
  that share the leftover column deficits. The split rows form a strictly
  smaller problem of the same kind.

Both are exponential. The size cap is expressed as the number of spanning
trees of ``K_{n,m}``, ``n**(m-1) * m**(n-1)``, which bounds the vertex count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ConditionalMatrix,
    DistLike,
    JointDistribution,
    as_vector,
    hsum,
    log_scale,
)
from .errors import DimensionError, DomainError, SizeCapExceeded

DEFAULT_SIZE_CAP = 10**7
TOL = 1e-12
DEDUP_TOL = 1e-10


def tree_count(n: int, m: int) -> int:
    """Number of spanning trees of the complete bipartite graph ``K_{n,m}``."""
    return n ** (m - 1) * m ** (n - 1)


def _check_cap(what: str, n: int, m: int, size_cap: int) -> None:
    count = tree_count(n, m)
    if count > size_cap:
        raise SizeCapExceeded(what, count, size_cap)


@dataclass(frozen=True, eq=False)
class MetricResult:
    """Exact coupling quantities between ``phi`` (size n) and ``psi`` (size m).

    ``W`` is the least joint entropy, ``V_phi_psi`` the least entropy of Y
    given X, ``V_psi_phi`` the matching entropy of X given Y and
    ``d = V_phi_psi + V_psi_phi``.
    """

    W: float
    V_phi_psi: float
    V_psi_phi: float
    d: float
    argmin_joint: JointDistribution
    argmin_P: ConditionalMatrix


# -- vertex enumeration ------------------------------------------------------


def vertex_joints(phi: DistLike, psi: DistLike, size_cap: int = DEFAULT_SIZE_CAP) -> list[JointDistribution]:
    """Every vertex of ``{theta >= 0 : theta 1 = phi, 1^T theta = psi}``.

    Duplicates (entrywise within 1e-10) are removed; the order is the
    deterministic discovery order of the search.
    """
    a, b = as_vector(phi), as_vector(psi)
    n, m = a.size, b.size
    _check_cap("vertex_joints", n, m, size_cap)

    memo: dict[tuple, list[tuple]] = {}

    def key(v: tuple) -> tuple:
        return tuple(None if x is None else round(x, 12) for x in v)

    def rec(rows: tuple, cols: tuple) -> list[tuple]:
        k = (key(rows), key(cols))
        if k in memo:
            return memo[k]
        live_r = [i for i, r in enumerate(rows) if r is not None]
        live_c = [j for j, c in enumerate(cols) if c is not None]
        if not live_r or not live_c:
            leftover = sum(rows[i] for i in live_r) + sum(cols[j] for j in live_c)
            memo[k] = [()] if leftover <= 1e-9 else []
            return memo[k]
        found: dict[tuple, None] = {}
        for i in live_r:
            for j in live_c:
                r, c = rows[i], cols[j]
                nr, nc = list(rows), list(cols)
                if r <= c + TOL:
                    val = r
                    nr[i] = None
                    nc[j] = max(c - r, 0.0)
                else:
                    val = c
                    nc[j] = None
                    nr[i] = r - c
                for tail in rec(tuple(nr), tuple(nc)):
                    cells = tail + ((i, j, val),) if val > 0 else tail
                    found[tuple(sorted(cells))] = None
        memo[k] = list(found)
        return memo[k]

    out: list[np.ndarray] = []
    for cells in rec(tuple(a.tolist()), tuple(b.tolist())):
        t = np.zeros((n, m))
        for i, j, v in cells:
            t[i, j] = v
        if any(np.max(np.abs(t - u)) <= DEDUP_TOL for u in out):
            continue
        out.append(t)
    return [JointDistribution(t) for t in out]


# -- exact conditional-entropy minimisation ------------------------------------


def _forward_from_reverse(phi: list[float], psi: list[float], Q: np.ndarray) -> np.ndarray:
    # Q is m x n (law of X given Y); returns the n x m law of Y given X
    joint = Q.T * np.asarray(psi)[None, :]
    mass = joint.sum(axis=1)
    P = np.empty_like(joint)
    pos = mass > 0
    P[pos] = joint[pos] / mass[pos, None]
    P[~pos] = np.asarray(psi) / sum(psi)
    return P


def _min_conditional(phi: list[float], psi: list[float]) -> tuple[float, np.ndarray]:
    """Least ``sum_i phi_i H(p_i)`` subject to ``phi P = psi``, in nats.

    Returns the value and a minimising ``P``. Ties go to the first candidate
    in depth-first order (rows in index order, columns ascending, "split"
    last).
    """
    n, m = len(phi), len(psi)
    if m == 1:
        return 0.0, np.ones((n, 1))
    if n == 1:
        return hsum(np.asarray(psi)), np.asarray([psi], dtype=float)
    if n < m:
        vq, Q = _min_conditional(psi, phi)
        return vq + hsum(np.asarray(psi)) - hsum(np.asarray(phi)), _forward_from_reverse(phi, psi, Q)

    room = list(psi)
    choice = [0] * n
    split: list[int] = []
    best: list = [math.inf, None]

    def leaf() -> None:
        if not split:
            best[0], best[1] = 0.0, (list(choice), (), (), None)
            return
        c = sum(phi[k] for k in split)
        cols = [j for j in range(m) if room[j] > TOL]
        if not cols:
            return
        d = [room[j] for j in cols]
        sd = sum(d)
        v_sub, P_sub = _min_conditional([phi[k] / c for k in split], [x / sd for x in d])
        v = c * v_sub
        if v < best[0] - 1e-12:
            best[0], best[1] = v, (list(choice), tuple(split), tuple(cols), P_sub)

    def dfs(i: int) -> None:
        if best[0] <= 0.0:
            return
        if i == n:
            leaf()
            return
        x = phi[i]
        for j in range(m):
            if x <= room[j] + TOL:
                prev = room[j]
                room[j] = prev - x
                choice[i] = j
                dfs(i + 1)
                room[j] = prev
        if x > 0 and len(split) < m - 1:
            split.append(i)
            choice[i] = -1
            dfs(i + 1)
            split.pop()

    dfs(0)
    assignment, rows, cols, P_sub = best[1]
    P = np.zeros((n, m))
    for i, j in enumerate(assignment):
        if j >= 0:
            P[i, j] = 1.0
    for t, k in enumerate(rows):
        P[k, list(cols)] = P_sub[t]
    return best[0], P


def exact_metric(
    phi: DistLike,
    psi: DistLike,
    size_cap: int = DEFAULT_SIZE_CAP,
    base: float | str | None = None,
) -> MetricResult:
    """Exact ``W``, ``V`` and ``d`` by exhaustive search."""
    a, b = as_vector(phi), as_vector(psi)
    _check_cap("exact_metric", a.size, b.size, size_cap)
    _, P = _min_conditional(a.tolist(), b.tolist())
    Pm = ConditionalMatrix(P)
    joint = JointDistribution(a[:, None] * Pm.rows)
    ha, hb = hsum(a), hsum(b)
    v = max(float(a @ np.array([hsum(r) for r in Pm.rows])), 0.0)
    v_rev = max(v + ha - hb, 0.0)
    s = log_scale(base)
    return MetricResult(
        W=(v + ha) * s,
        V_phi_psi=v * s,
        V_psi_phi=v_rev * s,
        d=(v + v_rev) * s,
        argmin_joint=joint,
        argmin_P=Pm,
    )


# -- closed forms --------------------------------------------------------------


def _h(x: float) -> float:
    return -x * math.log(x) if x > 0 else 0.0


def f_u(u: float, x: float, base: float | str | None = None) -> float:
    """Cost ``x * H([u/x, 1 - u/x])`` of splitting mass ``x`` as ``u, x - u``.

    Strictly increasing in ``x`` for fixed ``u``.
    """
    if not (0 < u < x):
        raise DomainError(f"f_u needs 0 < u < x, got u={u}, x={x}")
    return (-_h(x) + _h(x - u) + _h(u)) * log_scale(base)


def _row_cost(phi: np.ndarray, P: np.ndarray) -> float:
    return float(sum(p * hsum(r) for p, r in zip(phi, P)))


def closed_form_2x2(phi: DistLike, psi: DistLike) -> tuple[float, ConditionalMatrix]:
    """Least conditional entropy of Y given X for two 2-point distributions.

    Both vectors are sorted ascending internally; the returned ``P`` is in
    the caller's original ordering. Returns ``(V, P)`` with ``V`` in nats.
    """
    a, b = as_vector(phi), as_vector(psi)
    if a.size != 2 or b.size != 2:
        raise DimensionError(f"closed_form_2x2 needs two 2-point distributions, got sizes {a.size}, {b.size}")
    pa = np.argsort(a, kind="stable")
    pb = np.argsort(b, kind="stable")
    s1, s2 = a[pa]
    t1, t2 = b[pb]

    if abs(s1 - t1) <= TOL:
        Ps = np.eye(2)
    elif t1 < s1 < s2 < t2:
        r = t1 / s1
        Ps = np.array([[r, 1 - r], [0.0, 1.0]])
    elif s1 < t1 < t2 < s2:
        r = t2 / s2
        Ps = np.array([[1.0, 0.0], [1 - r, r]])
    else:
        Ps = _cheapest_2x2_vertex(np.array([s1, s2]), np.array([t1, t2]))

    P = np.empty((2, 2))
    P[np.ix_(pa, pb)] = Ps
    Pm = ConditionalMatrix(P)
    return _row_cost(a, Pm.rows), Pm


def _cheapest_2x2_vertex(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    # the four matrices with one zero entry; keep feasible ones, return the cheapest
    s1, s2 = s
    t1, t2 = t
    cands = []
    if s2 > 0:
        cands.append([[0.0, 1.0], [t1 / s2, 1 - t1 / s2]])
        cands.append([[1.0, 0.0], [1 - t2 / s2, t2 / s2]])
    if s1 > 0:
        cands.append([[t1 / s1, 1 - t1 / s1], [0.0, 1.0]])
        cands.append([[1 - t2 / s1, t2 / s1], [1.0, 0.0]])
    best, best_cost = None, math.inf
    for c in cands:
        P = np.array(c)
        if P.min() < -TOL or P.max() > 1 + TOL:
            continue
        P = np.clip(P, 0.0, 1.0)
        if np.abs(s @ P - t).max() > 1e-9:
            continue
        cost = _row_cost(s, P)
        if cost < best_cost - 1e-15:
            best, best_cost = P, cost
    return best


def exact_n_by_2(phi: DistLike, psi: DistLike, size_cap: int = DEFAULT_SIZE_CAP) -> tuple[float, ConditionalMatrix]:
    """Least conditional entropy when ``psi`` has two points. ``(V, P)``, nats.

    If ``psi`` is an aggregation of ``phi`` the answer is 0. Otherwise an
    optimal two-bin packing is computed; when the smallest item sits in the
    overfull bin, splitting just that item is optimal. In the remaining case
    every matrix with a single split row is tried.
    """
    from .binpack import exact_pack
    from .reduction import is_aggregation

    a, b = as_vector(phi), as_vector(psi)
    n = a.size
    if b.size != 2:
        raise DimensionError(f"exact_n_by_2 needs |psi| = 2, got {b.size}")
    if 2.0**n > size_cap:
        raise SizeCapExceeded("exact_n_by_2", 2.0**n, size_cap)

    P = np.zeros((n, 2))
    if b.min() <= 0:
        P[:, int(np.argmax(b))] = 1.0
        return 0.0, ConditionalMatrix(P)

    pos = np.flatnonzero(a > 0)
    P[a <= 0, 0] = 1.0
    items = a[pos]

    witness = is_aggregation(items, b, tol=TOL, size_cap=size_cap) if items.size >= 2 else None
    if witness is not None:
        P[pos, witness] = 1.0
        return 0.0, ConditionalMatrix(P)

    packing = exact_pack(items, b, size_cap=size_cap)
    resid = packing.residual
    over = int(np.argmin(resid))
    under = 1 - over
    c = float(resid[under])
    order = np.argsort(-items, kind="stable")
    smallest = int(order[-1])

    if packing.assignment[smallest] == over:
        x = float(items[smallest])
        for t, j in enumerate(packing.assignment):
            P[pos[t], j] = 1.0
        row = np.zeros(2)
        row[under] = c / x
        row[over] = (x - c) / x
        P[pos[smallest]] = row
        return f_u(c, x), ConditionalMatrix(P)

    v, k, mask, u1 = _single_split_search(items, float(b[0]))
    others = [t for t in range(items.size) if t != k]
    for bit, t in enumerate(others):
        P[pos[t], 0 if (mask >> bit) & 1 else 1] = 1.0
    x = float(items[k])
    P[pos[k]] = [u1 / x, (x - u1) / x]
    return v, ConditionalMatrix(P)


def _single_split_search(items: np.ndarray, cap0: float) -> tuple[float, int, int, float]:
    """Best matrix with exactly one split row, by enumeration.

    For each candidate split row ``k`` and each subset of the other items
    sent whole to column 0, the split row must supply ``u1 = cap0 - subset``
    to column 0 and the rest to column 1; its cost is ``f_{u1}(x_k)``.
    """
    best = (math.inf, -1, 0, 0.0)
    for k, x in enumerate(items.tolist()):
        sums = np.zeros(1)
        for t, y in enumerate(items.tolist()):
            if t != k:
                sums = np.concatenate([sums, sums + y])
        u = cap0 - sums
        ok = (u > TOL) & (u < x - TOL)
        if not ok.any():
            continue
        uu = np.where(ok, u, x / 2)
        w = x - uu
        cost = x * math.log(x) - w * np.log(w) - uu * np.log(uu)
        cost = np.where(ok, cost, np.inf)
        idx = int(np.argmin(cost))
        if cost[idx] < best[0] - 1e-12:
            best = (float(cost[idx]), k, idx, float(u[idx]))
    if best[1] < 0:
        raise DomainError("no single-split matrix is feasible")
    return best
