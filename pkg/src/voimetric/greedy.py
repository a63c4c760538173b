"""Multi-round best-fit upper bound on the coupling distance.

Round ``s`` packs the components of ``phi_s`` into bins sized by ``psi_s``.
Components that fit nowhere (the set ``K_s``) must be split across bins, and
doing so is itself a smaller coupling problem: the leftover room ``alpha_s``
plays the role of the first marginal and the unplaced components the second,
both rescaled by ``c_s = sum(alpha_s)``. Rounds stop when everything fits or a
single component is left over. The backward pass then builds a feasible
conditional matrix for every round and the cost of the top one is the bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .binpack import best_fit_overflow
from .core import (
    ConditionalMatrix,
    DistLike,
    Distribution,
    as_vector,
    conditional_from_joint,
    conditional_entropy,
    hsum,
    log_scale,
)
from .transport import exact_n_by_2

DEFAULT_EXACT_TAIL = 16
LEFTOVER_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RoundRecord:
    """One packing round. Indices are 0-based positions within the round."""

    s: int
    phi_s: Distribution
    psi_s: Distribution
    assignments: tuple[tuple[int, ...], ...]
    K: tuple[int, ...]
    alpha: np.ndarray
    c: float
    V: float
    U: float
    P: ConditionalMatrix
    Q: ConditionalMatrix
    method: Literal["best_fit", "exact"] = "best_fit"

    @property
    def n_s(self) -> int:
        return self.phi_s.n

    @property
    def m_s(self) -> int:
        return self.psi_s.n


@dataclass(frozen=True, eq=False)
class GreedyMmiTrace:
    """Bound and construction.

    ``rounds`` describe the run on the internal problem: ``psi`` sorted in
    decreasing order with zero components removed, and with the arguments
    exchanged when ``swapped`` is set. ``P`` always refers to the caller's
    ``phi`` and ``psi``.
    """

    rounds: list[RoundRecord]
    V_bound: float
    U_bound: float
    d_bound: float
    P: ConditionalMatrix
    swapped: bool = False
    psi_order: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))


def _unit_rows(assign: np.ndarray, m: int) -> np.ndarray:
    P = np.zeros((assign.size, m))
    placed = assign >= 0
    P[np.flatnonzero(placed), assign[placed]] = 1.0
    return P


def _bins(assign: np.ndarray, m: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(i) for i in np.flatnonzero(assign == j)) for j in range(m))


def _run(phi: np.ndarray, psi: np.ndarray, exact_tail: int) -> list[dict]:
    """Forward rounds and backward pass on ``n >= m`` with ``psi > 0``. Nats."""
    rounds: list[dict] = []
    a, b = phi, psi
    while True:
        m = b.size
        r: dict = {"phi": a, "psi": b}
        rounds.append(r)
        if m == 2 and a.size <= exact_tail:
            v, P = exact_n_by_2(a, b)
            unit = np.isclose(P.rows.max(axis=1), 1.0, rtol=0, atol=1e-12)
            assign = np.where(unit, P.rows.argmax(axis=1), -1)
            K = np.flatnonzero(~unit)
            alpha = np.maximum(b - (a[unit][:, None] * P.rows[unit]).sum(axis=0), 0.0)
            r.update(method="exact", assign=assign, K=K, alpha=alpha, c=float(alpha.sum()), V=v, P=P.rows)
            break
        res = best_fit_overflow(a, b)
        assign = res.assignment
        K = np.array(res.overflow, dtype=int)
        alpha = res.slack
        c = float(alpha.sum())
        r.update(method="best_fit", assign=assign, K=K, alpha=alpha, c=c)
        if K.size == 0:
            r.update(V=0.0, P=_unit_rows(assign, m))
            break
        if K.size == 1:
            leftover = float(a[K[0]])
            assert abs(leftover - c) <= LEFTOVER_TOL, (leftover, c)
            v_row = alpha / c
            P = _unit_rows(assign, m)
            P[K[0]] = v_row
            r.update(V=c * hsum(v_row), P=P)
            break
        a, b = alpha / c, a[K] / a[K].sum()
        a = a / a.sum()

    # backward pass
    below_Q = None
    below_U = 0.0
    for r in reversed(rounds):
        if "P" not in r:
            P = _unit_rows(r["assign"], r["psi"].size)
            P[r["K"]] = below_Q
            r["P"] = P
            r["V"] = r["c"] * below_U
        r["U"] = r["V"] + hsum(r["phi"]) - hsum(r["psi"])
        joint = r["phi"][:, None] * ConditionalMatrix(r["P"]).rows
        r["Q"] = conditional_from_joint(joint / joint.sum(), "reverse").rows
        below_Q, below_U = r["Q"], r["U"]
    return rounds


def greedy_metric_bound(
    phi: DistLike,
    psi: DistLike,
    exact_tail: int = DEFAULT_EXACT_TAIL,
    base: float | str | None = None,
) -> GreedyMmiTrace:
    """Upper bound ``d_bound = V_bound + U_bound`` on the coupling distance.

    ``V_bound`` is the exact cost ``J_phi(P)`` of the returned matrix ``P``.
    Any round with two bins and at most ``exact_tail`` components is solved
    exactly instead of by best fit (``exact_tail=0`` disables this).
    """
    a, b = as_vector(phi), as_vector(psi)
    if a.size < b.size:
        inner = greedy_metric_bound(b, a, exact_tail=exact_tail, base=base)
        joint = b[:, None] * inner.P.rows
        P = conditional_from_joint(joint, "reverse")
        return GreedyMmiTrace(
            rounds=inner.rounds,
            V_bound=inner.U_bound,
            U_bound=inner.V_bound,
            d_bound=inner.d_bound,
            P=P,
            swapped=True,
            psi_order=inner.psi_order,
        )

    keep = np.flatnonzero(b > 0)
    order = keep[np.argsort(-b[keep], kind="stable")]
    bs = b[order] / b[order].sum()
    raw = _run(a, bs, exact_tail)

    scale = log_scale(base)
    rounds = [
        RoundRecord(
            s=k + 1,
            phi_s=Distribution(r["phi"]),
            psi_s=Distribution(r["psi"]),
            assignments=_bins(r["assign"], r["psi"].size),
            K=tuple(int(i) for i in r["K"]),
            alpha=r["alpha"],
            c=r["c"],
            V=r["V"] * scale,
            U=r["U"] * scale,
            P=ConditionalMatrix(r["P"]),
            Q=ConditionalMatrix(r["Q"], "reverse"),
            method=r["method"],
        )
        for k, r in enumerate(raw)
    ]
    P = np.zeros((a.size, b.size))
    P[:, order] = raw[0]["P"]
    Pm = ConditionalMatrix(P)
    v = conditional_entropy(a, Pm)
    u = v + hsum(a) - hsum(b)
    return GreedyMmiTrace(
        rounds=rounds,
        V_bound=v * scale,
        U_bound=u * scale,
        d_bound=(v + u) * scale,
        P=Pm,
        psi_order=order,
    )
