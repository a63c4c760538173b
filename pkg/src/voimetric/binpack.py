"""Best-fit packing into a fixed set of bins of unequal size.

"Best fit" here always means: put the item into the bin that currently has
the most room left. Two variants are provided. In *overflow* mode an item that
does not fit anywhere is set aside; in *overstuff* mode every item is placed
and bins may end up over capacity. :func:`exact_pack` is an exhaustive
minimiser of unused capacity for small instances.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import EmptyInstance, NegativeComponent, OverflowPresent, SizeCapExceeded, ValidationError

OVERFLOW = -1
FIT_TOL = 1e-12
HEAVY_TOL = 1e-12
DEFAULT_SIZE_CAP = 10**7


@dataclass(frozen=True, eq=False)
class PackingInstance:
    items: np.ndarray
    capacities: np.ndarray

    def __post_init__(self):
        items = np.array(self.items, dtype=float).ravel()
        caps = np.array(self.capacities, dtype=float).ravel()
        if items.size == 0 or caps.size == 0:
            raise EmptyInstance("packing needs at least one item and one bin")
        for name, a in (("items", items), ("capacities", caps)):
            if not np.all(np.isfinite(a)):
                raise ValidationError(f"{name} contain non-finite values")
            if np.any(a < 0):
                raise NegativeComponent(f"{name} must be nonnegative")
        items.setflags(write=False)
        caps.setflags(write=False)
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "capacities", caps)

    @property
    def n(self) -> int:
        return self.items.size

    @property
    def m(self) -> int:
        return self.capacities.size


@dataclass(frozen=True, eq=False)
class PackingResult:
    """Outcome of a packing.

    ``assignment[i]`` is the bin of item ``i`` or :data:`OVERFLOW`.
    ``pre_residual[j]`` (overstuff mode only) is the room bin ``j`` had just
    before the item that pushed it over capacity, NaN if it never went over.
    """

    instance: PackingInstance
    assignment: np.ndarray
    mode: Literal["overflow", "overstuff", "exact"]
    pre_residual: np.ndarray | None = None

    @property
    def items(self) -> np.ndarray:
        return self.instance.items

    @property
    def capacities(self) -> np.ndarray:
        return self.instance.capacities

    @property
    def loads(self) -> np.ndarray:
        placed = self.assignment != OVERFLOW
        return np.bincount(self.assignment[placed], weights=self.items[placed], minlength=self.instance.m)

    @property
    def residual(self) -> np.ndarray:
        """Capacity minus load per bin; negative for overstuffed bins."""
        return self.capacities - self.loads

    @property
    def excess(self) -> np.ndarray:
        return np.maximum(self.loads - self.capacities, 0.0)

    @property
    def slack(self) -> np.ndarray:
        return np.maximum(self.capacities - self.loads, 0.0)

    @property
    def overflow(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.assignment == OVERFLOW))

    @property
    def bins(self) -> tuple[tuple[int, ...], ...]:
        """Item indices per bin, each in increasing order."""
        out: list[list[int]] = [[] for _ in range(self.instance.m)]
        for i, j in enumerate(self.assignment):
            if j != OVERFLOW:
                out[j].append(i)
        return tuple(tuple(b) for b in out)


def _heap(caps: np.ndarray) -> list[tuple[float, int]]:
    # (-room, bin): the heap top is the roomiest bin, lowest index on ties
    h = [(-float(c), j) for j, c in enumerate(caps)]
    heapq.heapify(h)
    return h


def best_fit_overflow(items: Sequence[float], capacities: Sequence[float]) -> PackingResult:
    """Pack items in the given order; items that fit nowhere go to overflow.

    An item fits when it is at most the largest remaining room plus ``1e-12``.
    No bin is ever filled beyond its capacity.
    """
    inst = PackingInstance(items, capacities)
    heap = _heap(inst.capacities)
    assign = np.full(inst.n, OVERFLOW, dtype=int)
    for i, x in enumerate(inst.items.tolist()):
        neg_room, j = heap[0]
        if x <= -neg_room + FIT_TOL:
            heapq.heapreplace(heap, (neg_room + x, j))
            assign[i] = j
    return PackingResult(inst, assign, "overflow")


def best_fit_overstuff(items: Sequence[float], capacities: Sequence[float]) -> PackingResult:
    """Pack every item, in order, into the roomiest bin even if it overflows."""
    inst = PackingInstance(items, capacities)
    heap = _heap(inst.capacities)
    assign = np.empty(inst.n, dtype=int)
    pre = np.full(inst.m, np.nan)
    for i, x in enumerate(inst.items.tolist()):
        neg_room, j = heap[0]
        room = -neg_room
        if room - x < -HEAVY_TOL and math.isnan(pre[j]):
            pre[j] = room
        heapq.heapreplace(heap, (neg_room + x, j))
        assign[i] = j
    return PackingResult(inst, assign, "overstuff", pre)


def mismatch(result: PackingResult) -> tuple[float, float, float]:
    """Total mismatch, unused capacity and overstuffing ``(MI, UC, OS)``."""
    if result.overflow:
        raise OverflowPresent(f"{len(result.overflow)} items were not placed")
    diff = result.residual
    uc = float(np.maximum(diff, 0.0).sum())
    os_ = float(-np.minimum(diff, 0.0).sum())
    return float(np.abs(diff).sum()), uc, os_


def exact_pack(items: Sequence[float], capacities: Sequence[float], size_cap: int = DEFAULT_SIZE_CAP) -> PackingResult:
    """Assignment of all items minimising unused capacity.

    Searches assignments in lexicographic order and keeps the first one that
    is strictly better (by more than ``1e-12``) than everything before it, so
    ties resolve to the lexicographically smallest assignment vector.
    """
    inst = PackingInstance(items, capacities)
    n, m = inst.n, inst.m
    count = float(m) ** n
    if count > size_cap:
        raise SizeCapExceeded("exact_pack", count, size_cap)

    xs = inst.items.tolist()
    caps = inst.capacities.tolist()
    # unused capacity = (total capacity - total items) + overstuffing, and
    # overstuffing never decreases as items are added
    gap = sum(caps) - sum(xs)
    loads = [0.0] * m
    cur = [0] * n
    best = [math.inf, None]

    def dfs(i: int, over: float) -> None:
        if gap + over >= best[0] - 1e-12:
            return
        if i == n:
            uc = sum(max(c - l, 0.0) for c, l in zip(caps, loads))
            if uc < best[0] - 1e-12:
                best[0] = uc
                best[1] = list(cur)
            return
        x = xs[i]
        for j in range(m):
            prev = loads[j]
            loads[j] = prev + x
            cur[i] = j
            dfs(i + 1, over + max(loads[j] - caps[j], 0.0) - max(prev - caps[j], 0.0))
            loads[j] = prev

    dfs(0, 0.0)
    return PackingResult(inst, np.array(best[1], dtype=int), "exact")
