"""Allocation-based planning for suppliers at or above the outside option.

When every supplier score satisfies ``v_j >= 1``, near-optimal menus are
singletons: dedicate each customer to one supplier.  Planning reduces to the
integer allocation problem

    max sum_j x_j / (x_j + q_j)   s.t.  sum_j x_j = m,  x_j >= 0 integer,

whose optimum also upper-bounds the value of *any* menu set (each customer
contributes at most one pick).  The objective is separable and concave in
each coordinate, so a greedy ascent on marginal gains solves it exactly; a
classical alternative rounds a water-filling solution of the continuous
relaxation over the prefix of suppliers with the smallest ``q`` and is kept
for reference (it guarantees half the optimum).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .market import MenuSet

__all__ = [
    "Allocation",
    "WaterfillResult",
    "greedy_allocation",
    "waterfill_relaxation",
    "round_relaxation",
    "half_approx_allocation",
    "singleton_menus",
    "allocation_upper_bound",
]

_WATERFILL_TOL = 1e-9
_WATERFILL_MAX_ITER = 200


@dataclass(frozen=True)
class Allocation:
    """Integer customer counts per supplier and the resulting objective."""

    x: np.ndarray
    value: float


@dataclass(frozen=True)
class WaterfillResult:
    """Continuous relaxation solution: loads, objective, and the multiplier."""

    x: np.ndarray
    value: float
    lam: float


def _ratio_value(x: np.ndarray, q: np.ndarray) -> float:
    """Objective ``sum_j x_j/(x_j+q_j)`` with the 0-count convention."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        terms = np.where(x > 0, x / (x + q), 0.0)
    return float(terms.sum())


def _check_q(q) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 1 or q.size == 0:
        raise ValueError("q must be a non-empty one-dimensional vector")
    if np.any(q < 0) or np.any(~np.isfinite(q)):
        raise ValueError("outside-option scores must be finite and >= 0")
    return q


def greedy_allocation(q, m: int) -> Allocation:
    """Exact optimum of the integer allocation problem by marginal gains.

    Assigns the ``m`` customers one at a time to the supplier with the
    largest marginal gain ``(x+1)/(x+1+q) - x/(x+q)`` (ties: lowest index).
    Because each term is concave in its integer argument, the greedy ascent
    is exactly optimal, not just an approximation.
    """
    q = _check_q(q)
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    n = q.size
    x = np.zeros(n, dtype=np.int64)
    if m == 0:
        return Allocation(x=x, value=0.0)

    def gain(j: int, cur: int) -> float:
        nxt = (cur + 1) / (cur + 1 + q[j])
        prev = cur / (cur + q[j]) if cur > 0 else 0.0
        return nxt - prev

    heap = [(-gain(j, 0), j) for j in range(n)]
    heapq.heapify(heap)
    for _ in range(m):
        _, j = heapq.heappop(heap)
        x[j] += 1
        heapq.heappush(heap, (-gain(j, int(x[j])), j))
    return Allocation(x=x, value=_ratio_value(x, q))


def waterfill_relaxation(q, m: int) -> WaterfillResult:
    """Continuous allocation with loads bounded below by 1.

    Solves ``max sum_j x_j/(x_j+q_j)`` subject to ``sum x_j = m`` and
    ``x_j >= 1`` for the given suppliers (callers pass the ascending-``q``
    prefix they care about).  The stationarity condition gives
    ``x_j(lam) = max(1, sqrt(q_j/lam) - q_j)`` with the water level ``lam``
    found by bisection until the loads sum to ``m`` within 1e-9.

    Raises ``ValueError`` when ``m < len(q)`` (the floor makes it infeasible).
    """
    q = _check_q(q)
    i = q.size
    if m < i:
        raise ValueError(f"infeasible: m={m} customers cannot cover {i} loads of at least 1")

    if np.all(q == 0.0):
        # Objective is identically i on the feasible set; return a corner.
        x = np.ones(i, dtype=np.float64)
        x[0] += m - i
        return WaterfillResult(x=x, value=float(i), lam=0.0)

    def loads(lam: float) -> np.ndarray:
        return np.maximum(1.0, np.sqrt(q / lam) - q)

    q_max = float(q.max())
    lo = q_max / (m + float(q.sum())) ** 2
    hi = q_max
    # loads() is nonincreasing in lam; the bracket satisfies
    # sum(loads(lo)) >= m and sum(loads(hi)) = i <= m.
    lam = hi
    x = loads(lam)
    for _ in range(_WATERFILL_MAX_ITER):
        if abs(float(x.sum()) - m) <= _WATERFILL_TOL:
            break
        lam = 0.5 * (lo + hi)
        x = loads(lam)
        if float(x.sum()) > m:
            lo = lam
        else:
            hi = lam
    return WaterfillResult(x=x, value=_ratio_value(x, q), lam=lam)


def round_relaxation(x_cont, m: int) -> np.ndarray:
    """Round a feasible continuous allocation to integers keeping the sum.

    Floors every load except the first and gives the first supplier the
    remainder, so ``x_0`` can only grow.  For inputs with ``x_j >= 1`` the
    rounded objective is at least half the continuous one (a floor of
    ``t >= 1`` is at least ``t/2``, and the first term only improves).
    Integral inputs pass through unchanged.
    """
    x_cont = np.asarray(x_cont, dtype=np.float64)
    if x_cont.size == 0:
        raise ValueError("cannot round an empty allocation")
    if np.any(x_cont < 1.0 - 1e-12):
        raise ValueError("rounding expects loads >= 1")
    x = np.floor(x_cont).astype(np.int64)
    x[0] = m - int(x[1:].sum())
    if x[0] < 1:
        raise ValueError(f"rounding produced x_0={x[0]} < 1; input sums above m={m}")
    return x


def half_approx_allocation(q, m: int) -> Allocation:
    """Prefix water-filling allocation: at least half the exact optimum.

    Sorts suppliers by ascending ``q``, solves the floored continuous
    relaxation on each prefix ``1..min(n, m)``, rounds, and keeps the best
    (ties: smallest prefix).  Kept as the reference construction; the greedy
    solver is exact and is what the planner uses by default.
    """
    q = _check_q(q)
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    n = q.size
    best_x = np.zeros(n, dtype=np.int64)
    best_value = 0.0
    if m == 0:
        return Allocation(x=best_x, value=0.0)

    order = np.argsort(q, kind="stable")
    q_sorted = q[order]
    for i in range(1, min(n, m) + 1):
        relaxed = waterfill_relaxation(q_sorted[:i], m)
        rounded = round_relaxation(relaxed.x, m)
        x_full = np.zeros(n, dtype=np.int64)
        x_full[order[:i]] = rounded
        value = _ratio_value(x_full, q)
        if value > best_value:
            best_value = value
            best_x = x_full
    return Allocation(x=best_x, value=best_value)


def singleton_menus(allocation: Allocation, m: int) -> MenuSet:
    """Expand an allocation into singleton menus, customers in index order.

    The first ``x_0`` customers see ``{0}``, the next ``x_1`` see ``{1}``,
    and so on.  Requires ``sum x_j = m``.
    """
    x = np.asarray(allocation.x, dtype=np.int64)
    if int(x.sum()) != m:
        raise ValueError(f"allocation covers {int(x.sum())} customers, expected {m}")
    menus: list[frozenset[int]] = []
    for j, count in enumerate(x):
        menus.extend([frozenset({j})] * int(count))
    return MenuSet(menus=tuple(menus))


def allocation_upper_bound(q, m: int, kind: str = "integer") -> float:
    """Upper bound on the expected matches of *any* menu set.

    ``kind="integer"`` returns the exact integer allocation optimum (via the
    greedy solver); ``kind="continuous"`` relaxes the loads to nonnegative
    reals, which is weakly larger and cheap at any scale.  Suppliers with
    ``q_j = 0`` contribute 1 each in the continuous bound (any positive load
    saturates them at negligible cost).
    """
    q = _check_q(q)
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if kind == "integer":
        return greedy_allocation(q, m).value
    if kind != "continuous":
        raise ValueError(f"kind must be 'integer' or 'continuous', got {kind!r}")

    if m == 0:
        return 0.0
    positive = q[q > 0.0]
    saturated = float(q.size - positive.size)  # q_j = 0 suppliers
    if positive.size == 0:
        return saturated

    def loads(lam: float) -> np.ndarray:
        return np.maximum(0.0, np.sqrt(positive / lam) - positive)

    q_max = float(positive.max())
    lo = q_max / (m + float(positive.sum())) ** 2
    # Grow the upper bracket until the loads fit under m.  The multiplier that
    # achieves equality is at most (sum sqrt(q)/m)^2 <= (n/m)^2 * q_max, so
    # this doubles O(log(n/m)) times and never overflows.
    hi = q_max
    x = loads(hi)
    while float(x.sum()) > m:
        hi *= 2.0
        x = loads(hi)
    for _ in range(_WATERFILL_MAX_ITER):
        if abs(float(x.sum()) - m) <= _WATERFILL_TOL:
            break
        lam = 0.5 * (lo + hi)
        x = loads(lam)
        if float(x.sum()) > m:
            lo = lam
        else:
            hi = lam
    return saturated + _ratio_value(x, positive)
