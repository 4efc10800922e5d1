"""Planner for markets where every supplier score is at most 1.

Pipeline: clamp outside-option scores up to 1, drop astronomically high ones,
bucket the rest dyadically, solve a small LP surrogate, round it, and expand
the rounded plan into concrete menus.

The LP decides how many suppliers from each bucket ``k`` (scores ``w_k``,
``q_rep``) to show each customer:

    max  sum_k (2/q_rep) * sum_i w_k x_{i,k}
    s.t. sum_k w_k x_{i,k} <= 1                        per customer
         (2/q_rep) * sum_i w_k x_{i,k} <= |S_k|        per bucket
         0 <= x_{i,k} <= |S_k|

Because customers are interchangeable, the optimum can be taken symmetric
(x_{i,k} = x_k for all i), collapsing the LP to a fractional knapsack per
customer: bucket value density is ``2m/q_rep`` per unit of menu-mass budget,
so fill buckets in ascending ``q_rep`` order, each up to
``min(|S_k|, q_rep * |S_k| / (2 m w_k))``, until the unit budget runs out.
Twice the LP optimum upper-bounds the value of any menu set in the clamped
market.

Rounding keeps floors of loads at least 1 and lifts the fractional remainder
of each bucket onto ``ceil(sum)`` customers, balancing lifted counts within
each ``w``-level so that no customer's menu mass grows past a small constant
(``c = 5`` is asserted).  Menu construction then picks, bucket by bucket and
customer by customer, the bucket members shown the fewest times so far, which
caps how often any single supplier is shown.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .buckets import BucketIndex, BucketTable, build_buckets, cap_high_q, clamp_low_q
from .market import MarketInstance, MenuSet

__all__ = [
    "RegimeError",
    "FractionalPlan",
    "IntegralPlan",
    "ShowCounts",
    "solve_lp",
    "lp_upper_bound",
    "round_plan",
    "construct_menus",
    "plan_low_value",
    "MENU_MASS_BUDGET",
    "GUARANTEE_FACTOR",
]

# Asserted ceiling for the per-customer menu-mass budget after rounding
# (property 2 of the rounding guarantees).  The analysis bounds the mass by
# a small constant; 5 gives slack and is checked at run time.
MENU_MASS_BUDGET = 5.0

# Certified fraction of the LP optimum that the constructed menus recover in
# expectation.  Surfaced in diagnostics; deliberately never used as a test
# threshold (the empirical ratio is far better).
GUARANTEE_FACTOR = (1.0 - math.exp(-1.0 / 24.0)) / 8.0


class RegimeError(ValueError):
    """Raised when an instance is outside the planner's score regime."""


@dataclass(frozen=True)
class FractionalPlan:
    """LP solution: per-customer fractional show counts per bucket."""

    bucket_order: tuple[BucketIndex, ...]
    x: np.ndarray  # (m, K) float64
    objective: float


@dataclass(frozen=True)
class IntegralPlan:
    """Rounded plan: integer show counts per (customer, bucket)."""

    bucket_order: tuple[BucketIndex, ...]
    x: np.ndarray  # (m, K) int64


@dataclass(frozen=True)
class ShowCounts:
    """How often each bucket member was placed on a menu, per bucket."""

    bucket_order: tuple[BucketIndex, ...]
    counts: tuple[np.ndarray, ...]  # aligned with BucketTable member tuples


def solve_lp(table: BucketTable, m: int) -> FractionalPlan:
    """Solve the bucket LP exactly via its customer-symmetric reduction.

    Buckets are filled greedily in ascending ``q_rep`` (ties: ascending k1,
    i.e. larger ``w`` first), each to its cap
    ``min(|S_k|, q_rep |S_k| / (2 m w_k))``, until the per-customer unit
    budget is exhausted.  Every customer receives the same fractional row.
    """
    order = tuple(table.order())
    K = len(order)
    x_row = np.zeros(K, dtype=np.float64)
    if m == 0 or K == 0:
        return FractionalPlan(bucket_order=order, x=np.zeros((m, K)), objective=0.0)

    fill_order = sorted(range(K), key=lambda idx: (order[idx].q_rep, order[idx].k1))
    budget = 1.0
    for idx in fill_order:
        if budget <= 0.0:
            break
        k = order[idx]
        size = table.size(k)
        cap = min(float(size), k.q_rep * size / (2.0 * m * k.w))
        take = min(cap, budget / k.w)
        x_row[idx] = take
        budget -= take * k.w

    objective = float(
        sum((2.0 / order[idx].q_rep) * m * order[idx].w * x_row[idx] for idx in range(K))
    )
    x = np.tile(x_row, (m, 1))
    return FractionalPlan(bucket_order=order, x=x, objective=objective)


def lp_upper_bound(plan: FractionalPlan) -> float:
    """Certified menu-value ceiling for the clamped market: twice the LP optimum."""
    return 2.0 * plan.objective


def round_plan(plan: FractionalPlan, table: BucketTable) -> IntegralPlan:
    """Round fractional show counts to integers.

    Entries at least 1 are floored.  Within each ``w``-level, bucket by
    bucket, the fractional mass ``s_k`` of the sub-1 entries is concentrated
    on the ``ceil(s_k)`` customers with the fewest lifts at that level so far.
    Ties go to the customer with the fewest shows across all levels, then to
    the lowest index: any tie-break preserves the rounding guarantees, and
    this one spreads menus over the whole customer population instead of
    stacking every level's lifts onto the first few customers (symmetric LP
    solutions tie everywhere, so the tie-break decides the whole assignment
    and stacking measurably hurts match counts).  The rounded plan loses at
    most half the LP objective, keeps per-customer mass below
    ``MENU_MASS_BUDGET``, and overshoots each bucket capacity by less than
    one supplier's worth of mass.
    """
    order = plan.bucket_order
    m, K = plan.x.shape
    x_int = np.where(plan.x >= 1.0, np.floor(plan.x), 0.0).astype(np.int64)
    load = x_int.sum(axis=1)

    levels = sorted({k.k1 for k in order})
    lifts = {level: np.zeros(m, dtype=np.int64) for level in levels}
    for level in levels:
        y = lifts[level]
        for idx, k in enumerate(order):
            if k.k1 != level:
                continue
            col = plan.x[:, idx]
            eligible = np.flatnonzero(col < 1.0)
            if eligible.size == 0:
                continue
            s_k = float(col[eligible].sum())
            need = min(math.ceil(s_k), eligible.size)
            if need <= 0:
                continue
            ranked = sorted(eligible, key=lambda i: (y[i], load[i], i))
            chosen = ranked[:need]
            x_int[chosen, idx] = 1
            y[chosen] += 1
            load[chosen] += 1
    return IntegralPlan(bucket_order=order, x=x_int)


def _rounded_objective(plan: IntegralPlan, table: BucketTable) -> float:
    """LP objective of a rounded plan with bucket terms capped at |S_k|."""
    total = 0.0
    for idx, k in enumerate(plan.bucket_order):
        shown = float(plan.x[:, idx].sum())
        total += min((2.0 / k.q_rep) * k.w * shown, float(table.size(k)))
    return total


def construct_menus(plan: IntegralPlan, table: BucketTable) -> tuple[list[frozenset[int]], ShowCounts]:
    """Expand integer show counts into menus over the table's supplier indices.

    Buckets are processed in ascending (k1, k2) order and customers in index
    order; customer ``i`` receives the ``x_{i,k}`` members of bucket ``k``
    that have been shown the fewest times so far (ties: lowest supplier
    index).  This balances show counts within each bucket: supplier ``j`` in
    bucket ``k`` ends up shown at most ``ceil(sum_i x_{i,k} / |S_k|)`` times.
    """
    m = plan.x.shape[0]
    menus: list[set[int]] = [set() for _ in range(m)]
    all_counts: list[np.ndarray] = []
    for idx, k in enumerate(plan.bucket_order):
        members = table.buckets[k]
        size = len(members)
        counts = np.zeros(size, dtype=np.int64)
        heap = [(0, pos) for pos in range(size)]
        heapq.heapify(heap)
        for i in range(m):
            need = int(plan.x[i, idx])
            if need == 0:
                continue
            if need > size:
                raise ValueError(
                    f"plan asks for {need} suppliers from a bucket of size {size}"
                )
            taken = [heapq.heappop(heap) for _ in range(need)]
            for count, pos in taken:
                menus[i].add(members[pos])
                counts[pos] = count + 1
                heapq.heappush(heap, (count + 1, pos))
        all_counts.append(counts)
    return (
        [frozenset(menu) for menu in menus],
        ShowCounts(bucket_order=plan.bucket_order, counts=tuple(all_counts)),
    )


def plan_low_value(
    instance: MarketInstance, cap_exponent: int | None = None
) -> tuple[MenuSet, dict]:
    """Full low-value pipeline: preprocess, bucket, solve, round, build menus.

    Requires every supplier score ``v_j <= 1`` (raises ``RegimeError``
    otherwise; route mixed markets through the combined planner).  Menus are
    returned over the *original* supplier indices.  Diagnostics report the LP
    optimum, the value ceiling ``ub`` (twice the LP optimum plus the additive
    slack of the high-q cap; certified for markets with all ``q_j >= 1``),
    which suppliers were clamped or dropped, and the certified recovery
    fraction of the LP optimum.
    """
    for j, s in enumerate(instance.suppliers):
        if s.v > 1.0:
            raise RegimeError(
                f"supplier {j} has v={s.v} > 1; use the combined planner for mixed markets"
            )
    m = instance.m
    if cap_exponent is None:
        cap_exponent = min(max(m, 1), 40)

    clamped_instance, clamped = clamp_low_q(instance)
    capped_instance, survivors = cap_high_q(clamped_instance, cap_exponent)
    dropped = sorted(set(range(instance.n)) - set(survivors))
    slack = m * math.ldexp(1.0, -cap_exponent)

    diagnostics: dict = {
        "regime": "low",
        "clamped": clamped,
        "dropped": dropped,
        "cap_exponent": cap_exponent,
        "guarantee_factor": GUARANTEE_FACTOR,
    }

    if capped_instance is None or m == 0:
        # Nothing plannable: every supplier was dropped, or there is nobody
        # to show menus to.  The cap slack is the whole bound (0 when m = 0).
        diagnostics.update({"lpopt": 0.0, "ub": slack, "rounded_objective": 0.0})
        return MenuSet(menus=tuple(frozenset() for _ in range(m))), diagnostics

    table = build_buckets(capped_instance)
    fplan = solve_lp(table, m)
    iplan = round_plan(fplan, table)
    local_menus, shows = construct_menus(iplan, table)
    menus = tuple(frozenset(survivors[j] for j in menu) for menu in local_menus)

    diagnostics.update(
        {
            "lpopt": fplan.objective,
            "ub": lp_upper_bound(fplan) + slack,
            "rounded_objective": _rounded_objective(iplan, table),
            "n_buckets": len(fplan.bucket_order),
            "guaranteed_floor": GUARANTEE_FACTOR * fplan.objective,
        }
    )
    return MenuSet(menus=menus), diagnostics
