"""Independent oracles and instance generators shared across the test suite.

Everything here recomputes model quantities from first principles, on purpose
avoiding the package's own decompositions: expected matches come from brute
enumeration of the joint customer-choice outcome space, allocation optima
from exhaustive search over all assignments, and the LP-based bound from the
documented preprocessing composition.  Agreement between these and the
library is what the tests certify.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from matchplan import (
    MarketInstance,
    MenuSet,
    Supplier,
    build_buckets,
    clamp_low_q,
    solve_lp,
)


def enumerate_expected_matches(instance: MarketInstance, menu_set: MenuSet) -> float:
    """Expected matches by enumerating every joint customer-choice outcome.

    Each customer independently picks one menu supplier or the outside
    option; for every joint outcome we tally pick counts and add
    sum_j t_j/(t_j+q_j) weighted by the outcome probability.  Exponential in
    m, so callers keep instances tiny.  Deliberately never touches the
    package's per-supplier Poisson-binomial decomposition.
    """
    v = [s.v for s in instance.suppliers]
    q = [s.q for s in instance.suppliers]
    per_customer: list[list[tuple[int | None, float]]] = []
    for menu in menu_set.menus:
        ids = sorted(menu)
        denom = 1.0 + sum(v[j] for j in ids)
        options: list[tuple[int | None, float]] = [(None, 1.0 / denom)]
        options.extend((j, v[j] / denom) for j in ids)
        per_customer.append(options)

    total = 0.0
    for outcome in itertools.product(*per_customer):
        prob = 1.0
        counts = [0] * instance.n
        for pick, p in outcome:
            prob *= p
            if pick is not None:
                counts[pick] += 1
        matched = sum(t / (t + q[j]) for j, t in enumerate(counts) if t > 0)
        total += prob * matched
    return total


def enumerate_all_profiles(instance: MarketInstance) -> list[tuple[MenuSet, float]]:
    """Score every menu profile with the enumeration oracle above."""
    subsets = [
        frozenset(combo)
        for size in range(instance.n + 1)
        for combo in itertools.combinations(range(instance.n), size)
    ]
    out = []
    for assignment in itertools.product(subsets, repeat=instance.m):
        menu_set = MenuSet(menus=tuple(assignment))
        out.append((menu_set, enumerate_expected_matches(instance, menu_set)))
    return out


def best_allocation_value(q, m: int) -> float:
    """Exhaustive optimum of max sum_j x_j/(x_j+q_j) over sum x_j = m.

    Enumerates allocations as multisets of supplier picks, so each integer
    vector is visited exactly once.  Exponential in m; keep n, m small.
    """
    q = np.asarray(q, dtype=np.float64)
    n = q.size
    best = 0.0
    for combo in itertools.combinations_with_replacement(range(n), m):
        counts = np.bincount(np.array(combo, dtype=np.int64), minlength=n)
        value = sum(
            t / (t + q[j]) for j, t in enumerate(counts) if t > 0
        )
        best = max(best, value)
    return best


def low_value_lp_bound(instance: MarketInstance) -> float:
    """Certified bound 2*lpopt via the documented composition.

    Clamps sub-1 outside options up to 1, buckets the clamped market without
    any high-q cap, solves the bucket LP, and doubles the optimum.  Valid for
    markets where every supplier score is at most 1.
    """
    clamped, _ = clamp_low_q(instance)
    table = build_buckets(clamped)
    plan = solve_lp(table, instance.m)
    return 2.0 * plan.objective


def random_instance(
    rng: np.random.Generator,
    m_max: int = 3,
    n_max: int = 3,
    v_low: float = 0.05,
    v_high: float = 20.0,
    q_zero_frac: float = 0.2,
    q_low: float = 0.05,
    q_high: float = 8.0,
) -> MarketInstance:
    """Random mixed-regime instance with log-uniform scores.

    Supplier scores span both regimes; each outside-option score is 0 with
    probability ``q_zero_frac`` and log-uniform otherwise.
    """
    m = int(rng.integers(0, m_max + 1))
    n = int(rng.integers(1, n_max + 1))
    v = np.exp(rng.uniform(math.log(v_low), math.log(v_high), size=n))
    q = np.exp(rng.uniform(math.log(q_low), math.log(q_high), size=n))
    q[rng.random(n) < q_zero_frac] = 0.0
    suppliers = tuple(Supplier(v=float(vj), q=float(qj)) for vj, qj in zip(v, q))
    return MarketInstance(m=m, suppliers=suppliers)


def random_low_value_instance(
    rng: np.random.Generator,
    m_max: int = 50,
    n_max: int = 50,
    v_low: float = 1e-3,
    q_low: float = 0.2,
    q_high: float = 50.0,
) -> MarketInstance:
    """Random instance confined to the low-value regime (all v <= 1)."""
    m = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(1, n_max + 1))
    v = np.exp(rng.uniform(math.log(v_low), math.log(1.0), size=n))
    q = np.exp(rng.uniform(math.log(q_low), math.log(q_high), size=n))
    suppliers = tuple(Supplier(v=float(vj), q=float(qj)) for vj, qj in zip(v, q))
    return MarketInstance(m=m, suppliers=suppliers)


def random_menus(rng: np.random.Generator, instance: MarketInstance) -> MenuSet:
    """A uniformly random menu per customer (each supplier in or out)."""
    menus = []
    for _ in range(instance.m):
        mask = rng.random(instance.n) < 0.5
        menus.append(frozenset(int(j) for j in np.flatnonzero(mask)))
    return MenuSet(menus=tuple(menus))
