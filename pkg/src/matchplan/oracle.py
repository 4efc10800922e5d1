"""Ground-truth tools: exhaustive menu search and hard instance construction.

``brute_force_optimal`` scores every one of the ``(2^n)^m`` menu profiles
with the exact evaluator's arithmetic and returns the best.  It is
deliberately exhaustive (no pruning, no heuristics) so it can serve as a
trusted reference for the planners and bounds on small instances.  The cost
guard refuses anything beyond ``max_cost`` profiles.

``hardness_instance`` turns a 3-partition input into a market whose optimal
menus reveal a perfect partition, which is why optimal menu planning is
NP-hard in general: the ``a_j`` become supplier scores scaled so that the
customers' outside option is negligible (``v_0 = 1`` after rescaling by
``8m / v_min^3``) and every supplier accepts unconditionally (``q_j = 0``).
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .market import MarketInstance, MenuSet, Supplier

__all__ = ["SizeError", "brute_force_optimal", "hardness_instance"]


class SizeError(ValueError):
    """Raised when a brute-force search would exceed its cost budget."""


def brute_force_optimal(
    instance: MarketInstance, max_cost: int = 10**6
) -> tuple[MenuSet, float]:
    """Exhaustively find the menu profile maximising expected matches.

    Enumerates menus as bitmasks, odometer over customers (customer 0 most
    significant), and keeps the first profile attaining the maximum, i.e.
    the lexicographically smallest optimum.  Raises ``SizeError`` when
    ``(2^n)^m > max_cost``.
    """
    n, m = instance.n, instance.m
    cost = (2**n) ** m
    if cost > max_cost:
        raise SizeError(
            f"search space (2^{n})^{m} = {cost} exceeds the budget {max_cost}"
        )
    v, q = instance.score_arrays()

    # pmat[b, j]: probability a customer shown bitmask-menu b picks supplier j.
    masks = np.arange(2**n, dtype=np.int64)
    member = ((masks[:, None] >> np.arange(n)) & 1).astype(np.float64)
    mass = member @ v
    pmat = member * v[None, :] / (1.0 + mass)[:, None]

    value, profile = _kernels.oracle_scan(pmat, q, m)
    menus = tuple(
        frozenset(int(j) for j in range(n) if (int(b) >> j) & 1) for b in profile
    )
    return MenuSet(menus=menus), float(value)


def hardness_instance(a, B: int) -> MarketInstance:
    """Market encoding of a 3-partition input ``(a, B)``.

    Requires ``len(a) = 3 m'`` values with ``B/4 < a_j < B/2`` and
    ``sum(a) = m' B`` (the standard 3-partition normal form; raises
    ``ValueError`` otherwise; note this does not decide partitionability,
    which is the NP-hard part).  The market has ``m'`` customers and one
    supplier per element with

        v_j = (a_j / sum(a)) * 8 m' / v_min^3,     q_j = 0,

    where ``v_min`` is the smallest pre-scaling score.  The rescaling sets
    the customers' outside option to 1 while keeping it negligible, so
    optimal menus are disjoint and, when a perfect partition exists, balance
    the pre-scaling score mass at ``1/m'`` per menu.
    """
    a = [int(x) for x in a]
    B = int(B)
    if len(a) == 0 or len(a) % 3 != 0:
        raise ValueError(f"need 3m' elements, got {len(a)}")
    if any(x <= 0 for x in a):
        raise ValueError("elements must be positive")
    m_prime = len(a) // 3
    if sum(a) != m_prime * B:
        raise ValueError(f"sum(a) = {sum(a)} must equal m'*B = {m_prime * B}")
    for x in a:
        if not (B / 4 < x < B / 2):
            raise ValueError(f"element {x} outside the strict window (B/4, B/2) = ({B/4}, {B/2})")

    total = float(sum(a))
    pre = [x / total for x in a]
    v_min = min(pre)
    scale = 8.0 * m_prime / v_min**3
    suppliers = tuple(Supplier(v=p * scale, q=0.0) for p in pre)
    return MarketInstance(m=m_prime, suppliers=suppliers)
