"""Regime dispatch: route markets to the low-value or high-value planner.

Mixed markets are handled by a split: suppliers with ``v_j >= 1`` form the
high side, the rest the low side; the first ``ceil(m/2)`` customers are
planned on the high side and the remainder on the low side.  Whichever half
of the split the better plan lives in, this costs at most another factor of
two against the optimum, so the combination stays a constant-factor planner.
If either side has no suppliers, every customer goes to the other side.
"""

from __future__ import annotations

import math

from .highvalue import greedy_allocation, half_approx_allocation, singleton_menus
from .lowvalue import RegimeError, plan_low_value
from .market import MarketInstance, MenuSet

__all__ = ["plan_high_value", "plan_combined", "plan"]


def plan_high_value(instance: MarketInstance, method: str = "greedy") -> tuple[MenuSet, dict]:
    """Singleton-menu planner for markets where every ``v_j >= 1``.

    Solves the customer allocation problem (exactly, with the greedy solver,
    by default; ``method="waterfill"`` uses the half-approximate rounding of
    the continuous relaxation instead) and dedicates customers to suppliers
    in index order.  Raises ``RegimeError`` on suppliers below score 1.
    """
    for j, s in enumerate(instance.suppliers):
        if s.v < 1.0:
            raise RegimeError(
                f"supplier {j} has v={s.v} < 1; use the combined planner for mixed markets"
            )
    _, q = instance.score_arrays()
    if method == "greedy":
        allocation = greedy_allocation(q, instance.m)
    elif method == "waterfill":
        allocation = half_approx_allocation(q, instance.m)
    else:
        raise ValueError(f"method must be 'greedy' or 'waterfill', got {method!r}")
    menus = singleton_menus(allocation, instance.m)
    diagnostics = {
        "regime": "high",
        "method": method,
        "allocation": allocation.x.tolist(),
        "allocation_value": allocation.value,
    }
    return menus, diagnostics


def plan_combined(
    instance: MarketInstance,
    cap_exponent: int | None = None,
    high_method: str = "greedy",
) -> tuple[MenuSet, dict]:
    """Plan an arbitrary market by splitting suppliers at score 1.

    Scores exactly 1 go to the high side.  The first ``ceil(m/2)`` customers
    are planned against the high-side suppliers, the rest against the
    low-side suppliers; a side with no suppliers forfeits its customers to
    the other.  Menus come back over the original supplier indices.
    """
    high = [j for j, s in enumerate(instance.suppliers) if s.v >= 1.0]
    low = [j for j, s in enumerate(instance.suppliers) if s.v < 1.0]

    if not high:
        menus, diag = plan_low_value(instance, cap_exponent=cap_exponent)
        return menus, diag
    if not low:
        return plan_high_value(instance, method=high_method)

    m = instance.m
    m_high = math.ceil(m / 2)
    m_low = m - m_high

    high_sub = MarketInstance(m=m_high, suppliers=tuple(instance.suppliers[j] for j in high))
    high_menus, high_diag = plan_high_value(high_sub, method=high_method)
    menus = [frozenset(high[j] for j in menu) for menu in high_menus.menus]

    low_diag: dict = {}
    if m_low > 0:
        low_sub = MarketInstance(m=m_low, suppliers=tuple(instance.suppliers[j] for j in low))
        low_menus, low_diag = plan_low_value(low_sub, cap_exponent=cap_exponent)
        menus.extend(frozenset(low[j] for j in menu) for menu in low_menus.menus)

    diagnostics = {
        "regime": "combined",
        "high_suppliers": high,
        "low_suppliers": low,
        "high_customers": m_high,
        "low_customers": m_low,
        "high": high_diag,
        "low": low_diag,
    }
    return MenuSet(menus=tuple(menus)), diagnostics


def plan(
    instance: MarketInstance,
    regime: str = "auto",
    cap_exponent: int | None = None,
    high_method: str = "greedy",
) -> tuple[MenuSet, dict]:
    """Plan menus under an explicit regime, or split automatically.

    ``regime="low"`` / ``"high"`` force the corresponding planner and raise
    ``RegimeError`` when the instance violates its score precondition;
    ``"auto"`` always succeeds via the combined split.
    """
    if regime == "low":
        return plan_low_value(instance, cap_exponent=cap_exponent)
    if regime == "high":
        return plan_high_value(instance, method=high_method)
    if regime == "auto":
        return plan_combined(instance, cap_exponent=cap_exponent, high_method=high_method)
    raise ValueError(f"regime must be 'low', 'high', or 'auto', got {regime!r}")
