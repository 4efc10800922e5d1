"""Core model of a two-sided matching market with menu-driven MNL choice.

A market has ``m`` customers and ``n`` suppliers.  Supplier ``j`` carries a
public score ``v_j > 0`` and an outside-option score ``q_j >= 0``; every
customer's own outside option is normalised to score 1.  Matching runs in two
stages:

1. Each customer ``i`` sees a menu ``M_i`` of suppliers and picks supplier
   ``j in M_i`` with probability ``v_j / (1 + sum_{k in M_i} v_k)``, or walks
   away with probability ``1 / (1 + sum_{k in M_i} v_k)``.
2. A supplier picked by ``t`` customers matches one of them with probability
   ``t / (t + q_j)``; a supplier picked by nobody never matches, even when
   ``q_j = 0``.

Because suppliers resolve independently given the pick counts, the expected
number of matches decomposes supplier by supplier; the evaluator module
exploits this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Supplier",
    "MarketInstance",
    "MenuSet",
    "ChoiceDistribution",
    "customer_choice_distribution",
    "supplier_match_probability",
    "validate",
    "instance_to_dict",
    "instance_from_dict",
    "menus_to_dict",
    "menus_from_dict",
]


@dataclass(frozen=True)
class Supplier:
    """One supplier: public score ``v`` and outside-option score ``q``.

    ``v`` must be a positive finite float; ``q`` a nonnegative finite float.
    """

    v: float
    q: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.v) and self.v > 0):
            raise ValueError(f"supplier score v must be finite and > 0, got {self.v!r}")
        if not (math.isfinite(self.q) and self.q >= 0):
            raise ValueError(f"outside-option score q must be finite and >= 0, got {self.q!r}")


@dataclass(frozen=True)
class MarketInstance:
    """An immutable market: ``m`` customers and an ordered supplier list.

    ``m = 0`` is permitted (an empty customer side is useful for degenerate
    planning and oracle edge cases); the supplier list must be non-empty.
    """

    m: int
    suppliers: tuple[Supplier, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or self.m < 0:
            raise ValueError(f"customer count m must be an integer >= 0, got {self.m!r}")
        suppliers = tuple(self.suppliers)
        object.__setattr__(self, "suppliers", suppliers)
        if len(suppliers) == 0:
            raise ValueError("instance needs at least one supplier")

    @property
    def n(self) -> int:
        return len(self.suppliers)

    def score_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(v, q)`` as float64 arrays aligned with supplier indices."""
        v = np.array([s.v for s in self.suppliers], dtype=np.float64)
        q = np.array([s.q for s in self.suppliers], dtype=np.float64)
        return v, q


@dataclass(frozen=True)
class MenuSet:
    """One menu (a set of supplier indices) per customer, in customer order."""

    menus: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "menus", tuple(frozenset(menu) for menu in self.menus))

    def __len__(self) -> int:
        return len(self.menus)


@dataclass(frozen=True)
class ChoiceDistribution:
    """Pick probabilities of one customer over a menu, plus the outside mass."""

    probs: dict[int, float]
    outside: float


def customer_choice_distribution(instance: MarketInstance, menu: frozenset[int]) -> ChoiceDistribution:
    """MNL pick distribution for one customer shown ``menu``.

    Each supplier ``j`` in the menu is picked with probability
    ``v_j / (1 + sum of menu scores)``; the remainder goes outside.  An empty
    menu sends the customer outside with probability 1.

    Raises ``IndexError`` on out-of-range supplier indices.
    """
    ids = sorted(menu)
    for j in ids:
        if not 0 <= j < instance.n:
            raise IndexError(f"supplier index {j} out of range for n={instance.n}")
    mass = sum(instance.suppliers[j].v for j in ids)
    denom = 1.0 + mass
    return ChoiceDistribution(
        probs={j: instance.suppliers[j].v / denom for j in ids},
        outside=1.0 / denom,
    )


def supplier_match_probability(q: float, t: int) -> float:
    """Probability that a supplier picked by ``t`` customers matches one.

    Equals ``t / (t + q)``; by convention 0 when ``t = 0`` even if ``q = 0``
    (a supplier nobody picked cannot match).
    """
    if t < 0:
        raise ValueError(f"pick count must be >= 0, got {t}")
    if q < 0:
        raise ValueError(f"outside-option score must be >= 0, got {q}")
    if t == 0:
        return 0.0
    return t / (t + q)


def validate(instance: MarketInstance, menu_set: MenuSet) -> list[str]:
    """Check a menu set against an instance; return a list of problems.

    An empty list means the menu set is well formed: one menu per customer and
    every index in range.  (Menus are sets, so duplicates cannot occur.)
    """
    errors: list[str] = []
    if len(menu_set) != instance.m:
        errors.append(f"expected {instance.m} menus, got {len(menu_set)}")
    for i, menu in enumerate(menu_set.menus):
        for j in menu:
            if not 0 <= j < instance.n:
                errors.append(f"menu {i}: supplier index {j} out of range for n={instance.n}")
    return errors


def instance_to_dict(instance: MarketInstance) -> dict:
    return {
        "m": instance.m,
        "suppliers": [{"v": s.v, "q": s.q} for s in instance.suppliers],
    }


def instance_from_dict(data: dict) -> MarketInstance:
    try:
        m = data["m"]
        raw = data["suppliers"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"instance document needs 'm' and 'suppliers': {exc}") from exc
    suppliers = tuple(Supplier(v=float(s["v"]), q=float(s["q"])) for s in raw)
    return MarketInstance(m=int(m), suppliers=suppliers)


def menus_to_dict(menu_set: MenuSet) -> dict:
    return {"menus": [sorted(menu) for menu in menu_set.menus]}


def menus_from_dict(data: dict) -> MenuSet:
    try:
        raw = data["menus"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"menus document needs a 'menus' list: {exc}") from exc
    return MenuSet(menus=tuple(frozenset(int(j) for j in menu) for menu in raw))
