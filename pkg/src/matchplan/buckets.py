"""Dyadic bucketing of low-value suppliers, with the two score preprocessors.

Planning for suppliers with scores at or below the customers' outside option
works on a coarsened market:

- ``clamp_low_q`` raises every outside-option score below 1 up to exactly 1.
  For any fixed menu set the expected match count of the clamped market is a
  2-factor sandwich of the original's (clamped <= original <= 2 * clamped),
  so planning on the clamped market costs at most half the value.
- ``cap_high_q`` drops suppliers with ``q_j >= 2**cap_exponent``.  Each such
  supplier can contribute at most ``m / 2**cap_exponent`` expected matches in
  total, so the loss is additive and tiny for sensible exponents.
- ``build_buckets`` groups the remaining suppliers by dyadic intervals:
  supplier ``j`` lands in bucket ``(k1, k2)`` when

      v_j in [2**(-k1), 2**(-k1+1))    and    q_j in [2**k2, 2**(k2+1))

  and the bucket is represented by the conservative scores ``w = 2**(-k1)``
  (lower endpoint) and ``q_rep = 2**k2`` (lower endpoint).  Exponents are
  extracted from the float representation (``math.frexp``), never from a
  rounded logarithm, so exact powers of two land on their closed left
  endpoint by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .market import MarketInstance, Supplier

__all__ = [
    "BucketIndex",
    "BucketTable",
    "clamp_low_q",
    "cap_high_q",
    "build_buckets",
]


@dataclass(frozen=True, order=True)
class BucketIndex:
    """Dyadic bucket coordinates: ``k1`` for the v-interval, ``k2`` for q."""

    k1: int
    k2: int

    @property
    def w(self) -> float:
        """Representative supplier score: ``2**(-k1)``, the interval's floor."""
        return math.ldexp(1.0, -self.k1)

    @property
    def q_rep(self) -> float:
        """Representative outside-option score: ``2**k2``."""
        return math.ldexp(1.0, self.k2)


@dataclass(frozen=True)
class BucketTable:
    """Supplier indices grouped by bucket, in ascending (k1, k2) order."""

    buckets: dict[BucketIndex, tuple[int, ...]]

    def order(self) -> list[BucketIndex]:
        return sorted(self.buckets)

    def size(self, k: BucketIndex) -> int:
        return len(self.buckets[k])


def _dyadic_exponent(x: float) -> int:
    """The unique integer e with ``x in [2**e, 2**(e+1))``, exactly."""
    frac, exp = math.frexp(x)  # x = frac * 2**exp with frac in [0.5, 1)
    return exp - 1


def clamp_low_q(instance: MarketInstance) -> tuple[MarketInstance, list[int]]:
    """Raise all outside-option scores below 1 up to 1.

    Returns the clamped instance and the indices that were changed.  Supplier
    order and count are preserved, so menu indices carry over unchanged.
    """
    clamped: list[int] = []
    suppliers = []
    for j, s in enumerate(instance.suppliers):
        if s.q < 1.0:
            suppliers.append(Supplier(v=s.v, q=1.0))
            clamped.append(j)
        else:
            suppliers.append(s)
    return MarketInstance(m=instance.m, suppliers=tuple(suppliers)), clamped


def cap_high_q(instance: MarketInstance, cap_exponent: int) -> tuple[MarketInstance | None, list[int]]:
    """Drop suppliers with ``q_j >= 2**cap_exponent``.

    Returns ``(surviving_instance, index_map)`` where ``index_map[new] = old``.
    When every supplier is dropped the instance slot is ``None`` (an instance
    cannot be empty) and the map is empty.  Total expected-match loss from the
    dropped suppliers is at most ``m / 2**cap_exponent``.
    """
    if cap_exponent < 1:
        raise ValueError(f"cap_exponent must be >= 1, got {cap_exponent}")
    threshold = math.ldexp(1.0, cap_exponent)
    survivors = [j for j, s in enumerate(instance.suppliers) if s.q < threshold]
    if not survivors:
        return None, []
    kept = tuple(instance.suppliers[j] for j in survivors)
    return MarketInstance(m=instance.m, suppliers=kept), survivors


def build_buckets(instance: MarketInstance) -> BucketTable:
    """Group suppliers into dyadic (v, q) buckets.

    Requires the preprocessed regime: every ``v_j <= 1`` and every
    ``q_j >= 1`` (run ``clamp_low_q`` and ``cap_high_q`` first), so that
    ``k1 >= 0`` and ``k2 >= 0``.  Raises ``ValueError`` outside that domain.
    """
    groups: dict[BucketIndex, list[int]] = {}
    for j, s in enumerate(instance.suppliers):
        if s.v > 1.0:
            raise ValueError(f"supplier {j}: v={s.v} > 1 is outside the low-value regime")
        if s.q < 1.0:
            raise ValueError(f"supplier {j}: q={s.q} < 1; clamp outside-option scores first")
        k1 = -_dyadic_exponent(s.v)  # v in [2**(-k1), 2**(-k1+1))
        k2 = _dyadic_exponent(s.q)  # q in [2**k2,   2**(k2+1))
        groups.setdefault(BucketIndex(k1=k1, k2=k2), []).append(j)
    return BucketTable(buckets={k: tuple(js) for k, js in sorted(groups.items())})
