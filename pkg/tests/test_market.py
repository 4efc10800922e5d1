"""Model layer: score validation, choice distributions, serialization."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matchplan import (
    MarketInstance,
    MenuSet,
    Supplier,
    customer_choice_distribution,
    instance_from_dict,
    instance_to_dict,
    menus_from_dict,
    menus_to_dict,
    supplier_match_probability,
    validate,
)

from helpers import enumerate_expected_matches  # noqa: F401  (shared import sanity)


def test_supplier_rejects_bad_scores():
    for v in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            Supplier(v=v, q=1.0)
    for q in (-0.5, math.inf, math.nan):
        with pytest.raises(ValueError):
            Supplier(v=1.0, q=q)


def test_supplier_accepts_zero_outside_option():
    s = Supplier(v=2.0, q=0.0)
    assert s.q == 0.0


def test_instance_validation_and_shape():
    inst = MarketInstance(m=2, suppliers=(Supplier(1.0, 1.0), Supplier(0.5, 2.0)))
    assert inst.n == 2
    v, q = inst.score_arrays()
    np.testing.assert_array_equal(v, [1.0, 0.5])
    np.testing.assert_array_equal(q, [1.0, 2.0])

    with pytest.raises(ValueError):
        MarketInstance(m=-1, suppliers=(Supplier(1.0, 1.0),))
    with pytest.raises(ValueError):
        MarketInstance(m=2.0, suppliers=(Supplier(1.0, 1.0),))
    with pytest.raises(ValueError):
        MarketInstance(m=1, suppliers=())


def test_instance_allows_zero_customers():
    inst = MarketInstance(m=0, suppliers=(Supplier(1.0, 1.0),))
    assert inst.m == 0


def test_choice_distribution_equal_scores_split_evenly():
    inst = MarketInstance(m=1, suppliers=(Supplier(1.0, 1.0),))
    dist = customer_choice_distribution(inst, frozenset({0}))
    assert dist.probs == {0: 0.5}
    assert dist.outside == 0.5


def test_choice_distribution_empty_menu_goes_outside():
    inst = MarketInstance(m=1, suppliers=(Supplier(1.0, 1.0),))
    dist = customer_choice_distribution(inst, frozenset())
    assert dist.probs == {}
    assert dist.outside == 1.0


def test_choice_distribution_weighted_menu():
    inst = MarketInstance(m=1, suppliers=(Supplier(1.0, 1.0), Supplier(3.0, 1.0)))
    dist = customer_choice_distribution(inst, frozenset({0, 1}))
    assert dist.probs[0] == pytest.approx(0.2, abs=1e-15)
    assert dist.probs[1] == pytest.approx(0.6, abs=1e-15)
    assert dist.outside == pytest.approx(0.2, abs=1e-15)


def test_choice_distribution_rejects_bad_index():
    inst = MarketInstance(m=1, suppliers=(Supplier(1.0, 1.0),))
    with pytest.raises(IndexError):
        customer_choice_distribution(inst, frozenset({1}))
    with pytest.raises(IndexError):
        customer_choice_distribution(inst, frozenset({-1}))


@given(
    scores=st.lists(st.floats(min_value=1e-6, max_value=1e6), min_size=1, max_size=8)
)
def test_choice_distribution_sums_to_one(scores):
    suppliers = tuple(Supplier(v=v, q=1.0) for v in scores)
    inst = MarketInstance(m=1, suppliers=suppliers)
    dist = customer_choice_distribution(inst, frozenset(range(len(scores))))
    total = dist.outside + sum(dist.probs.values())
    assert abs(total - 1.0) <= 1e-12
    assert dist.outside >= 0.0
    assert all(p >= 0.0 for p in dist.probs.values())


@given(
    scores=st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=2, max_size=6)
)
def test_adding_a_supplier_decreases_existing_probabilities(scores):
    suppliers = tuple(Supplier(v=v, q=1.0) for v in scores)
    inst = MarketInstance(m=1, suppliers=suppliers)
    n = len(scores)
    small = frozenset(range(n - 1))
    large = frozenset(range(n))
    before = customer_choice_distribution(inst, small)
    after = customer_choice_distribution(inst, large)
    for j in small:
        assert after.probs[j] < before.probs[j]
    assert after.outside < before.outside


def test_match_probability_frozen_values():
    assert supplier_match_probability(q=1.0, t=1) == 0.5
    assert supplier_match_probability(q=0.0, t=0) == 0.0
    assert supplier_match_probability(q=4.0, t=2) == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_match_probability_zero_outside_option_saturates():
    assert supplier_match_probability(q=0.0, t=1) == 1.0
    assert supplier_match_probability(q=0.0, t=7) == 1.0


def test_match_probability_rejects_negative_arguments():
    with pytest.raises(ValueError):
        supplier_match_probability(q=1.0, t=-1)
    with pytest.raises(ValueError):
        supplier_match_probability(q=-0.1, t=1)


def test_match_probability_decreasing_in_q():
    values = [supplier_match_probability(q=q, t=3) for q in (0.0, 0.5, 1.0, 4.0, 100.0)]
    assert values == sorted(values, reverse=True)


def test_validate_accepts_well_formed_menus():
    inst = MarketInstance(m=2, suppliers=(Supplier(1.0, 1.0),))
    menus = MenuSet(menus=(frozenset({0}), frozenset({0})))
    assert validate(inst, menus) == []


def test_validate_reports_out_of_range_index():
    inst = MarketInstance(m=2, suppliers=(Supplier(1.0, 1.0),))
    menus = MenuSet(menus=(frozenset({1}), frozenset()))
    errors = validate(inst, menus)
    assert len(errors) == 1
    assert "out of range" in errors[0]


def test_validate_reports_menu_count_mismatch():
    inst = MarketInstance(m=2, suppliers=(Supplier(1.0, 1.0),))
    menus = MenuSet(menus=(frozenset({0}),))
    errors = validate(inst, menus)
    assert any("expected 2 menus" in e for e in errors)


def test_menu_set_coerces_to_frozensets():
    menus = MenuSet(menus=({0, 1}, set()))
    assert len(menus) == 2
    assert all(isinstance(menu, frozenset) for menu in menus.menus)


def test_instance_json_round_trip():
    inst = MarketInstance(
        m=3, suppliers=(Supplier(0.25, 1.5), Supplier(2.0, 0.0), Supplier(1.0, 7.0))
    )
    again = instance_from_dict(instance_to_dict(inst))
    assert again == inst


def test_menus_json_round_trip():
    menus = MenuSet(menus=(frozenset({2, 0}), frozenset(), frozenset({1})))
    data = menus_to_dict(menus)
    assert data == {"menus": [[0, 2], [], [1]]}
    assert menus_from_dict(data) == menus


def test_deserialization_rejects_malformed_documents():
    with pytest.raises(ValueError):
        instance_from_dict({"suppliers": []})
    with pytest.raises(ValueError):
        instance_from_dict({"m": 1})
    with pytest.raises(ValueError):
        menus_from_dict({})
