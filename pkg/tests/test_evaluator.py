"""Evaluator: Poisson-binomial PMF, exact expectations, Monte Carlo."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matchplan import (
    MarketInstance,
    MenuSet,
    Supplier,
    exact_expected_matches,
    monte_carlo_expected_matches,
    poisson_binomial,
)

from helpers import enumerate_expected_matches, random_instance, random_menus


def _single_supplier_instance(m: int, v: float = 1.0, q: float = 1.0) -> MarketInstance:
    return MarketInstance(m=m, suppliers=(Supplier(v, q),))


def test_poisson_binomial_empty_sum_is_zero():
    np.testing.assert_array_equal(poisson_binomial([]), [1.0])


def test_poisson_binomial_symmetric_pair():
    np.testing.assert_allclose(
        poisson_binomial([0.5, 0.5]), [0.25, 0.5, 0.25], atol=1e-15
    )


def test_poisson_binomial_asymmetric_pair():
    np.testing.assert_allclose(
        poisson_binomial([0.2, 0.5]), [0.4, 0.5, 0.1], atol=1e-15
    )


def test_poisson_binomial_rejects_bad_probabilities():
    for bad in ([1.5], [-0.1], [np.nan]):
        with pytest.raises(ValueError):
            poisson_binomial(bad)
    with pytest.raises(ValueError):
        poisson_binomial(np.zeros((2, 2)))


@settings(deadline=None)
@given(
    probs=st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=0, max_size=12)
)
def test_poisson_binomial_is_a_distribution(probs):
    pmf = poisson_binomial(probs)
    assert pmf.shape == (len(probs) + 1,)
    assert np.all(pmf >= -1e-15)
    assert abs(pmf.sum() - 1.0) <= 1e-10


def test_exact_single_customer_single_supplier():
    inst = _single_supplier_instance(1)
    menus = MenuSet(menus=(frozenset({0}),))
    result = exact_expected_matches(inst, menus)
    assert result.expected_matches == pytest.approx(0.25, abs=1e-15)


def test_exact_two_customers_share_one_supplier():
    inst = _single_supplier_instance(2)
    menus = MenuSet(menus=(frozenset({0}), frozenset({0})))
    result = exact_expected_matches(inst, menus)
    assert result.expected_matches == pytest.approx(5.0 / 12.0, abs=1e-12)


def test_exact_hand_worked_two_supplier_menu():
    # One customer sees both suppliers: picks are 1/5 and 3/5, and a single
    # pick matches with probability 1/(1+q); total 0.2*0.5 + 0.6*0.6 = 0.46
    # for q=(1,2) replaced by: 0.2/(1+1) -> 0.1 and 0.6/(1+2) -> 0.2.
    inst = MarketInstance(m=1, suppliers=(Supplier(1.0, 1.0), Supplier(3.0, 2.0)))
    menus = MenuSet(menus=(frozenset({0, 1}),))
    result = exact_expected_matches(inst, menus)
    assert result.expected_matches == pytest.approx(0.3, abs=1e-12)
    np.testing.assert_allclose(result.per_supplier, [0.1, 0.2], atol=1e-12)


def test_exact_all_menus_empty_is_zero():
    inst = MarketInstance(m=3, suppliers=(Supplier(0.7, 0.0), Supplier(1.0, 2.0)))
    menus = MenuSet(menus=(frozenset(), frozenset(), frozenset()))
    result = exact_expected_matches(inst, menus)
    assert result.expected_matches == 0.0
    np.testing.assert_array_equal(result.per_supplier, [0.0, 0.0])


def test_exact_per_supplier_decomposition_is_consistent():
    rng = np.random.default_rng(7)
    for _ in range(20):
        inst = random_instance(rng)
        menus = random_menus(rng, inst)
        result = exact_expected_matches(inst, menus)
        assert abs(result.expected_matches - result.per_supplier.sum()) <= 1e-9
        assert np.all(result.per_supplier >= 0.0)
        assert np.all(result.per_supplier <= 1.0 + 1e-12)


def test_exact_matches_joint_enumeration_on_random_instances():
    rng = np.random.default_rng(42)
    for _ in range(30):
        inst = random_instance(rng)
        menus = random_menus(rng, inst)
        expected = enumerate_expected_matches(inst, menus)
        got = exact_expected_matches(inst, menus).expected_matches
        assert got == pytest.approx(expected, abs=1e-9)


def test_exact_decreasing_in_outside_option():
    rng = np.random.default_rng(11)
    for _ in range(10):
        inst = random_instance(rng)
        if inst.m == 0:
            continue
        menus = random_menus(rng, inst)
        base = exact_expected_matches(inst, menus).expected_matches
        j = int(rng.integers(0, inst.n))
        bumped = list(inst.suppliers)
        bumped[j] = Supplier(v=bumped[j].v, q=bumped[j].q + 1.0)
        harder = MarketInstance(m=inst.m, suppliers=tuple(bumped))
        assert exact_expected_matches(harder, menus).expected_matches <= base + 1e-12


def test_exact_rejects_invalid_menus():
    inst = _single_supplier_instance(2)
    with pytest.raises(ValueError):
        exact_expected_matches(inst, MenuSet(menus=(frozenset({0}),)))
    with pytest.raises(ValueError):
        exact_expected_matches(inst, MenuSet(menus=(frozenset({5}), frozenset())))


def test_monte_carlo_is_deterministic_given_seed():
    inst = MarketInstance(m=4, suppliers=(Supplier(0.5, 1.0), Supplier(2.0, 0.5)))
    menus = MenuSet(
        menus=(frozenset({0, 1}), frozenset({0}), frozenset({1}), frozenset())
    )
    a = monte_carlo_expected_matches(inst, menus, trials=2000, seed=99)
    b = monte_carlo_expected_matches(inst, menus, trials=2000, seed=99)
    assert a.expected_matches == b.expected_matches
    assert a.std_error == b.std_error
    np.testing.assert_array_equal(a.per_supplier, b.per_supplier)
    c = monte_carlo_expected_matches(inst, menus, trials=2000, seed=100)
    assert c.expected_matches != a.expected_matches


def test_monte_carlo_close_to_exact():
    inst = _single_supplier_instance(1)
    menus = MenuSet(menus=(frozenset({0}),))
    result = monte_carlo_expected_matches(inst, menus, trials=100_000, seed=12345)
    assert abs(result.expected_matches - 0.25) <= 3.0 * result.std_error


def test_monte_carlo_two_customer_case_close_to_exact():
    inst = _single_supplier_instance(2)
    menus = MenuSet(menus=(frozenset({0}), frozenset({0})))
    result = monte_carlo_expected_matches(inst, menus, trials=200_000, seed=54321)
    assert abs(result.expected_matches - 5.0 / 12.0) <= 3.0 * result.std_error


def test_monte_carlo_raw_sampler_agrees_with_exact():
    inst = MarketInstance(m=3, suppliers=(Supplier(0.8, 1.5), Supplier(1.2, 0.0)))
    menus = MenuSet(menus=(frozenset({0, 1}), frozenset({1}), frozenset({0})))
    exact = exact_expected_matches(inst, menus).expected_matches
    result = monte_carlo_expected_matches(
        inst, menus, trials=100_000, seed=777, raw=True
    )
    assert abs(result.expected_matches - exact) <= 4.0 * result.std_error
    # The raw sampler flips integer acceptance coins, so per-trial totals are
    # integers and the variance is strictly larger than the integrated
    # estimator's on nondegenerate menus.
    smooth = monte_carlo_expected_matches(inst, menus, trials=100_000, seed=777)
    assert abs(smooth.expected_matches - exact) <= 4.0 * smooth.std_error
    assert smooth.std_error < result.std_error


def test_monte_carlo_empty_menus_exactly_zero():
    inst = MarketInstance(m=2, suppliers=(Supplier(1.0, 1.0),))
    menus = MenuSet(menus=(frozenset(), frozenset()))
    for seed in (0, 1, 2):
        result = monte_carlo_expected_matches(inst, menus, trials=500, seed=seed)
        assert result.expected_matches == 0.0
        assert result.std_error == 0.0


def test_monte_carlo_mean_equals_per_supplier_sum():
    rng = np.random.default_rng(23)
    inst = random_instance(rng, m_max=5, n_max=4)
    while inst.m == 0:
        inst = random_instance(rng, m_max=5, n_max=4)
    menus = random_menus(rng, inst)
    result = monte_carlo_expected_matches(inst, menus, trials=4000, seed=5)
    assert result.expected_matches == pytest.approx(
        float(result.per_supplier.sum()), abs=1e-9
    )


def test_monte_carlo_validates_arguments():
    inst = _single_supplier_instance(1)
    menus = MenuSet(menus=(frozenset({0}),))
    with pytest.raises(ValueError):
        monte_carlo_expected_matches(inst, menus, trials=0, seed=1)
    with pytest.raises(ValueError):
        monte_carlo_expected_matches(
            inst, MenuSet(menus=(frozenset({3}),)), trials=10, seed=1
        )


def test_monte_carlo_single_trial_has_zero_std_error():
    inst = _single_supplier_instance(1)
    menus = MenuSet(menus=(frozenset({0}),))
    result = monte_carlo_expected_matches(inst, menus, trials=1, seed=3)
    assert result.trials == 1
    assert result.std_error == 0.0
