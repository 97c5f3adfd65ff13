import numpy as np
import pytest

import oracles
from metricweights import (
    FactorizationResult,
    a1_bounds,
    conjugate_exponent,
    jones_factorize,
    maximal_fn,
    rdf_apply_T,
)
from metricweights.errors import ExponentRange, NonpositiveWeight
from metricweights.maximal import as_subset


def _recovered_base_bound(fact):
    # the fixed point was verified at the iteration exponent; undo the
    # constant translation done for the swapped branch
    if fact.branch == "1<p<2":
        return (2.0 * fact.c) ** (fact.p / fact.base_p)
    return 2.0 * fact.c


def _check_certificates(space, E, v, fact):
    ids, _ = as_subset(space, E)
    if fact.p > 1:
        k1, k2 = fact.bounds()
    else:
        # the trivial branch certifies through the A1 characteristics alone
        k1, k2 = fact.a1_char_v1, fact.a1_char_v2
    m1 = maximal_fn(space, fact.v1, E)[ids]
    m2 = maximal_fn(space, fact.v2, E)[ids]
    assert np.all(m1 <= k1 * fact.v1 * (1.0 + 1e-12))
    assert np.all(m2 <= k2 * fact.v2 * (1.0 + 1e-12))
    recomposed = fact.v1 * fact.v2 ** (1.0 - fact.p)
    assert float(np.max(np.abs(recomposed / v - 1.0))) <= 1e-9
    if fact.p > 1:
        t_eta = rdf_apply_T(space, E, fact.base_weight, fact.base_p, fact.eta)
        two_c = _recovered_base_bound(fact)
        assert np.all(t_eta <= two_c * fact.eta * (1.0 + 1e-12))


# -- the iteration operator ---------------------------------------------------------


def test_operator_on_the_constant_weight_doubles(line11):
    v = np.ones(line11.n)
    f = np.ones(line11.n)
    out = rdf_apply_T(line11, None, v, 2.0, f)
    np.testing.assert_array_equal(out, np.full(line11.n, 2.0))


def test_operator_is_positively_homogeneous(line11, rng):
    v = oracles.random_weight(rng, line11.n)
    f = rng.uniform(0.1, 2.0, size=line11.n)
    one = rdf_apply_T(line11, None, v, 3.0, f)
    two = rdf_apply_T(line11, None, v, 3.0, 2.0 * f)
    np.testing.assert_allclose(two, 2.0 * one, rtol=1e-12)


def test_operator_is_subadditive(line11, rng):
    v = oracles.random_weight(rng, line11.n)
    f = rng.uniform(0.1, 2.0, size=line11.n)
    g = rng.uniform(0.1, 2.0, size=line11.n)
    both = rdf_apply_T(line11, None, v, 2.0, f + g)
    split = rdf_apply_T(line11, None, v, 2.0, f) + rdf_apply_T(line11, None, v, 2.0, g)
    assert np.all(both <= split * (1.0 + 1e-12))


def test_operator_dominates_twice_the_input(line11, rng):
    v = oracles.random_weight(rng, line11.n)
    f = rng.uniform(0.1, 2.0, size=line11.n)
    out = rdf_apply_T(line11, None, v, 2.5, f)
    assert np.all(out >= 2.0 * f * (1.0 - 1e-12))


def test_operator_rejects_bad_inputs(line11):
    ones = np.ones(line11.n)
    with pytest.raises(ExponentRange):
        rdf_apply_T(line11, None, ones, 1.5, ones)
    with pytest.raises(NonpositiveWeight):
        rdf_apply_T(line11, None, 0.0 * ones, 2.0, ones)
    with pytest.raises(ValueError):
        rdf_apply_T(line11, None, ones, 2.0, -ones)
    with pytest.raises(ValueError):
        rdf_apply_T(line11, None, ones[:-1], 2.0, ones)


# -- the factorization --------------------------------------------------------------


def test_constant_weight_factorization_is_exact(line11):
    v = np.ones(line11.n)
    fact = jones_factorize(line11, None, v, 2.0)
    assert fact.branch == "p>=2"
    assert fact.c == pytest.approx(2.0, rel=1e-12)
    np.testing.assert_allclose(fact.eta, 1.0, atol=1e-9)
    np.testing.assert_allclose(fact.v1, 1.0, atol=1e-9)
    np.testing.assert_allclose(fact.v2, 1.0, atol=1e-9)
    assert fact.residual == 0.0
    assert fact.a1_char_v1 == pytest.approx(1.0, rel=1e-9)
    k1, k2 = fact.bounds()
    assert k1 == pytest.approx(2.0 * fact.c, rel=1e-12)
    assert k2 == pytest.approx(2.0 * fact.c, rel=1e-12)


def test_p_equal_one_is_trivial(line11, rng):
    v = oracles.random_weight(rng, line11.n)
    fact = jones_factorize(line11, None, v, 1.0)
    assert fact.branch == "p=1"
    assert fact.c == 1.0
    assert fact.residual == 0.0
    np.testing.assert_array_equal(fact.v1, v)
    np.testing.assert_array_equal(fact.v2, 1.0)
    assert fact.a1_char_v2 == pytest.approx(1.0, rel=1e-14)
    _check_certificates(line11, None, v, fact)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_random_weights_factor_with_verified_bounds(p, rng):
    for _ in range(4):
        n = int(rng.integers(3, 30))
        space = oracles.random_metric_space(rng, n)
        v = oracles.random_weight(rng, n)
        fact = jones_factorize(space, None, v, p)
        assert isinstance(fact, FactorizationResult)
        assert fact.residual <= 1e-9
        _check_certificates(space, None, v, fact)


def test_factorization_on_a_strict_subset(line11, rng):
    e_ids = np.arange(2, 9)
    v = oracles.random_weight(rng, e_ids.size)
    for p in (1.5, 3.0):
        fact = jones_factorize(line11, e_ids, v, p)
        assert fact.residual <= 1e-9
        _check_certificates(line11, e_ids, v, fact)


def test_swapped_branch_bookkeeping(line11, rng):
    v = oracles.random_weight(rng, line11.n)
    fact = jones_factorize(line11, None, v, 1.5)
    assert fact.branch == "1<p<2"
    assert fact.base_p == pytest.approx(conjugate_exponent(1.5), rel=1e-15)
    np.testing.assert_allclose(fact.base_weight, v ** (1.0 - fact.base_p), rtol=1e-12)


def test_factorization_is_worker_invariant(line11, rng):
    v = oracles.random_weight(rng, line11.n)
    one = jones_factorize(line11, None, v, 2.0, workers=1)
    many = jones_factorize(line11, None, v, 2.0, workers=4)
    np.testing.assert_array_equal(one.v1, many.v1)
    np.testing.assert_array_equal(one.v2, many.v2)
    assert one.c == many.c
    assert one.k_max == many.k_max


def test_a1_bounds_shape():
    k1, k2 = a1_bounds(3.0, 2.0)
    assert k2 == 6.0
    assert k1 == pytest.approx(6.0, rel=1e-15)
    k1, k2 = a1_bounds(3.0, 3.0)
    assert k1 == pytest.approx(6.0**2, rel=1e-15)


def test_factorize_rejects_bad_inputs(line11):
    ones = np.ones(line11.n)
    with pytest.raises(ExponentRange):
        jones_factorize(line11, None, ones, 0.9)
    with pytest.raises(NonpositiveWeight):
        jones_factorize(line11, None, 0.0 * ones, 2.0)
    with pytest.raises(ValueError):
        jones_factorize(line11, None, ones, 2.0, tol=0.0)
    with pytest.raises(ValueError):
        jones_factorize(line11, None, ones[:-1], 2.0)
