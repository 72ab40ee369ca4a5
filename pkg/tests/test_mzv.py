from fractions import Fraction
from itertools import combinations_with_replacement, combinations

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdeq import mzv
from qdeq.mzv import MZVCombination, stuffle_expand, stuffle_product, sym_sum, zeta_partial


def brute_strict(d, idx):
    """sum over d >= n1 > n2 > ... > nk >= 1 of prod n_j^-s_j."""
    total = Fraction(0)
    for ns in combinations(range(d, 0, -1), len(idx)):
        term = Fraction(1)
        for n, s in zip(ns, idx):
            term /= n ** s
        total += term
    return total


def brute_weak(d, idx):
    total = Fraction(0)
    for ns in combinations_with_replacement(range(d, 0, -1), len(idx)):
        term = Fraction(1)
        for n, s in zip(ns, idx):
            term /= n ** s
        total += term
    return total


indices = st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=3).map(tuple)


@given(indices, st.integers(min_value=0, max_value=9))
@settings(max_examples=60, deadline=None)
def test_partial_values_match_brute_force(idx, d):
    assert zeta_partial(d, idx) == brute_strict(d, idx)
    assert sym_sum(d, idx) == brute_weak(d, idx)


def test_small_values():
    assert zeta_partial(2, (2, 1)) == Fraction(1, 4)
    assert zeta_partial(3, (1,)) == Fraction(11, 6)
    assert zeta_partial(0, (2,)) == 0
    assert zeta_partial(5, ()) == 1


def test_stuffle_expand_examples():
    assert stuffle_expand((2, 1)) == MZVCombination([((2, 1), 1), ((3,), 1)])
    e = stuffle_expand((2, 1, 1))
    assert e == MZVCombination([((2, 1, 1), 1), ((3, 1), 1), ((2, 2), 1), ((4,), 1)])


@given(indices)
@settings(max_examples=40, deadline=None)
def test_stuffle_expand_identity(idx):
    comb = stuffle_expand(idx)
    for d in range(0, 12):
        assert comb.evaluate(d) == sym_sum(d, idx)


@given(indices, indices)
@settings(max_examples=40, deadline=None)
def test_stuffle_product_multiplicative(a, b):
    x, y = MZVCombination.single(a), MZVCombination.single(b)
    p = stuffle_product(x, y)
    for d in range(0, 10):
        assert p.evaluate(d) == x.evaluate(d) * y.evaluate(d)


def test_stuffle_product_example_and_unit():
    x = MZVCombination.single((2,))
    y = MZVCombination.single((1,))
    assert stuffle_product(x, y) == MZVCombination([((2, 1), 1), ((1, 2), 1), ((3,), 1)])
    assert stuffle_product(x, MZVCombination.single(())) == x


def test_monotone_in_d():
    vals = [zeta_partial(d, (2, 1, 1)) for d in range(0, 30)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_zeta2_limit_against_pi():
    lim = mzv.zeta_limit((2,), 1000, digits=40)
    with mpmath.workdps(45):
        assert abs(lim.estimate.value - mpmath.pi ** 2 / 6) < mpmath.mpf(10) ** -30
        assert lim.contains(mpmath.pi ** 2 / 6)


def test_bracket_contains_known_values():
    with mpmath.workdps(45):
        z3 = mpmath.zeta(3)
    assert mzv.zeta_limit((2, 1), 10 ** 4).contains(z3)
    a = mzv.zeta_limit((3, 2), 10 ** 4)
    b = mzv.zeta_limit((2, 2, 1), 10 ** 4)
    assert a.lower <= b.upper and b.lower <= a.upper


def test_divergent_index_rejected():
    with pytest.raises(mzv.DivergentIndexError):
        mzv.zeta_limit((1, 2), 100)


def test_crossover_switches_to_bigreal():
    exact = mzv.partial_value(2000, (2, 1))
    numeric = mzv.partial_value(2001, (2, 1))
    assert isinstance(exact, Fraction)
    assert abs(float(numeric - exact) - 1 / 2001 ** 2 * float(mzv.harmonic(2000))) < 1e-12


def test_weight5_and_weight6_identities_at_1e4():
    n = 10 ** 4
    v = mzv.numeric_values([(2, 3), (3, 2), (4, 1), (5,)], n)
    dev = abs(v[(2, 3)] + v[(3, 2)] + v[(4, 1)] - v[(5,)])
    assert float(dev) <= mzv.log_bound(n, 1, 1)
    w = mzv.numeric_values([(3, 3), (4, 2), (2, 2, 2), (2, 3, 1), (3, 2, 1)], n)
    dev6 = abs(w[(3, 3)] + w[(4, 2)] - w[(2, 2, 2)] - w[(2, 3, 1)] - w[(3, 2, 1)])
    assert float(dev6) <= mzv.log_bound(n, 2, 1)
