import math
from fractions import Fraction

import pytest
import sympy

from qdeq import jfun
from qdeq.cohmodel import space_model
from qdeq.jfun import DescendantKey, desc_closed_form, desc_invariant, j_coeff, j_corollary


@pytest.mark.parametrize("family", list(jfun.families()))
def test_recursion_matches_closed_forms(family):
    for d in range(1, 7):
        key = DescendantKey(d, family)
        cf = desc_closed_form(key)
        for chi in (1, -2):
            want = cf.value * chi if cf.chi_coefficient else cf.value
            assert desc_invariant(key, chi=chi) == want


def test_point_class_family():
    for d in range(1, 11):
        assert desc_invariant(DescendantKey(d, "a3V")) == Fraction(8, math.factorial(d) ** 2)
        assert desc_invariant(DescendantKey(d, "VolZ")) == Fraction(1, math.factorial(d) ** 2)


def test_psi_power_from_degree_axiom():
    assert DescendantKey(3, "a3V").psi_power() == 4
    assert DescendantKey(3, "1").psi_power() == 10
    assert DescendantKey(2, "a", "a2").psi_power() == 6


def test_y_sector_values_vanish_in_j():
    eng = jfun.engine(1)
    vec = eng.j_engine_vector(4)
    assert not any(vec[8:])


@pytest.mark.parametrize("n", range(1, 7))
def test_twistor_j_matches_corollary(n):
    jc = j_coeff("twistor", n, cross_check=False)
    assert jc.normalized == j_corollary(n)
    assert jc.pt_pairing == Fraction(1, math.factorial(n) ** 2)


def test_twistor_j_chi_independent():
    a = j_coeff("twistor", 4, chi=1).normalized
    b = j_coeff("twistor", 4, chi=-13).normalized
    assert a == b


def test_first_coefficients_by_hand():
    # at n = 1 every symmetric sum equals 1
    J = j_corollary(1)
    assert J["a"] == -1 and J["a2"] == 1 and J["a3"] == -1 and J["x"] == -1


@pytest.mark.parametrize("N,n", [(1, 3), (2, 4), (3, 2)])
def test_cpn_raw_against_series(N, n):
    h = sympy.Symbol("h")
    prod = sympy.prod([(h + k) ** -(N + 1) for k in range(1, n + 1)])
    ser = sympy.series(prod, h, 0, N + 1).removeO()
    raw = j_coeff(space_model("cpN", N=N), n).raw
    for k in range(N + 1):
        assert sympy.Rational(str(raw.coeffs[k])) == ser.coeff(h, k)


def test_quantum_period():
    assert jfun.quantum_period("twistor", 3) == Fraction(1, 36)
    assert jfun.quantum_period(space_model("cp2"), 2) == Fraction(1, 8)
    with pytest.raises(ValueError):
        j_coeff("twistor", -1)


def test_derivation_lists_rules():
    eng = jfun.engine(1)
    eng.value(DescendantKey(2, "a3"))
    lines = eng.derivation((2, jfun.ENGINE_LABELS.index("a3"), None))
    assert lines and lines[0].startswith("<psi^")


def test_unknown_family_rejected():
    with pytest.raises(KeyError):
        desc_closed_form(DescendantKey(2, "ay"))
