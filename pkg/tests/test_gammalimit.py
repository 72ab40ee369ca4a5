from fractions import Fraction

import mpmath
import pytest
import sympy

from qdeq import gammalimit, mzv
from qdeq.cohmodel import space_model
from qdeq.gammalimit import h_poly, limit_report, r_exact, r_sequence


def test_h_low_orders():
    assert h_poly(0).terms == {} and h_poly(1).terms == {}
    assert h_poly(2).terms == {(2,): Fraction(1, 2)}
    assert h_poly(4).to_string() == "1/24*x1^4 + 1/2*x1^2*x2 + x1*x3 + 1/2*x2^2"


@pytest.mark.parametrize("i", range(2, 8))
def test_h_is_weight_part_of_exp(i):
    t = sympy.Symbol("t")
    xs = sympy.symbols(f"x1:{i}")
    ser = sympy.series(sympy.exp(sum(x * t ** (j + 1) for j, x in enumerate(xs))), t, 0, i + 1)
    want = sympy.expand(ser.removeO().coeff(t, i))
    got = sum(sympy.Rational(c.numerator, c.denominator) *
              sympy.prod([x ** e for x, e in zip(xs, exps)]) for exps, c in h_poly(i).terms.items())
    assert sympy.expand(got - want) == 0


def test_h_evaluates_on_numbers():
    assert h_poly(3)([Fraction(2), Fraction(3)]) == Fraction(8, 6) + 6


def test_r1_is_log_minus_harmonic():
    n = 100
    R1 = r_sequence("twistor", 1, n, digits=40)
    with mpmath.workdps(45):
        want = mpmath.log(n) - mpmath.harmonic(n)
        assert abs(R1["a"].value - want) < mpmath.mpf(10) ** -35


@pytest.mark.parametrize("n", [1, 7, 30])
def test_r2_is_half_zeta2(n):
    assert r_exact("twistor", n)[2]["a2"] == mzv.zeta_partial(n, (2,)) / 2


def test_recursion_matches_log_form():
    n = 25
    lit = gammalimit.r_all(space_model("twistor"), n, digits=40)
    ex = r_exact("twistor", n)
    for i in range(2, 7):
        for a, b in zip(lit[i].coeffs, ex[i].coeffs):
            assert abs(float(a - b)) < 1e-30


def test_reductions_hold_exactly():
    rows = gammalimit.check_reductions(20)
    assert rows and all(ok for *_, ok in rows)


def test_r3_reduction_formula():
    n = 12
    R3 = r_exact("twistor", n)[3]
    assert R3["a3"] == -mzv.zeta_partial(n, (3,)) / 3
    assert R3["x"] == -(mzv.zeta_partial(n, (3,)) + mzv.zeta_partial(n, (2, 1)))


def test_tolerance_model():
    assert gammalimit.tolerance(2, 10 ** 5) == 1e-4
    assert gammalimit.tolerance(4, 10 ** 4) == pytest.approx(10 * mpmath.log(10 ** 4) / 10 ** 8)
    assert gammalimit.tolerance(6, 10 ** 4) == pytest.approx(10 * mpmath.log(10 ** 4) ** 2 / 10 ** 8)


def test_cpn_direct_limit_passes():
    rows = limit_report(space_model("cp2"), n_schedule=(100000,))
    assert rows and all(r.passed for r in rows)


def test_twistor_report_rows_and_flag():
    rows = limit_report("twistor", n_schedule=(100000,))
    by = {(r.i, r.label): r for r in rows}
    assert by[(1, "a")].passed and by[(2, "a2")].passed
    assert by[(3, "a3")].passed and by[(5, "a2x")].passed
    assert "zeta(5)" in by[(5, "a2x")].note
    t5 = by[(5, "a2x")].target
    with mpmath.workdps(40):
        assert abs(t5.value + mpmath.mpf(7) / 5 * mpmath.zeta(5)) < mpmath.mpf(10) ** -30


def test_richardson_needs_two_points():
    with pytest.raises(ValueError):
        limit_report("twistor", n_schedule=(1000,), extrapolate="richardson")


def test_r4_within_log_over_n_squared_at_1e4():
    rows = limit_report("twistor", i_max=4, n_schedule=(10 ** 4,))
    r4 = [r for r in rows if r.i == 4][0]
    assert float(r4.deviation) <= 10 * mpmath.log(10 ** 4) / 10 ** 8


def test_i1_deviation_at_1e5():
    rows = limit_report("twistor", i_max=1, n_schedule=(10 ** 5,))
    assert float(rows[0].deviation) <= 1e-5
