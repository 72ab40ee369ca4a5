from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qdeq.exactcore import (
    INFINITY,
    BigReal,
    ExactMatrix,
    Poly,
    RationalFunction,
    SingularMatrixError,
    charpoly,
    euler_gamma,
    inverse,
    nullspace,
    poly_gcd,
    rank_over_field,
    rational_roots,
    solve_linear,
    valuation,
)

U = sympy.Symbol("u")
small = st.integers(min_value=-6, max_value=6)
coeffs = st.lists(small, min_size=1, max_size=6)


def to_sympy(f: RationalFunction):
    num = sum(sympy.Rational(c.numerator, c.denominator) * U ** i for i, c in enumerate(f.num.c))
    den = sum(sympy.Rational(c.numerator, c.denominator) * U ** i for i, c in enumerate(f.den.c))
    return num / den


def test_rational_function_reduced_and_monic():
    f = RationalFunction(Poly([0, 2, 2]), Poly([0, 0, 4]))   # (2u + 2u^2) / 4u^2
    assert f.den.lead() == 1
    assert f == RationalFunction.parse("(1+u)/(2*u)")


def test_parse_and_str_roundtrip():
    f = RationalFunction.parse("16/u^4-16/u^2")
    assert str(f) == "-16/u^2 + 16/u^4"
    assert RationalFunction.parse(str(f)) == f


@pytest.mark.parametrize("text,v", [("u^3", 3), ("u^-2 + u", -2), ("0", INFINITY),
                                    ("(1+u)/(u^2*(2-u))", -2), ("5", 0)])
def test_valuation(text, v):
    assert valuation(RationalFunction.parse(text)) == v


@given(coeffs, coeffs, coeffs)
@settings(max_examples=60, deadline=None)
def test_field_ops_match_sympy(a, b, c):
    if not any(b) or not any(c):
        return
    f = RationalFunction(Poly(a), Poly(b))
    g = RationalFunction(Poly(c), Poly([1, 1]))
    assert sympy.simplify(to_sympy(f * g + f) - (to_sympy(f) * to_sympy(g) + to_sympy(f))) == 0
    assert sympy.simplify(to_sympy(f.derivative()) - sympy.diff(to_sympy(f), U)) == 0


@given(coeffs, coeffs, coeffs)
@settings(max_examples=60, deadline=None)
def test_poly_gcd_matches_sympy(a, b, c):
    pa, pb, pc = Poly(a), Poly(b), Poly(c)
    if pa.is_zero() or pb.is_zero() or pc.is_zero():
        return
    g = poly_gcd(pa * pc, pb * pc)
    want = sympy.Poly(sympy.gcd(sympy.Poly(list(reversed((pa * pc).c)), U),
                                sympy.Poly(list(reversed((pb * pc).c)), U)), U).monic()
    assert [sympy.Rational(x.numerator, x.denominator) for x in reversed(g.c)] == want.all_coeffs()


matrices = st.lists(st.lists(small, min_size=4, max_size=4), min_size=4, max_size=4)


@given(matrices, st.lists(small, min_size=4, max_size=4))
@settings(max_examples=60, deadline=None)
def test_solve_and_rank_match_sympy(rows, v):
    M = ExactMatrix(rows)
    S = sympy.Matrix(rows)
    assert rank_over_field(M) == S.rank()
    if S.det() == 0:
        with pytest.raises(SingularMatrixError):
            solve_linear(M, v)
    else:
        x = solve_linear(M, v)
        assert [sympy.Rational(t.numerator, t.denominator) for t in x] == list(S.LUsolve(sympy.Matrix(v)))


@given(matrices)
@settings(max_examples=40, deadline=None)
def test_charpoly_and_nullspace(rows):
    M = ExactMatrix(rows)
    lam = sympy.Symbol("lam")
    want = sympy.Poly(sympy.Matrix(rows).charpoly(lam).as_expr(), lam).all_coeffs()
    assert [sympy.Rational(c.numerator, c.denominator) for c in reversed(charpoly(M))] == want
    for vec in nullspace(M):
        assert not any(M @ vec)
    assert len(nullspace(M)) == 4 - rank_over_field(M)


def test_solve_over_rational_functions():
    u = RationalFunction.u_power(1)
    one = RationalFunction.one()
    M = ExactMatrix([[u, one], [one, u]])
    x = solve_linear(M, [one, RationalFunction.zero()])
    assert x[0] == u / (u * u - 1)
    assert x[1] == -one / (u * u - 1)
    assert inverse(M) @ M == ExactMatrix.identity(2, one)


def test_rank_over_rational_functions():
    u = RationalFunction.u_power(1)
    M = ExactMatrix([[u, u * u], [RationalFunction.one(), u]])
    assert rank_over_field(M) == 1


def test_rational_roots_multiplicity():
    # (x - 2)^2 (x + 2)^2 (3x - 1)
    p = sympy.Poly(sympy.expand((U - 2) ** 2 * (U + 2) ** 2 * (3 * U - 1)), U)
    cs = [Fraction(int(c)) for c in reversed(p.all_coeffs())]
    assert rational_roots(cs) == {Fraction(2): 2, Fraction(-2): 2, Fraction(1, 3): 1}


def test_bigreal_precision_is_min():
    a = BigReal(Fraction(1, 3), 40)
    b = BigReal(Fraction(1, 7), 25)
    assert (a + b).digits == 25
    assert (2 * a).digits == 40
    assert abs(float(euler_gamma(30)) - 0.5772156649015329) < 1e-15
