from fractions import Fraction

import mpmath
import pytest
import sympy

from qdeq.cohmodel import (
    InvalidBlockError,
    UnknownSpaceError,
    gamma_class,
    loop_euler_class,
    mu_diagonal,
    quantum_c1_matrix,
    space_model,
)
from qdeq.exactcore import charpoly, to_mpf


@pytest.fixture
def Z():
    return space_model("twistor")


def test_twistor_ring_relations(Z):
    a, x = Z.basis_class("a"), Z.basis_class("x")
    assert a ** 4 == (a * x).scale(-8)
    assert (x * x).is_exact() and not any((x * x).coeffs)
    assert (a ** 3 * x).pair() == 8
    assert Z.point_class().pair() == 1


def test_twistor_chern_character(Z):
    a, x = Z.basis_class("a"), Z.basis_class("x")
    ch = Z.chern_character
    assert ch[0] == a
    assert ch[1] == (a ** 2).scale(Fraction(1, 2))
    assert ch[2] == (a ** 3).scale(Fraction(1, 6)) + x
    assert ch[3] == (a * x).scale(Fraction(1, 6))
    assert ch[4] == (a ** 2 * x).scale(Fraction(7, 120))
    assert ch[5] == (a ** 3 * x).scale(Fraction(7, 720))
    assert Z.fano_index == 2 and Z.c1 == a


@pytest.mark.parametrize("N", [1, 2, 3, 6])
def test_cpn_ring_and_chern_character(N):
    P = space_model("cpN", N=N)
    h = P.basis_class("h")
    assert not any((h ** (N + 1)).coeffs)
    for m, c in enumerate(P.chern_character, start=1):
        assert c == (h ** m).scale(Fraction(N + 1, sympy.factorial(m)))
    assert P.fano_index == N + 1


def test_space_model_errors():
    with pytest.raises(UnknownSpaceError):
        space_model("quintic")
    with pytest.raises(InvalidBlockError):
        quantum_c1_matrix(space_model("cp2"), "y", 1)


@pytest.mark.parametrize("N", [1, 2, 4])
def test_cpn_quantum_charpoly(N):
    for q in (Fraction(1), Fraction(3, 2)):
        cp = charpoly(quantum_c1_matrix(space_model("cpN", N=N), "full", q))
        want = [Fraction(0)] * (N + 2)
        want[N + 1] = Fraction(1)
        want[0] = -Fraction(N + 1) ** (N + 1) * q
        assert cp == want


def test_twistor_c1_matrices_charpoly():
    for chi in (1, -2, -13):
        Z = space_model("twistor", chi=chi)
        assert charpoly(quantum_c1_matrix(Z, "y", 1)) == [16, 0, -8, 0, 1]
        main = quantum_c1_matrix(Z, "main", 1)
        assert main[5, 3] == 8 * chi
        assert charpoly(main) == [256, 0, -256, 0, 96, 0, -16, 0, 1]


def test_mu_grading():
    Z = space_model("twistor")
    assert mu_diagonal(Z, "main") == [-3, -2, -1, 0, 0, 1, 2, 3]
    assert mu_diagonal(Z, "y") == [-2, -1, 0, 1]
    assert mu_diagonal(space_model("cp2"), "full") == [-1, 0, 1]


def test_cpn_gamma_class_against_loggamma_series():
    # Gamma_{CP^N} = Gamma(1 + h)^(N+1) in Q[h]/h^(N+1)
    for N in (2, 3):
        P = space_model("cpN", N=N)
        g = gamma_class(P, 30)
        with mpmath.workdps(40):
            taylor = mpmath.taylor(lambda t: mpmath.gamma(1 + t) ** (N + 1), 0, N)
        for k in range(N + 1):
            assert abs(to_mpf(g.coeffs[k], 30) - taylor[k]) < mpmath.mpf(10) ** -25


def test_twistor_gamma_class_leading_terms():
    Z = space_model("twistor")
    g = gamma_class(Z, 30)
    with mpmath.workdps(40):
        assert abs(g["a"].value + mpmath.euler) < mpmath.mpf(10) ** -25
        # coefficient of a^2: gamma^2/2 + zeta(2)/2
        assert abs(g["a2"].value - (mpmath.euler ** 2 / 2 + mpmath.zeta(2) / 2)) < mpmath.mpf(10) ** -25


def _series_inverse_product(n, r, order):
    """Truncated power series of prod_k (1 + h/k)^-r by repeated multiplication."""
    out = [Fraction(1)] + [Fraction(0)] * order
    for k in range(1, n + 1):
        inv = [Fraction((-1) ** j, k ** j) for j in range(order + 1)]
        for _ in range(r):
            out = [sum(out[i] * inv[j - i] for i in range(j + 1)) for j in range(order + 1)]
    return out


@pytest.mark.parametrize("n", [1, 4, 9, 30])
def test_loop_euler_class_against_product(n):
    P = space_model("cp2")
    assert list(loop_euler_class(P, n).coeffs) == _series_inverse_product(n, 3, 2)


def test_loop_euler_numeric_matches_exact():
    P = space_model("cp3")
    exact = loop_euler_class(P, 200)
    num = loop_euler_class(P, 200, digits=40)
    for e, v in zip(exact.coeffs, num.coeffs):
        assert abs(float(v - e)) < 1e-30


def test_to_json_is_strings(Z):
    data = Z.to_json()
    assert data["pairing"]["a3x"] == "8"
    assert data["c1_star"]["y"][0][1] == "4"
