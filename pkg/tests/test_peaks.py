from fractions import Fraction

import mpmath
import pytest

from qdeq import peaks
from qdeq.peaks import (
    UnsupportedRegimeError,
    cpn_period_params,
    peaking_defect,
    quantum_period_params,
    scaling_sequence,
    series_params,
    stokes_ratio,
    tail_ratios,
    tail_window,
)

GRID = (10 ** 3, 10 ** 4, 10 ** 5)


@pytest.fixture(scope="module")
def qp():
    return quantum_period_params()


def test_quantum_period_parameters(qp):
    assert qp.kappa == 2 and qp.theta == -1
    assert float(qp.h()) == 1.0


@pytest.mark.parametrize("N", [1, 2, 5])
def test_cpn_parameters(N):
    p = cpn_period_params(N)
    assert p.kappa == N + 1 and float(p.h()) == 1.0


def test_h_with_alphas():
    p = series_params(alphas=(2,), a=(1,), betas=(1, 1, 1, 1), b=(1, 1, 1, 1))
    assert p.kappa == 2
    assert abs(float(p.h()) - 4.0) < 1e-40


def test_balanced_series_rejected():
    with pytest.raises(ValueError):
        series_params(alphas=(1,), a=(1,), betas=(1,), b=(1,))
    with pytest.raises(ValueError):
        series_params(betas=(1, 1), b=(1,))


def test_peak_location(qp):
    assert abs(float(qp.peak(10 ** 4)) - 100) < 1e-30


@pytest.mark.parametrize("name", ["one", "harmonic", "sym11", "logpow:3"])
def test_scaling_sequences_bounded_and_increasing(name):
    s = scaling_sequence(name)
    grid = sorted({int(10 ** (k / 4)) for k in range(0, 25)})
    vals = [s(n) for n in grid]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert all(v <= s.B * n for v, n in zip(vals, grid))


def test_unknown_scaling_sequence():
    with pytest.raises(ValueError):
        scaling_sequence("fib")


def test_log_sum_against_bessel(qp):
    for x in (10, 400, 10 ** 4):
        with mpmath.workdps(60):
            want = mpmath.log(mpmath.besseli(0, 2 * mpmath.sqrt(x)))
            assert abs(peaks.log_sum(qp, x) - want) < mpmath.mpf(10) ** -35


def test_masses_sum_to_one(qp):
    for x in GRID:
        r = tail_ratios(qp, x)
        total = r.head.value + r.tail.value + r.window.value
        assert abs(total - 1) < mpmath.mpf(10) ** -45


def test_window_shape(qp):
    w = tail_window(qp, 10 ** 4, Fraction(2, 5))
    assert (w.n_minus, w.n_plus) == (97, 102)
    assert w.n_minus <= w.n_plus


def test_degenerate_window_head_is_first_term(qp):
    x = 100
    r = tail_ratios(qp, x, nu=0)
    assert r.n_minus == 0
    with mpmath.workdps(60):
        want = 1 / mpmath.besseli(0, 2 * mpmath.sqrt(x))
        assert abs(r.head.value - want) < mpmath.mpf(10) ** -40


def test_tail_ratios_small_at_1e4(qp):
    r = tail_ratios(qp, 10 ** 4, Fraction(2, 5))
    assert float(r.head) < 1e-3 and float(r.tail) < 1e-3


def test_tail_ratios_decrease_over_grid(qp):
    rs = [tail_ratios(qp, x, Fraction(2, 5)) for x in GRID]
    assert all(b.head < a.head and b.tail < a.tail for a, b in zip(rs, rs[1:]))


def test_peak_based_eps_decreases(qp):
    rs = [tail_ratios(qp, x, Fraction(2, 5), eps_base="peak") for x in GRID]
    assert all(b.head < a.head and b.tail < a.tail for a, b in zip(rs, rs[1:]))


@pytest.mark.parametrize("name", ["one", "harmonic"])
def test_defect_vanishes_at_k0(qp, name):
    assert peaking_defect(qp, 500, name, k=0).value == 0


def test_defect_decreases_with_harmonic(qp):
    d = [float(peaking_defect(qp, x, "harmonic", 1)) for x in GRID]
    assert d[0] > d[1] > d[2]


def test_defect_constant_sequence_small(qp):
    assert float(peaking_defect(qp, 10 ** 4, "one", 1)) < 0.1


def test_stokes_ratio_matches_bessel_oracle(qp):
    r = stokes_ratio(qp, 10 ** 6)
    o = peaks.bessel_oracle_ratio(10 ** 6)
    assert abs(float(r) - 1) < 0.02
    assert abs(r.value - o.value) < mpmath.mpf(10) ** -30


def test_stokes_ratio_improves(qp):
    assert abs(float(stokes_ratio(qp, 10 ** 6)) - 1) < abs(float(stokes_ratio(qp, 10 ** 4)) - 1)


def test_stokes_exponential_series():
    p = series_params(betas=(1,), b=(1,))
    assert p.theta == Fraction(-1, 2)
    assert abs(float(stokes_ratio(p, 1000)) - 1) < 1e-3


def test_stokes_rejects_nonunit():
    p = series_params(alphas=(2,), a=(1,), betas=(1, 1, 1, 1), b=(1, 1, 1, 1))
    with pytest.raises(UnsupportedRegimeError):
        stokes_ratio(p, 100)


def test_fit_decay_rate():
    xs = [10.0, 100.0, 1000.0]
    rs = [mpmath.exp(-0.5 * x ** 0.25) for x in xs]
    beta, la = peaks.fit_decay_rate(xs, rs)
    assert beta == pytest.approx(0.25) and la == pytest.approx(mpmath.log(0.5))
    assert peaks.fit_decay_rate([10.0], [0.5]) is None
    assert peaks.fit_decay_rate([10.0, 100.0], [1.2, 0.5]) is None
