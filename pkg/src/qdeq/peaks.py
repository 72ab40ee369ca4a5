"""Laplace's method for hypergeometric-type power series.

    F(x) = sum_n  prod_r Gamma(alpha_r n + a_r) / prod_r Gamma(beta_r n + b_r)  x^n

peaks near n = (h x)^(1/kappa).  This module sums such series directly in
log space (mpmath ``loggamma``), measures the mass outside the window
(1 -/+ x^-nu)(h x)^(1/kappa), evaluates the peaking defect of a scaling
sequence, and compares F with its Stokes asymptotic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .exactcore import DEFAULT_DIGITS, BigReal, to_mpf

RUN_LENGTH = 200       # consecutive negligible terms before stopping


class UnsupportedRegimeError(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class PeakSeriesParams:
    alphas: tuple[Fraction, ...]
    a: tuple[Fraction, ...]
    betas: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    kappa: Fraction
    theta: Fraction

    def h(self, digits: int = DEFAULT_DIGITS) -> BigReal:
        with mpmath.workdps(digits + 10):
            v = mpmath.mpf(1)
            for al in self.alphas:
                v *= to_mpf(al, digits) ** to_mpf(al, digits)
            for be in self.betas:
                v /= to_mpf(be, digits) ** to_mpf(be, digits)
            return BigReal(v, digits)

    def peak(self, x, digits: int = DEFAULT_DIGITS) -> BigReal:
        """f(x) = (h x)^(1/kappa)."""
        with mpmath.workdps(digits + 10):
            v = (self.h(digits).value * to_mpf(x, digits)) ** (1 / to_mpf(self.kappa, digits))
            return BigReal(v, digits)

    def log_term(self, n: int, logx) -> mpmath.mpf:
        """log(a_n x^n) at the current mpmath precision."""
        v = n * logx
        for al, ar in zip(self.alphas, self.a):
            v += mpmath.loggamma(al * n + mpmath.mpf(ar.numerator) / ar.denominator)
        for be, br in zip(self.betas, self.b):
            v -= mpmath.loggamma(be * n + mpmath.mpf(br.numerator) / br.denominator)
        return v


def series_params(alphas: Sequence = (), a: Sequence = (), betas: Sequence = (),
                  b: Sequence = ()) -> PeakSeriesParams:
    alphas = tuple(_frac(v) for v in alphas)
    a = tuple(_frac(v) for v in a)
    betas = tuple(_frac(v) for v in betas)
    b = tuple(_frac(v) for v in b)
    if len(alphas) != len(a) or len(betas) != len(b):
        raise ValueError("each alpha needs a shift a, each beta a shift b")
    if any(v <= 0 for v in alphas + betas + a) or any(v <= 0 for v in b):
        raise ValueError("alphas, betas and shifts must be positive")
    kappa = sum(betas, Fraction(0)) - sum(alphas, Fraction(0))
    if kappa < 1:
        raise ValueError(f"kappa = {kappa} < 1 is not supported")
    theta = sum(a, Fraction(0)) - sum(b, Fraction(0)) + kappa / 2
    return PeakSeriesParams(alphas, a, betas, b, kappa, theta)


def quantum_period_params() -> PeakSeriesParams:
    """sum x^n / n!^2, the twistor quantum period in x = t^2."""
    return series_params(betas=(1, 1), b=(1, 1))


def cpn_period_params(N: int) -> PeakSeriesParams:
    return series_params(betas=(1,) * (N + 1), b=(1,) * (N + 1))


# ---------------------------------------------------------------------------
# scaling sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingSequence:
    """A subpolynomially increasing sequence b_n with a stored bound b_n <= B n."""
    name: str
    fn: Callable[[int], mpmath.mpf]
    B: float

    def __call__(self, n: int):
        return self.fn(n)


def _harmonic(n: int):
    return mpmath.harmonic(n)


def _sym11(n: int):
    h1 = mpmath.harmonic(n)
    h2 = mpmath.zeta(2) - mpmath.zeta(2, n + 1)
    return (h1 * h1 + h2) / 2


def scaling_sequence(name: str) -> ScalingSequence:
    """``one``, ``harmonic`` (H_n), ``sym11`` (S_n(1,1)) or ``logpow:p`` ((1 + ln n)^p)."""
    if name == "one":
        return ScalingSequence(name, lambda n: mpmath.mpf(1), 1.0)
    if name == "harmonic":
        return ScalingSequence(name, _harmonic, 1.0)
    if name == "sym11":
        return ScalingSequence(name, _sym11, 1.0)
    if name.startswith("logpow:"):
        p = int(name.split(":", 1)[1])
        if p < 0:
            raise ValueError("power must be >= 0")
        # max of (1 + ln n)^p / n over n >= 1 sits at ln n = p - 1
        B = max(1.0, p ** p / math.exp(p - 1)) if p else 1.0
        return ScalingSequence(name, lambda n, p=p: (1 + mpmath.log(n)) ** p, B)
    raise ValueError(f"unknown scaling sequence {name!r}")


# ---------------------------------------------------------------------------
# direct summation
# ---------------------------------------------------------------------------

@dataclass
class _Terms:
    logmax: mpmath.mpf
    weights: list          # a_n x^n / exp(logmax), n = 0, 1, ...


def _terms(params: PeakSeriesParams, x, digits: int) -> _Terms:
    logx = mpmath.log(to_mpf(x, digits))
    peak = float(params.peak(x, digits))
    # log terms; past the peak stop after RUN_LENGTH negligible ones
    logs = []
    cutoff = -(digits + 10) * mpmath.log(10)
    best = -mpmath.inf
    n = 0
    run = 0
    while True:
        lt = params.log_term(n, logx)
        logs.append(lt)
        if lt > best:
            best = lt
        if n > peak and lt - best < cutoff:
            run += 1
            if run >= RUN_LENGTH:
                break
        else:
            run = 0
        n += 1
    return _Terms(best, [mpmath.exp(lt - best) for lt in logs])


@dataclass(frozen=True)
class TailWindow:
    x: float
    nu: Fraction
    eps: BigReal
    n_minus: int
    n_plus: int


def tail_window(params: PeakSeriesParams, x, nu, digits: int = DEFAULT_DIGITS,
                eps_base: str = "x") -> TailWindow:
    """Window N_-/+ = floor((1 -/+ eps) f(x)) with eps = x^-nu.

    ``eps_base="peak"`` uses eps = f(x)^-nu instead (not the default).
    """
    if eps_base not in ("x", "peak"):
        raise ValueError("eps_base must be 'x' or 'peak'")
    with mpmath.workdps(digits + 10):
        f = params.peak(x, digits).value
        base = to_mpf(x, digits) if eps_base == "x" else f
        eps = base ** (-to_mpf(_frac(nu), digits))
        n_minus = int(mpmath.floor((1 - eps) * f))
        n_plus = int(mpmath.floor((1 + eps) * f))
    return TailWindow(float(x), _frac(nu), BigReal(eps, digits), max(n_minus, 0), n_plus)


@dataclass(frozen=True)
class TailRatios:
    head: BigReal
    tail: BigReal
    window: BigReal
    n_minus: int
    n_plus: int

    def as_tuple(self):
        return self.head, self.tail


def tail_ratios(params: PeakSeriesParams, x, nu=Fraction(2, 5),
                digits: int = DEFAULT_DIGITS, eps_base: str = "x") -> TailRatios:
    """Mass of n <= N_- (head) and n >= N_+ (tail) relative to the full sum."""
    with mpmath.workdps(digits + 10):
        w = tail_window(params, x, nu, digits, eps_base)
        t = _terms(params, x, digits)
        total = mpmath.fsum(t.weights)
        head = mpmath.fsum(t.weights[: w.n_minus + 1])
        tail = mpmath.fsum(t.weights[w.n_plus:])
        window = mpmath.fsum(t.weights[w.n_minus + 1: w.n_plus])
        return TailRatios(BigReal(head / total, digits), BigReal(tail / total, digits),
                          BigReal(window / total, digits), w.n_minus, w.n_plus)


def peaking_defect(params: PeakSeriesParams, x, b_seq: ScalingSequence | str = "harmonic",
                   k: int = 1, digits: int = DEFAULT_DIGITS) -> BigReal:
    """|sum_{n>=1} a_n b_n ln(n)^k x^n - ln(f(x))^k sum_{n>=1} a_n b_n x^n| / F(x)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if isinstance(b_seq, str):
        b_seq = scaling_sequence(b_seq)
    with mpmath.workdps(digits + 10):
        t = _terms(params, x, digits)
        total = mpmath.fsum(t.weights)
        lf = mpmath.log(params.peak(x, digits).value)
        diff = mpmath.fsum(
            wn * b_seq(n) * (mpmath.log(n) ** k - lf ** k)
            for n, wn in enumerate(t.weights) if n >= 1
        )
        return BigReal(abs(diff) / total, digits)


def log_sum(params: PeakSeriesParams, x, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """log F(x) by direct summation."""
    with mpmath.workdps(digits + 10):
        t = _terms(params, x, digits)
        return t.logmax + mpmath.log(mpmath.fsum(t.weights))


def stokes_ratio(params: PeakSeriesParams, x, digits: int = DEFAULT_DIGITS) -> BigReal:
    """F(x) / ((2 pi)^((1-kappa)/2) kappa^(-1/2) x^((theta+1/2)/kappa) exp(kappa x^(1/kappa)))."""
    if any(v != 1 for v in params.alphas + params.betas):
        raise UnsupportedRegimeError("the Stokes form needs all alpha_r = beta_r = 1")
    with mpmath.workdps(digits + 10):
        X = to_mpf(x, digits)
        kap = to_mpf(params.kappa, digits)
        th = to_mpf(params.theta, digits)
        log_asym = ((1 - kap) / 2 * mpmath.log(2 * mpmath.pi) - mpmath.log(kap) / 2
                    + (th + mpmath.mpf(1) / 2) / kap * mpmath.log(X) + kap * X ** (1 / kap))
        return BigReal(mpmath.exp(log_sum(params, x, digits) - log_asym), digits)


def bessel_oracle_ratio(x, digits: int = DEFAULT_DIGITS) -> BigReal:
    """sum x^n/n!^2 = I_0(2 sqrt x) against e^(2 sqrt x) / (2 sqrt(pi) x^(1/4))."""
    with mpmath.workdps(digits + 10):
        X = to_mpf(x, digits)
        s = 2 * mpmath.sqrt(X)
        return BigReal(mpmath.besseli(0, s) * 2 * mpmath.sqrt(mpmath.pi) * X ** 0.25
                       / mpmath.exp(s), digits)


def fit_decay_rate(xs: Sequence, ratios: Sequence) -> tuple[float, float] | None:
    """Least squares of ln(-ln r) against ln x: returns (beta, ln alpha) or None.

    Descriptive only; ratios >= 1 or <= 0 are skipped.
    """
    pts = [(math.log(float(x)), math.log(-math.log(float(r))))
           for x, r in zip(xs, ratios) if 0 < float(r) < 1]
    if len(pts) < 2:
        return None
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    sxx = sum((p[0] - mx) ** 2 for p in pts)
    if sxx == 0:
        return None
    beta = sum((p[0] - mx) * (p[1] - my) for p in pts) / sxx
    return beta, my - beta * mx


__all__ = [
    "PeakSeriesParams", "ScalingSequence", "TailWindow", "TailRatios",
    "UnsupportedRegimeError", "series_params", "quantum_period_params",
    "cpn_period_params", "scaling_sequence", "tail_window", "tail_ratios",
    "peaking_defect", "log_sum", "stokes_ratio", "bessel_oracle_ratio", "fit_decay_rate",
]
