"""Apery-limit checks of Gamma Conjecture 1.

For a normalised J-coefficient J_n (constant term 1) put P_{i,n} for its
degree-2i part and

    R_{i,n} = (e^{c1 log n} J_n)|_{2i} - h_i(R_{1,n}, ..., R_{i-1,n})

where h_i is the weight-i part of exp(x_1 + ... + x_{i-1}).  The R_{i,n} are
the homogeneous parts of log(e^{c1 log n} J_n), so their limits should be
the homogeneous parts of log Gamma, i.e. -gamma ch_1 and
(-1)^i (i-1)! zeta(i) ch_i for i >= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import jfun
from .cohmodel import CohomClass, SpaceModel, gamma_class, loop_euler_class, space_model
from .exactcore import DEFAULT_DIGITS, BigReal, euler_gamma, log
from .mzv import EXACT_CROSSOVER, MZVCombination, zeta_value


# ---------------------------------------------------------------------------
# h polynomials
# ---------------------------------------------------------------------------

def _partitions(n: int, largest: int):
    """Partitions of n into parts <= largest, as {part: multiplicity}."""
    if n == 0:
        yield {}
        return
    for p in range(min(n, largest), 0, -1):
        for rest in _partitions(n - p, p):
            out = dict(rest)
            out[p] = out.get(p, 0) + 1
            yield out


@dataclass(frozen=True)
class HPolynomial:
    """Quasi-homogeneous polynomial in x_1..x_{i-1}; terms map exponent tuples to coefficients."""
    i: int
    terms: dict = field(hash=False)

    def __call__(self, xs: Sequence, one=None):
        """Evaluate on ``xs[0] = x_1, xs[1] = x_2, ...`` (ring elements or numbers)."""
        if not self.terms:
            return one.scale(0) if isinstance(one, CohomClass) else 0
        total = None
        for exps, c in self.terms.items():
            term = one
            for j, e in enumerate(exps):
                for _ in range(e):
                    term = xs[j] if term is None else term * xs[j]
            term = term.scale(c) if isinstance(term, CohomClass) else term * c
            total = term if total is None else total + term
        return total

    def to_string(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in sorted(self.terms.items(), key=lambda t: tuple(-e for e in t[0])):
            mono = "*".join(f"x{j + 1}" + (f"^{e}" if e > 1 else "")
                            for j, e in enumerate(exps) if e)
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def h_poly(i: int) -> HPolynomial:
    """Weight-i part of exp(x_1 + ... + x_{i-1}); h_0 = h_1 = 0."""
    if i < 0:
        raise ValueError("i must be >= 0")
    terms: dict[tuple, Fraction] = {}
    if i >= 2:
        for part in _partitions(i, i - 1):
            exps = tuple(part.get(j, 0) for j in range(1, i))
            c = Fraction(1)
            for m in part.values():
                c /= math.factorial(m)
            terms[exps] = c
    return HPolynomial(i, terms)


# ---------------------------------------------------------------------------
# normalised J and R sequences
# ---------------------------------------------------------------------------

def normalized_j(model: SpaceModel, n: int, digits: int = DEFAULT_DIGITS,
                 crossover: int = EXACT_CROSSOVER) -> CohomClass:
    """J_n / <J_n, pt>; exact up to ``crossover``, BigReal beyond."""
    if model.name == "twistor":
        if n <= crossover:
            return jfun.j_corollary(n, model)
        return jfun.j_corollary_numeric(n, digits, model)
    if n <= crossover:
        return jfun.j_coeff(model, n).normalized
    # for CP^N the normalised J is the loop space class
    return loop_euler_class(model, n, digits)


def degree_parts(c: CohomClass) -> list[CohomClass]:
    return [c.degree_part(2 * i) for i in range(c.model.dim + 1)]


def r_all(model: SpaceModel, n: int, digits: int = DEFAULT_DIGITS,
          crossover: int = EXACT_CROSSOVER) -> list[CohomClass]:
    """[R_{0,n}, R_{1,n}, ..., R_{dim,n}] by the defining recursion, with log n numeric."""
    if n < 1:
        raise ValueError("n must be >= 1")
    P = degree_parts(normalized_j(model, n, digits, crossover))
    L = log(n, digits)
    c1 = model.c1
    one = model.one()
    powers = [one]
    for j in range(1, model.dim + 1):
        powers.append(powers[-1].cup(c1).scale(L / j))      # (log n c1)^j / j!
    R: list[CohomClass] = [model.zero()]
    for i in range(1, model.dim + 1):
        acc = model.zero()
        for j in range(0, i + 1):
            acc = acc + powers[j].cup(P[i - j])
        acc = acc - h_poly(i)(R[1:i], one)
        R.append(acc.degree_part(2 * i))
    return R


def r_sequence(space, i: int, n: int, digits: int = DEFAULT_DIGITS,
               crossover: int = EXACT_CROSSOVER) -> CohomClass:
    model = space_model(space) if isinstance(space, str) else space
    if not 0 <= i <= model.dim:
        raise ValueError(f"i must lie in 0..{model.dim}")
    return r_all(model, n, digits, crossover)[i]


def r_exact(space, n: int) -> list[CohomClass]:
    """R_{i,n} for i >= 2 as exact classes: the parts of log(J_n / <J_n, pt>).

    The e^{c1 log n} factor only changes the degree-2 part of the logarithm,
    so from i = 2 on no logarithm of n is involved.  Entries 0 and 1 are None.
    """
    model = space_model(space) if isinstance(space, str) else space
    lg = normalized_j(model, n, crossover=max(n, EXACT_CROSSOVER)).log()
    return [None, None] + [lg.degree_part(2 * i) for i in range(2, model.dim + 1)]


# the finite-n reductions of R_3, R_4, R_5, R_6 for the twistor space
def _c(*terms) -> MZVCombination:
    return MZVCombination([(idx, Fraction(c)) for c, idx in terms])


TWISTOR_REDUCTIONS: dict[tuple[int, str], MZVCombination] = {
    (2, "a2"): _c((Fraction(1, 2), (2,))),
    (3, "a3"): _c((Fraction(-1, 3), (3,))),
    (3, "x"): _c((-1, (3,)), (-1, (2, 1))),
    (4, "ax"): _c((1, (2, 2)), (1, (3, 1))),
    (5, "a2x"): _c((Fraction(1, 2), (2, 2, 1)), (Fraction(-1, 2), (2, 3)), (-1, (3, 2)),
                   (Fraction(-1, 2), (4, 1)), (Fraction(-9, 10), (5,))),
    (6, "a3x"): _c((Fraction(7, 6), (6,)), (Fraction(1, 2), (3, 3)), (Fraction(1, 2), (4, 2)),
                   (Fraction(-1, 2), (2, 2, 2)), (Fraction(-1, 2), (2, 3, 1)),
                   (Fraction(-1, 2), (3, 2, 1))),
}


def check_reductions(n_max: int = 50) -> list[tuple[int, str, int, bool]]:
    """Compare exact R_{i,n} coefficients with the reductions for n = 1..n_max."""
    model = space_model("twistor")
    out = []
    for n in range(1, n_max + 1):
        R = r_exact(model, n)
        for (i, label), comb in TWISTOR_REDUCTIONS.items():
            out.append((i, label, n, R[i][label] == comb.evaluate(n)))
    return out


# ---------------------------------------------------------------------------
# targets and reports
# ---------------------------------------------------------------------------

def gamma_targets(model: SpaceModel, digits: int = DEFAULT_DIGITS) -> list[CohomClass]:
    """Homogeneous parts of log Gamma: -gamma ch_1, then (-1)^i (i-1)! zeta(i) ch_i."""
    ch = model.chern_character
    out = [model.zero(), ch[0].scale(-euler_gamma(digits))]
    for i in range(2, model.dim + 1):
        c = BigReal((-1) ** i * math.factorial(i - 1), digits) * zeta_value(i, digits)
        out.append(ch[i - 1].scale(c))
    return out


def tolerance(i: int, n: int, scale=10) -> float:
    """Tolerance model per degree: fixed 1e-4 for i <= 2, c ln(n)^w / n^2 above."""
    if i <= 2:
        return 1e-4
    w = 1 if i <= 4 else 2
    return float(scale) * math.log(n) ** w / n ** 2


@dataclass
class LimitRow:
    i: int
    label: str
    n: int
    estimate: BigReal
    target: BigReal
    deviation: BigReal
    tol: float
    method: str
    note: str = ""

    @property
    def passed(self) -> bool:
        return float(self.deviation) <= self.tol

    def to_json(self) -> dict:
        return {
            "i": self.i, "coefficient": self.label, "n": self.n, "method": self.method,
            "estimate": self.estimate.to_string(20), "target": self.target.to_string(20),
            "deviation": self.deviation.to_string(6), "tolerance": f"{self.tol:.3e}",
            "pass": self.passed, "note": self.note,
        }


NOTES = {
    (5, "a2x"): "target -(7/5)zeta(5): the zeta(5) factor is restored from ch_5",
}


def _as_big(x, digits) -> BigReal:
    return x if isinstance(x, BigReal) else BigReal(x, digits)


def limit_report(space, i_max: int | None = None, n_schedule: Sequence[int] = (100000,),
                 extrapolate: str = "none", tolerance_scale=10,
                 digits: int = DEFAULT_DIGITS) -> list[LimitRow]:
    """Compare limit estimates against the Gamma class.

    Twistor space: R_{i,n} against the parts of log Gamma.  CP^N: the class
    e^{c1 log n} loop_euler_class(n) against Gamma itself (tolerance 1e-3).
    With ``extrapolate="richardson"`` the last two schedule points n1 < n2
    are combined as (n2 R(n2) - n1 R(n1)) / (n2 - n1), removing a 1/n term.
    """
    model = space_model(space) if isinstance(space, str) else space
    i_max = model.dim if i_max is None else i_max
    sched = sorted(set(int(n) for n in n_schedule))
    if extrapolate not in ("none", "richardson"):
        raise ValueError("extrapolate must be 'none' or 'richardson'")
    if extrapolate == "richardson" and len(sched) < 2:
        raise ValueError("richardson needs at least two schedule points")
    rows: list[LimitRow] = []
    if model.name == "cpn":
        gam = gamma_class(model, digits)
        for n in sched:
            L = loop_euler_class(model, n, digits if n > EXACT_CROSSOVER else None)
            est = model.c1.scale(log(n, digits)).exp().cup(L)
            for k in range(1, model.size):
                deg = model.degrees[k] // 2
                if deg > i_max:
                    continue
                e, t = _as_big(est.coeffs[k], digits), gam.coeffs[k]
                rows.append(LimitRow(deg, model.labels[k], n, e, t, abs(e - t), 1e-3, "direct"))
        return rows
    targets = gamma_targets(model, digits)
    values = {n: r_all(model, n, digits) for n in sched}
    for i in range(1, i_max + 1):
        for k in range(model.size):
            if model.degrees[k] != 2 * i:
                continue
            label = model.labels[k]
            t = targets[i].coeffs[k]
            if not t:
                continue
            for n in sched:
                e = _as_big(values[n][i].coeffs[k], digits)
                rows.append(LimitRow(i, label, n, e, t, abs(e - t), tolerance(i, n, tolerance_scale),
                                     "raw", NOTES.get((i, label), "")))
            if extrapolate == "richardson":
                n1, n2 = sched[-2], sched[-1]
                e1 = _as_big(values[n1][i].coeffs[k], digits)
                e2 = _as_big(values[n2][i].coeffs[k], digits)
                e = (e2 * n2 - e1 * n1) / (n2 - n1)
                rows.append(LimitRow(i, label, n2, e, t, abs(e - t),
                                     tolerance(i, n2, tolerance_scale), "richardson",
                                     NOTES.get((i, label), "")))
    return rows


__all__ = [
    "HPolynomial", "h_poly", "normalized_j", "r_all", "r_sequence", "r_exact",
    "TWISTOR_REDUCTIONS", "check_reductions", "gamma_targets", "tolerance",
    "LimitRow", "limit_report",
]
