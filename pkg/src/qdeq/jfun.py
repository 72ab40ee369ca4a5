"""Descendant invariants and J-function coefficients.

Twistor space Z over a hyperbolic 6-manifold M.  The engine works in the
basis ``a^k V^delta`` (V = Vol_M, delta in {0, 1}, k = 0..3) together with
a y-sector ``a^k y``, ``a^k y'`` for a pair of classes y, y' of complementary
degree on M with integral g = int y y'.  The classical ring has
``a^4 = -8 chi a V`` where chi is the Euler number, so the class tau^*chi is
``chi * V``.

Invariants are computed from the degree-one two-point seeds by two moves,
both genus-zero identities with the divisor alpha (alpha(A) = 2):

* divisor:  <psi^a x, b, alpha>_d = 2d <psi^a x, b>_d + <psi^(a-1) x alpha, b>_d
* TRR at the psi point, splitting off <., b, alpha>_e with e in {0, 1}.

Equating the two gives a recursion that lowers (d, psi-power).  ψ-powers are
always forced by the degree axiom, so a key is just (d, insertions).
"""

from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cohmodel import CohomClass, SpaceModel, space_model
from .exactcore import DEFAULT_DIGITS, BigReal, ExactMatrix, inverse
from .mzv import numeric_values, sym_sum

ENGINE_LABELS = (
    "1", "a", "a2", "a3", "V", "aV", "a2V", "a3V",
    "y", "ay", "a2y", "a3y", "y'", "ay'", "a2y'", "a3y'",
)
COMPLEX_DIM = 6


class UnreachableKeyError(RuntimeError):
    """The recursion met a key it cannot ground (a table bug, not user error)."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# keys
# ---------------------------------------------------------------------------

def _parse_insertion(label: str) -> dict[int, Fraction]:
    """Engine label (or ``VolZ`` / ``x``-style alias) to a coefficient vector."""
    if label == "VolZ":
        return {ENGINE_LABELS.index("a3V"): Fraction(1, 8)}
    if label in ENGINE_LABELS:
        return {ENGINE_LABELS.index(label): Fraction(1)}
    raise UnreachableKeyError(f"unknown insertion {label!r}")


@dataclass(frozen=True)
class DescendantKey:
    """A 1- or 2-point descendant invariant <psi^* x (, b)>_d.

    Insertions are engine labels such as ``"a2V"`` or ``"ay"``; ``"VolZ"``
    is accepted as shorthand for ``a3V/8``.  The psi power sits on the first
    insertion and follows from the degree axiom.
    """
    d: int
    insertion: str
    extra: str | None = None

    def psi_power(self, y_degree: int = 2) -> int:
        c = y_degree // 2
        deg = _label_degree(self.insertion, c)
        if self.extra is None:
            return 2 * self.d + COMPLEX_DIM - 2 - deg
        return 2 * self.d + COMPLEX_DIM - 1 - deg - _label_degree(self.extra, c)

    def __str__(self):
        inner = self.insertion if self.extra is None else f"{self.insertion}, {self.extra}"
        return f"<psi^* {inner}>_{self.d}"


def _engine_degree(i: int, c: int) -> int:
    """Complex degree of engine basis vector ``i`` (y has complex degree c)."""
    block, k = divmod(i, 4)
    return k + (0, 3, c, 3 - c)[block]


def _label_degree(label: str, c: int) -> int:
    if label == "VolZ":
        return COMPLEX_DIM
    return _engine_degree(ENGINE_LABELS.index(label), c)


# ---------------------------------------------------------------------------
# engine
# ---------------------------------------------------------------------------

class TwistorDescendants:
    """Memoised descendant invariants of Z for a fixed Euler number chi.

    The memo is filled by a single writer (a lock) and read freely.
    """

    def __init__(self, chi=1, y_degree: int = 2, y_pairing=1):
        self.chi = _frac(chi)
        if y_degree not in (2, 4):
            raise ValueError("y_degree must be 2 or 4")
        self.c = y_degree // 2
        self.g = _frac(y_pairing)
        if self.g == 0:
            raise ValueError("y_pairing must be nonzero")
        self.n = len(ENGINE_LABELS)
        self.degrees = [_engine_degree(i, self.c) for i in range(self.n)]
        self.gram = self._gram()
        self.gram_inv = inverse(self.gram)
        self.seeds = self._seeds()
        self.q1 = [self._q1(b) for b in range(self.n)]
        self._memo: dict[tuple, Fraction] = {}
        self._why: dict[tuple, tuple] = {}
        self._lock = threading.RLock()

    # -- classical data ------------------------------------------------------

    def times_alpha(self, i: int) -> dict[int, Fraction]:
        block, k = divmod(i, 4)
        if k < 3:
            return {i + 1: Fraction(1)}
        if block == 0:                      # a^4 = -8 chi a V
            return {5: -8 * self.chi} if self.chi else {}
        return {}                           # a^4 V = 0, a^4 y = -8 chi a V y = 0

    def _gram(self) -> ExactMatrix:
        n = self.n
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            bi, ki = divmod(i, 4)
            for j in range(n):
                bj, kj = divmod(j, 4)
                if {bi, bj} == {0, 1} and ki + kj == 3:
                    rows[i][j] = Fraction(8)
                elif bi == bj == 0 and ki == kj == 3:
                    rows[i][j] = -64 * self.chi
                elif {bi, bj} == {2, 3} and ki + kj == 3:
                    rows[i][j] = 8 * self.g
        return ExactMatrix(rows)

    def _seeds(self) -> dict[tuple[int, int], Fraction]:
        ix = ENGINE_LABELS.index
        raw = {
            ("a", "a3V"): 16,        # <Vol_Z, alpha>_1 = 2 and Vol_Z = a^3 V / 8
            ("aV", "a3"): 16,        # <alpha y, alpha^3 y'>_1 with y = Vol_M, y' = 1
            ("ay", "a3y'"): 16 * self.g,
            ("ay'", "a3y"): 16 * self.g,
        }
        out = {}
        for (x, b), v in raw.items():
            out[(ix(x), ix(b))] = _frac(v)
            out[(ix(b), ix(x))] = _frac(v)
        return out

    def dual(self, i: int) -> dict[int, Fraction]:
        """Dual basis vector T^i = sum_n g^{in} T_n."""
        return {m: v for m in range(self.n) if (v := self.gram_inv[i, m])}

    def _q1(self, b: int) -> dict[int, Fraction]:
        """q-part of alpha * b:  sum_n T^n <T_n, b, alpha>_1 = sum_n T^n 2 <T_n, b>_1."""
        out: dict[int, Fraction] = {}
        for (t, bb), v in self.seeds.items():
            if bb != b:
                continue
            for m, w in self.dual(t).items():
                out[m] = out.get(m, Fraction(0)) + 2 * v * w
        return {m: v for m, v in out.items() if v}

    def quantum_alpha_matrix(self, q=1) -> ExactMatrix:
        """alpha * on the engine basis, built from the seeds (a consistency check)."""
        q = _frac(q)
        rows = [[Fraction(0)] * self.n for _ in range(self.n)]
        for j in range(self.n):
            for i, v in self.times_alpha(j).items():
                rows[i][j] += v
            for i, v in self.q1[j].items():
                rows[i][j] += q * v
        return ExactMatrix(rows)

    # -- recursion -----------------------------------------------------------

    def _psi(self, d: int, x: int, b: int | None) -> int:
        if b is None:
            return 2 * d + COMPLEX_DIM - 2 - self.degrees[x]
        return 2 * d + COMPLEX_DIM - 1 - self.degrees[x] - self.degrees[b]

    def two_point(self, d: int, x: int, b: int) -> Fraction:
        key = (d, x, b)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        with self._lock:
            return self._eval(key)

    def one_point(self, d: int, x: int) -> Fraction:
        key = (d, x, None)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        with self._lock:
            return self._eval(key)

    def _get(self, key):
        hit = self._memo.get(key)
        return hit if hit is not None else self._eval(key)

    def _eval(self, key) -> Fraction:
        d, x, b = key
        a = self._psi(d, x, b)
        deps: tuple = ()
        if a < 0 or d <= 0:
            val, rule = Fraction(0), "psi-power < 0" if a < 0 else "degree 0"
        elif b is None:
            # divisor with one extra alpha
            t1 = self._get((d, x, 1))
            t2 = Fraction(0)
            for y, w in self.times_alpha(x).items():
                t2 += w * self._get((d, y, None))
                deps += ((d, y, None),)
            val = (t1 - t2) / (2 * d)
            rule = "divisor"
            deps = ((d, x, 1),) + deps
        elif a == 0:
            val = self.seeds.get((x, b), Fraction(0)) if d == 1 else Fraction(0)
            rule = "seed" if d == 1 else "no psi, degree >= 2"
        else:
            acc = Fraction(0)
            for y, w in self.times_alpha(b).items():         # degree-0 TRR term
                acc += w * self._get((d, x, y))
                deps += ((d, x, y),)
            if d > 1:
                for y, w in self.q1[b].items():              # degree-1 TRR term
                    acc += w * self._get((d - 1, x, y))
                    deps += ((d - 1, x, y),)
            for y, w in self.times_alpha(x).items():         # divisor correction
                acc -= w * self._get((d, y, b))
                deps += ((d, y, b),)
            val = acc / (2 * d)
            rule = "divisor = TRR"
        self._memo[key] = val
        self._why[key] = (rule, deps)
        return val

    def derivation(self, key: tuple, depth: int = 3) -> list[str]:
        """Human readable derivation chain of an engine key (truncated at ``depth``)."""
        lines: list[str] = []

        def show(k, level):
            d, x, b = k
            inner = ENGINE_LABELS[x] if b is None else f"{ENGINE_LABELS[x]}, {ENGINE_LABELS[b]}"
            val = self._get(k)
            rule, deps = self._why[k]
            lines.append(f"{'  ' * level}<psi^{self._psi(d, x, b)} {inner}>_{d} = {val}  [{rule}]")
            if level < depth:
                for dep in deps:
                    show(dep, level + 1)

        show(key, 0)
        return lines

    # -- public helpers ------------------------------------------------------

    def value(self, key: DescendantKey) -> Fraction:
        if key.d < 0:
            raise ValueError("degree must be >= 0")
        xs = _parse_insertion(key.insertion)
        if key.extra is None:
            return sum((w * self.one_point(key.d, x) for x, w in xs.items()), Fraction(0))
        bs = _parse_insertion(key.extra)
        return sum((w * v * self.two_point(key.d, x, b)
                    for x, w in xs.items() for b, v in bs.items()), Fraction(0))

    def j_engine_vector(self, d: int) -> list[Fraction]:
        """J_{2d} = sum_i <psi^* T_i>_d T^i on the engine basis (d >= 1)."""
        out = [Fraction(0)] * self.n
        for i in range(self.n):
            v = self.one_point(d, i)
            if not v:
                continue
            for m, w in self.dual(i).items():
                out[m] += v * w
        return out


_ENGINES: dict[tuple, TwistorDescendants] = {}
_ENGINES_LOCK = threading.Lock()


def engine(chi=1, y_degree: int = 2, y_pairing=1) -> TwistorDescendants:
    key = (_frac(chi), y_degree, _frac(y_pairing))
    with _ENGINES_LOCK:
        eng = _ENGINES.get(key)
        if eng is None:
            eng = _ENGINES[key] = TwistorDescendants(*key)
    return eng


def desc_invariant(key: DescendantKey, chi=1, y_degree: int = 2, y_pairing=1) -> Fraction:
    """Exact descendant invariant of Z from the recursion."""
    limit = sys.getrecursionlimit()
    need = 200 + 40 * (key.d + 2)
    if limit < need:
        sys.setrecursionlimit(need)
    return engine(chi, y_degree, y_pairing).value(key)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

# insertion -> (carries chi, [(coefficient, S-index), ...]); value is this / d!^2
CLOSED_FORMS: dict[str, tuple[bool, tuple]] = {
    "a3V": (False, ((8, ()),)),
    "a2V": (False, ((-8, (1,)),)),
    "aV": (False, ((8, (1, 1)),)),
    "V": (False, ((-8, (1, 1, 1)),)),
    "a3": (True, ((-8, (2, 1)), (64, (1, 1, 1)))),
    "a2": (True, ((8, (1, 2, 1)), (16, (2, 1, 1)), (-64, (1, 1, 1, 1)))),
    "a": (True, ((4, (2, 2, 1)), (-24, (2, 1, 1, 1)), (-16, (1, 2, 1, 1)),
                 (-8, (1, 1, 2, 1)), (64, (1, 1, 1, 1, 1)))),
    "1": (True, ((-8, (2, 2, 1, 1)), (-4, (2, 1, 2, 1)), (-4, (1, 2, 2, 1)),
                 (8, (1, 1, 1, 2, 1)), (16, (1, 1, 2, 1, 1)), (24, (1, 2, 1, 1, 1)),
                 (32, (2, 1, 1, 1, 1)), (-64, (1,) * 6))),
}


@dataclass(frozen=True)
class ClosedFormValue:
    value: Fraction
    chi_coefficient: bool   # True when value is the coefficient of chi


def desc_closed_form(key: DescendantKey) -> ClosedFormValue:
    """Evaluate the printed 1-point family formula at degree ``key.d``."""
    if key.extra is not None or key.insertion not in CLOSED_FORMS:
        raise KeyError(f"{key} is not one of the closed-form families")
    if key.d < 1:
        raise ValueError("closed forms need d >= 1")
    has_chi, terms = CLOSED_FORMS[key.insertion]
    val = sum((c * sym_sum(key.d, idx) for c, idx in terms), Fraction(0))
    return ClosedFormValue(val / math.factorial(key.d) ** 2, has_chi)


# normalised J-coefficient of Z in the basis 1, a, a2, a3, x, ax, a2x, a3x
J_COROLLARY: tuple[tuple, ...] = (
    ((1, ()),),
    ((-1, (1,)),),
    ((1, (1, 1)),),
    ((-1, (1, 1, 1)),),
    ((-1, (2, 1)),),
    ((-8, (1, 1, 1, 1)), (1, (1, 2, 1)), (2, (2, 1, 1))),
    ((-3, (2, 1, 1, 1)), (-2, (1, 2, 1, 1)), (-1, (1, 1, 2, 1)),
     (Fraction(1, 2), (2, 2, 1)), (8, (1, 1, 1, 1, 1))),
    ((-1, (2, 2, 1, 1)), (Fraction(-1, 2), (2, 1, 2, 1)), (Fraction(-1, 2), (1, 2, 2, 1)),
     (1, (1, 1, 1, 2, 1)), (2, (1, 1, 2, 1, 1)), (3, (1, 2, 1, 1, 1)),
     (4, (2, 1, 1, 1, 1)), (-8, (1,) * 6)),
)


def j_corollary(n: int, model: SpaceModel | None = None) -> CohomClass:
    """Normalised twistor J-coefficient from the symmetric-sum formula, exact."""
    model = model or space_model("twistor")
    coeffs = [sum((_frac(c) * sym_sum(n, idx) for c, idx in terms), Fraction(0))
              for terms in J_COROLLARY]
    return CohomClass(model, coeffs)


def j_corollary_numeric(n: int, digits: int = DEFAULT_DIGITS,
                        model: SpaceModel | None = None) -> CohomClass:
    """Same as :func:`j_corollary` with the sums taken numerically (large ``n``)."""
    model = model or space_model("twistor")
    idxs = {idx for terms in J_COROLLARY for _, idx in terms if idx}
    vals = numeric_values(sorted(idxs), n, weak=True, digits=digits)
    coeffs = []
    for terms in J_COROLLARY:
        acc = BigReal(0, digits)
        for c, idx in terms:
            acc = acc + (_frac(c) if not idx else vals[idx] * _frac(c))
        coeffs.append(acc)
    return CohomClass(model, coeffs)


# ---------------------------------------------------------------------------
# J-coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JCoefficient:
    space: str
    n: int
    raw: CohomClass
    normalized: CohomClass

    @property
    def pt_pairing(self):
        return self.raw.constant_term()

    def to_json(self, normalized: bool = True) -> dict:
        return {
            "space": self.space,
            "n": self.n,
            "pt_pairing": str(self.pt_pairing),
            "coefficients": (self.normalized if normalized else self.raw).to_json(),
        }


def _cpn_raw(model: SpaceModel, n: int) -> CohomClass:
    """prod_{k=1..n} (h + k)^-(N+1) in Q[h]/h^(N+1)."""
    N = model.params["N"]
    h = model.basis_class("h")
    out = model.one()
    for k in range(1, n + 1):
        # (k + h)^-1 = sum_j (-h)^j / k^(j+1)
        inv = model.zero()
        power = model.one()
        for j in range(N + 1):
            inv = inv + power.scale(Fraction((-1) ** j, k ** (j + 1)))
            power = power.cup(h)
        for _ in range(N + 1):
            out = out.cup(inv)
    return out


def _normalize(c: CohomClass) -> CohomClass:
    lead = c.constant_term()
    if not lead:
        raise ZeroDivisionError("J-coefficient has zero point pairing")
    return c.scale(1 / lead)


def j_coeff(space: SpaceModel | str, n: int, chi=1, cross_check: bool = True) -> JCoefficient:
    """Coefficient of t^(r n) in J, with the e^(c1 log t) prefactor stripped.

    For Z the raw class comes from the descendant recursion (run at Euler
    number ``chi``; the result in the basis with tau^*chi is chi-free) and,
    when ``cross_check`` is set, is compared against the symmetric-sum formula.
    """
    model = space_model(space) if isinstance(space, str) else space
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        one = model.one()
        return JCoefficient(model.name, 0, one, one)
    if model.name == "cpn":
        raw = _cpn_raw(model, n)
        return JCoefficient(model.name, n, raw, _normalize(raw))
    chi = _frac(chi)
    if chi == 0:
        raise ValueError("chi must be nonzero to express J in the tau^*chi basis")
    eng = engine(chi, model.params["y_degree"], model.params["y_pairing"])
    if sys.getrecursionlimit() < 200 + 40 * (n + 2):
        sys.setrecursionlimit(200 + 40 * (n + 2))
    vec = eng.j_engine_vector(n)
    if any(vec[8:]):
        raise UnreachableKeyError("y-sector contributions to J did not cancel")
    # a^k V = a^k tau^*chi / chi
    raw = CohomClass(model, vec[:4] + [v / chi for v in vec[4:8]])
    normalized = _normalize(raw)
    if cross_check and normalized != j_corollary(n, model):
        raise AssertionError(f"descendant J disagrees with the symmetric-sum formula at n={n}")
    return JCoefficient(model.name, n, raw, normalized)


def quantum_period(space: SpaceModel | str, n: int) -> Fraction:
    """Coefficient of t^(r n) in <J(t), pt>."""
    model = space_model(space) if isinstance(space, str) else space
    if n < 0:
        raise ValueError("n must be >= 0")
    power = model.params["N"] + 1 if model.name == "cpn" else 2
    return Fraction(1, math.factorial(n) ** power)


def families() -> Iterable[str]:
    return CLOSED_FORMS.keys()


__all__ = [
    "DescendantKey", "TwistorDescendants", "ClosedFormValue", "JCoefficient",
    "UnreachableKeyError", "engine", "desc_invariant", "desc_closed_form",
    "j_coeff", "j_corollary", "j_corollary_numeric", "quantum_period",
    "CLOSED_FORMS", "J_COROLLARY", "ENGINE_LABELS", "families",
]
