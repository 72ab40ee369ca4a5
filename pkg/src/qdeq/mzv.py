"""Partial multiple zeta values and weak-inequality symmetric sums.

Two families of truncated nested sums appear everywhere in this package::

    zeta_d(s1, ..., sk) = sum_{d >= n1 > n2 > ... > nk >= 1} 1 / (n1^s1 ... nk^sk)
    S_d(s1, ..., sk)    = sum_{d >= n1 >= n2 >= ... >= nk >= 1} 1 / (n1^s1 ... nk^sk)

Small ``d`` are evaluated exactly (Fractions, cached incrementally in ``d``).
Large ``d`` go through the fixed point nested-sum kernel at a requested
decimal precision.  Linear combinations of partial zetas with rational
coefficients are :class:`MZVCombination` objects; identities between them
(stuffle expansions, quasi-shuffle products) hold at every truncation ``d``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

import mpmath

from . import kernels
from .exactcore import DEFAULT_DIGITS, BigReal

MZVIndex = tuple
EXACT_CROSSOVER = 2000


class DivergentIndexError(ValueError):
    pass


def _check_index(idx) -> tuple:
    idx = tuple(int(s) for s in idx)
    if any(s < 1 for s in idx):
        raise ValueError(f"index entries must be >= 1: {idx}")
    return idx


def expand_repeats(*parts) -> tuple:
    """Build an index from plain ints and ``(block, times)`` repetitions.

    ``expand_repeats((2,), 2), ((1,), 2))`` is the composition ``{2}^2, {1}^2``.
    """
    out = []
    for p in parts:
        if isinstance(p, int):
            out.append(p)
        else:
            block, times = p
            out.extend(tuple(block) * times)
    return tuple(out)


# ---------------------------------------------------------------------------
# exact tables
# ---------------------------------------------------------------------------

class _ExactTables:
    """Monotone per-index tables of exact partial values, grown in ``d``."""

    def __init__(self):
        self._tables: dict[tuple[tuple, bool], list[Fraction]] = {}
        self._lock = threading.Lock()

    def value(self, d: int, idx: tuple, weak: bool) -> Fraction:
        if not idx:
            return Fraction(1)
        table = self._tables.get((idx, weak))
        if table is not None and d < len(table):
            return table[d]
        with self._lock:
            self._extend(idx, weak, d)
            return self._tables[(idx, weak)][d]

    def _extend(self, idx: tuple, weak: bool, d: int) -> None:
        # build suffix tables first, shortest suffix first
        for start in range(len(idx) - 1, -1, -1):
            key = (idx[start:], weak)
            table = self._tables.setdefault(key, [Fraction(0)])
            if len(table) > d:
                continue
            s = idx[start]
            rest = idx[start + 1:]
            rest_table = self._tables[(rest, weak)] if rest else None
            for n in range(len(table), d + 1):
                if rest_table is None:
                    inner = Fraction(1)
                elif weak:
                    inner = rest_table[n]
                else:
                    inner = rest_table[n - 1]
                table.append(table[n - 1] + inner / n ** s)


_EXACT = _ExactTables()


def zeta_partial(d: int, idx: Iterable[int]) -> Fraction:
    """Exact partial multiple zeta value zeta_d(idx)."""
    if d < 0:
        raise ValueError("d must be >= 0")
    return _EXACT.value(d, _check_index(idx), weak=False)


def sym_sum(d: int, idx: Iterable[int]) -> Fraction:
    """Exact weak-inequality symmetric sum S_d(idx)."""
    if d < 0:
        raise ValueError("d must be >= 0")
    return _EXACT.value(d, _check_index(idx), weak=True)


# ---------------------------------------------------------------------------
# numeric (kernel) evaluation
# ---------------------------------------------------------------------------

_NUMERIC_CACHE: dict[tuple, int] = {}
_NUMERIC_LOCK = threading.Lock()


def numeric_values(indices: Iterable[Iterable[int]], d: int, weak: bool = False,
                   digits: int = DEFAULT_DIGITS) -> dict[tuple, BigReal]:
    """Evaluate many partial sums at one truncation ``d`` through the kernel."""
    limbs = kernels.frac_limbs_for(digits)
    idxs = [_check_index(i) for i in indices]
    todo = [i for i in dict.fromkeys(idxs) if (i, weak, d, limbs) not in _NUMERIC_CACHE]
    if todo:
        raw = kernels.nested_sums(todo, d, weak, limbs, [d])
        with _NUMERIC_LOCK:
            for i, vals in zip(todo, raw):
                _NUMERIC_CACHE[(i, weak, d, limbs)] = vals[0]
    bits = 64 * limbs
    return {i: BigReal.from_fixed(_NUMERIC_CACHE[(i, weak, d, limbs)], bits, digits) for i in idxs}


def partial_value(d: int, idx, weak: bool = False, digits: int = DEFAULT_DIGITS,
                  crossover: int | None = None):
    """Exact Fraction for ``d <= crossover``, BigReal above it."""
    crossover = EXACT_CROSSOVER if crossover is None else crossover
    idx = _check_index(idx)
    if d <= crossover:
        return _EXACT.value(d, idx, weak)
    return numeric_values([idx], d, weak, digits)[idx]


# ---------------------------------------------------------------------------
# combinations
# ---------------------------------------------------------------------------

class MZVCombination(Mapping):
    """Rational linear combination of partial zeta symbols zeta(idx).

    The empty index stands for the constant 1.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        acc: dict[tuple, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for idx, c in items:
            idx = _check_index(idx)
            acc[idx] = acc.get(idx, Fraction(0)) + Fraction(c)
        self._terms = {k: v for k, v in acc.items() if v != 0}

    @classmethod
    def single(cls, idx, coeff=1) -> "MZVCombination":
        return cls({tuple(idx): coeff})

    def __getitem__(self, idx):
        return self._terms[tuple(idx)]

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def __add__(self, other: "MZVCombination") -> "MZVCombination":
        return MZVCombination(list(self.items()) + list(other.items()))

    def __sub__(self, other: "MZVCombination") -> "MZVCombination":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "MZVCombination":
        return MZVCombination({k: v * Fraction(c) for k, v in self.items()})

    def __mul__(self, other):
        if isinstance(other, MZVCombination):
            return stuffle_product(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, MZVCombination):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def evaluate(self, d: int) -> Fraction:
        """Exact value at truncation ``d``."""
        return sum((c * zeta_partial(d, idx) for idx, c in self.items()), Fraction(0))

    def evaluate_numeric(self, d: int, digits: int = DEFAULT_DIGITS) -> BigReal:
        vals = numeric_values([k for k in self if k], d, weak=False, digits=digits)
        acc = BigReal(0, digits)
        for idx, c in self.items():
            acc = acc + (c if not idx else vals[idx] * c)
        return acc

    def weight_max(self) -> int:
        return max((sum(k) for k in self), default=0)

    def __repr__(self):
        return "MZVCombination(" + self.to_string() + ")"

    def to_string(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for idx in sorted(self._terms, key=lambda k: (sum(k), len(k), k)):
            c = self._terms[idx]
            sym = "1" if not idx else "zeta(" + ",".join(map(str, idx)) + ")"
            parts.append(f"{c}*{sym}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {",".join(map(str, k)): str(v) for k, v in sorted(self.items())}


def _merges(idx: tuple):
    """All ways of cutting ``idx`` into consecutive blocks, each block summed."""
    k = len(idx)
    if k == 0:
        yield ()
        return
    for cuts in product((False, True), repeat=k - 1):
        out = []
        acc = idx[0]
        for cut, s in zip(cuts, idx[1:]):
            if cut:
                out.append(acc)
                acc = s
            else:
                acc += s
        out.append(acc)
        yield tuple(out)


def stuffle_expand(idx) -> MZVCombination:
    """Write S(idx) as a combination of strict partial zetas.

    A weak chain n1 >= ... >= nk splits into strict chains by deciding, for
    each adjacent pair, whether it is equal (merge) or strict (cut).
    """
    idx = _check_index(idx)
    return MZVCombination([(m, 1) for m in _merges(idx)])


_PRODUCT_CACHE: dict[tuple[tuple, tuple], dict] = {}


def _qsh(a: tuple, b: tuple) -> dict:
    if not a:
        return {b: 1}
    if not b:
        return {a: 1}
    key = (a, b)
    hit = _PRODUCT_CACHE.get(key)
    if hit is not None:
        return hit
    out: dict[tuple, int] = {}
    for head, left, right in ((a[0], a[1:], b), (b[0], a, b[1:]), (a[0] + b[0], a[1:], b[1:])):
        for w, c in _qsh(left, right).items():
            key2 = (head,) + w
            out[key2] = out.get(key2, 0) + c
    _PRODUCT_CACHE[key] = out
    return out


def stuffle_product(x: MZVCombination, y: MZVCombination) -> MZVCombination:
    """Quasi-shuffle product; equals the pointwise product at every truncation."""
    terms = []
    for a, ca in x.items():
        for b, cb in y.items():
            for w, c in _qsh(a, b).items():
                terms.append((w, ca * cb * c))
    return MZVCombination(terms)


# ---------------------------------------------------------------------------
# limits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZetaLimit:
    """Estimate of a convergent MZV with a bracket containing the true value."""
    index: tuple
    d_max: int
    estimate: BigReal
    lower: BigReal
    upper: BigReal

    def contains(self, x) -> bool:
        return self.lower <= x <= self.upper

    def to_json(self) -> dict:
        return {
            "index": list(self.index),
            "d_max": self.d_max,
            "estimate": self.estimate.to_json(),
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
        }


def tail_bound(idx: tuple, d: int, digits: int = DEFAULT_DIGITS) -> BigReal:
    """Loose upper bound on zeta(idx) - zeta_d(idx) for a convergent index."""
    k = len(idx)
    s1 = idx[0]
    with mpmath.workdps(digits + 5):
        b = k * (1 + mpmath.log(d)) ** k / ((s1 - 1) * mpmath.mpf(d) ** (s1 - 1))
    return BigReal(b, digits)


def _euler_maclaurin_tail(s: int, n: int, digits: int):
    """sum_{m > n} m^-s by Euler-Maclaurin; returns (value, error bound)."""
    with mpmath.workdps(digits + 15):
        N = mpmath.mpf(n)
        tail = N ** (1 - s) / (s - 1) - N ** (-s) / 2
        eps = mpmath.mpf(10) ** (-(digits + 10))
        poch = mpmath.mpf(s)  # (s)_{2j-1}
        last = mpmath.inf
        for j in range(1, 200):
            if j > 1:
                poch *= (s + 2 * j - 3) * (s + 2 * j - 2)
            term = mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * poch * N ** (-s - 2 * j + 1)
            if abs(term) > abs(last):
                break  # asymptotic series started to diverge
            tail += term
            last = term
            if abs(term) < eps * abs(tail):
                break
        return tail, abs(last)


def zeta_limit(idx, d_max: int, digits: int = DEFAULT_DIGITS,
               crossover: int | None = None) -> ZetaLimit:
    """Estimate zeta(idx) from the partial value at ``d_max`` plus a tail bracket.

    Depth-one indices get an Euler-Maclaurin tail, which brings the estimate
    to full working precision.
    """
    idx = _check_index(idx)
    if not idx:
        one = BigReal(1, digits)
        return ZetaLimit(idx, d_max, one, one, one)
    if idx[0] == 1:
        raise DivergentIndexError(f"zeta{idx} diverges (first entry 1)")
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    partial = BigReal(partial_value(d_max, idx, False, digits, crossover), digits)
    if len(idx) == 1:
        tail, err = _euler_maclaurin_tail(idx[0], d_max, digits)
        est = partial + BigReal(tail, digits)
        err = BigReal(err, digits) + BigReal(mpmath.mpf(10) ** (-digits) * 10, digits) * est
        return ZetaLimit(idx, d_max, est, est - err, est + err)
    bound = tail_bound(idx, d_max, digits)
    return ZetaLimit(idx, d_max, partial + bound / 2, partial, partial + bound)


def zeta_value(s: int, digits: int = DEFAULT_DIGITS) -> BigReal:
    """Riemann zeta at an integer s >= 2 to ``digits`` digits."""
    return zeta_limit((s,), 64, digits).estimate


def pi_value(digits: int = DEFAULT_DIGITS) -> BigReal:
    with mpmath.workdps(digits + 5):
        return BigReal(+mpmath.pi, digits)


def harmonic(n: int) -> Fraction:
    return zeta_partial(n, (1,))


def log_bound(n: int, w: int, s: int, c=10) -> float:
    """c * ln(n)^w / n^s, the tolerance model used by the verification reports."""
    return c * math.log(n) ** w / n ** s


__all__ = [
    "MZVCombination", "ZetaLimit", "DivergentIndexError",
    "zeta_partial", "sym_sum", "numeric_values", "partial_value",
    "stuffle_expand", "stuffle_product", "zeta_limit", "zeta_value",
    "tail_bound", "expand_repeats", "harmonic", "log_bound", "pi_value",
]
