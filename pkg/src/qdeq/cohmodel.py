"""Finite models of the cohomology rings of CP^N and of the twistor space Z.

The twistor model is the 8-dimensional subring generated by ``a`` (the first
Chern class alpha) and ``x`` (the pulled back Euler class tau^*chi), with
basis ``1, a, a2, a3, x, ax, a2x, a3x``.  Classical relations::

    a^4 = -8 a x,   x^2 = 0,   <a^3 x> = 8

Classes y_i from the base manifold only enter through a parametrised
4-dimensional quantum block, described by the real degree ``m`` of y_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .exactcore import DEFAULT_DIGITS, BigReal, ExactMatrix, euler_gamma
from .mzv import numeric_values, zeta_partial, zeta_value

TWISTOR_LABELS = ("1", "a", "a2", "a3", "x", "ax", "a2x", "a3x")
MAIN_MU = (-3, -2, -1, 0, 0, 1, 2, 3)


class UnknownSpaceError(ValueError):
    pass


class InvalidBlockError(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True, eq=False)
class SpaceModel:
    """Graded basis, cup-product table, pairing and Chern character."""

    name: str
    params: dict
    labels: tuple[str, ...]
    degrees: tuple[int, ...]                      # real degrees
    table: dict = field(repr=False)               # (i, j) -> {k: Fraction}
    pairing: tuple[Fraction, ...] = field(repr=False)
    dim: int = 0                                  # complex dimension
    fano_index: int = 1
    peak_constant: Fraction = Fraction(1)
    _ch: tuple = field(default=(), repr=False)

    @property
    def key(self) -> tuple:
        return (self.name, tuple(sorted(self.params.items())))

    def same_as(self, other: "SpaceModel") -> bool:
        return self is other or self.key == other.key

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def basis_class(self, label_or_index) -> "CohomClass":
        i = label_or_index if isinstance(label_or_index, int) else self.index(label_or_index)
        coeffs = [Fraction(0)] * self.size
        coeffs[i] = Fraction(1)
        return CohomClass(self, coeffs)

    def one(self) -> "CohomClass":
        return self.basis_class(0)

    def zero(self) -> "CohomClass":
        return CohomClass(self, [Fraction(0)] * self.size)

    def point_class(self) -> "CohomClass":
        """The class whose pairing is 1 (Poincare dual of a point)."""
        top = [i for i, deg in enumerate(self.degrees) if deg == 2 * self.dim]
        i = top[0]
        c = self.zero()
        return c + self.basis_class(i).scale(1 / self.pairing[i])

    @property
    def chern_character(self) -> list["CohomClass"]:
        """ch_1 .. ch_dim."""
        return [CohomClass(self, list(v)) for v in self._ch]

    @property
    def c1(self) -> "CohomClass":
        return self.chern_character[0]

    def blocks(self) -> tuple[str, ...]:
        return ("main", "y") if self.name == "twistor" else ("full",)

    def to_json(self) -> dict:
        consts = {}
        for (i, j), out in sorted(self.table.items()):
            if out:
                consts[f"{self.labels[i]}*{self.labels[j]}"] = {
                    self.labels[k]: str(v) for k, v in sorted(out.items())
                }
        data = {
            "space": self.name,
            "params": {k: str(v) for k, v in self.params.items()},
            "basis": [{"label": l, "degree": d} for l, d in zip(self.labels, self.degrees)],
            "structure_constants": consts,
            "pairing": {l: str(p) for l, p in zip(self.labels, self.pairing) if p},
            "fano_index": self.fano_index,
            "peak_constant": str(self.peak_constant),
            "chern_character": [c.to_json() for c in self.chern_character],
            "c1_star": {},
            "mu": {},
        }
        for b in self.blocks():
            data["c1_star"][b] = quantum_c1_matrix(self, b, 1).to_lists()
            data["mu"][b] = [str(m) for m in mu_diagonal(self, b)]
        return data


class CohomClass:
    """Coefficient vector in the basis of a :class:`SpaceModel`.

    Coefficients may be Fractions or BigReals; the ring operations only use
    ``+`` and ``*``.
    """

    __slots__ = ("model", "coeffs")

    def __init__(self, model: SpaceModel, coeffs: Sequence):
        if len(coeffs) != model.size:
            raise ValueError("coefficient vector has the wrong length")
        self.model = model
        self.coeffs = tuple(coeffs)

    def __getitem__(self, label):
        i = label if isinstance(label, int) else self.model.index(label)
        return self.coeffs[i]

    def _check(self, other: "CohomClass"):
        if not self.model.same_as(other.model):
            raise ValueError("classes live in different models")

    def __add__(self, other: "CohomClass") -> "CohomClass":
        self._check(other)
        return CohomClass(self.model, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "CohomClass") -> "CohomClass":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "CohomClass":
        if isinstance(c, int):
            c = Fraction(c)
        return CohomClass(self.model, [c * a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, CohomClass):
            return self.cup(other)
        return self.scale(other)

    __rmul__ = __mul__

    def cup(self, other: "CohomClass") -> "CohomClass":
        self._check(other)
        out = [0] * self.model.size
        for (i, j), prod in self.model.table.items():
            a, b = self.coeffs[i], other.coeffs[j]
            if not a or not b:
                continue
            ab = a * b
            for k, c in prod.items():
                out[k] = out[k] + c * ab
        return CohomClass(self.model, [Fraction(0) if (isinstance(v, int) and v == 0) else v
                                       for v in out])

    def __pow__(self, k: int) -> "CohomClass":
        out = self.model.one()
        for _ in range(k):
            out = out.cup(self)
        return out

    def degree_part(self, real_degree: int) -> "CohomClass":
        return CohomClass(self.model, [c if d == real_degree else Fraction(0)
                                       for c, d in zip(self.coeffs, self.model.degrees)])

    def constant_term(self):
        return self.coeffs[0]

    def pair(self):
        """Integral over the space (pairing with the fundamental class)."""
        acc = Fraction(0)
        for c, p in zip(self.coeffs, self.model.pairing):
            if p:
                acc = acc + c * p
        return acc

    def exp(self) -> "CohomClass":
        """exp of a nilpotent class (no constant term), truncated at top degree."""
        if self.coeffs[0]:
            raise ValueError("exp is only defined here for classes without constant term")
        out = self.model.one()
        term = self.model.one()
        for k in range(1, self.model.dim + 1):
            term = term.cup(self).scale(Fraction(1, k))
            out = out + term
        return out

    def log(self) -> "CohomClass":
        """log of a class with constant term 1."""
        if self.coeffs[0] != 1:
            raise ValueError("log needs constant term 1")
        x = self - self.model.one()
        out = self.model.zero()
        term = self.model.one()
        for k in range(1, self.model.dim + 1):
            term = term.cup(x)
            out = out + term.scale(Fraction((-1) ** (k + 1), k))
        return out

    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, CohomClass) or not self.model.same_as(other.model):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"CohomClass({self.to_string()})"

    def to_string(self) -> str:
        parts = []
        for c, l in zip(self.coeffs, self.model.labels):
            if c:
                s = c.to_string(12) if isinstance(c, BigReal) else str(c)
                parts.append(f"({s})*{l}")
        return " + ".join(parts) or "0"

    def to_json(self) -> dict:
        return {l: (c.to_json() if isinstance(c, BigReal) else str(c))
                for l, c in zip(self.model.labels, self.coeffs)}


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def _table_from_rule(n: int, rule: Callable[[int, int], dict]) -> dict:
    table = {}
    for i in range(n):
        for j in range(n):
            prod = {k: _frac(v) for k, v in rule(i, j).items() if v}
            if prod:
                table[(i, j)] = prod
    return table


def _cpn(N: int) -> SpaceModel:
    if N < 1:
        raise ValueError("CP^N needs N >= 1")
    labels = tuple("1" if k == 0 else ("h" if k == 1 else f"h{k}") for k in range(N + 1))
    table = _table_from_rule(N + 1, lambda i, j: {i + j: 1} if i + j <= N else {})
    pairing = tuple(Fraction(int(k == N)) for k in range(N + 1))
    ch = []
    for m in range(1, N + 1):
        v = [Fraction(0)] * (N + 1)
        v[m] = Fraction(N + 1, math.factorial(m))
        ch.append(tuple(v))
    return SpaceModel(
        name="cpn", params={"N": N}, labels=labels,
        degrees=tuple(2 * k for k in range(N + 1)), table=table, pairing=pairing,
        dim=N, fano_index=N + 1, peak_constant=Fraction(1), _ch=tuple(ch),
    )


def _twistor_rule(i: int, j: int) -> dict:
    # basis index i = 4*delta + k stands for a^k x^delta
    di, ki = divmod(i, 4)
    dj, kj = divmod(j, 4)
    if di + dj > 1:
        return {}
    k = ki + kj
    if di + dj == 1:
        return {4 + k: 1} if k <= 3 else {}
    if k <= 3:
        return {k: 1}
    # a^k = -8 a^(k-3) x for k = 4, 5, 6
    return {4 + k - 3: -8}


def _twistor(chi=1, y_degree: int = 2, y_pairing=1) -> SpaceModel:
    chi = _frac(chi)
    if y_degree % 2 or not 0 < y_degree < 6:
        raise ValueError("y_degree must be 2 or 4")
    table = _table_from_rule(8, _twistor_rule)
    pairing = tuple(Fraction(8) if l == "a3x" else Fraction(0) for l in TWISTOR_LABELS)

    def vec(**kw):
        v = [Fraction(0)] * 8
        for l, c in kw.items():
            v[TWISTOR_LABELS.index(l)] = _frac(c)
        return tuple(v)

    ch = (
        vec(a=1),
        vec(a2=Fraction(1, 2)),
        vec(a3=Fraction(1, 6), x=1),
        vec(ax=Fraction(1, 6)),
        vec(a2x=Fraction(7, 120)),
        vec(a3x=Fraction(7, 720)),
    )
    return SpaceModel(
        name="twistor", params={"chi": chi, "y_degree": y_degree, "y_pairing": _frac(y_pairing)},
        labels=TWISTOR_LABELS, degrees=(0, 2, 4, 6, 6, 8, 10, 12), table=table,
        pairing=pairing, dim=6, fano_index=2, peak_constant=Fraction(1), _ch=ch,
    )


def space_model(name: str, **params) -> SpaceModel:
    """Build a model.  ``name`` is ``"cpn"`` (with ``N``), ``"twistor"``, or ``"cpN"``."""
    key = name.lower().replace("^", "").replace(":", "")
    if key in ("twistor", "twistorz", "z"):
        return _twistor(**params)
    if key.startswith("cpn") or key.startswith("cp"):
        digits = key[3:] if key.startswith("cpn") else key[2:]
        N = params.pop("N", None)
        if N is None:
            if not digits.isdigit():
                raise UnknownSpaceError(f"unknown space {name!r}; give N")
            N = int(digits)
        if params:
            raise TypeError(f"unexpected parameters {sorted(params)}")
        return _cpn(int(N))
    raise UnknownSpaceError(f"unknown space {name!r}")


# ---------------------------------------------------------------------------
# quantum blocks
# ---------------------------------------------------------------------------

def quantum_c1_matrix(model: SpaceModel, block: str, q, chi=None) -> ExactMatrix:
    """Matrix of c1 * (quantum product) on a block, acting on column vectors.

    Columns are images of basis vectors.  For the main twistor block the
    basis is ordered ``1, a, a2, a3, V, aV, a2V, a3V`` and ``chi`` fills the
    8*chi slot (defaults to the model's parameter).
    """
    q = _frac(q)
    if model.name == "cpn":
        if block != "full":
            raise InvalidBlockError(f"CP^N has only the 'full' block, not {block!r}")
        N = model.params["N"]
        r = N + 1
        rows = [[Fraction(0)] * r for _ in range(r)]
        for k in range(N):
            rows[k + 1][k] = Fraction(r)
        rows[0][N] = r * q
        return ExactMatrix(rows)
    if block == "y":
        z = Fraction(0)
        return ExactMatrix([
            [z, 4 * q, z, z],
            [1, z, z, z],
            [z, 1, z, 4 * q],
            [z, z, 1, z],
        ])
    if block == "main":
        chi = model.params["chi"] if chi is None else _frac(chi)
        rows = [[Fraction(0)] * 8 for _ in range(8)]
        for base in (0, 4):
            rows[base + 0][base + 1] = 4 * q
            rows[base + 1][base + 0] = Fraction(1)
            rows[base + 2][base + 1] = Fraction(1)
            rows[base + 2][base + 3] = 4 * q
            rows[base + 3][base + 2] = Fraction(1)
        rows[5][3] = 8 * chi
        return ExactMatrix(rows)
    raise InvalidBlockError(f"unknown block {block!r} for {model.name}")


def mu_diagonal(model: SpaceModel, block: str, y_degree: int | None = None) -> list[Fraction]:
    """Grading operator entries (half the real degree minus half the dimension)."""
    if model.name == "cpn":
        if block != "full":
            raise InvalidBlockError(block)
        N = model.params["N"]
        return [Fraction(2 * k - N, 2) for k in range(N + 1)]
    if block == "main":
        return [Fraction(m) for m in MAIN_MU]
    if block == "y":
        m = model.params["y_degree"] if y_degree is None else y_degree
        return [Fraction(m - 6, 2) + j for j in range(4)]
    raise InvalidBlockError(f"unknown block {block!r} for {model.name}")


def mu_matrix(model: SpaceModel, block: str, y_degree: int | None = None) -> ExactMatrix:
    diag = mu_diagonal(model, block, y_degree)
    n = len(diag)
    return ExactMatrix([[diag[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)])


# ---------------------------------------------------------------------------
# Gamma class and loop space Euler class
# ---------------------------------------------------------------------------

def gamma_class(model: SpaceModel, digits: int = DEFAULT_DIGITS) -> CohomClass:
    """Gamma class exp(-gamma ch_1 + sum_k (-1)^k (k-1)! zeta(k) ch_k), numerically."""
    ch = model.chern_character
    acc = ch[0].scale(-euler_gamma(digits))
    for k in range(2, len(ch) + 1):
        c = BigReal((-1) ** k * math.factorial(k - 1), digits) * zeta_value(k, digits)
        acc = acc + ch[k - 1].scale(c)
    return acc.exp()


def loop_euler_class(model: SpaceModel, n: int, digits: int | None = None) -> CohomClass:
    """Normalised inverse S^1-equivariant Euler class of the degree-n loop bundle at u = 1.

    Uses prod_k prod_j (1 + delta_j/k)^-1 = exp(sum_m (-1)^m (m-1)! zeta_n(m) ch_m).
    Exact unless ``digits`` is given, in which case the partial zetas come
    from the numeric kernel (the only practical route for n ~ 10^5).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ms = range(1, len(model.chern_character) + 1)
    if digits is None:
        z = {m: zeta_partial(n, (m,)) for m in ms}
    else:
        vals = numeric_values([(m,) for m in ms], n, weak=False, digits=digits)
        z = {m: vals[(m,)] for m in ms}
    acc = model.zero()
    for m, chm in zip(ms, model.chern_character):
        acc = acc + chm.scale(z[m] * ((-1) ** m * math.factorial(m - 1)))
    return acc.exp()


__all__ = [
    "SpaceModel", "CohomClass", "UnknownSpaceError", "InvalidBlockError",
    "space_model", "quantum_c1_matrix", "mu_diagonal", "mu_matrix",
    "gamma_class", "loop_euler_class", "TWISTOR_LABELS",
]
