"""Exact arithmetic substrate.

Rationals are :class:`fractions.Fraction`.  On top of that this module
provides univariate polynomials and rational functions in ``u`` over the
rationals, a tagged arbitrary-precision real backed by mpmath, and dense
exact linear algebra (fraction-free elimination) over either field.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

DEFAULT_DIGITS = 50

INFINITY = math.inf


class SingularMatrixError(ArithmeticError):
    """Raised when a linear system has no unique solution."""


# ---------------------------------------------------------------------------
# BigReal
# ---------------------------------------------------------------------------

def to_mpf(x, digits: int = DEFAULT_DIGITS) -> mpmath.mpf:
    """Convert int/Fraction/BigReal/float/str to an mpf at ``digits``."""
    if isinstance(x, BigReal):
        return x.value
    with mpmath.workdps(digits + 5):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)


class BigReal:
    """A real number carried at a fixed number of significant decimal digits.

    Results of arithmetic carry the smaller precision of the two operands.
    Plain ints and Fractions are exact, so they never lower the precision.
    """

    __slots__ = ("value", "digits")

    def __init__(self, value, digits: int = DEFAULT_DIGITS):
        if isinstance(value, BigReal):
            digits = min(digits, value.digits)
        self.digits = int(digits)
        with mpmath.workdps(self.digits + 5):
            self.value = +to_mpf(value, self.digits)

    @classmethod
    def from_fixed(cls, scaled: int, frac_bits: int, digits: int) -> "BigReal":
        """Build from an integer holding ``value * 2**frac_bits``."""
        with mpmath.workdps(digits + 5):
            return cls(mpmath.ldexp(mpmath.mpf(scaled), -frac_bits), digits)

    def _coerce(self, other):
        if isinstance(other, BigReal):
            return other.value, min(self.digits, other.digits)
        if isinstance(other, (int, Fraction)):
            return to_mpf(other, self.digits), self.digits
        if isinstance(other, (float, mpmath.mpf)):
            return mpmath.mpf(other), self.digits
        return NotImplemented, None

    def _op(self, other, fn):
        val, digits = self._coerce(other)
        if val is NotImplemented:
            return NotImplemented
        with mpmath.workdps(digits + 5):
            return BigReal(fn(self.value, val), digits)

    def __add__(self, other):
        return self._op(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._op(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._op(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._op(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._op(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._op(other, lambda a, b: b / a)

    def __pow__(self, k: int):
        with mpmath.workdps(self.digits + 5):
            return BigReal(self.value ** k, self.digits)

    def __neg__(self):
        with mpmath.workdps(self.digits + 5):
            return BigReal(-self.value, self.digits)

    def __abs__(self):
        with mpmath.workdps(self.digits + 5):
            return BigReal(abs(self.value), self.digits)

    def _cmp_value(self, other):
        val, _ = self._coerce(other)
        if val is NotImplemented:
            raise TypeError(f"cannot compare BigReal with {type(other).__name__}")
        return val

    def __lt__(self, other):
        return self.value < self._cmp_value(other)

    def __le__(self, other):
        return self.value <= self._cmp_value(other)

    def __gt__(self, other):
        return self.value > self._cmp_value(other)

    def __ge__(self, other):
        return self.value >= self._cmp_value(other)

    def __eq__(self, other):
        try:
            return self.value == self._cmp_value(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __float__(self):
        return float(self.value)

    def __bool__(self):
        return bool(self.value)

    def __repr__(self):
        return f"BigReal({self.to_string()}, digits={self.digits})"

    def to_string(self, digits: int | None = None) -> str:
        return mpmath.nstr(self.value, digits or self.digits)

    def to_json(self) -> dict:
        return {"value": self.to_string(), "precision": self.digits}


def log(x, digits: int = DEFAULT_DIGITS) -> BigReal:
    with mpmath.workdps(digits + 5):
        return BigReal(mpmath.log(to_mpf(x, digits)), digits)


def euler_gamma(digits: int = DEFAULT_DIGITS) -> BigReal:
    with mpmath.workdps(digits + 5):
        return BigReal(+mpmath.euler, digits)


# ---------------------------------------------------------------------------
# Polynomials in u over Q
# ---------------------------------------------------------------------------

class Poly:
    """Dense univariate polynomial, coefficients stored low degree first."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def monomial(cls, k: int, coeff=1) -> "Poly":
        return cls([0] * k + [coeff])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def lowest(self) -> float | int:
        """Index of the lowest nonzero coefficient (inf for zero)."""
        for i, x in enumerate(self.c):
            if x:
                return i
        return INFINITY

    def lead(self) -> Fraction:
        return self.c[-1] if self.c else Fraction(0)

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-x for x in self.c])

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        return self + (-other)

    def __rsub__(self, other):
        return Poly([other]) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            other = Fraction(other)
            return Poly([x * other for x in self.c])
        if not self.c or not other.c:
            return Poly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def __divmod__(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        dd = other.degree
        lead = other.c[-1]
        if len(rem) - 1 < dd:
            return Poly(), Poly(rem)
        quot = [Fraction(0)] * (len(rem) - dd)
        for k in range(len(rem) - 1 - dd, -1, -1):
            q = rem[k + dd] / lead
            quot[k] = q
            if q:
                for j, y in enumerate(other.c):
                    rem[k + j] -= q * y
        return Poly(quot), Poly(rem[:dd])

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def __floordiv__(self, other):
        return self.exact_div(other)

    def monic(self) -> "Poly":
        return self * (1 / self.lead()) if self.c else self

    def derivative(self) -> "Poly":
        return Poly([i * x for i, x in enumerate(self.c)][1:])

    def __call__(self, x):
        acc = 0
        for coeff in reversed(self.c):
            acc = acc * x + coeff
        return acc

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return bool(self.c)

    def __repr__(self):
        return f"Poly({[str(x) for x in self.c]})"


def _primitive(c: Sequence) -> list[int]:
    """Integer multiple of a rational coefficient list with content 1."""
    m = 1
    for x in c:
        x = Fraction(x)
        m = m * x.denominator // math.gcd(m, x.denominator)
    ints = [int(Fraction(x) * m) for x in c]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return [x // g for x in ints] if g > 1 else ints


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of integer coefficient lists (low degree first)."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and a:
        la = a[-1]
        shift = len(a) - 1 - db
        a = [x * lb for x in a]
        for j, y in enumerate(b):
            a[shift + j] -= la * y
        while a and a[-1] == 0:
            a.pop()
    return a


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q, computed by a primitive remainder sequence over Z."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    x, y = _primitive(a.c), _primitive(b.c)
    if len(x) < len(y):
        x, y = y, x
    while y:
        r = _prem(x, y)
        x, y = y, (_primitive(r) if r else r)
    return Poly(x).monic()


# ---------------------------------------------------------------------------
# Rational functions in u
# ---------------------------------------------------------------------------

class RationalFunction:
    """Element of Q(u), kept reduced with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _reduced: bool = False):
        num = num if isinstance(num, Poly) else Poly([num])
        if den is None:
            den = Poly([1])
        elif not isinstance(den, Poly):
            den = Poly([den])
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            if num.is_zero():
                den = Poly([1])
            else:
                # strip common powers of u first: cheap and the common case
                k = min(num.lowest(), den.lowest())
                if k:
                    num = Poly(num.c[k:])
                    den = Poly(den.c[k:])
                # after the strip a monomial denominator is already coprime
                if den.degree > 0 and den.lowest() != den.degree:
                    g = poly_gcd(num, den)
                    if g.degree > 0:
                        num = num.exact_div(g)
                        den = den.exact_div(g)
                lead = den.lead()
                if lead != 1:
                    num = num * (1 / lead)
                    den = den * (1 / lead)
        self.num = num
        self.den = den

    @classmethod
    def u_power(cls, k: int, coeff=1) -> "RationalFunction":
        if k >= 0:
            return cls(Poly.monomial(k, coeff), _reduced=True)
        return cls(Poly([coeff]), Poly.monomial(-k), _reduced=True)

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls(Poly(), _reduced=True)

    @classmethod
    def one(cls) -> "RationalFunction":
        return cls(Poly([1]), _reduced=True)

    @classmethod
    def parse(cls, text: str) -> "RationalFunction":
        """Parse an expression in ``u`` such as ``16/u^4-16/u^2``."""
        tree = ast.parse(text.replace("^", "**"), mode="eval")
        return _eval_ast(tree.body)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _wrap(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFunction(Poly([other]), _reduced=True)
        if isinstance(other, Poly):
            return RationalFunction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RationalFunction.zero()
            return RationalFunction(self.num * other, self.den, _reduced=True)
        other = self._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._wrap(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RationalFunction.one() / (self ** (-k))
        out = RationalFunction.one()
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> "RationalFunction":
        """d/du."""
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den)

    def __eq__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.is_zero()

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def laurent_terms(self):
        """Return {exponent: coeff} if the denominator is a power of u, else None."""
        if len(self.den.c) - 1 != self.den.lowest():
            return None
        shift = self.den.degree
        return {i - shift: x for i, x in enumerate(self.num.c) if x}

    def __str__(self):
        terms = self.laurent_terms()
        if terms is not None:
            if not terms:
                return "0"
            return _format_laurent(terms)
        return f"({_format_laurent(dict(enumerate(self.num.c)))})/({_format_laurent(dict(enumerate(self.den.c)))})"

    def __repr__(self):
        return f"RationalFunction({self})"


def _format_laurent(terms: dict) -> str:
    parts = []
    for k in sorted(terms, reverse=True):
        c = terms[k]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        elif k > 0:
            mono = "u" if k == 1 else f"u^{k}"
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            mono = "u" if k == -1 else f"u^{-k}"
            if a.denominator == 1:
                body = f"{a.numerator}/{mono}"
            else:
                body = f"({a})/{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _eval_ast(node):
    if isinstance(node, ast.BinOp):
        left, right = _eval_ast(node.left), _eval_ast(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return left / right
        if isinstance(node.op, ast.Pow):
            exp = right.laurent_terms() if isinstance(right, RationalFunction) else None
            if isinstance(right, (int, Fraction)):
                k = right
            elif exp is not None and set(exp) <= {0}:
                k = exp.get(0, 0)
            else:
                raise ValueError("exponent must be an integer constant")
            if Fraction(k).denominator != 1:
                raise ValueError("exponent must be an integer constant")
            base = left if isinstance(left, RationalFunction) else RationalFunction(Poly([left]))
            return base ** int(k)
        raise ValueError(f"unsupported operator {type(node.op).__name__}")
    if isinstance(node, ast.UnaryOp):
        val = _eval_ast(node.operand)
        if isinstance(node.op, ast.USub):
            return -val
        if isinstance(node.op, ast.UAdd):
            return val
        raise ValueError("unsupported unary operator")
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return RationalFunction(Poly([node.value]), _reduced=True)
    if isinstance(node, ast.Name) and node.id == "u":
        return RationalFunction.u_power(1)
    raise ValueError(f"cannot parse {ast.dump(node)}")


def valuation(f) -> float | int:
    """Order of vanishing at u = 0; +inf for the zero function."""
    if isinstance(f, (int, Fraction)):
        return INFINITY if f == 0 else 0
    if f.is_zero():
        return INFINITY
    return f.num.lowest() - f.den.lowest()


# ---------------------------------------------------------------------------
# Dense matrices
# ---------------------------------------------------------------------------

class ExactMatrix:
    """Immutable dense matrix over Q or Q(u)."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = tuple(tuple(_as_field(x) for x in r) for r in rows)
        if self.rows and len({len(r) for r in self.rows}) != 1:
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n: int, one=Fraction(1)) -> "ExactMatrix":
        zero = one * 0
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int, m: int | None = None, zero=Fraction(0)) -> "ExactMatrix":
        return cls([[zero] * (n if m is None else m) for _ in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(zip(*self.rows))

    def map(self, fn) -> "ExactMatrix":
        return ExactMatrix([[fn(x) for x in r] for r in self.rows])

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda x: -x)

    def scale(self, c) -> "ExactMatrix":
        return self.map(lambda x: x * c)

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            cols = list(zip(*other.rows))
            return ExactMatrix([[_dot(r, c) for c in cols] for r in self.rows])
        return [_dot(r, other) for r in self.rows]

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "ExactMatrix([" + ", ".join(
            "[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "])"

    def to_lists(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.rows]

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix([[self.rows[i][j] for j in cols] for i in rows])


def _as_field(x):
    if isinstance(x, (Fraction, RationalFunction, BigReal)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Poly):
        return RationalFunction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"unsupported matrix entry {x!r}")


def _dot(a, b):
    acc = None
    for x, y in zip(a, b):
        if isinstance(x, Fraction) and x == 0:
            continue
        if isinstance(x, RationalFunction) and x.is_zero():
            continue
        t = x * y
        acc = t if acc is None else acc + t
    if acc is None:
        first = a[0] if a else Fraction(0)
        return first * 0 if not isinstance(first, Fraction) else Fraction(0)
    return acc


# ---------------------------------------------------------------------------
# Fraction-free elimination
# ---------------------------------------------------------------------------

def _is_zero(x) -> bool:
    if isinstance(x, Poly):
        return x.is_zero()
    return x == 0


def _exact_div(a, b):
    if isinstance(a, Poly):
        if not isinstance(b, Poly):
            return a * Fraction(1, b) if b != 1 else a
        return a.exact_div(b)
    q, r = divmod(a, b)
    if r:
        raise ArithmeticError("inexact integer division")
    return q


def _clear_row(row: Sequence):
    """Scale a row of field elements into ring elements (ints or Polys)."""
    if all(isinstance(x, Fraction) for x in row):
        m = 1
        for x in row:
            m = m * x.denominator // math.gcd(m, x.denominator)
        return [x.numerator * (m // x.denominator) for x in row], "Q"
    dens = [x.den for x in row if isinstance(x, RationalFunction) and not x.is_zero()]
    m = Poly([1])
    for d in dens:
        g = poly_gcd(m, d)
        m = m * d.exact_div(g)
    out = []
    for x in row:
        if isinstance(x, RationalFunction):
            out.append(x.num * m.exact_div(x.den) if not x.is_zero() else Poly())
        else:
            out.append(m * Fraction(x))
    return out, "Qu"


def _bareiss(rows: list[list], ncols: int):
    """In-place fraction-free row echelon form on the first ``ncols`` columns.

    Returns the list of pivot columns.
    """
    nrows = len(rows)
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if not _is_zero(rows[i][c])), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            a = rows[i][c]
            for j in range(c + 1, len(rows[i])):
                rows[i][j] = _exact_div(piv * rows[i][j] - a * rows[r][j], prev)
            rows[i][c] = 0 * piv
        prev = piv
        pivots.append(c)
        r += 1
    return pivots


def rank_over_field(M: ExactMatrix) -> int:
    """Exact rank of a matrix over Q or Q(u)."""
    n, m = M.shape
    if n == 0 or m == 0:
        return 0
    rows = [_clear_row(r)[0] for r in M.rows]
    return len(_bareiss(rows, m))


def solve_linear(M: ExactMatrix, v: Sequence):
    """Solve ``M x = v`` exactly for square ``M``.

    Raises :class:`SingularMatrixError` if ``M`` is singular.
    """
    n, m = M.shape
    if n != m:
        raise ValueError("solve_linear needs a square matrix")
    v = [_as_field(x) for x in v]
    aug = [_clear_row(list(r) + [b]) for r, b in zip(M.rows, v)]
    kind = "Qu" if any(k == "Qu" for _, k in aug) else "Q"
    rows = [r for r, _ in aug]
    if kind == "Qu":
        rows = [[x if isinstance(x, Poly) else Poly([x]) for x in r] for r in rows]
    pivots = _bareiss(rows, n)
    if len(pivots) < n:
        raise SingularMatrixError(f"matrix has rank {len(pivots)} < {n}")
    # back substitution in the field
    to_field = (lambda x: Fraction(x)) if kind == "Q" else (lambda x: RationalFunction(x))
    x = [None] * n
    for i in range(n - 1, -1, -1):
        acc = to_field(rows[i][n])
        for j in range(i + 1, n):
            if not _is_zero(rows[i][j]):
                acc = acc - to_field(rows[i][j]) * x[j]
        x[i] = acc / to_field(rows[i][i])
    return x


def inverse(M: ExactMatrix) -> ExactMatrix:
    n, _ = M.shape
    one = M[0, 0] * 0 + 1
    cols = []
    for j in range(n):
        e = [one if i == j else one * 0 for i in range(n)]
        cols.append(solve_linear(M, e))
    return ExactMatrix(zip(*cols))


def nullspace(M: ExactMatrix) -> list[list[Fraction]]:
    """Basis of the right kernel of a rational matrix."""
    n, m = M.shape
    rows = [list(r) for r in M.rows]
    # plain Gauss-Jordan over Q is fine for the small constant matrices used here
    piv_cols = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
        if r == n:
            break
    free = [c for c in range(m) if c not in piv_cols]
    basis = []
    for f in free:
        vec = [Fraction(0)] * m
        vec[f] = Fraction(1)
        for i, c in enumerate(piv_cols):
            vec[c] = -rows[i][f]
        basis.append(vec)
    return basis


def charpoly(M: ExactMatrix) -> list[Fraction]:
    """Characteristic polynomial det(lambda I - M), coefficients low degree first.

    Faddeev-LeVerrier; exact over Q.
    """
    n, _ = M.shape
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    I = ExactMatrix.identity(n)
    Mk = ExactMatrix.zeros(n)
    for k in range(1, n + 1):
        Mk = M @ (Mk + I.scale(coeffs[n - k + 1]))
        trace = sum((Mk[i, i] for i in range(n)), Fraction(0))
        coeffs[n - k] = -trace / k
    return coeffs


def rational_roots(coeffs: Sequence[Fraction]) -> dict[Fraction, int]:
    """Rational roots with multiplicity of a polynomial given low degree first."""
    p = Poly(coeffs)
    roots: dict[Fraction, int] = {}
    if p.is_zero():
        raise ValueError("zero polynomial")
    while p.degree > 0 and p.c[0] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        p = Poly(p.c[1:])
    if p.degree <= 0:
        return roots
    m = 1
    for x in p.c:
        m = m * x.denominator // math.gcd(m, x.denominator)
    ints = [int(x * m) for x in p.c]
    a0, an = abs(ints[0]), abs(ints[-1])
    cands = set()
    for num in _divisors(a0):
        for den in _divisors(an):
            cands.add(Fraction(num, den))
            cands.add(Fraction(-num, den))
    for r in sorted(cands):
        while p.degree > 0 and p(r) == 0:
            roots[r] = roots.get(r, 0) + 1
            p = p.exact_div(Poly([-r, 1]))
    return roots


def _divisors(n: int) -> list[int]:
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            out.append(n // i)
        i += 1
    return out
