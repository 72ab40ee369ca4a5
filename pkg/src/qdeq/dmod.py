"""Formal connections at u = 0: twists, cyclic vectors, irregularity.

A connection is stored as the matrix A(u) of ``nabla = d/du + A``.  The
operator used for cyclic vectors and associated differential operators is
D = u nabla, so  D v = u v' + u A v, and operators are written in
the Euler derivation  d = u d/du.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cohmodel import SpaceModel, mu_diagonal, quantum_c1_matrix, space_model
from .exactcore import (
    INFINITY,
    ExactMatrix,
    Poly,
    RationalFunction,
    SingularMatrixError,
    charpoly,
    inverse,
    nullspace,
    rank_over_field,
    rational_roots,
    solve_linear,
    valuation,
)

DEFAULT_BUDGET = 20
DEFAULT_SEED = 20240611


class NoCyclicVectorError(ArithmeticError):
    def __init__(self, max_rank: int, tried: int):
        super().__init__(f"no cyclic vector among {tried} candidates (max Krylov rank {max_rank})")
        self.max_rank = max_rank
        self.tried = tried


class SpectralOverlapError(ValueError):
    pass


class UnsupportedPoleOrderError(ValueError):
    pass


class UnsupportedSpectrumError(ValueError):
    pass


def _rf(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction(Poly([Fraction(x)]), _reduced=True)


def _zero_rf():
    return RationalFunction.zero()


# ---------------------------------------------------------------------------
# connections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FormalConnection:
    A: ExactMatrix
    provenance: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        n, m = self.A.shape
        if n != m:
            raise ValueError("connection matrix must be square")
        object.__setattr__(self, "A", self.A.map(_rf))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def pole_order(self) -> int:
        v = min((valuation(x) for r in self.A.rows for x in r), default=INFINITY)
        return 0 if v == INFINITY else max(0, -int(v))

    def leading(self) -> ExactMatrix:
        """(u^p A)|_{u=0} over Q."""
        p = self.pole_order
        return ExactMatrix([[_coeff(x, -p) for x in r] for r in self.A.rows])

    def apply_D(self, v: Sequence) -> list:
        u = RationalFunction.u_power(1)
        Av = self.A @ list(v)
        return [u * (x.derivative() + y) for x, y in zip(map(_rf, v), Av)]

    def apply_nabla(self, v: Sequence) -> list:
        Av = self.A @ list(v)
        return [x.derivative() + y for x, y in zip(map(_rf, v), Av)]

    def conjugate(self, P: ExactMatrix) -> "FormalConnection":
        """Constant gauge change v = P w."""
        Pi = inverse(P)
        Pr, Pir = P.map(_rf), Pi.map(_rf)
        return FormalConnection(Pir @ self.A @ Pr, dict(self.provenance, conjugated=True))

    def direct_sum(self, other: "FormalConnection") -> "FormalConnection":
        n, m = self.n, other.n
        z = _zero_rf()
        rows = [list(r) + [z] * m for r in self.A.rows]
        rows += [[z] * n + list(r) for r in other.A.rows]
        return FormalConnection(ExactMatrix(rows), {"direct_sum": True})

    def to_json(self) -> dict:
        prov = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.provenance.items()}
        return {"n": self.n, "pole_order": self.pole_order, "A": self.A.to_lists(),
                "provenance": prov}


def _coeff(f: RationalFunction, k: int) -> Fraction:
    return _series(f, k, k)[k]


def _series(f: RationalFunction, lo: int, hi: int) -> dict[int, Fraction]:
    """Laurent coefficients of f at u = 0 for exponents lo..hi."""
    out = {k: Fraction(0) for k in range(lo, hi + 1)}
    if f.is_zero():
        return out
    s = f.den.lowest()
    den = f.den.c[s:]
    # num / den as a power series, then shift by -s
    need = hi + s + 1
    if need <= 0:
        return out
    num = list(f.num.c[:need]) + [Fraction(0)] * max(0, need - len(f.num.c))
    q = []
    d0 = den[0]
    for k in range(need):
        acc = num[k]
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * q[k - j]
        q.append(acc / d0)
    for k in range(lo, hi + 1):
        idx = k + s
        if 0 <= idx < need:
            out[k] = q[idx]
    return out


def connection_from_matrices(mu: ExactMatrix, c1: ExactMatrix, provenance=None) -> FormalConnection:
    """A = mu/u + c1/u^2."""
    inv_u = RationalFunction.u_power(-1)
    inv_u2 = RationalFunction.u_power(-2)
    n = mu.shape[0]
    rows = [[inv_u * mu[i, j] + inv_u2 * c1[i, j] for j in range(n)] for i in range(n)]
    return FormalConnection(ExactMatrix(rows), provenance or {})


def quantum_connection(model: SpaceModel | str = "twistor", block: str = "y", q=1, chi=None,
                       remove_shift: bool = True) -> FormalConnection:
    """Quantum connection in u of a block; for the y-block the scalar part
    (m-6)/2 of the grading is twisted away when ``remove_shift``."""
    if isinstance(model, str):
        model = space_model(model) if chi is None else space_model(model, chi=chi)
    q = Fraction(q)
    c1 = quantum_c1_matrix(model, block, q, chi)
    diag = mu_diagonal(model, block)
    shift = Fraction(0)
    if block == "y" and remove_shift:
        shift = Fraction(model.params["y_degree"] - 6, 2)
    diag = [d - shift for d in diag]
    n = len(diag)
    mu = ExactMatrix([[diag[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)])
    prov = {"space": model.name, "block": block, "q": q,
            "mu": [str(d) for d in diag], "shift_removed": str(shift)}
    if model.name == "twistor":
        prov["chi"] = model.params["chi"] if chi is None else Fraction(chi)
    return connection_from_matrices(mu, c1, prov)


def twist(conn: FormalConnection, w) -> FormalConnection:
    """Tensor with E^(w/u):  A -> A - (w/u^2) Id."""
    w = Fraction(w)
    if w == 0:
        return conn
    s = RationalFunction.u_power(-2, -w)
    A = ExactMatrix([[x + s if i == j else x for j, x in enumerate(r)]
                     for i, r in enumerate(conn.A.rows)])
    prov = dict(conn.provenance)
    prov["twist"] = prov.get("twist", Fraction(0)) + w
    return FormalConnection(A, prov)


def regular_twist(conn: FormalConnection, c) -> FormalConnection:
    """A -> A - (c/u) Id."""
    c = Fraction(c)
    if c == 0:
        return conn
    s = RationalFunction.u_power(-1, -c)
    A = ExactMatrix([[x + s if i == j else x for j, x in enumerate(r)]
                     for i, r in enumerate(conn.A.rows)])
    return FormalConnection(A, dict(conn.provenance))


# ---------------------------------------------------------------------------
# cyclic vectors
# ---------------------------------------------------------------------------

def krylov(conn: FormalConnection, e: Sequence, count: int | None = None,
           mode: str = "D") -> list[list]:
    """[e, Xe, X^2 e, ...] for X = D (u nabla), ``nabla`` or ``C`` (the u^-2 coefficient)."""
    n = conn.n
    count = n if count is None else count
    vecs = [[_rf(x) for x in e]]
    if mode == "C":
        C = conn.leading().map(_rf)
        step = lambda v: C @ v
    elif mode == "nabla":
        step = conn.apply_nabla
    elif mode == "D":
        step = conn.apply_D
    else:
        raise ValueError(f"unknown Krylov mode {mode!r}")
    for _ in range(count - 1):
        vecs.append(step(vecs[-1]))
    return vecs


def krylov_rank(conn: FormalConnection, e: Sequence, mode: str = "D") -> int:
    vecs = krylov(conn, e, mode=mode)
    return rank_over_field(ExactMatrix(list(zip(*vecs))))


def default_candidates(n: int, seed: int = DEFAULT_SEED, budget: int = DEFAULT_BUDGET) -> list[list[int]]:
    cands = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    cands.append([1] * n)
    rng = random.Random(seed)
    for _ in range(budget):
        v = [rng.randint(-3, 3) for _ in range(n)]
        if any(v):
            cands.append(v)
    return cands


def cyclic_vector(conn: FormalConnection, candidates: Sequence | None = None,
                  seed: int = DEFAULT_SEED, budget: int = DEFAULT_BUDGET) -> list:
    """First candidate whose D-Krylov matrix has full rank."""
    if candidates is None:
        candidates = default_candidates(conn.n, seed, budget)
    if not candidates:
        raise ValueError("empty candidate list")
    best = 0
    for e in candidates:
        r = krylov_rank(conn, e)
        if r == conn.n:
            return [_rf(x) for x in e]
        best = max(best, r)
    raise NoCyclicVectorError(best, len(candidates))


def cyclic_vectors(conn: FormalConnection, count: int, seed: int = DEFAULT_SEED,
                   budget: int = DEFAULT_BUDGET) -> list[list]:
    out = []
    for e in default_candidates(conn.n, seed, budget):
        if krylov_rank(conn, e) == conn.n:
            out.append([_rf(x) for x in e])
            if len(out) == count:
                return out
    raise NoCyclicVectorError(conn.n - 1 if out else 0, len(out))


# ---------------------------------------------------------------------------
# differential operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiffOperator:
    """Monic L = d^n + a_{n-1} d^{n-1} + ... + a_0 with d = u d/du."""
    coeffs: tuple          # a_0 .. a_{n-1}

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def coefficient(self, k: int) -> RationalFunction:
        if k == self.order:
            return RationalFunction.one()
        return self.coeffs[k]

    @classmethod
    def parse(cls, text: str) -> "DiffOperator":
        """Parse ``"d4:1; d2:-8/u^2; d0:16/u^4-16/u^2"``; the top term is divided out."""
        terms: dict[int, RationalFunction] = {}
        for part in text.split(";"):
            part = part.strip()
            if not part:
                continue
            head, sep, expr = part.partition(":")
            head = head.strip()
            if not sep or not head.startswith("d") or not head[1:].isdigit():
                raise ValueError(f"bad operator term {part!r}; expected dK:expr")
            k = int(head[1:])
            terms[k] = terms.get(k, RationalFunction.zero()) + RationalFunction.parse(expr.strip())
        terms = {k: v for k, v in terms.items() if not v.is_zero()}
        if not terms:
            raise ValueError("zero operator")
        n = max(terms)
        lead = terms[n]
        return cls(tuple((terms.get(k, RationalFunction.zero()) / lead) for k in range(n)))

    def __str__(self):
        parts = [f"d{self.order}:1"]
        for k in range(self.order - 1, -1, -1):
            if not self.coeffs[k].is_zero():
                parts.append(f"d{k}:{self.coeffs[k]}")
        return "; ".join(parts)

    def to_json(self) -> dict:
        return {"order": self.order,
                "coefficients": {f"d{k}": str(self.coefficient(k)) for k in range(self.order, -1, -1)},
                "irregularity": irregularity(self)}


def associated_operator(conn: FormalConnection, e: Sequence) -> DiffOperator:
    """Solve D^n e + sum a_i D^i e = 0 for the a_i."""
    n = conn.n
    vecs = krylov(conn, e, count=n + 1)
    K = ExactMatrix(list(zip(*vecs[:n])))
    rhs = [-x for x in vecs[n]]
    a = solve_linear(K, rhs)   # SingularMatrixError if e is not cyclic
    return DiffOperator(tuple(_rf(x) for x in a))


def irregularity(L: DiffOperator) -> int:
    worst = 0
    for a in L.coeffs:
        v = valuation(a)
        if v != INFINITY:
            worst = max(worst, -int(v))
    return worst


def connection_irregularity(conn: FormalConnection, e: Sequence | None = None) -> int:
    if e is None:
        e = cyclic_vector(conn)
    return irregularity(associated_operator(conn, e))


# ---------------------------------------------------------------------------
# splitting by leading eigenvalues
# ---------------------------------------------------------------------------

def eigen_data(M: ExactMatrix) -> dict[Fraction, int]:
    cp = charpoly(M)
    roots = rational_roots(cp)
    if sum(roots.values()) != M.shape[0]:
        raise UnsupportedSpectrumError("characteristic polynomial does not split over Q")
    return dict(sorted(roots.items()))


def _mat_pow(M: ExactMatrix, k: int) -> ExactMatrix:
    out = ExactMatrix.identity(M.shape[0])
    for _ in range(k):
        out = out @ M
    return out


def _solve_sylvester(L1: ExactMatrix, L2: ExactMatrix, C: ExactMatrix) -> ExactMatrix:
    """X with L1 X - X L2 = C."""
    r, s = C.shape
    size = r * s
    rows = []
    for i in range(r):
        for j in range(s):
            row = [Fraction(0)] * size
            for k in range(r):
                row[k * s + j] += L1[i, k]
            for k in range(s):
                row[i * s + k] -= L2[k, j]
            rows.append(row)
    x = solve_linear(ExactMatrix(rows), [C[i, j] for i in range(r) for j in range(s)])
    return ExactMatrix([[x[i * s + j] for j in range(s)] for i in range(r)])


@dataclass
class LeadingSplit:
    P: ExactMatrix                    # constant change of basis
    eigenvalues: list                 # one per block
    blocks: list                      # index lists after P
    T: list                           # T_1 .. T_K
    B: list                           # block diagonal coefficients of u^2 A', orders 0..K
    K: int
    residual_valuation: float

    def block_leading(self, j: int) -> ExactMatrix:
        idx = self.blocks[j]
        return self.B[0].block(idx, idx)


def leading_split(conn: FormalConnection, K: int = 6) -> LeadingSplit:
    """Gauge transform T = Id + sum T_k u^k making u^2 A block diagonal to order K.

    The blocks follow the generalized eigenspaces of the leading matrix.
    """
    if conn.pole_order != 2:
        raise UnsupportedPoleOrderError(f"pole order {conn.pole_order}, need 2")
    n = conn.n
    L0 = conn.leading()
    eig = eigen_data(L0)
    if len(eig) < 2:
        raise SpectralOverlapError("leading matrix has a single eigenvalue group")
    cols, blocks, pos = [], [], 0
    for w, m in eig.items():
        basis = nullspace(_mat_pow(L0 - ExactMatrix.identity(n).scale(w), m))
        cols.extend(basis)
        blocks.append(list(range(pos, pos + len(basis))))
        pos += len(basis)
    P = ExactMatrix(list(zip(*cols)))
    if P == ExactMatrix.identity(n):
        Pi = P
    else:
        Pi = inverse(P)
    # B_k: coefficients of u^2 P^-1 A P
    raw = [[_series(x, -2, K - 2) for x in r] for r in conn.A.rows]
    B = []
    for k in range(K + 1):
        Ak = ExactMatrix([[raw[i][j][k - 2] for j in range(n)] for i in range(n)])
        B.append(Pi @ Ak @ P)
    owner = {}
    for b, idx in enumerate(blocks):
        for i in idx:
            owner[i] = b

    def split(M):
        diag = ExactMatrix([[M[i, j] if owner[i] == owner[j] else Fraction(0) for j in range(n)]
                            for i in range(n)])
        return diag, M - diag

    Bp = [B[0]]
    T = [ExactMatrix.identity(n)]
    for m in range(1, K + 1):
        X = ExactMatrix.zeros(n)
        for k in range(1, m + 1):
            X = X + B[k] @ T[m - k]
        X = X + T[m - 1].scale(m - 1)
        for k in range(1, m):
            X = X - T[m - k] @ Bp[k]
        diag, off = split(X)
        Tm = [[Fraction(0)] * n for _ in range(n)]
        for a, ia in enumerate(blocks):
            for b, ib in enumerate(blocks):
                if a == b:
                    continue
                sol = _solve_sylvester(B[0].block(ia, ia), B[0].block(ib, ib), -off.block(ia, ib))
                for r, i in enumerate(ia):
                    for s, j in enumerate(ib):
                        Tm[i][j] = sol[r, s]
        T.append(ExactMatrix(Tm))
        Bp.append(diag)
    res = _split_residual(conn, P, T, Bp)
    return LeadingSplit(P, list(eig), blocks, T[1:], Bp, K, res)


def _split_residual(conn, P, T, Bp) -> float:
    """min valuation of  A~ T + T' - T B'/u^2  with A~ = P^-1 A P.

    T(0) = Id, so this is the valuation of A' - B'/u^2, a lower bound for the
    off-diagonal blocks of the conjugated connection.
    """
    n = conn.n
    u = lambda k, c: RationalFunction.u_power(k, c) if c else RationalFunction.zero()
    Tu = ExactMatrix([[sum((u(k, Tk[i, j]) for k, Tk in enumerate(T)), RationalFunction.zero())
                       for j in range(n)] for i in range(n)])
    Bu = ExactMatrix([[sum((u(k - 2, Bk[i, j]) for k, Bk in enumerate(Bp)), RationalFunction.zero())
                       for j in range(n)] for i in range(n)])
    At = conn.conjugate(P).A if P != ExactMatrix.identity(n) else conn.A
    R = At @ Tu + Tu.map(lambda x: x.derivative()) - Tu @ Bu
    return min(valuation(x) for r in R.rows for x in r)


# ---------------------------------------------------------------------------
# exponential type
# ---------------------------------------------------------------------------

VERDICT_REGULAR = "regular singular"
VERDICT_EXP = "unramified exponential type"
VERDICT_OPEN = "not certified"


@dataclass
class ExpTypeReport:
    pole_order: int
    n: int
    irr: int
    eigenvalues: dict = field(default_factory=dict)
    twisted_irr: dict = field(default_factory=dict)
    expected_twisted: dict = field(default_factory=dict)
    shifted_invertible: dict = field(default_factory=dict)
    residual_valuation: float | None = None
    verdict: str = VERDICT_OPEN

    def to_json(self) -> dict:
        s = lambda d: {str(k): v for k, v in d.items()}
        return {
            "pole_order": self.pole_order, "n": self.n, "irr": self.irr,
            "eigenvalues": s(self.eigenvalues), "twisted_irr": s(self.twisted_irr),
            "expected_twisted_irr": s(self.expected_twisted),
            "shifted_leading_invertible": s(self.shifted_invertible),
            "split_residual_valuation": (None if self.residual_valuation is None
                                         else (str(self.residual_valuation)
                                               if self.residual_valuation == INFINITY
                                               else int(self.residual_valuation))),
            "verdict": self.verdict,
        }


def exp_type_report(conn: FormalConnection, K: int = 4, seed: int = DEFAULT_SEED) -> ExpTypeReport:
    p = conn.pole_order
    if p >= 3:
        raise UnsupportedPoleOrderError(f"pole order {p} >= 3")
    irr = connection_irregularity(conn, cyclic_vector(conn, seed=seed))
    if p <= 1:
        return ExpTypeReport(p, conn.n, irr, verdict=VERDICT_REGULAR if irr == 0 else VERDICT_OPEN)
    eig = eigen_data(conn.leading())
    rep = ExpTypeReport(p, conn.n, irr, eigenvalues=eig)
    if len(eig) == 1:
        # a single group: twist it away and test regularity directly
        (w, _), = eig.items()
        t = connection_irregularity(twist(conn, w))
        rep.twisted_irr[w] = t
        rep.expected_twisted[w] = 0
        rep.verdict = VERDICT_EXP if t == 0 else VERDICT_OPEN
        return rep
    split = leading_split(conn, K)
    rep.residual_valuation = split.residual_valuation
    ok = True
    for j, w in enumerate(split.eigenvalues):
        t = connection_irregularity(twist(conn, w), None)
        rep.twisted_irr[w] = t
        rep.expected_twisted[w] = sum(m for w2, m in eig.items() if w2 != w)
        inv = True
        for jj, w2 in enumerate(split.eigenvalues):
            if jj == j:
                continue
            Lb = split.block_leading(jj)
            shifted = Lb - ExactMatrix.identity(Lb.shape[0]).scale(w)
            if rank_over_field(shifted) < Lb.shape[0]:
                inv = False
        rep.shifted_invertible[w] = inv
        ok = ok and inv and t == rep.expected_twisted[w]
    rep.verdict = VERDICT_EXP if ok else VERDICT_OPEN
    return rep


def twist_sign_check(printed: DiffOperator, conn: FormalConnection, e: Sequence, w) -> Fraction | None:
    """Which of twist(w), twist(-w) reproduces ``printed``; returns the sign used or None."""
    w = Fraction(w)
    for cand in (w, -w):
        if associated_operator(twist(conn, cand), e) == printed:
            return cand
    return None


def mult_krylov_rank(conn: FormalConnection, e: Sequence) -> int:
    """Rank of span{e, C e, C^2 e, ...} for the constant leading matrix C."""
    return krylov_rank(conn, e, mode="C")


__all__ = [
    "FormalConnection", "DiffOperator", "LeadingSplit", "ExpTypeReport",
    "NoCyclicVectorError", "SpectralOverlapError", "UnsupportedPoleOrderError",
    "UnsupportedSpectrumError", "SingularMatrixError",
    "connection_from_matrices", "quantum_connection", "twist", "regular_twist",
    "krylov", "krylov_rank", "default_candidates", "cyclic_vector", "cyclic_vectors",
    "associated_operator", "irregularity", "connection_irregularity", "eigen_data",
    "leading_split", "exp_type_report", "twist_sign_check", "mult_krylov_rank",
    "VERDICT_REGULAR", "VERDICT_EXP", "VERDICT_OPEN",
]
