"""Exact arithmetic over a prime field GF(q).

Field elements are plain Python ints kept as canonical residues in
``[0, q)``.  Polynomials are immutable :class:`Poly` values holding their
coefficients lowest degree first, with no trailing zeros (the zero
polynomial has no coefficients and degree ``-inf``).  Vectors and matrices
of polynomials are tuples of :class:`Poly`; scalar matrices are numpy
integer arrays reduced mod q.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    AllZero,
    BothZero,
    DivisionByZero,
    InexactDivision,
    NotPrimeError,
    ZeroInverse,
)

NEG_INF = float("-inf")

# int64 products of two residues stay exact below this modulus
_INT64_SAFE_Q = 1 << 31


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0 or q % 3 == 0:
        return False
    k = 5
    while k * k <= q:
        if q % k == 0 or q % (k + 2) == 0:
            return False
        k += 6
    return True


@dataclass(frozen=True)
class PrimeField:
    """The prime field GF(q); validated on construction."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 3 or not is_prime(self.q):
            raise NotPrimeError(f"q not prime (or < 3): {self.q!r}")

    def __call__(self, a: int) -> int:
        return a % self.q

    def inv(self, a: int) -> int:
        return field_inv(a, self.q)


def field_inv(a: int, q: int) -> int:
    a %= q
    if a == 0:
        raise ZeroInverse("0 has no inverse")
    return pow(a, -1, q)


def _trim(coeffs: list[int]) -> tuple[int, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Dense univariate polynomial over GF(q)."""

    __slots__ = ("coeffs", "q")

    def __init__(self, coeffs: Iterable[int] = (), q: int = 0):
        if q <= 0:
            raise ValueError("modulus q required")
        self.q = q
        self.coeffs = _trim([c % q for c in coeffs])

    @classmethod
    def _raw(cls, coeffs: tuple[int, ...], q: int) -> "Poly":
        # coeffs already reduced and trimmed
        p = cls.__new__(cls)
        p.q = q
        p.coeffs = coeffs
        return p

    @classmethod
    def zero(cls, q: int) -> "Poly":
        return cls._raw((), q)

    @classmethod
    def one(cls, q: int) -> "Poly":
        return cls._raw((1,), q)

    @classmethod
    def const(cls, c: int, q: int) -> "Poly":
        return cls((c,), q)

    @classmethod
    def x(cls, q: int) -> "Poly":
        return cls._raw((0, 1), q)

    @classmethod
    def from_roots(cls, roots: Iterable[int], q: int) -> "Poly":
        """Monic polynomial prod (x - r)."""
        out = cls.one(q)
        for r in roots:
            out = out * cls(((-r) % q, 1), q)
        return out

    @property
    def degree(self) -> int | float:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.q == other.q and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == _trim([other % self.q])
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.q, self.coeffs))

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)}, q={self.q})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.q != self.q:
                raise ValueError("polynomials over different fields")
            return other
        if isinstance(other, int):
            return Poly((other,), self.q)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, q = self.coeffs, other.coeffs, self.q
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = (out[k] + c) % q
        return Poly._raw(_trim(out), q)

    __radd__ = __add__

    def __neg__(self):
        q = self.q
        return Poly._raw(tuple((-c) % q for c in self.coeffs), q)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, q = self.coeffs, other.coeffs, self.q
        if not a or not b:
            return Poly.zero(q)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return Poly._raw(_trim([c % q for c in out]), q)

    __rmul__ = __mul__

    def scale(self, c: int) -> "Poly":
        q = self.q
        c %= q
        if c == 0:
            return Poly.zero(q)
        return Poly._raw(tuple(a * c % q for a in self.coeffs), q)

    def shift(self, k: int) -> "Poly":
        """Multiply by x^k."""
        if not self.coeffs:
            return self
        return Poly._raw((0,) * k + self.coeffs, self.q)

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return self.scale(field_inv(self.coeffs[-1], self.q))

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        q = self.q
        rem = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        inv_lc = field_inv(b[-1], q)
        if len(rem) <= db:
            return Poly.zero(q), self
        quo = [0] * (len(rem) - db)
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k] * inv_lc % q
            if c:
                quo[k - db] = c
                for i in range(db + 1):
                    rem[k - db + i] = (rem[k - db + i] - c * b[i]) % q
        return Poly._raw(_trim(quo), q), Poly._raw(_trim(rem[:db]), q)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, alpha: int) -> int:
        return poly_eval(self, alpha)


def poly_eval(f: Poly, alpha: int) -> int:
    q = f.q
    acc = 0
    for c in reversed(f.coeffs):
        acc = (acc * alpha + c) % q
    return acc


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd of f and g."""
    if f.is_zero() and g.is_zero():
        raise BothZero("gcd(0, 0) is undefined")
    while not g.is_zero():
        f, g = g, f % g
    return f.monic()


def poly_divexact(f: Poly, g: Poly) -> Poly:
    if g.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    quo, rem = divmod(f, g)
    if not rem.is_zero():
        raise InexactDivision(f"{g} does not divide {f}")
    return quo


# Polynomial vectors and matrices are tuples of Poly.
PolyVector = tuple  # tuple[Poly, ...]
PolyMatrix = tuple  # tuple[tuple[Poly, ...], ...]


def vec_degree(v: Sequence[Poly]) -> int | float:
    return max((p.degree for p in v), default=NEG_INF)


def mat_degree(A: Sequence[Sequence[Poly]]) -> int | float:
    return max((p.degree for row in A for p in row), default=NEG_INF)


def content_gcd(v: Sequence[Poly], d: Poly) -> Poly:
    """Monic gcd of all entries of v together with d."""
    g = d
    for p in v:
        if g.is_zero():
            g = p
        elif not p.is_zero():
            g = poly_gcd(g, p)
    if g.is_zero():
        raise AllZero("content of an all-zero vector")
    return g.monic()


def mat_vec_mul(A: Sequence[Sequence[Poly]], v: Sequence[Poly]) -> tuple[Poly, ...]:
    q = v[0].q
    out = []
    for row in A:
        acc = Poly.zero(q)
        for a, p in zip(row, v):
            acc = acc + a * p
        out.append(acc)
    return tuple(out)


def mat_eval(A: Sequence[Sequence[Poly]], alpha: int) -> np.ndarray:
    q = A[0][0].q
    return as_matrix([[poly_eval(p, alpha) for p in row] for row in A], q)


# ---------------------------------------------------------------------------
# Scalar matrices


def _dtype(q: int):
    return np.int64 if q < _INT64_SAFE_Q else object


def as_matrix(rows, q: int, cols: int = 0) -> np.ndarray:
    """Build a scalar matrix with entries reduced mod q."""
    M = np.array(rows, dtype=_dtype(q))
    if M.ndim != 2:
        M = M.reshape(len(rows), cols)
    return M % q


def rref(M: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod q, pivoting on the first nonzero entry."""
    A = np.array(M, dtype=_dtype(q)) % q
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        inv = pow(int(A[r, c]), -1, q)
        A[r] = A[r] * inv % q
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            A[hit] = (A[hit] - np.outer(col[hit], A[r])) % q
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M: np.ndarray, q: int) -> int:
    if M.size == 0:
        return 0
    return len(rref(M, q)[1])


def kernel_basis(M: np.ndarray, q: int) -> np.ndarray:
    """Basis of the right kernel {k : M k = 0}, one vector per row.

    The rows are in reduced echelon form, which is unique for a given
    subspace, so two kernels are equal exactly when their bases are.
    """
    M = np.asarray(M)
    cols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(cols, dtype=_dtype(q))
    R, pivots = rref(M, q)
    free = [c for c in range(cols) if c not in set(pivots)]
    if not free:
        return np.zeros((0, cols), dtype=_dtype(q))
    K = np.zeros((len(free), cols), dtype=_dtype(q))
    for t, f in enumerate(free):
        K[t, f] = 1
        for i, pc in enumerate(pivots):
            K[t, pc] = (-R[i, f]) % q
    return rref(K, q)[0]


def det(M: np.ndarray, q: int) -> int:
    A = np.array(M, dtype=_dtype(q)) % q
    n = A.shape[0]
    out = 1
    for c in range(n):
        nz = np.flatnonzero(A[c:, c])
        if nz.size == 0:
            return 0
        p = c + int(nz[0])
        if p != c:
            A[[c, p]] = A[[p, c]]
            out = -out
        piv = int(A[c, c])
        out = out * piv % q
        inv = pow(piv, -1, q)
        below = A[c + 1:, c] * inv % q
        A[c + 1:] = (A[c + 1:] - np.outer(below, A[c])) % q
    return out % q


def solve(M: np.ndarray, rhs: Sequence[int], q: int) -> list[int] | None:
    """Solve M y = rhs for square nonsingular M; None when M is singular."""
    n = M.shape[0]
    aug = np.concatenate([np.asarray(M, dtype=_dtype(q)), np.asarray(rhs, dtype=_dtype(q)).reshape(n, 1)], axis=1)
    R, pivots = rref(aug, q)
    if pivots != list(range(n)):
        return None
    return [int(x) for x in R[:, n]]


def matvec(M: np.ndarray, v: Sequence[int], q: int) -> list[int]:
    return [sum(int(a) * int(b) for a, b in zip(row, v)) % q for row in M]


def span_equal(B1: np.ndarray, B2: np.ndarray, q: int) -> bool:
    """True iff the row spaces of B1 and B2 coincide."""
    r1, r2 = rank(B1, q), rank(B2, q)
    if r1 != r2:
        return False
    if r1 == 0:
        return True
    return rank(np.concatenate([B1, B2]), q) == r1


def nullity_check(M: np.ndarray, K: np.ndarray, q: int) -> bool:
    """True iff every row of K lies in the kernel of M."""
    if K.shape[0] == 0 or M.shape[0] == 0:
        return True
    # object dtype: int64 dot products could overflow for large q
    return not np.any(np.asarray(M, dtype=object).dot(np.asarray(K, dtype=object).T) % q)

