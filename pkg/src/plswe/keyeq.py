"""Key equations phi_i(alpha_j) = y_ij psi(alpha_j) and their solution spaces.

The unknowns (phi_1, ..., phi_n, psi) with deg phi_i < nu and deg psi < theta
are laid out as one coefficient vector: the nu coefficients of phi_1
(lowest degree first), ..., those of phi_n, then the theta coefficients of
psi.  Row ``i*L + j`` of the key matrix encodes the equation for component
``i`` at point ``alpha_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    Poly,
    as_matrix,
    content_gcd,
    field_inv,
    kernel_basis,
    mat_vec_mul,
    poly_eval,
    span_equal,
    vec_degree,
)
from .exceptions import CertificationFailed, EmptySolutionSpace, RankAboveOne, ZeroDenominator


@dataclass(frozen=True)
class EvaluationTable:
    """Points alpha_1..alpha_L and the received columns y_1..y_L (each of length n)."""

    q: int
    points: tuple[int, ...]
    columns: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.points) != len(self.columns):
            raise ValueError("one column per evaluation point required")
        if len(set(self.points)) != len(self.points):
            raise ValueError("evaluation points must be pairwise distinct")
        if len(self.points) > self.q:
            raise ValueError("more points than field elements")
        if self.columns and len({len(c) for c in self.columns}) != 1:
            raise ValueError("columns must all have length n")

    @property
    def L(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    def prefix(self, L: int) -> "EvaluationTable":
        return EvaluationTable(self.q, self.points[:L], self.columns[:L])

    def with_columns(self, replacements: dict[int, Sequence[int]]) -> "EvaluationTable":
        """Copy with the 0-based column indices in ``replacements`` swapped out."""
        cols = list(self.columns)
        for j, col in replacements.items():
            cols[j] = tuple(c % self.q for c in col)
        return EvaluationTable(self.q, self.points, tuple(cols))


@dataclass(frozen=True)
class KeyEqParams:
    nu: int
    theta: int

    def __post_init__(self):
        if self.nu < 1 or self.theta < 1:
            raise ValueError(f"nu, theta must be >= 1, got ({self.nu}, {self.theta})")


@dataclass(frozen=True)
class RationalSolution:
    v: tuple[Poly, ...]
    d: Poly

    @property
    def q(self) -> int:
        return self.d.q

    @property
    def degv(self) -> int | float:
        return vec_degree(self.v)

    @property
    def degd(self) -> int | float:
        return self.d.degree

    def is_normalized(self) -> bool:
        return (not self.d.is_zero()) and self.d.lc() == 1 and content_gcd(self.v, self.d) == Poly.one(self.q)

    def as_lists(self) -> dict:
        return {"v": [list(p.coeffs) for p in self.v], "d": list(self.d.coeffs)}

    @classmethod
    def from_lists(cls, v: Sequence[Sequence[int]], d: Sequence[int], q: int) -> "RationalSolution":
        return cls(tuple(Poly(c, q) for c in v), Poly(d, q))

    def __str__(self) -> str:
        return f"v=({', '.join(map(str, self.v))}), d={self.d}"


@dataclass(frozen=True)
class SolutionSpace:
    params: KeyEqParams
    n: int
    q: int
    vectors: np.ndarray  # kernel basis, one packed coefficient vector per row

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def basis(self) -> list[tuple[tuple[Poly, ...], Poly]]:
        return [unpack(row, self.n, self.params, self.q) for row in self.vectors]

    def __bool__(self) -> bool:
        return self.dim > 0


def pack(phi: Sequence[Poly], psi: Poly, p: KeyEqParams) -> list[int] | None:
    """Coefficient vector of (phi, psi); None if a degree truncation is exceeded."""
    if vec_degree(phi) >= p.nu or psi.degree >= p.theta:
        return None
    out: list[int] = []
    for f in phi:
        out.extend(f[k] for k in range(p.nu))
    out.extend(psi[k] for k in range(p.theta))
    return out


def unpack(row, n: int, p: KeyEqParams, q: int) -> tuple[tuple[Poly, ...], Poly]:
    row = [int(c) for c in row]
    phi = tuple(Poly(row[i * p.nu:(i + 1) * p.nu], q) for i in range(n))
    psi = Poly(row[n * p.nu:], q)
    return phi, psi


def build_key_matrix(Y: EvaluationTable, p: KeyEqParams, n: int | None = None) -> np.ndarray:
    q, L = Y.q, Y.L
    n = Y.n if n is None else n
    width = max(p.nu, p.theta)
    powers = as_matrix([[pow(a, k, q) for k in range(width)] for a in Y.points], q, width)
    Vnu, Vtheta = powers[:, :p.nu], powers[:, :p.theta]
    M = as_matrix(np.zeros((n * L, n * p.nu + p.theta), dtype=powers.dtype), q)
    for i in range(n):
        y = as_matrix([[Y.columns[j][i]] for j in range(L)], q, 1)
        M[i * L:(i + 1) * L, i * p.nu:(i + 1) * p.nu] = Vnu
        M[i * L:(i + 1) * L, n * p.nu:] = (-y * Vtheta) % q
    return M


def solve_key_equations(Y: EvaluationTable, p: KeyEqParams, n: int | None = None) -> SolutionSpace:
    n = Y.n if n is None else n
    K = kernel_basis(build_key_matrix(Y, p, n), Y.q)
    return SolutionSpace(p, n, Y.q, K)


def check(Y: EvaluationTable, p: KeyEqParams, n: int | None = None) -> bool:
    return bool(solve_key_equations(Y, p, n))


def solution_from_space(S: SolutionSpace, certifier=None) -> RationalSolution:
    """Reduce the first basis element by its content and make d monic.

    Raises RankAboveOne when some other basis element is not a polynomial
    multiple of the reduced candidate.
    """
    if not S:
        raise EmptySolutionSpace(f"no nonzero solution for {S.params}")
    q = S.q
    basis = S.basis
    phi, psi = basis[0]
    if psi.is_zero():
        raise ZeroDenominator("first kernel element has psi = 0")
    g = content_gcd(phi, psi)
    v = tuple(f // g for f in phi)
    d = psi // g
    c = field_inv(d.lc(), q)
    v = tuple(f.scale(c) for f in v)
    d = d.scale(c)
    for phi2, psi2 in basis[1:]:
        P, rem = divmod(psi2, d)
        if not rem.is_zero() or any(f2 != P * f for f, f2 in zip(v, phi2)):
            raise RankAboveOne("solution module is not generated by a single element")
    sol = RationalSolution(v, d)
    if certifier is not None:
        certify(sol, certifier.A, certifier.b)
    return sol


def find_solution(Y: EvaluationTable, p: KeyEqParams, certifier=None, n: int | None = None) -> RationalSolution:
    return solution_from_space(solve_key_equations(Y, p, n), certifier)


def certify(sol: RationalSolution, A, b) -> None:
    """Raise CertificationFailed unless A v = d b holds identically."""
    lhs = mat_vec_mul(A, sol.v)
    rhs = tuple(sol.d * bi for bi in b)
    if sol.d.is_zero() or lhs != rhs:
        raise CertificationFailed("A*v != d*b")


def error_locator(points: Sequence[int], support, q: int) -> Poly:
    """prod over 1-based indices j in support of (x - alpha_j)."""
    return Poly.from_roots((points[j - 1] for j in sorted(support)), q)


def structured_basis(truth: RationalSolution, locator: Poly, p: KeyEqParams, count: int) -> np.ndarray:
    """Packed vectors of x^i (Lambda v, Lambda d) for 0 <= i < count."""
    q = truth.q
    lv = tuple(locator * f for f in truth.v)
    ld = locator * truth.d
    rows = []
    for i in range(max(count, 0)):
        row = pack(tuple(f.shift(i) for f in lv), ld.shift(i), p)
        if row is None:
            break
        rows.append(row)
    return as_matrix(rows, q, len(truth.v) * p.nu + p.theta)


def verify_space_structure(S: SolutionSpace, truth: RationalSolution, locator: Poly, delta: int) -> bool:
    """True iff S is exactly the span of x^i (Lambda v, Lambda d), 0 <= i < delta."""
    want = max(delta, 0)
    if S.dim != want:
        return False
    G = structured_basis(truth, locator, S.params, want)
    if G.shape[0] != want:
        return False
    return span_equal(S.vectors, G, S.q) if want else True


def table_from_solution(truth: RationalSolution, points: Sequence[int]) -> EvaluationTable:
    """Columns v(alpha)/d(alpha); raises ZeroInverse where d vanishes."""
    q = truth.q
    cols = []
    for a in points:
        inv = field_inv(poly_eval(truth.d, a), q)
        cols.append(tuple(poly_eval(f, a) * inv % q for f in truth.v))
    return EvaluationTable(q, tuple(points), tuple(cols))

