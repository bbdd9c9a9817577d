"""Error injection: uniform corruption, the two adversarial constructions, rate-bounded streams.

Column indices in supports are 1-based, matching y_1, ..., y_L.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

from .algebra import mat_eval, poly_eval, solve
from .bounds import check_rate
from .exceptions import DenominatorVanishes, SingularEvaluation, SupportOutOfRange
from .instance import PLSInstance, PointSource
from .keyeq import EvaluationTable, RationalSolution


@dataclass(frozen=True)
class Partition:
    """Cells I_1..I_n covering the error support, each of size <= ceil(|E|/n)."""

    cells: tuple[tuple[int, ...], ...]

    def cell_of(self, j: int) -> int:
        """0-based cell index i_j of support index j."""
        for i, cell in enumerate(self.cells):
            if j in cell:
                return i
        raise KeyError(j)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(j for cell in self.cells for j in cell)


def make_partition(support, n: int) -> Partition:
    """Round-robin assignment of the sorted support to n cells."""
    cells: list[list[int]] = [[] for _ in range(n)]
    for k, j in enumerate(sorted(support)):
        cells[k % n].append(j)
    return Partition(tuple(tuple(c) for c in cells))


def _check_support(support, L: int) -> list[int]:
    bad = [j for j in support if not 1 <= j <= L]
    if bad:
        raise SupportOutOfRange(f"support indices {bad} outside 1..{L}")
    return sorted(support)


def uniform_column(seed: int, j: int, n: int, q: int) -> tuple[int, ...]:
    # one generator per (seed, position) keeps streams prefix-consistent
    rng = random.Random(f"{seed}:{j}")
    return tuple(rng.randrange(q) for _ in range(n))


def inject_uniform(Y: EvaluationTable, support, seed: int) -> EvaluationTable:
    """Replace the columns in ``support`` by i.i.d. uniform vectors (which may equal the honest ones)."""
    idx = _check_support(support, Y.L)
    return Y.with_columns({j - 1: uniform_column(seed, j, Y.n, Y.q) for j in idx})


def _canonical(i: int, n: int) -> list[int]:
    e = [0] * n
    e[i] = 1
    return e


def case1_column(truth: RationalSolution, alpha: int, cell: int) -> tuple[int, ...]:
    """Column V with v(alpha) - d(alpha) V = e_cell."""
    q = truth.q
    d_alpha = poly_eval(truth.d, alpha)
    if d_alpha == 0:
        raise DenominatorVanishes(f"d({alpha}) = 0")
    inv = pow(d_alpha, -1, q)
    eps = _canonical(cell, len(truth.v))
    return tuple((poly_eval(f, alpha) - e) * inv % q for f, e in zip(truth.v, eps))


def case2_column(inst: PLSInstance, truth: RationalSolution, alpha: int, cell: int) -> tuple[int, ...]:
    """Column V with v(alpha) - d(alpha) V = -A(alpha)^-1 d(alpha) e_cell."""
    q = truth.q
    d_alpha = poly_eval(truth.d, alpha)
    if d_alpha == 0:
        raise DenominatorVanishes(f"d({alpha}) = 0")
    w = solve(mat_eval(inst.A, alpha), _canonical(cell, inst.n), q)
    if w is None:
        raise SingularEvaluation(f"A({alpha}) is singular")
    inv = pow(d_alpha, -1, q)
    return tuple((poly_eval(f, alpha) + wi * d_alpha) * inv % q for f, wi in zip(truth.v, w))


def _honest(truth: RationalSolution, points: Sequence[int]) -> EvaluationTable:
    q = truth.q
    cols = []
    for a in points:
        d_alpha = poly_eval(truth.d, a)
        if d_alpha == 0:
            raise DenominatorVanishes(f"d({a}) = 0")
        inv = pow(d_alpha, -1, q)
        cols.append(tuple(poly_eval(f, a) * inv % q for f in truth.v))
    return EvaluationTable(q, tuple(points), tuple(cols))


def inject_structured_case1(truth: RationalSolution, points: Sequence[int], partition: Partition) -> EvaluationTable:
    Y = _honest(truth, points)
    idx = _check_support(partition.support, Y.L)
    return Y.with_columns({j - 1: case1_column(truth, points[j - 1], partition.cell_of(j)) for j in idx})


def inject_structured_case2(
    inst: PLSInstance, truth: RationalSolution, points: Sequence[int], partition: Partition
) -> EvaluationTable:
    Y = _honest(truth, points)
    idx = _check_support(partition.support, Y.L)
    return Y.with_columns({j - 1: case2_column(inst, truth, points[j - 1], partition.cell_of(j)) for j in idx})


# ---------------------------------------------------------------------------
# Error processes for streams


@dataclass(frozen=True)
class UniformOnSupport:
    support: frozenset[int]
    seed: int


@dataclass(frozen=True)
class StructuredCase1:
    support: frozenset[int]


@dataclass(frozen=True)
class StructuredCase2:
    support: frozenset[int]


@dataclass(frozen=True)
class RateBounded:
    rho_true: Fraction
    seed: int

    def __post_init__(self):
        if not 0 <= Fraction(self.rho_true) <= 1:
            raise ValueError("rate must lie in [0, 1]")


ErrorProcess = Union[UniformOnSupport, StructuredCase1, StructuredCase2, RateBounded]

NO_ERRORS = UniformOnSupport(frozenset(), 0)


class _RateState:
    """Bernoulli(rho) corruptions, suppressed whenever |E(L)| would exceed floor(rho L)."""

    def __init__(self, process: RateBounded):
        self.rho = Fraction(process.rho_true)
        self.rng = random.Random(process.seed)
        self.count = 0

    def step(self, j: int, n: int, q: int) -> tuple[int, ...] | None:
        hit = self.rng.randrange(self.rho.denominator) < self.rho.numerator
        col = tuple(self.rng.randrange(q) for _ in range(n))
        if hit and self.count + 1 <= math.floor(self.rho * j):
            self.count += 1
            return col
        return None


def rate_bounded_stream(
    process: RateBounded,
    honest_column_fn: Callable[[int], tuple[int, tuple[int, ...]]],
    L: int,
    q: int,
) -> tuple[EvaluationTable, frozenset[int]]:
    """Length-L prefix of a rate-bounded stream and its support.

    ``honest_column_fn(j)`` returns ``(alpha_j, honest column)`` for 1-based j.
    """
    state = _RateState(process)
    points, cols, support = [], [], set()
    for j in range(1, L + 1):
        alpha, honest = honest_column_fn(j)
        bad = state.step(j, len(honest), q)
        points.append(alpha)
        if bad is None:
            cols.append(tuple(honest))
        else:
            cols.append(bad)
            support.add(j)
    return EvaluationTable(q, tuple(points), tuple(cols)), frozenset(support)


@dataclass
class EvaluationStream:
    """Evaluations y_1, y_2, ... delivered on demand by simulated workers.

    ``table(L)`` is always a prefix of ``table(L+1)``.  ``support_count`` is
    the number of positions the error process touched; ``error_count``
    counts actual discrepancies with the honest value.
    """

    inst: PLSInstance
    truth: RationalSolution
    process: ErrorProcess = NO_ERRORS
    points: PointSource | None = None
    consumed: int = 0
    _columns: list = field(default_factory=list)
    _honest: list = field(default_factory=list)
    _support: list = field(default_factory=list)
    _rate: _RateState | None = None
    _cells: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.points is None:
            self.points = PointSource(self.inst)
        if isinstance(self.process, RateBounded):
            self._rate = _RateState(self.process)
        elif isinstance(self.process, (StructuredCase1, StructuredCase2)):
            part = make_partition(self.process.support, self.inst.n)
            self._cells = {j: i for i, cell in enumerate(part.cells) for j in cell}

    def _extend(self, L: int) -> None:
        q, n = self.inst.q, self.inst.n
        pts = self.points.take(L)
        for j in range(len(self._columns) + 1, L + 1):
            alpha = pts[j - 1]
            d_alpha = poly_eval(self.truth.d, alpha)
            assert d_alpha != 0, "d vanishes at a full-rank point"
            inv = pow(d_alpha, -1, q)
            honest = tuple(poly_eval(f, alpha) * inv % q for f in self.truth.v)
            col, touched = honest, False
            proc = self.process
            if isinstance(proc, RateBounded):
                bad = self._rate.step(j, n, q)
                if bad is not None:
                    col, touched = bad, True
            elif j in proc.support:
                touched = True
                if isinstance(proc, UniformOnSupport):
                    col = uniform_column(proc.seed, j, n, q)
                elif isinstance(proc, StructuredCase1):
                    col = case1_column(self.truth, alpha, self._cells[j])
                else:
                    col = case2_column(self.inst, self.truth, alpha, self._cells[j])
            self._honest.append(honest)
            self._columns.append(col)
            self._support.append(touched)

    def table(self, L: int) -> EvaluationTable:
        self._extend(L)
        self.consumed = max(self.consumed, L)
        return EvaluationTable(self.inst.q, self.points.take(L), tuple(self._columns[:L]))

    def support(self, L: int) -> frozenset[int]:
        self._extend(L)
        return frozenset(j + 1 for j in range(L) if self._support[j])

    def support_count(self, L: int) -> int:
        self._extend(L)
        return sum(self._support[:L])

    def error_count(self, L: int) -> int:
        self._extend(L)
        return sum(1 for j in range(L) if self._columns[j] != self._honest[j])

