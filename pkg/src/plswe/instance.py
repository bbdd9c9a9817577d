"""Polynomial linear systems A(x) y(x) = b(x) with known ground truth.

Also hosts the simulated worker computation y_j = A(alpha_j)^-1 b(alpha_j)
and the choice of evaluation points (rank-drop points are skipped).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .algebra import Poly, PrimeField, det, mat_degree, mat_eval, poly_eval, solve, vec_degree
from .bounds import DegreeContext, eval_count_base
from .exceptions import (
    CertificationFailed,
    DegenerateSystem,
    FieldTooSmall,
    PLSError,
    RankDropPoint,
    SingularSystem,
)
from .keyeq import EvaluationTable, KeyEqParams, RationalSolution, find_solution


@dataclass(frozen=True)
class PLSInstance:
    q: int
    A: tuple[tuple[Poly, ...], ...]
    b: tuple[Poly, ...]

    def __post_init__(self):
        PrimeField(self.q)
        n = len(self.b)
        if n < 1 or len(self.A) != n or any(len(row) != n for row in self.A):
            raise ValueError("A must be n x n and b of length n")
        if not is_nonsingular(self.A, self.q):
            raise SingularSystem("det A(x) is the zero polynomial")

    @property
    def n(self) -> int:
        return len(self.b)

    @property
    def deg_a(self) -> int:
        return max(mat_degree(self.A), 0)

    @property
    def deg_b(self) -> int:
        return max(vec_degree(self.b), 0)

    @classmethod
    def from_lists(cls, q: int, A: Sequence[Sequence[Sequence[int]]], b: Sequence[Sequence[int]]) -> "PLSInstance":
        return cls(q, tuple(tuple(Poly(c, q) for c in row) for row in A), tuple(Poly(c, q) for c in b))

    def is_rank_drop(self, alpha: int) -> bool:
        return det(mat_eval(self.A, alpha), self.q) == 0

    def node_solve(self, alpha: int) -> tuple[int, ...]:
        """What an honest worker returns at alpha: A(alpha)^-1 b(alpha)."""
        y = solve(mat_eval(self.A, alpha), [poly_eval(p, alpha) for p in self.b], self.q)
        if y is None:
            raise RankDropPoint(f"A({alpha}) is singular")
        return tuple(y)

    def cramer_bounds(self) -> tuple[int, int]:
        """(N, D) from Cramer's rule: deg v <= (n-1) deg A + deg b, deg d <= n deg A."""
        n, da, db = self.n, self.deg_a, self.deg_b
        return (n - 1) * da + db + 1, n * da + 1

    def context(self, N: int | None = None, D: int | None = None) -> DegreeContext:
        cN, cD = self.cramer_bounds()
        return DegreeContext(self.n, cN if N is None else N, cD if D is None else D, self.deg_a, self.deg_b)


def is_nonsingular(A, q: int) -> bool:
    # det A has degree <= n deg A, so it is nonzero iff it is nonzero at one of
    # n deg A + 1 distinct points.
    n = len(A)
    bound = n * max(mat_degree(A), 0) + 1
    return any(det(mat_eval(A, alpha), q) != 0 for alpha in range(min(bound, q)))


@dataclass(frozen=True)
class GroundTruth:
    solution: RationalSolution
    degv: int
    degd: int

    @classmethod
    def of(cls, sol: RationalSolution) -> "GroundTruth":
        return cls(sol, int(sol.degv), int(sol.degd))


def _random_poly(rng: random.Random, deg: int, q: int) -> Poly:
    return Poly([rng.randrange(q) for _ in range(deg + 1)], q)


def expected_max_points(n: int, deg_a: int, deg_b: int) -> int:
    N, D = (n - 1) * deg_a + deg_b + 1, n * deg_a + 1
    ctx = DegreeContext(n, N, D, deg_a, deg_b)
    return eval_count_base(ctx, N, D) + n * deg_a


def generate_instance(q: int, n: int, deg_a: int, deg_b: int, seed: int) -> PLSInstance:
    """Random nonsingular A (deg <= deg_a) and nonzero b (deg <= deg_b)."""
    PrimeField(q)
    if n < 1 or deg_a < 0 or deg_b < 0:
        raise ValueError("need n >= 1 and nonnegative degrees")
    if q < 4 * expected_max_points(n, deg_a, deg_b):
        raise FieldTooSmall(f"q={q} too small for n={n}, deg A={deg_a}, deg b={deg_b}")
    rng = random.Random(seed)
    while True:
        A = tuple(tuple(_random_poly(rng, deg_a, q) for _ in range(n)) for _ in range(n))
        if is_nonsingular(A, q):
            break
    while True:
        b = tuple(_random_poly(rng, deg_b, q) for _ in range(n))
        if any(not p.is_zero() for p in b):
            break
    return PLSInstance(q, A, b)


class PointSource:
    """Prefix-consistent supply of distinct evaluation points avoiding rank drops.

    ``sequential`` yields 1, 2, ..., q-1, 0 in order; ``random`` draws
    without replacement from a seeded generator.
    """

    def __init__(self, inst: PLSInstance, mode: str = "sequential", seed: int | None = None):
        if mode not in ("sequential", "random"):
            raise ValueError(f"unknown point mode {mode!r}")
        if mode == "random" and seed is None:
            raise ValueError("random point mode needs a seed")
        self.inst = inst
        self.mode = mode
        self._rng = random.Random(seed)
        self._candidates = self._iter_candidates()
        self.points: list[int] = []

    def _iter_candidates(self) -> Iterator[int]:
        q = self.inst.q
        if self.mode == "sequential":
            yield from range(1, q)
            yield 0
        else:
            order = list(range(q))
            self._rng.shuffle(order)
            yield from order

    def take(self, count: int) -> tuple[int, ...]:
        while len(self.points) < count:
            try:
                alpha = next(self._candidates)
            except StopIteration:
                raise FieldTooSmall(f"ran out of valid evaluation points in GF({self.inst.q})") from None
            if not self.inst.is_rank_drop(alpha):
                self.points.append(alpha)
        return tuple(self.points[:count])


def honest_evaluate(inst: PLSInstance, truth: RationalSolution, points: Sequence[int]) -> EvaluationTable:
    q = inst.q
    cols = []
    for alpha in points:
        if inst.is_rank_drop(alpha):
            raise RankDropPoint(f"det A({alpha}) = 0")
        d_alpha = poly_eval(truth.d, alpha)
        # d divides det A, so a full-rank point cannot be a root of d
        assert d_alpha != 0, "d vanishes at a full-rank point"
        inv = pow(d_alpha, -1, q)
        cols.append(tuple(poly_eval(f, alpha) * inv % q for f in truth.v))
    return EvaluationTable(q, tuple(points), tuple(cols))


def reference_solve(inst: PLSInstance, attempts: int = 3) -> GroundTruth:
    """Error-free decode at the Cramer degree bounds, certified by A v = d b."""
    N, D = inst.cramer_bounds()
    ctx = inst.context()
    L = eval_count_base(ctx, N, D)
    for attempt in range(attempts):
        src = PointSource(inst, "sequential") if attempt == 0 else PointSource(inst, "random", seed=attempt)
        points = src.take(L)
        Y = EvaluationTable(inst.q, points, tuple(inst.node_solve(a) for a in points))
        try:
            sol = find_solution(Y, KeyEqParams(N, D), certifier=inst, n=inst.n)
        except (CertificationFailed, PLSError):
            continue
        return GroundTruth.of(sol)
    raise DegenerateSystem("reference solve could not certify a solution")


# ---------------------------------------------------------------------------
# instance files (JSON)


def instance_to_dict(
    inst: PLSInstance, truth: RationalSolution | None = None, deg_a: int | None = None, deg_b: int | None = None
) -> dict:
    """``deg_a``/``deg_b`` record declared bounds; they default to the actual degrees."""
    doc = {
        "q": inst.q,
        "n": inst.n,
        "degA": inst.deg_a if deg_a is None else max(deg_a, inst.deg_a),
        "degb": inst.deg_b if deg_b is None else max(deg_b, inst.deg_b),
        "A": [[list(p.coeffs) for p in row] for row in inst.A],
        "b": [list(p.coeffs) for p in inst.b],
    }
    if truth is not None:
        doc["ground_truth"] = truth.as_lists()
    return doc


def instance_from_dict(doc: dict) -> tuple[PLSInstance, RationalSolution | None]:
    """Parse an instance document; degA/degb, when present, must bound the actual degrees."""
    try:
        q, A, b = int(doc["q"]), doc["A"], doc["b"]
    except KeyError as exc:
        raise ValueError(f"instance file lacks field {exc}") from None
    inst = PLSInstance.from_lists(q, A, b)
    if "n" in doc and int(doc["n"]) != inst.n:
        raise ValueError(f"n={doc['n']} does not match the size of A")
    if "degA" in doc and int(doc["degA"]) < inst.deg_a:
        raise ValueError("degA is below the actual degree of A")
    if "degb" in doc and int(doc["degb"]) < inst.deg_b:
        raise ValueError("degb is below the actual degree of b")
    truth = None
    if doc.get("ground_truth") is not None:
        gt = doc["ground_truth"]
        truth = RationalSolution.from_lists(gt["v"], gt["d"], q)
        if len(truth.v) != inst.n:
            raise ValueError("ground truth has the wrong length")
    return inst, truth


def dump_instance(inst: PLSInstance, truth: RationalSolution | None = None, **declared) -> str:
    return json.dumps(instance_to_dict(inst, truth, **declared), sort_keys=True) + "\n"


def load_instance(text: str) -> tuple[PLSInstance, RationalSolution | None]:
    return instance_from_dict(json.loads(text))
