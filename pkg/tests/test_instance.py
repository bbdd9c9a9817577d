import json
import random

import pytest

from plswe.algebra import Poly, content_gcd, det, mat_eval, mat_vec_mul, poly_eval
from plswe.exceptions import FieldTooSmall, NotPrimeError, RankDropPoint, SingularSystem
from plswe.instance import (
    PLSInstance,
    PointSource,
    dump_instance,
    generate_instance,
    honest_evaluate,
    instance_from_dict,
    is_nonsingular,
    load_instance,
    reference_solve,
)
from plswe.keyeq import RationalSolution


def test_generate_is_nonsingular_and_seeded():
    inst = generate_instance(10007, 2, 2, 1, 1)
    assert is_nonsingular(inst.A, inst.q)
    assert any(det(mat_eval(inst.A, a), inst.q) for a in range(10))
    assert inst == generate_instance(10007, 2, 2, 1, 1)
    assert inst != generate_instance(10007, 2, 2, 1, 2)


def test_generate_guards():
    with pytest.raises(FieldTooSmall):
        generate_instance(3, 5, 1, 1, 0)
    with pytest.raises(NotPrimeError):
        generate_instance(4, 1, 1, 0, 0)


def test_singular_rejected():
    with pytest.raises(SingularSystem):
        PLSInstance.from_lists(7, [[[0, 1], [0, 1]], [[0, 2], [0, 2]]], [[1], [1]])


def test_reference_solve_examples(tiny):
    gt = reference_solve(tiny)
    assert gt.solution == RationalSolution((Poly.one(7),), Poly.x(7))
    assert (gt.degv, gt.degd) == (0, 1)
    poly = PLSInstance.from_lists(7, [[[1]]], [[1, 1]])
    gt = reference_solve(poly)
    assert gt.solution.as_lists() == {"v": [[1, 1]], "d": [1]}


def test_reference_solve_random(medium):
    inst, gt = medium
    assert gt.degd <= 4
    sol = gt.solution
    assert mat_vec_mul(inst.A, sol.v) == tuple(sol.d * bi for bi in inst.b)


def test_ground_truth_is_normalized():
    rng = random.Random(5)
    for seed in range(25):
        inst = generate_instance(10007, rng.randint(1, 3), rng.randint(0, 3), rng.randint(0, 3), seed)
        sol = reference_solve(inst).solution
        assert mat_vec_mul(inst.A, sol.v) == tuple(sol.d * bi for bi in inst.b)
        assert sol.d.lc() == 1
        assert content_gcd(sol.v, sol.d) == Poly.one(inst.q)
        assert sol.is_normalized()


def test_honest_evaluate_examples(tiny):
    gt = reference_solve(tiny)
    Y = honest_evaluate(tiny, gt.solution, (1, 2, 3, 4))
    assert Y.columns == ((1,), (4,), (5,), (2,))
    with pytest.raises(RankDropPoint):
        honest_evaluate(tiny, gt.solution, (0,))
    with pytest.raises(RankDropPoint):
        tiny.node_solve(0)


def test_honest_values_satisfy_the_solution(medium):
    inst, gt = medium
    pts = PointSource(inst, "random", 3).take(10)
    Y = honest_evaluate(inst, gt.solution, pts)
    for a, col in zip(pts, Y.columns):
        d = poly_eval(gt.solution.d, a)
        assert d != 0
        assert [d * y % inst.q for y in col] == [poly_eval(f, a) for f in gt.solution.v]
        assert col == inst.node_solve(a)


def test_point_source(tiny):
    src = PointSource(tiny)
    assert src.take(3) == (1, 2, 3)
    assert src.take(6) == (1, 2, 3, 4, 5, 6)
    with pytest.raises(FieldTooSmall):
        src.take(7)  # 0 is a rank-drop point
    r1, r2 = PointSource(tiny, "random", 9), PointSource(tiny, "random", 9)
    assert r1.take(4) == r2.take(6)[:4]
    assert 0 not in r1.take(6)
    with pytest.raises(ValueError):
        PointSource(tiny, "random")


def test_cramer_bounds(medium):
    inst, _ = medium
    assert inst.cramer_bounds() == (4, 5)
    ctx = inst.context()
    assert (ctx.n, ctx.N, ctx.D, ctx.deg_a, ctx.deg_b) == (2, 4, 5, 2, 1)


def test_instance_file_roundtrip(medium, tiny):
    inst, gt = medium
    text = dump_instance(inst, gt.solution)
    back, truth = load_instance(text)
    assert back == inst and truth == gt.solution
    assert dump_instance(back, truth) == text
    doc = json.loads(dump_instance(tiny))
    assert doc == {"q": 7, "n": 1, "degA": 1, "degb": 0, "A": [[[0, 1]]], "b": [[1]]}
    assert instance_from_dict(doc)[1] is None


def test_instance_file_validation():
    with pytest.raises(ValueError):
        instance_from_dict({"q": 7, "A": [[[0, 1]]]})
    with pytest.raises(ValueError):
        instance_from_dict({"q": 7, "n": 1, "degA": 0, "degb": 0, "A": [[[0, 1]]], "b": [[1]]})
