import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plswe.bounds import (
    DegreeContext,
    FixedBudget,
    LinearBudget,
    check_rate,
    ctx_count,
    delta,
    eval_count_base,
    glz_failure_bound,
    l_glz,
    l_kpsw,
    linear_counts,
    predict_stop_fixed,
    predict_stop_linear,
    stop_upper_bound_linear,
)
from plswe.exceptions import NoFixedPoint, RateOutOfRange

TINY = DegreeContext(n=1, N=1, D=2, deg_a=1, deg_b=0)
TINY2 = DegreeContext(n=2, N=1, D=2, deg_a=1, deg_b=0)

contexts = st.builds(
    DegreeContext,
    n=st.integers(1, 5),
    N=st.integers(1, 12),
    D=st.integers(1, 12),
    deg_a=st.integers(0, 6),
    deg_b=st.integers(0, 6),
)


def test_context_validation():
    with pytest.raises(ValueError):
        DegreeContext(0, 1, 1, 0, 0)
    with pytest.raises(ValueError):
        DegreeContext(1, 0, 1, 0, 0)
    with pytest.raises(ValueError):
        DegreeContext(1, 1, 1, -1, 0)
    with pytest.raises(ValueError):
        FixedBudget(-1)


def test_eval_count_base_examples():
    assert eval_count_base(TINY, 2, 3) == 3
    assert eval_count_base(DegreeContext(1, 1, 1, 0, 0), 1, 1) == 1
    ctx = DegreeContext(1, 3, 2, 1, 1)
    assert eval_count_base(ctx, 3, 2) == 4
    assert eval_count_base(ctx, 3, 2) == min(ctx.N + ctx.D - 1, max(ctx.deg_a + ctx.N, ctx.deg_b + ctx.D))


def test_l_kpsw_examples():
    assert l_kpsw(TINY, 1) == 4
    assert l_kpsw(TINY, 0) == eval_count_base(TINY, 1, 2)
    assert l_kpsw(TINY, 2) == 6


def test_l_glz_examples():
    assert l_glz(TINY2, 2) == 5 < l_kpsw(TINY2, 2) == 6
    for tau in range(6):
        assert l_glz(TINY, tau) == l_kpsw(TINY, tau)
    assert l_glz(TINY2, 0) == eval_count_base(TINY2, 1, 2)


def test_delta_examples():
    assert delta(2, 3, 0, 1, 1) == 1
    assert delta(1, 1, 0, 1, 0) == 0
    N, D, tau = 1, 2, 1
    assert delta(N + tau, D + tau, 0, 1, 1) == 1


def test_linear_counts_examples():
    # L(nu, theta) = 3 at (2, 3) in the tiny context
    assert linear_counts(TINY, Fraction(1, 4), 2, 3) == (5, 1)
    assert linear_counts(TINY, 0, 2, 3) == (4, 0)
    assert linear_counts(TINY2, Fraction(1, 4), 2, 3, radius_divisor=2) == (4, 1)


def test_rates():
    assert check_rate(Fraction(1, 4)) == Fraction(1, 4)
    for bad in (Fraction(1, 2), Fraction(-1, 5), 0.25, Fraction(3, 4)):
        with pytest.raises(RateOutOfRange):
            check_rate(bad)
    with pytest.raises(RateOutOfRange):
        LinearBudget(Fraction(1, 2))
    assert LinearBudget(Fraction(1, 4)).tau_at(9) == 2


def test_predict_stop_fixed_examples():
    at_one = lambda L: 1 if L >= 1 else 0  # noqa: E731
    assert ctx_count(TINY, 0, 1) == 1
    assert predict_stop_fixed(TINY, 1, 0, 1, at_one) == 4
    assert predict_stop_fixed(TINY, 0, 0, 1, lambda L: 0) == 2
    assert predict_stop_fixed(TINY, 1, 0, 1, lambda L: 0) == 3


def test_predict_stop_fixed_no_fixed_point():
    # an error count that keeps growing with L never lets the iteration settle
    with pytest.raises(NoFixedPoint):
        predict_stop_fixed(TINY, 1, 0, 1, lambda L: L)


def test_stop_upper_bound_examples():
    assert stop_upper_bound_linear(TINY, Fraction(1, 4), 0, 1) == 6
    assert stop_upper_bound_linear(TINY, 0, 0, 1) == 3
    assert stop_upper_bound_linear(TINY2, Fraction(1, 4), 0, 1, radius_divisor=2) == 4
    # sensitivity with an error-free stream
    assert stop_upper_bound_linear(TINY, Fraction(1, 4), 0, 1, actual_rate=0) == 4


def test_failure_bound():
    assert glz_failure_bound(TINY2, 2, 101) == Fraction(4, 101)


@given(contexts, st.integers(1, 20), st.integers(1, 20), st.integers(0, 10))
def test_shift_additivity(ctx, nu, theta, c):
    assert eval_count_base(ctx, nu + c, theta + c) == eval_count_base(ctx, nu, theta) + c


@given(contexts, st.integers(0, 10))
def test_kpsw_expansion_and_glz_ordering(ctx, tau):
    assert l_kpsw(ctx, tau) == eval_count_base(ctx, ctx.N, ctx.D) + 2 * tau
    assert l_glz(ctx, tau) <= l_kpsw(ctx, tau)
    if ctx.n >= 2 and tau >= 2:
        assert l_glz(ctx, tau) < l_kpsw(ctx, tau)


def test_linear_counts_cover_their_radius():
    # choose contexts whose base count runs through 1..50
    for rho in (Fraction(1, 10), Fraction(1, 4), Fraction(2, 5)):
        for base in range(1, 51):
            ctx = DegreeContext(1, 1, 1, 0, 0)
            assert eval_count_base(ctx, base, base) == base
            L, tau = linear_counts(ctx, rho, base, base)
            assert tau == math.floor(rho * L)
            assert L >= base + tau


@given(
    contexts,
    st.integers(0, 4),
    st.integers(0, 6),
    st.integers(0, 6),
    st.lists(st.integers(1, 40), max_size=4, unique=True),
)
def test_predict_stop_fixed_solves_its_equation(ctx, tau, degv, degd, positions):
    positions = sorted(positions)[:tau]
    count = lambda L: sum(1 for j in positions if j <= L)  # noqa: E731
    for random_errors in (False, True):
        L = predict_stop_fixed(ctx, tau, degv, degd, count, random_errors=random_errors)
        offset = -(-tau // ctx.n) if random_errors else tau
        assert L == ctx_count(ctx, degv, degd) + count(L) + 1 + offset


@given(contexts, st.sampled_from([Fraction(0), Fraction(1, 5), Fraction(1, 4), Fraction(2, 5)]), st.integers(0, 6), st.integers(0, 6))
def test_linear_prediction_within_ceiling(ctx, rho, degv, degd):
    # worst-case schedule: exactly floor(rho L) errors among the first L
    count = lambda L: math.floor(rho * L)  # noqa: E731
    for div in {1, ctx.n}:
        L = predict_stop_linear(ctx, rho, degv, degd, count, radius_divisor=div)
        assert L <= stop_upper_bound_linear(ctx, rho, degv, degd, div)
    L0 = predict_stop_linear(ctx, rho, degv, degd, lambda L: 0)
    assert L0 <= stop_upper_bound_linear(ctx, rho, degv, degd, 1, actual_rate=0)
