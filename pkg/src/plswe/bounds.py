"""Evaluation-count, dimension and stopping-point formulas.

All quantities are exact integers.  Error rates are
:class:`fractions.Fraction` values so ``floor(rate * L)`` never suffers
from rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from .exceptions import NoFixedPoint, RateOutOfRange


@dataclass(frozen=True)
class DegreeContext:
    """What the decoder knows a priori: n, strict degree bounds N, D, deg A, deg b."""

    n: int
    N: int
    D: int
    deg_a: int
    deg_b: int

    def __post_init__(self):
        if self.n < 1 or self.N < 1 or self.D < 1:
            raise ValueError(f"need n, N, D >= 1, got {self}")
        if self.deg_a < 0 or self.deg_b < 0:
            raise ValueError(f"need deg A, deg b >= 0, got {self}")


@dataclass(frozen=True)
class FixedBudget:
    tau: int

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")


@dataclass(frozen=True)
class LinearBudget:
    rho: Fraction

    def __post_init__(self):
        check_rate(self.rho)

    def tau_at(self, L: int) -> int:
        return math.floor(self.rho * L)


ErrorBudget = Union[FixedBudget, LinearBudget]


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def check_rate(rho) -> Fraction:
    if not isinstance(rho, (Fraction, int)) or isinstance(rho, bool):
        raise RateOutOfRange(f"rate must be an exact rational, got {rho!r}")
    rho = Fraction(rho)
    if not 0 <= rho < Fraction(1, 2):
        raise RateOutOfRange(f"rate must lie in [0, 1/2), got {rho}")
    return rho


def eval_count_base(ctx: DegreeContext, nu: int, theta: int) -> int:
    """min{max{N-1+theta, D-1+nu}, max{deg A + nu, deg b + theta}}."""
    rfr = max(ctx.N - 1 + theta, ctx.D - 1 + nu)
    pls = max(ctx.deg_a + nu, ctx.deg_b + theta)
    return min(rfr, pls)


def l_kpsw(ctx: DegreeContext, tau: int) -> int:
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    return eval_count_base(ctx, ctx.N + tau, ctx.D + tau) + tau


def l_glz(ctx: DegreeContext, tau: int) -> int:
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    return eval_count_base(ctx, ctx.N + tau, ctx.D + tau) + ceil_div(tau, ctx.n)


def delta(nu: int, theta: int, degv: int, degd: int, e: int) -> int:
    """Dimension of the structured solution space (nonpositive means trivial)."""
    return min(nu - (degv + e), theta - (degd + e))


def _shrunk_denominator(rho: Fraction, divisor: int) -> Fraction:
    return 1 - rho / divisor


def linear_eval_count(base: int, rho, divisor: int = 1) -> int:
    """floor(base / (1 - rho/divisor)), the L reached from L^num = base."""
    rho = check_rate(rho)
    return math.floor(Fraction(base) / _shrunk_denominator(rho, divisor))


def linear_counts(ctx: DegreeContext, rho, nu: int, theta: int, radius_divisor: int = 1) -> tuple[int, int]:
    """(L, tau) with L = floor((L(nu,theta)+1)/(1-rho/divisor)) and tau = floor(rho L)."""
    rho = check_rate(rho)
    if radius_divisor not in (1, ctx.n):
        raise ValueError("radius_divisor must be 1 or n")
    L = linear_eval_count(eval_count_base(ctx, nu, theta) + 1, rho, radius_divisor)
    return L, math.floor(rho * L)


def ctx_count(ctx: DegreeContext, degv: int, degd: int) -> int:
    """The base count evaluated at the true degrees, as in the stop formulas."""
    return eval_count_base(ctx, degv, degd)


def predict_stop_fixed(
    ctx: DegreeContext,
    tau: int,
    degv: int,
    degd: int,
    error_count_fn: Callable[[int], int],
    *,
    random_errors: bool = False,
    cap: int | None = None,
) -> int:
    """Least L >= L(1,1)+offset solving L = L_ctx(degv,degd) + |E(L)| + 1 + offset.

    ``offset`` is tau for the deterministic driver and ceil(tau/n) when
    ``random_errors`` is set.
    """
    offset = ceil_div(tau, ctx.n) if random_errors else tau
    base = ctx_count(ctx, degv, degd)
    if cap is None:
        cap = 4 * (base + tau + 2)
    L = eval_count_base(ctx, 1, 1) + offset
    while L <= cap:
        target = base + error_count_fn(L) + 1 + offset
        if L >= target:
            if L != target:
                raise NoFixedPoint(f"overshoot at L={L} (target {target})")
            return L
        L += 1
    raise NoFixedPoint(f"no fixed point below cap {cap}")


def predict_stop_linear(
    ctx: DegreeContext,
    rho,
    degv: int,
    degd: int,
    error_count_fn: Callable[[int], int],
    *,
    radius_divisor: int = 1,
    cap: int | None = None,
) -> int:
    """Stopping point of the linear-bound drivers when every check is faithful.

    Replays the L^num loop: stop at the first L^num with
    L^num - 1 >= L_ctx(degv,degd) + |E(L)| + 1, where L is the count reached
    from L^num.
    """
    rho = check_rate(rho)
    base = ctx_count(ctx, degv, degd)
    if cap is None:
        cap = 4 * (stop_upper_bound_linear(ctx, rho, degv, degd, radius_divisor) + 2)
    lnum = eval_count_base(ctx, 1, 1) + 1
    while True:
        L = linear_eval_count(lnum, rho, radius_divisor)
        if L > cap:
            raise NoFixedPoint(f"no stop below cap {cap}")
        if lnum - 1 >= base + error_count_fn(L) + 1:
            return L
        lnum += 1


def stop_upper_bound_linear(
    ctx: DegreeContext,
    rho,
    degv: int,
    degd: int,
    radius_divisor: int = 1,
    actual_rate=None,
) -> int:
    """floor((L_ctx(degv,degd)+2) / (1 - actual_rate - rho/divisor)).

    With ``actual_rate`` left at ``rho`` this is the worst-case ceiling; a
    smaller actual rate gives the sharper bound for runs with fewer errors.
    """
    rho = check_rate(rho)
    actual = rho if actual_rate is None else check_rate(actual_rate)
    denom = 1 - actual - rho / radius_divisor
    return math.floor(Fraction(ctx_count(ctx, degv, degd) + 2) / denom)


def glz_failure_bound(ctx: DegreeContext, tau: int, q: int) -> Fraction:
    return Fraction(ctx.D + tau, q)


def reduced_count_failure_bound(theta: int, q: int) -> Fraction:
    return Fraction(theta, q)


def early_termination_failure_bound(ctx: DegreeContext, errors_at_stop: int, deg_sol: int, q: int) -> Fraction:
    """2 (D + |E(L^s)| + 1)(deg(Lambda v, Lambda d) + 1) / q, capped at 1."""
    return min(Fraction(1), Fraction(2 * (ctx.D + errors_at_stop + 1) * (deg_sol + 1), q))
