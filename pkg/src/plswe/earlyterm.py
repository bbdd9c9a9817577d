"""Early-termination drivers.

Each driver starts from the smallest useful number of evaluations and asks
the stream for one more round of evaluations until some candidate
(nu, theta) yields a nontrivial key-equation solution space.

* ``alg1``: fixed error bound tau, correct for every error pattern.
* ``alg2``: fixed bound, counts ceil(tau/n) instead of tau (random errors).
* ``alg3``: linear bound |E(L)| <= rho L, correct for every error pattern.
* ``alg4``: linear bound with rho/n in place of rho (random errors).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable

from .bounds import (
    DegreeContext,
    ErrorBudget,
    FixedBudget,
    LinearBudget,
    ceil_div,
    eval_count_base,
    l_kpsw,
    linear_eval_count,
    predict_stop_fixed,
    predict_stop_linear,
    stop_upper_bound_linear,
)
from .exceptions import BudgetViolated, MaxLExceeded, PLSError
from .keyeq import KeyEqParams, RationalSolution, solution_from_space, solve_key_equations


class Mode(str, Enum):
    ALG1 = "alg1"
    ALG2 = "alg2"
    ALG3 = "alg3"
    ALG4 = "alg4"

    @property
    def linear(self) -> bool:
        return self in (Mode.ALG3, Mode.ALG4)

    @property
    def random_counting(self) -> bool:
        return self in (Mode.ALG2, Mode.ALG4)


class Strategy(str, Enum):
    EXHAUSTIVE = "exhaustive"
    TWO_CANDIDATES = "two"


@dataclass(frozen=True)
class TerminationConfig:
    mode: Mode
    ctx: DegreeContext
    budget: ErrorBudget
    strategy: Strategy = Strategy.EXHAUSTIVE
    max_L: int | None = None
    certifier: object = None  # optional PLSInstance; off by default

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.mode.linear and not isinstance(self.budget, LinearBudget):
            raise ValueError(f"{self.mode.value} needs a linear error budget")
        if not self.mode.linear and not isinstance(self.budget, FixedBudget):
            raise ValueError(f"{self.mode.value} needs a fixed error budget")

    @property
    def radius_divisor(self) -> int:
        return self.ctx.n if self.mode.random_counting else 1

    def cap(self) -> int:
        if self.max_L is not None:
            return self.max_L
        ctx = self.ctx
        if isinstance(self.budget, FixedBudget):
            return 2 * l_kpsw(ctx, self.budget.tau) + 10
        return 2 * stop_upper_bound_linear(ctx, self.budget.rho, ctx.N - 1, ctx.D - 1) + 10


@dataclass(frozen=True)
class Attempt:
    L: int
    nu: int
    theta: int
    passed: bool


@dataclass
class TerminationReport:
    solution: RationalSolution | None
    message: str
    L_stop: int
    attempts: list[Attempt] = field(default_factory=list)
    predicted_L_stop: int | None = None

    @property
    def solved(self) -> bool:
        return self.solution is not None

    def to_dict(self) -> dict:
        return {
            "outcome": "solved" if self.solved else "failure",
            "message": self.message,
            "L_stop": self.L_stop,
            "predicted_L_stop": self.predicted_L_stop,
            "solution": self.solution.as_lists() if self.solved else None,
            "attempts": [[a.L, a.nu, a.theta, a.passed] for a in self.attempts],
        }


def enumerate_candidates(ctx: DegreeContext, base: int, strategy: Strategy = Strategy.EXHAUSTIVE) -> list[KeyEqParams]:
    """Parameters (nu, theta) >= 1 with L(nu, theta) == base.

    The two-candidate strategy keeps only the component-wise maximal pairs
    (base-(D-1), base-(N-1)) and (base-deg A, base-deg b), dropping the
    dominated one when they are comparable.
    """
    strategy = Strategy(strategy)
    if strategy is Strategy.EXHAUSTIVE:
        # L(nu, theta) >= max(nu, theta), so both coordinates are <= base
        return [
            KeyEqParams(nu, theta)
            for nu in range(1, base + 1)
            for theta in range(1, base + 1)
            if eval_count_base(ctx, nu, theta) == base
        ]
    c1 = (base - (ctx.D - 1), base - (ctx.N - 1))
    c2 = (base - ctx.deg_a, base - ctx.deg_b)
    low_rfr = ctx.D - 1 <= ctx.deg_a and ctx.N - 1 <= ctx.deg_b
    low_pls = ctx.D - 1 >= ctx.deg_a and ctx.N - 1 >= ctx.deg_b
    if low_rfr:
        picks = [c1]
    elif low_pls:
        picks = [c2]
    else:
        picks = [c1, c2]
    out: list[KeyEqParams] = []
    for nu, theta in picks:
        if nu >= 1 and theta >= 1 and KeyEqParams(nu, theta) not in out:
            out.append(KeyEqParams(nu, theta))
    return out


def _budget_check(stream, L: int, tau: int) -> None:
    support_count = getattr(stream, "support_count", None)
    if support_count is not None and support_count(L) > tau:
        raise BudgetViolated(f"{support_count(L)} errors among the first {L} evaluations exceed the bound {tau}")


def _rounds(cfg: TerminationConfig):
    """Yield (L, base, tau) per round, following the driver's counting."""
    ctx = cfg.ctx
    if isinstance(cfg.budget, FixedBudget):
        tau = cfg.budget.tau
        offset = ceil_div(tau, ctx.n) if cfg.mode.random_counting else tau
        L = eval_count_base(ctx, 1, 1) + offset
        while True:
            yield L, L - offset, tau
            L += 1
    else:
        rho = cfg.budget.rho
        lnum = eval_count_base(ctx, 1, 1) + 1
        while True:
            L = linear_eval_count(lnum, rho, cfg.radius_divisor)
            yield L, lnum - 1, math.floor(rho * L)
            lnum += 1


def run_early_termination(cfg: TerminationConfig, stream) -> TerminationReport:
    """Run the configured driver on ``stream`` (anything with ``table(L)``)."""
    n = cfg.ctx.n
    cap = cfg.cap()
    attempts: list[Attempt] = []
    for L, base, tau in _rounds(cfg):
        if L > cap:
            raise MaxLExceeded(f"no termination up to L={cap}")
        Y = stream.table(L)
        _budget_check(stream, L, tau)
        for p in enumerate_candidates(cfg.ctx, base, cfg.strategy):
            S = solve_key_equations(Y, p, n)
            attempts.append(Attempt(L, p.nu, p.theta, bool(S)))
            if S:
                try:
                    sol = solution_from_space(S, cfg.certifier)
                except PLSError as exc:
                    return TerminationReport(None, f"{type(exc).__name__}: {exc}", L, attempts)
                return TerminationReport(sol, "solved", L, attempts)
    raise AssertionError("unreachable")


def predict_stop(cfg: TerminationConfig, degv: int, degd: int, error_count_fn: Callable[[int], int]) -> int:
    """Stopping point when every check behaves as in the error-free-structure case."""
    if isinstance(cfg.budget, FixedBudget):
        return predict_stop_fixed(
            cfg.ctx, cfg.budget.tau, degv, degd, error_count_fn, random_errors=cfg.mode.random_counting
        )
    return predict_stop_linear(cfg.ctx, cfg.budget.rho, degv, degd, error_count_fn, radius_divisor=cfg.radius_divisor)


def compare_against_bound(
    report: TerminationReport,
    cfg: TerminationConfig,
    degv: int,
    degd: int,
    error_count_fn: Callable[[int], int] | None = None,
    actual_rate: Fraction | None = None,
) -> bool:
    """Fixed budgets: L_stop equals the predicted fixed point.  Linear: L_stop is below the ceiling."""
    if not report.solved:
        raise ValueError("comparison needs a solved report")
    if isinstance(cfg.budget, FixedBudget):
        if error_count_fn is None:
            raise ValueError("fixed-budget comparison needs the error count function")
        return report.L_stop == predict_stop(cfg, degv, degd, error_count_fn)
    ceiling = stop_upper_bound_linear(
        cfg.ctx, cfg.budget.rho, degv, degd, cfg.radius_divisor, actual_rate=actual_rate
    )
    return report.L_stop <= ceiling
