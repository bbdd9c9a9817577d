"""Monte-Carlo experiments on decoding structure and early termination.

Trial ``i`` of an experiment with master seed ``s`` uses seed ``s + i`` for
everything it draws, so results do not depend on execution order and a
parallel run aggregates to the same counts as a serial one.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction

from . import bounds
from .bounds import FixedBudget, LinearBudget, ceil_div
from .earlyterm import Mode, TerminationConfig, compare_against_bound, predict_stop, run_early_termination
from .errors import (
    NO_ERRORS,
    EvaluationStream,
    RateBounded,
    StructuredCase1,
    StructuredCase2,
    UniformOnSupport,
    inject_structured_case1,
    inject_structured_case2,
    inject_uniform,
    make_partition,
)
from .exceptions import PLSError
from .instance import PointSource, generate_instance, honest_evaluate, reference_solve
from .keyeq import KeyEqParams, error_locator, solution_from_space, solve_key_equations, verify_space_structure

STRUCTURE_BOUNDS = ("kpsw", "glz", "deterministic", "random", "explicit")
ERROR_MODELS = ("none", "uniform", "case1", "case2", "rate")


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str  # "structure" or "termination"
    q: int
    n: int
    deg_a: int
    deg_b: int
    trials: int
    seed: int
    error_model: str = "uniform"
    errors: int = 0  # size of the error support
    tau: int = 0
    bound: str = "glz"  # structure experiments: which evaluation count
    L: int | None = None  # explicit count
    nu: int | None = None  # defaults to N + tau
    theta: int | None = None  # defaults to D + tau
    algorithm: str = "alg1"
    rho: Fraction | None = None  # declared linear error rate
    rho_true: Fraction | None = None  # rate the simulated workers actually follow
    strategy: str = "exhaustive"
    point_mode: str = "sequential"
    window: int | None = None  # error positions are drawn from 1..window

    def __post_init__(self):
        if self.kind not in ("structure", "termination"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.error_model not in ERROR_MODELS:
            raise ValueError(f"unknown error model {self.error_model!r}")
        if self.kind == "structure" and self.bound not in STRUCTURE_BOUNDS:
            raise ValueError(f"unknown bound {self.bound!r}")
        for name in ("rho", "rho_true"):
            val = getattr(self, name)
            if isinstance(val, str):
                object.__setattr__(self, name, parse_fraction(val))
        Mode(self.algorithm)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            out[f.name] = str(val) if isinstance(val, Fraction) else val
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown spec fields: {sorted(unknown)}")
        return cls(**data)


def parse_fraction(text: str) -> Fraction:
    """Parse an exact rational written as "p/q" (or an integer); decimals are rejected."""
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"rates must be exact fractions like 1/4, got {text!r}")
    num, _, den = text.partition("/")
    return Fraction(int(num), int(den) if den else 1)


@dataclass
class TrialResult:
    trial: int
    seed: int
    errors: int
    L: int
    outcome: str  # "ok" or "fail"
    L_stop: int | None = None
    predicted_L_stop: int | None = None
    stop_ok: bool | None = None
    bound: Fraction | None = None
    detail: str = ""


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    trials: int
    successes: int
    failures: int
    empirical_failure_rate: float
    theoretical_bound: Fraction | None
    threshold: float | None
    stop_violations: int
    stop_point_histogram: dict[int, int]
    rows: list[TrialResult] = field(default_factory=list)
    aborted: str | None = None
    wall_time: float = 0.0

    @property
    def within_bound(self) -> bool:
        return self.threshold is None or self.empirical_failure_rate <= self.threshold

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "spec": self.spec.to_dict(),
            "trials": self.trials,
            "successes": self.successes,
            "failures": self.failures,
            "empirical_failure_rate": self.empirical_failure_rate,
            "theoretical_bound": None if self.theoretical_bound is None else str(self.theoretical_bound),
            "theoretical_bound_float": None if self.theoretical_bound is None else float(self.theoretical_bound),
            "threshold": self.threshold,
            "threshold_rule": "bound + 3 binomial standard deviations (bounds are upper bounds; slack covers sampling)",
            "within_bound": self.within_bound,
            "stop_violations": self.stop_violations,
            "stop_point_histogram": {str(k): v for k, v in sorted(self.stop_point_histogram.items())},
            "aborted": self.aborted,
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "seed", "errors", "L", "outcome", "L_stop", "predicted_L_stop", "stop_ok"])
        for r in self.rows:
            w.writerow([r.trial, r.seed, r.errors, r.L, r.outcome, r.L_stop, r.predicted_L_stop, r.stop_ok])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# single trials


def _structure_params(spec: ExperimentSpec, ctx) -> tuple[KeyEqParams, int, Fraction | None]:
    tau = spec.tau
    nu = ctx.N + tau if spec.nu is None else spec.nu
    theta = ctx.D + tau if spec.theta is None else spec.theta
    p = KeyEqParams(nu, theta)
    base = bounds.eval_count_base(ctx, nu, theta)
    if spec.bound == "kpsw":
        return p, bounds.l_kpsw(ctx, tau), Fraction(0)
    if spec.bound == "glz":
        return p, bounds.l_glz(ctx, tau), bounds.glz_failure_bound(ctx, tau, spec.q)
    if spec.bound == "deterministic":
        return p, base + tau, Fraction(0)
    if spec.bound == "random":
        return p, base + ceil_div(tau, ctx.n), bounds.reduced_count_failure_bound(theta, spec.q)
    if spec.L is None:
        raise ValueError("explicit bound needs L")
    return p, spec.L, None


def structure_trial(spec: ExperimentSpec, trial: int) -> TrialResult:
    seed = spec.seed + trial
    rng = random.Random(seed)
    inst = generate_instance(spec.q, spec.n, spec.deg_a, spec.deg_b, seed)
    truth = reference_solve(inst)
    ctx = inst.context()
    p, L, bound = _structure_params(spec, ctx)
    points = PointSource(inst, spec.point_mode, seed).take(L)
    errors = 0 if spec.error_model == "none" else spec.errors
    support = frozenset(rng.sample(range(1, L + 1), errors))
    honest = honest_evaluate(inst, truth.solution, points)
    if spec.error_model in ("uniform", "none"):
        Y = inject_uniform(honest, support, seed)
    elif spec.error_model == "case1":
        Y = inject_structured_case1(truth.solution, points, make_partition(support, inst.n))
    elif spec.error_model == "case2":
        Y = inject_structured_case2(inst, truth.solution, points, make_partition(support, inst.n))
    else:
        raise ValueError("rate-bounded errors only apply to termination experiments")
    S = solve_key_equations(Y, p, inst.n)
    locator = error_locator(points, support, inst.q)
    dlt = bounds.delta(p.nu, p.theta, truth.degv, truth.degd, len(support))
    ok = verify_space_structure(S, truth.solution, locator, dlt)
    detail = ""
    if ok and dlt > 0:
        # the structured space must also decode to the planted solution
        try:
            recovered = solution_from_space(S) == truth.solution
        except PLSError as exc:
            recovered, detail = False, type(exc).__name__
        if not recovered:
            ok, detail = False, detail or "wrong solution"
    return TrialResult(trial, seed, len(support), L, "ok" if ok else "fail", bound=bound, detail=detail)


def _termination_budget(spec: ExperimentSpec):
    if Mode(spec.algorithm).linear:
        if spec.rho is None:
            raise ValueError(f"{spec.algorithm} needs rho")
        return LinearBudget(spec.rho)
    return FixedBudget(spec.tau)


def termination_trial(spec: ExperimentSpec, trial: int) -> TrialResult:
    seed = spec.seed + trial
    rng = random.Random(seed)
    inst = generate_instance(spec.q, spec.n, spec.deg_a, spec.deg_b, seed)
    truth = reference_solve(inst)
    ctx = inst.context()
    budget = _termination_budget(spec)
    cfg = TerminationConfig(Mode(spec.algorithm), ctx, budget, spec.strategy)
    window = spec.window or bounds.l_kpsw(ctx, spec.tau)
    if spec.error_model == "none":
        process = NO_ERRORS
    elif spec.error_model == "rate":
        rate = spec.rho_true if spec.rho_true is not None else (spec.rho or Fraction(0))
        process = RateBounded(rate, seed)
    else:
        support = frozenset(rng.sample(range(1, window + 1), spec.errors))
        process = {
            "uniform": lambda: UniformOnSupport(support, seed),
            "case1": lambda: StructuredCase1(support),
            "case2": lambda: StructuredCase2(support),
        }[spec.error_model]()
    stream = EvaluationStream(inst, truth.solution, process, PointSource(inst, spec.point_mode, seed))
    report = run_early_termination(cfg, stream)
    predicted = predict_stop(cfg, truth.degv, truth.degd, stream.error_count)
    report.predicted_L_stop = predicted
    correct = report.solved and report.solution == truth.solution
    stop_ok = None
    if correct:
        stop_ok = compare_against_bound(
            report, cfg, truth.degv, truth.degd, stream.error_count, actual_rate=spec.rho_true if cfg.mode.linear else None
        )
    bound = Fraction(0)
    if cfg.mode.random_counting:
        e_stop = stream.support_count(predicted)
        deg_sol = max(truth.degv, truth.degd) + e_stop
        bound = bounds.early_termination_failure_bound(ctx, e_stop, deg_sol, spec.q)
    return TrialResult(
        trial, seed, stream.support_count(report.L_stop), report.L_stop, "ok" if correct else "fail",
        L_stop=report.L_stop, predicted_L_stop=predicted, stop_ok=stop_ok, bound=bound,
        detail="" if correct else report.message,
    )


def _run_one(args) -> TrialResult:
    spec, trial = args
    fn = structure_trial if spec.kind == "structure" else termination_trial
    return fn(spec, trial)


# ---------------------------------------------------------------------------
# aggregation


def _aggregate(spec: ExperimentSpec, rows: list[TrialResult], aborted: str | None, wall: float) -> ExperimentReport:
    rows = sorted(rows, key=lambda r: r.trial)
    done = len(rows)
    failures = sum(r.outcome == "fail" for r in rows)
    bounds_seen = [r.bound for r in rows if r.bound is not None]
    bound = sum(bounds_seen, Fraction(0)) / len(bounds_seen) if bounds_seen and len(bounds_seen) == done else None
    threshold = None
    if bound is not None and done:
        p = float(bound)
        threshold = p + 3 * math.sqrt(p * (1 - p) / done)
    hist = Counter(r.L_stop for r in rows if r.L_stop is not None)
    return ExperimentReport(
        spec=spec,
        trials=done,
        successes=done - failures,
        failures=failures,
        empirical_failure_rate=failures / done if done else 0.0,
        theoretical_bound=bound,
        threshold=threshold,
        stop_violations=sum(r.stop_ok is False for r in rows),
        stop_point_histogram=dict(hist),
        rows=rows,
        aborted=aborted,
        wall_time=wall,
    )


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentReport:
    start = time.perf_counter()
    rows: list[TrialResult] = []
    aborted = None
    jobs = [(spec, t) for t in range(spec.trials)]
    try:
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                rows.extend(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
        else:
            for job in jobs:
                rows.append(_run_one(job))
    except PLSError as exc:
        aborted = f"{type(exc).__name__}: {exc}"
    return _aggregate(spec, rows, aborted, time.perf_counter() - start)


def run_structure_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentReport:
    if spec.kind != "structure":
        raise ValueError("not a structure experiment")
    return run_experiment(spec, workers)


def run_termination_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentReport:
    if spec.kind != "termination":
        raise ValueError("not a termination experiment")
    return run_experiment(spec, workers)


__all__ = [
    "ExperimentSpec", "ExperimentReport", "TrialResult", "parse_fraction", "structure_trial",
    "termination_trial", "run_experiment", "run_structure_experiment", "run_termination_experiment",
]
