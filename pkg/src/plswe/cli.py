"""Command-line front end: ``plswe {gen,solve,decode,earlyterm,bounds,montecarlo}``.

Exit codes: 0 success, 1 usage error, 2 decoding failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds
from .bounds import DegreeContext, FixedBudget, LinearBudget, ceil_div, check_rate
from .earlyterm import Mode, Strategy, TerminationConfig, predict_stop, run_early_termination
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
from .harness import ExperimentSpec, parse_fraction, run_experiment
from .instance import (
    PLSInstance,
    PointSource,
    dump_instance,
    generate_instance,
    load_instance,
    reference_solve,
)
from .keyeq import EvaluationTable, KeyEqParams, find_solution

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str):
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positions(text: str) -> frozenset[int]:
    try:
        out = frozenset(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated positions, got {text!r}") from None
    if any(j < 1 for j in out):
        raise argparse.ArgumentTypeError("error positions are 1-based")
    return out


def _nonneg(text: str) -> int:
    val = int(text)
    if val < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {val}")
    return val


def _emit(doc: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        sys.stdout.write("\n".join(lines) + "\n")


def _load(path: str):
    try:
        return load_instance(Path(path).read_text())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read instance {path}: {exc}") from None


def _truth_for(inst, truth):
    return truth if truth is not None else reference_solve(inst).solution


def _solution_lines(sol) -> list[str]:
    lists = sol.as_lists()
    return [f"v = {json.dumps(lists['v'])}", f"d = {json.dumps(lists['d'])}"]


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    if args.A is not None or args.b is not None:
        if args.A is None or args.b is None:
            raise UsageError("--A and --b go together")
        inst = PLSInstance.from_lists(args.q, json.loads(args.A), json.loads(args.b))
        declared = {}
    else:
        missing = [f for f in ("n", "deg_a", "deg_b", "seed") if getattr(args, f) is None]
        if missing:
            raise UsageError("random generation needs " + ", ".join("--" + m.replace("_", "-") for m in missing))
        inst = generate_instance(args.q, args.n, args.deg_a, args.deg_b, args.seed)
        declared = {"deg_a": args.deg_a, "deg_b": args.deg_b}
    truth = reference_solve(inst)
    text = dump_instance(inst, truth.solution, **declared)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst, truth = _load(args.instance)
    gt = reference_solve(inst)
    doc = {"outcome": "solved", "degv": gt.degv, "degd": gt.degd, **gt.solution.as_lists()}
    if truth is not None:
        doc["matches_ground_truth"] = truth == gt.solution
    _emit(doc, args.json, ["solved", *_solution_lines(gt.solution)])
    return EXIT_OK


def _read_table(path: str, q: int) -> EvaluationTable:
    try:
        doc = json.loads(Path(path).read_text())
        return EvaluationTable(q, tuple(doc["points"]), tuple(tuple(c) for c in doc["columns"]))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read evaluations {path}: {exc}") from None


def cmd_decode(args) -> int:
    inst, truth = _load(args.instance)
    if (args.nu is None) != (args.theta is None):
        raise UsageError("--nu and --theta must be given together")
    ctx = inst.context(args.N, args.D)
    tau = args.tau
    if args.nu is not None:
        p = KeyEqParams(args.nu, args.theta)
    else:
        p = KeyEqParams(ctx.N + tau, ctx.D + tau)
    extra = tau if args.bound == "kpsw" else ceil_div(tau, ctx.n)
    L = bounds.eval_count_base(ctx, p.nu, p.theta) + extra
    if args.evaluations:
        if args.errors:
            raise UsageError("--errors cannot be combined with --evaluations")
        Y = _read_table(args.evaluations, inst.q)
        if Y.n != inst.n:
            raise UsageError("evaluation columns do not match n")
        L = Y.L
    else:
        if args.points == "random" and args.seed is None:
            raise UsageError("--points random needs --seed")
        points = PointSource(inst, args.points, args.seed).take(L)
        Y = EvaluationTable(inst.q, points, tuple(inst.node_solve(a) for a in points))
        if args.errors:
            if max(args.errors) > L:
                raise UsageError(f"error positions must lie in 1..{L}")
            if args.error_mode == "uniform":
                if args.seed is None:
                    raise UsageError("uniform errors need --seed")
                Y = inject_uniform(Y, args.errors, args.seed)
            else:
                sol = _truth_for(inst, truth)
                part = make_partition(args.errors, inst.n)
                if args.error_mode == "case1":
                    Y = inject_structured_case1(sol, points, part)
                else:
                    Y = inject_structured_case2(inst, sol, points, part)
    base = {"L": L, "nu": p.nu, "theta": p.theta}
    try:
        sol = find_solution(Y, p, n=inst.n)
    except PLSError as exc:
        msg = f"{type(exc).__name__}: {exc}"
        _emit({"outcome": "failure", "message": msg, **base}, args.json, [f"failure L={L}", msg])
        return EXIT_FAILURE
    doc = {"outcome": "solved", **base, **sol.as_lists()}
    if truth is not None:
        doc["matches_ground_truth"] = sol == truth
    _emit(doc, args.json, [f"solved L={L} nu={p.nu} theta={p.theta}", *_solution_lines(sol)])
    return EXIT_OK


def cmd_earlyterm(args) -> int:
    inst, truth = _load(args.instance)
    mode = Mode(args.mode)
    if mode.linear:
        if args.rho is None or args.tau is not None:
            raise UsageError(f"{mode.value} takes --rho (and not --tau)")
        budget = LinearBudget(check_rate(args.rho))
    else:
        if args.tau is None or args.rho is not None:
            raise UsageError(f"{mode.value} takes --tau (and not --rho)")
        budget = FixedBudget(args.tau)
    needs_seed = args.points == "random" or args.rate_true is not None or (args.errors and args.error_mode == "uniform")
    if needs_seed and args.seed is None:
        raise UsageError("this run draws random values; pass --seed")
    if args.errors and args.rate_true is not None:
        raise UsageError("--errors and --rate-true are exclusive")
    if args.errors:
        proc = {
            "uniform": lambda: UniformOnSupport(args.errors, args.seed),
            "case1": lambda: StructuredCase1(args.errors),
            "case2": lambda: StructuredCase2(args.errors),
        }[args.error_mode]()
    elif args.rate_true is not None:
        proc = RateBounded(args.rate_true, args.seed)
    else:
        proc = NO_ERRORS
    sol = _truth_for(inst, truth)
    stream = EvaluationStream(inst, sol, proc, PointSource(inst, args.points, args.seed))
    cfg = TerminationConfig(mode, inst.context(), budget, Strategy(args.strategy), max_L=args.max_L)
    try:
        report = run_early_termination(cfg, stream)
    except PLSError as exc:
        msg = f"{type(exc).__name__}: {exc}"
        _emit({"outcome": "failure", "message": msg}, args.json, ["failure", msg])
        return EXIT_FAILURE
    degv, degd = int(sol.degv), int(sol.degd)
    try:
        report.predicted_L_stop = predict_stop(cfg, degv, degd, stream.error_count)
    except PLSError:
        report.predicted_L_stop = None
    doc = report.to_dict()
    doc["errors_at_stop"] = stream.support_count(report.L_stop)
    ok = report.solved
    if truth is not None and report.solved:
        doc["matches_ground_truth"] = report.solution == truth
        ok = doc["matches_ground_truth"]
    head = f"{'solved' if report.solved else 'failure'} L_stop={report.L_stop} attempts={len(report.attempts)}"
    lines = [head] + (_solution_lines(report.solution) if report.solved else [report.message])
    if "matches_ground_truth" in doc:
        lines.append(f"matches ground truth: {doc['matches_ground_truth']}")
    _emit(doc, args.json, lines)
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_bounds(args) -> int:
    if args.instance:
        inst, _ = _load(args.instance)
        ctx = inst.context(args.N, args.D)
    else:
        missing = [f for f in ("n", "N", "D", "deg_a", "deg_b") if getattr(args, f) is None]
        if missing:
            raise UsageError("need --instance or all of --n --N --D --deg-a --deg-b")
        ctx = DegreeContext(args.n, args.N, args.D, args.deg_a, args.deg_b)
    if (args.nu is None) != (args.theta is None):
        raise UsageError("--nu and --theta must be given together")
    if (args.degv is None) != (args.degd is None):
        raise UsageError("--degv and --degd must be given together")
    tau = args.tau
    nu, theta = (args.nu, args.theta) if args.nu is not None else (ctx.N + tau, ctx.D + tau)
    doc: dict = {
        "context": {"n": ctx.n, "N": ctx.N, "D": ctx.D, "degA": ctx.deg_a, "degb": ctx.deg_b},
        "tau": tau,
        "nu": nu,
        "theta": theta,
        "L_base": bounds.eval_count_base(ctx, nu, theta),
        "L_KPSW": bounds.l_kpsw(ctx, tau),
        "L_GLZ": bounds.l_glz(ctx, tau),
        "failure_bound_GLZ": str(bounds.glz_failure_bound(ctx, tau, args.q)) if args.q else None,
    }
    if args.rho is not None:
        rho = check_rate(args.rho)
        lin = {}
        for name, div in (("deterministic", 1), ("random", ctx.n)):
            L, t = bounds.linear_counts(ctx, rho, ctx.N, ctx.D, div)
            lin[name] = {"L": L, "tau": t}
        doc["rho"] = str(rho)
        doc["linear"] = lin
    if args.degv is not None:
        zero = lambda L: 0  # noqa: E731
        stops = {
            "alg1": bounds.predict_stop_fixed(ctx, tau, args.degv, args.degd, zero),
            "alg2": bounds.predict_stop_fixed(ctx, tau, args.degv, args.degd, zero, random_errors=True),
        }
        if args.rho is not None:
            stops["alg3_ceiling"] = bounds.stop_upper_bound_linear(ctx, rho, args.degv, args.degd, 1)
            stops["alg4_ceiling"] = bounds.stop_upper_bound_linear(ctx, rho, args.degv, args.degd, ctx.n)
        doc["L_ctx"] = bounds.ctx_count(ctx, args.degv, args.degd)
        doc["stop_without_errors"] = stops
    lines = [f"{k} = {json.dumps(v, sort_keys=True)}" for k, v in doc.items() if v is not None]
    _emit(doc, args.json, lines)
    return EXIT_OK


_SPEC_FLAGS = (
    "kind", "q", "n", "deg_a", "deg_b", "trials", "seed", "error_model", "errors", "tau", "bound", "L", "nu",
    "theta", "algorithm", "rho", "rho_true", "strategy", "point_mode", "window",
)


def cmd_montecarlo(args) -> int:
    data: dict = {}
    if args.spec:
        try:
            data = json.loads(Path(args.spec).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read spec {args.spec}: {exc}") from None
    for name in _SPEC_FLAGS:
        val = getattr(args, name)
        if val is not None:
            data[name] = val
    if data.get("seed") is None:
        raise UsageError("montecarlo needs an explicit --seed")
    for name in ("q", "n", "deg_a", "deg_b", "trials"):
        if data.get(name) is None:
            raise UsageError(f"montecarlo needs --{name.replace('_', '-')}")
    data.setdefault("kind", "structure")
    for name in ("rho", "rho_true"):
        if isinstance(data.get(name), str):
            data[name] = parse_fraction(data[name])
    spec = ExperimentSpec.from_dict(data)
    report = run_experiment(spec, workers=args.workers)
    text = report.to_json(include_timing=args.timing)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return EXIT_FAILURE if report.aborted else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plswe", description="Polynomial linear system solving with erroneous evaluations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance file with certified ground truth")
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--deg-a", type=_nonneg)
    g.add_argument("--deg-b", type=_nonneg)
    g.add_argument("--seed", type=int)
    g.add_argument("--A", help="explicit A as JSON, e.g. '[[[0,1]]]'")
    g.add_argument("--b", help="explicit b as JSON, e.g. '[[1]]'")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="error-free reference solve")
    s.add_argument("--instance", required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_solve)

    def error_flags(p):
        p.add_argument("--errors", type=_positions, help="1-based corrupted positions, e.g. 1,3")
        p.add_argument("--error-mode", choices=("uniform", "case1", "case2"), default="uniform")
        p.add_argument("--points", choices=("sequential", "random"), default="sequential")
        p.add_argument("--seed", type=int)
        p.add_argument("--json", action="store_true")

    d = sub.add_parser("decode", help="decode at a fixed evaluation count")
    d.add_argument("--instance", required=True)
    d.add_argument("--evaluations", help="JSON file with points and columns")
    d.add_argument("--N", type=int)
    d.add_argument("--D", type=int)
    d.add_argument("--tau", type=_nonneg, default=0)
    d.add_argument("--bound", choices=("kpsw", "glz"), default="kpsw")
    d.add_argument("--nu", type=int)
    d.add_argument("--theta", type=int)
    error_flags(d)
    d.set_defaults(func=cmd_decode)

    e = sub.add_parser("earlyterm", help="early-termination driver")
    e.add_argument("--instance", required=True)
    e.add_argument("--mode", choices=[m.value for m in Mode], required=True)
    e.add_argument("--tau", type=_nonneg)
    e.add_argument("--rho", type=_fraction, help='exact rate "p/q"')
    e.add_argument("--rate-true", type=_fraction, help="simulate rate-bounded errors at this rate")
    e.add_argument("--strategy", choices=[s.value for s in Strategy], default="exhaustive")
    e.add_argument("--max-L", type=int)
    error_flags(e)
    e.set_defaults(func=cmd_earlyterm)

    b = sub.add_parser("bounds", help="evaluation counts and stopping points")
    b.add_argument("--instance")
    b.add_argument("--n", type=int)
    b.add_argument("--N", type=int)
    b.add_argument("--D", type=int)
    b.add_argument("--deg-a", type=_nonneg)
    b.add_argument("--deg-b", type=_nonneg)
    b.add_argument("--tau", type=_nonneg, default=0)
    b.add_argument("--rho", type=_fraction)
    b.add_argument("--nu", type=int)
    b.add_argument("--theta", type=int)
    b.add_argument("--degv", type=_nonneg)
    b.add_argument("--degd", type=_nonneg)
    b.add_argument("--q", type=int, help="field size for the failure bound")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bounds)

    m = sub.add_parser("montecarlo", help="run a Monte-Carlo experiment")
    m.add_argument("--spec", help="JSON experiment spec; flags override its fields")
    m.add_argument("--kind", choices=("structure", "termination"))
    m.add_argument("--q", type=int)
    m.add_argument("--n", type=int)
    m.add_argument("--deg-a", type=_nonneg)
    m.add_argument("--deg-b", type=_nonneg)
    m.add_argument("--trials", type=int)
    m.add_argument("--seed", type=int)
    m.add_argument("--error-model", choices=("none", "uniform", "case1", "case2", "rate"))
    m.add_argument("--errors", type=_nonneg, help="size of the error support")
    m.add_argument("--tau", type=_nonneg)
    m.add_argument("--bound", choices=("kpsw", "glz", "deterministic", "random", "explicit"))
    m.add_argument("--L", type=int)
    m.add_argument("--nu", type=int)
    m.add_argument("--theta", type=int)
    m.add_argument("--algorithm", choices=[x.value for x in Mode])
    m.add_argument("--rho", type=_fraction)
    m.add_argument("--rho-true", type=_fraction)
    m.add_argument("--strategy", choices=[x.value for x in Strategy])
    m.add_argument("--point-mode", choices=("sequential", "random"))
    m.add_argument("--window", type=int)
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("--out")
    m.add_argument("--csv")
    m.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical reports)")
    m.set_defaults(func=cmd_montecarlo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, PLSError, ValueError) as exc:
        print(f"plswe {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
