"""Command line entry point: eval, invert, gen, gen-ranking, bench.

Exit codes: 0 success, 1 infeasible or budget exceeded, 2 bad input,
3 non-convergence.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .bench import ExperimentPlan, run_plan, write_csv
from .core import Semantics
from .errors import GradInvError, NonConvergenceError
from .graphgen import Family, GraphSpec, generate, random_ranking
from .inverse import SolverConfig, Strategy, solve
from .io import dumps_framework, dumps_ranking, load_framework, load_graph, load_ranking, write_text
from .semantics import IterationConfig, evaluate

EXIT_OK = 0
EXIT_UNSOLVED = 1
EXIT_INPUT = 2
EXIT_NONCONVERGENCE = 3


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be > 0")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be >= 1")
    return value


def _probability(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text!r} must lie in [0, 1]")
    return value


def _rel_eps(text):
    value = _positive_float(text)
    if not value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be < 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gradinv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("eval", help="evaluate a semantics on a weighted framework")
    p.add_argument("--graph", required=True, help="framework JSON")
    p.add_argument("--semantics", required=True, type=str.lower, choices=[s.value.lower() for s in Semantics])
    p.add_argument("--eps", type=_positive_float, default=1e-9)
    p.add_argument("--max-iter", type=_positive_int, default=10_000)

    p = sub.add_parser("invert", help="find weights realising a target ranking")
    p.add_argument("--graph", required=True, help="framework JSON (weights ignored)")
    p.add_argument("--ranking", required=True, help="ranking JSON")
    p.add_argument("--semantics", required=True, type=str.lower, choices=["mb", "cb", "hc", "tb", "is"])
    p.add_argument("--strategy", type=str.lower, default="s3", choices=[s.value.lower() for s in Strategy])
    p.add_argument("--zeta", type=_positive_float, default=1.0)
    p.add_argument("--rel-eps", type=_rel_eps, default=1e-3)
    p.add_argument("--bisect-eps", type=_positive_float, default=1e-3)
    p.add_argument("--iters-per-pick", type=_positive_int, default=2000)
    p.add_argument("--max-calls", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="write the solved framework here instead of stdout")

    p = sub.add_parser("gen", help="generate a benchmark attack graph")
    p.add_argument("--family", required=True, type=str.lower, choices=[f.value for f in Family])
    p.add_argument("--n", required=True, type=_positive_int)
    p.add_argument("--p", type=_probability, default=None, help="edge probability (er only)")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("-o", "--output", required=True, help="output file, '-' for stdout")

    p = sub.add_parser("gen-ranking", help="draw a random target ranking for a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--levels", type=_positive_int, default=5)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("-o", "--output", required=True, help="output file, '-' for stdout")

    p = sub.add_parser("bench", help="run an experiment plan and emit CSV")
    p.add_argument("--plan", required=True, help="plan JSON")
    p.add_argument("-o", "--output", default="-", help="CSV file, '-' for stdout")
    p.add_argument("--workers", type=_positive_int, default=None, help="override the plan's worker count")
    return parser


def _emit(path, text, out):
    if path in (None, "-"):
        out.write(text)
    else:
        write_text(path, text)


def cmd_eval(args, out, err):
    framework = load_framework(args.graph)
    result = evaluate(framework, args.semantics, IterationConfig(args.eps, args.max_iter))
    for a, d in result.degrees.items():
        out.write(f"{a},{d!r}\n")
    out.write(f"# iterations_used={result.iterations_used} converged={str(result.converged).lower()}\n")
    if not result.converged:
        err.write(f"gradinv: {args.semantics} did not converge within {args.max_iter} iterations\n")
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_invert(args, out, err):
    graph = load_graph(args.graph)
    ranking = load_ranking(args.ranking, graph.arguments)
    cfg = SolverConfig(
        zeta=args.zeta,
        rel_eps=args.rel_eps,
        bisect_eps=args.bisect_eps,
        iterations_per_pick=args.iters_per_pick,
        max_bisect_calls=args.max_calls,
        strategy=args.strategy,
        rng_seed=args.seed,
    )
    report = solve(graph, ranking, args.semantics, cfg)
    if report.detail:
        err.write(f"gradinv: {report.detail}\n")
    if report.termination.value != "Infeasible":
        _emit(args.output, dumps_framework(graph, report.weights), out)
    out.write(
        f"# termination={report.termination} bisect_calls={report.bisect_calls} "
        f"total_inner_iterations={report.total_inner_iterations}\n"
    )
    return EXIT_OK if report.success else EXIT_UNSOLVED


def cmd_gen(args, out, err):
    if args.family == "er" and args.p is None:
        err.write("gradinv gen: --p is required for the er family\n")
        return EXIT_INPUT
    if args.family != "er" and args.p is not None:
        err.write("gradinv gen: --p only applies to the er family\n")
        return EXIT_INPUT
    graph = generate(GraphSpec(args.family, args.n, args.p, seed=args.seed))
    _emit(args.output, dumps_framework(graph, {a: 0.5 for a in graph.arguments}), out)
    return EXIT_OK


def cmd_gen_ranking(args, out, err):
    graph = load_graph(args.graph)
    ranking = random_ranking(graph.arguments, args.levels, seed=args.seed)
    _emit(args.output, dumps_ranking(ranking), out)
    return EXIT_OK


def cmd_bench(args, out, err):
    plan = ExperimentPlan.load(args.plan)
    total = plan.cardinality()

    def progress(done, total):
        if done == total or done % 50 == 0:
            err.write(f"\r{done}/{total} trials")
            if done == total:
                err.write("\n")

    records = run_plan(plan, workers=args.workers, progress=progress)
    if args.output in (None, "-"):
        write_csv(records, out)
    else:
        with open(args.output, "w", newline="") as fh:
            write_csv(records, fh)
    return EXIT_OK if len(records) == total else EXIT_UNSOLVED


COMMANDS = {
    "eval": cmd_eval,
    "invert": cmd_invert,
    "gen": cmd_gen,
    "gen-ranking": cmd_gen_ranking,
    "bench": cmd_bench,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help/--version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=err)
    try:
        return COMMANDS[args.command](args, out, err)
    except NonConvergenceError as exc:
        err.write(f"gradinv: {exc}\n")
        return EXIT_NONCONVERGENCE
    except (GradInvError, OSError) as exc:
        err.write(f"gradinv: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
