"""Command-line front end.

Text output numbers columns from 1; JSON output keeps 0-based indices.
Exit codes: 0 all checks passed, 1 a verification check failed, 2 input
error, 3 enumeration budget exceeded.
"""

import argparse
import json
import sys

from . import counterexample
from .experiments import SCHEMA_VERSION, Ensemble, ExperimentConfig, random_matrix, run_theorem1, trial_rngs
from .model import DimensionError, MatrixFormatError, SparseSignal, format_matrix, load_matrix, load_vector
from .numerics import NoConvergenceError
from .omp import omp_run, policy_from_name
from .rip import DEFAULT_BUDGET, BudgetExceeded, ric_exact

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _one_based(indices):
    return "{" + ", ".join(str(i + 1) for i in indices) + "}"


def dumps(report):
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit_json(report, path):
    if path is None:
        return
    text = dumps(report)
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _check_dict(c):
    return {
        "name": c.name,
        "expected": c.expected,
        "actual": c.actual,
        "tolerance": c.tolerance,
        "passed": bool(c.passed),
    }


# ---------------------------------------------------------------------------

def ric_report(a, order, budget, matrix_path=None):
    r = ric_exact(a, order, budget=budget)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "ric",
        "inputs": {"matrix": matrix_path, "order": order, "budget": budget},
        "order": r.order,
        "delta": r.delta,
        "witness_support": list(r.witness_support),
        "lambda_min": r.lambda_min,
        "lambda_max": r.lambda_max,
        "subsets_examined": r.subsets_examined,
    }


def cmd_ric(args):
    a = load_matrix(args.matrix)
    if args.order is None:
        raise UsageError("ric requires --order")
    if not 1 <= args.order <= a.shape[1]:
        raise UsageError(f"--order must lie in [1, {a.shape[1]}]")
    rep = ric_report(a, args.order, args.budget, args.matrix)
    print(f"order            {rep['order']}")
    print(f"delta            {rep['delta']!r}")
    print(f"witness support  {_one_based(rep['witness_support'])}")
    print(f"lambda_min       {rep['lambda_min']!r}")
    print(f"lambda_max       {rep['lambda_max']!r}")
    print(f"subsets examined {rep['subsets_examined']}")
    _emit_json(rep, args.json)
    return EXIT_OK


def omp_report(a, y, iterations, policy, signal=None, inputs=None):
    trace = omp_run(a, y, iterations, policy)
    rep = {
        "schema_version": SCHEMA_VERSION,
        "command": "omp",
        "inputs": inputs or {},
        "policy": policy.name,
        "iterations": [
            {
                "iteration": j + 1,
                "selected_index": it.selected_index,
                "max_correlation": it.max_correlation,
                "correlation_values": it.correlation_values.tolist(),
                "tie_detected": it.tie_detected,
                "residual_norm": it.residual_norm,
                "rank_deficient": it.rank_deficient,
            }
            for j, it in enumerate(trace.iterations)
        ],
        "final_support": list(trace.final_support),
        "final_estimate": trace.final_estimate.entries.tolist(),
        "y_norm": trace.y_norm,
    }
    if signal is not None:
        rep["signal_support"] = list(signal.support)
        rep["support_recovered"] = trace.final_support == signal.support
    return rep


def cmd_omp(args):
    a = load_matrix(args.matrix)
    if (args.signal is None) == (args.y is None):
        raise UsageError("omp needs exactly one of --signal or --y")
    signal = None
    if args.signal is not None:
        signal = SparseSignal(load_vector(args.signal))
        if signal.length != a.shape[1]:
            raise DimensionError(f"signal has length {signal.length}, matrix has {a.shape[1]} columns")
        y = a @ signal.entries
    else:
        y = load_vector(args.y)
        if y.shape[0] != a.shape[0]:
            raise DimensionError(f"y has length {y.shape[0]}, matrix has {a.shape[0]} rows")
    k = args.k
    if k is None:
        if signal is None:
            raise UsageError("--k is required with --y")
        k = signal.sparsity
    if not 1 <= k <= a.shape[1]:
        raise UsageError(f"--k must lie in [1, {a.shape[1]}]")
    if args.policy == "adversarial" and signal is None:
        raise UsageError("the adversarial policy needs --signal to know the true support")
    policy = policy_from_name(args.policy, signal.support if signal is not None else ())
    inputs = {"matrix": args.matrix, "signal": args.signal, "y": args.y, "k": k, "policy": args.policy}
    rep = omp_report(a, y, k, policy, signal, inputs)

    print(f"{'iter':>4}  {'index':>5}  {'max |corr|':>22}  {'tie':>5}  {'residual':>22}")
    for it in rep["iterations"]:
        print(
            f"{it['iteration']:>4}  {it['selected_index'] + 1:>5}  {it['max_correlation']:>22.15g}  "
            f"{str(it['tie_detected']):>5}  {it['residual_norm']:>22.15g}"
        )
    print(f"final support {_one_based(rep['final_support'])}")
    if signal is not None:
        print(f"true support  {_one_based(signal.support)}  recovered: {rep['support_recovered']}")
    _emit_json(rep, args.json)
    return EXIT_OK


def counterexample_report(k, budget=DEFAULT_BUDGET):
    r = counterexample.verify(k, budget=budget)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "counterexample",
        "inputs": {"k": k, "budget": budget},
        "checks": [_check_dict(c) for c in r.checks],
        "overall": r.overall,
        "K": r.K,
        "delta_measured": r.delta_measured,
        "delta_analytic": r.delta_analytic,
        "spectrum": r.spectrum.tolist(),
        "correlations_at_y": r.correlations_at_y.tolist(),
        "omp_first_pick_tie": r.omp_first_pick_tie,
        "omp_failed_under": r.omp_failed_under,
        "outcomes": r.outcomes,
    }


def _print_checks(checks):
    width = max(len(c["name"]) for c in checks)
    for c in checks:
        mark = "PASS" if c["passed"] else "FAIL"
        print(f"  [{mark}] {c['name']:<{width}}  actual={c['actual']}")


def cmd_counterexample(args):
    if args.k is None or args.k < 2:
        raise UsageError("counterexample needs --k >= 2")
    rep = counterexample_report(args.k, args.budget)
    print(f"K = {rep['K']}: delta_measured = {rep['delta_measured']!r}, 1/sqrt(K) = {rep['delta_analytic']!r}")
    print(f"OMP fails under: {', '.join(rep['omp_failed_under']) or 'none'}")
    _print_checks(rep["checks"])
    _emit_json(rep, args.json)
    if not rep["overall"]:
        first = next(c for c in rep["checks"] if not c["passed"])
        print(f"first failing check: {first['name']}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_theorem1(args):
    k = 2 if args.k is None else args.k
    try:
        config = ExperimentConfig(
            seed=args.seed, trials=args.trials, m=args.m, n=args.n, k=k,
            ensemble=args.ensemble, tie_policy=args.policy or "all", budget=args.budget,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = run_theorem1(config)
    s = rep["summary"]
    print(f"{s['instances']} instances, m={config.m} n={config.n} K={config.k}, "
          f"threshold 1/(sqrt(K)+1) = {s['threshold']:.6f}")
    print(f"condition holds on {s['condition_holds']} ({s['condition_fraction']:.3%}); "
          f"delta range [{s['delta_min']:.6f}, {s['delta_max']:.6f}]")
    print(f"recovery rate (condition holds): {s['recovery_rate_condition_holds']}")
    print(f"lemma rate    (condition holds): {s['lemma1_rate_condition_holds']}")
    print(f"recovery rate (condition fails): {s['recovery_rate_condition_fails']}")
    _print_checks(rep["checks"])
    _emit_json(rep, args.json)
    return EXIT_OK if rep["overall"] else EXIT_CHECK_FAILED


def cmd_gen(args):
    if args.m is None or args.n is None:
        raise UsageError("gen needs --m and --n")
    rng = trial_rngs(args.seed, 1)[0]
    text = format_matrix(random_matrix(rng, args.m, args.n, args.ensemble))
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------

def _u64(text):
    val = int(text, 0)
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return val


def _positive(text):
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return val


def build_parser():
    parser = argparse.ArgumentParser(prog="ompric", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ric", help="exact restricted isometry constant of a matrix file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--order", type=_positive)
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    p.add_argument("--json")
    p.set_defaults(func=cmd_ric)

    p = sub.add_parser("omp", help="run OMP and print its iteration trace")
    p.add_argument("--matrix", required=True)
    p.add_argument("--signal")
    p.add_argument("--y")
    p.add_argument("--k", type=_positive)
    p.add_argument("--policy", choices=["lowest", "highest", "adversarial"], default="lowest")
    p.add_argument("--json")
    p.set_defaults(func=cmd_omp)

    p = sub.add_parser("counterexample", help="verify the delta = 1/sqrt(K) failure matrix")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    p.add_argument("--json")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("theorem1", help="random sweep of the K-step recovery guarantee")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--m", type=_positive, default=12)
    p.add_argument("--n", type=_positive, default=18)
    p.add_argument("--k", type=_positive)
    p.add_argument("--ensemble", choices=[e.value for e in Ensemble], default="unit")
    p.add_argument("--policy", choices=["lowest", "highest", "adversarial", "all"], default="all")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    p.add_argument("--json")
    p.set_defaults(func=cmd_theorem1)

    p = sub.add_parser("gen", help="write a seeded random matrix in the text format")
    p.add_argument("--m", type=_positive)
    p.add_argument("--n", type=_positive)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--ensemble", choices=[e.value for e in Ensemble], default="unit")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, MatrixFormatError, DimensionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
