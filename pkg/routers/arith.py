import argparse
from typing import Any, List

from arithmetic import (best_approximation_check, cf_expand, condition_report, expansion_record,
                        measure_experiment, parse_rotation)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("arith", parents=parents,
                                   help="continued fraction and Diophantine/Brjuno verdicts for a rotation number")
    parser.add_argument("--xi", help="golden, cbrt, liouville, cremer, gaps:1,3,50, p/q or a decimal")
    parser.add_argument("--depth", type=int, default=30)
    parser.add_argument("--expansion", action="store_true", help="also report partial quotients and convergents")
    parser.add_argument("--measure", nargs=2, type=float, metavar=("KAPPA", "EPSILON"),
                        help="Monte-Carlo measure of eps/q^kappa-approximable angles instead")
    parser.add_argument("--trials", type=int, default=10 ** 5)
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> List[Any]:
    if args.measure:
        kappa, epsilon = args.measure
        return [measure_experiment(kappa, epsilon, trials=args.trials, seed=args.seed)]
    if not args.xi:
        raise ValueError("arith needs --xi or --measure")
    xi = parse_rotation(args.xi)
    records: List[Any] = []
    if args.expansion:
        expansion = cf_expand(xi, args.depth, args.precision)
        records.append(expansion_record(xi, expansion))
        violations = best_approximation_check(xi, expansion=expansion, precision=args.precision)
        if violations:
            raise ValueError(f"Best-approximation property fails at indices {violations}")
    records.append(condition_report(xi, depth=args.depth, precision=args.precision))
    return records
