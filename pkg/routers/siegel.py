import argparse
from typing import Any, List

import config
from arithmetic import parse_rotation
from models.germ import GermSeries
from routers import complex_arg
from siegel import convergence_radius_estimate, eta, formal_linearization, radial_scan


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("siegel", parents=parents,
                                   help="radial scan of eta toward |lambda| = 1 for z^2 + lambda z")
    parser.add_argument("--xi", help="rotation number of the multiplier")
    parser.add_argument("--floor", type=float, default=config.RADIAL_FLOOR)
    parser.add_argument("--order", type=int, help="also estimate the formal linearization radius to this order")
    parser.add_argument("--lam", type=complex_arg, help="evaluate eta at one attracting multiplier")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> List[Any]:
    if args.lam is not None:
        value = eta(args.lam, max_iter=args.max_iter or config.ETA_MAX_ITER)
        return [{"lam": args.lam, "eta": value, "modulus": abs(value)}]
    if not args.xi:
        raise ValueError("siegel needs --xi or --lam")
    xi = parse_rotation(args.xi)
    records: List[Any] = [radial_scan(xi, floor=args.floor, threads=args.threads,
                                      max_iter=args.max_iter or config.ETA_MAX_ITER)]
    if args.order:
        lam = xi.multiplier(config.CREMER_DPS)
        lin = formal_linearization(GermSeries([lam, 1]), args.order)
        records.append(convergence_radius_estimate(lin))
    return records
