import argparse
from typing import List

from dynamics import find_fixed_points, find_periodic_points
from routers import load_map
from schemas.dynamics import FixedPointRecord


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("classify", parents=parents,
                                   help="fixed points (or cycles of period q) with their multipliers and classes")
    parser.add_argument("--map", dest="map", required=True, help='map expression, e.g. "z^2+0.7*z"')
    parser.add_argument("--period", type=int, default=1, help="list cycles of exact period dividing q")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> List[FixedPointRecord]:
    f = load_map(args.map)
    if args.period < 1:
        raise ValueError("Period must be at least 1")
    if args.period == 1:
        return find_fixed_points(f)
    return find_periodic_points(f, args.period)
