import argparse
import cmath
import logging
import math
from typing import List

import config
from arithmetic import float_truncation, parse_rotation
from dynamics import classify_fixed_point, find_fixed_points
from errors import ClassificationError
from linearization import quadratic_family
from routers import load_map
from schemas.dynamics import CycleSearchReport, FixedPointClass
from siegel import small_cycle_search

logger = logging.getLogger(__name__)

INDIFFERENT = (FixedPointClass.irrationally_indifferent, FixedPointClass.rationally_indifferent)
DOUBLE_BITS = 53


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("cycles", parents=parents,
                                   help="small cycles near an indifferent fixed point")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--map", dest="map", help="map with an indifferent fixed point")
    source.add_argument("--xi", help="rotation number; searches z^2 + e^(2 pi i xi) z at 0")
    parser.add_argument("--q-max", dest="q_max", type=int, default=config.SMALL_CYCLE_Q_MAX)
    parser.add_argument("--delta", type=float, default=config.SMALL_CYCLE_DELTA)
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> List[CycleSearchReport]:
    if args.xi:
        xi = parse_rotation(args.xi)
        angle, terms = float_truncation(xi)
        logger.info(f"Truncated {xi.label} to {angle!r} ({terms} gap terms kept)")
        f = quadratic_family(cmath.exp(2j * math.pi * angle))
        record = classify_fixed_point(f, 0j)
        return [small_cycle_search(f, record, args.q_max, args.delta, truncation_bits=DOUBLE_BITS)]
    f = load_map(args.map)
    record = next((r for r in find_fixed_points(f) if r.fixed_class in INDIFFERENT), None)
    if record is None:
        raise ClassificationError(f"No indifferent fixed point for {args.map}")
    return [small_cycle_search(f, record, args.q_max, args.delta)]
