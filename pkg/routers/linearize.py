import argparse
import logging
from typing import Any, List

from dynamics import find_fixed_points
from errors import DynamicsError
from linearization import chart_report, max_disk
from routers import load_map
from schemas.dynamics import FixedPointClass

logger = logging.getLogger(__name__)

CHARTED = (FixedPointClass.superattracting, FixedPointClass.attracting, FixedPointClass.repelling)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("linearize", parents=parents,
                                   help="Koenigs/Boettcher chart residuals at every hyperbolic fixed point")
    parser.add_argument("--map", dest="map", required=True)
    parser.add_argument("--samples", type=int, default=100, help="points in the residual grid")
    parser.add_argument("--disk", action="store_true", help="also report the maximal linearization disk")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> List[Any]:
    f = load_map(args.map)
    records: List[Any] = []
    for record in find_fixed_points(f):
        if record.fixed_class not in CHARTED:
            logger.info(f"Skipping {record.fixed_class.value} point {record.location}")
            continue
        report = chart_report(f, record, args.samples)
        if args.tol is not None and report.residual > args.tol:
            logger.warning(f"Chart residual {report.residual:.3e} at {record.location} exceeds {args.tol}")
        records.append(report)
        if args.disk and record.fixed_class == FixedPointClass.attracting:
            try:
                records.append(max_disk(f, record))
            except DynamicsError as e:
                logger.warning(f"No maximal disk at {record.location}: {e.detail}")
    return records
