import argparse
import logging
from typing import Any, List

import config
from dynamics import find_fixed_points
from parabolic import build_petals, fatou_coordinate, fatou_report, petal_report
from routers import load_map

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("petals", parents=parents,
                                   help="petal geometry and Fatou coordinate residuals at parabolic fixed points")
    parser.add_argument("--map", dest="map", required=True)
    parser.add_argument("--epsilon", type=float, default=config.PETAL_EPSILON, help="petal half-angle margin")
    parser.add_argument("--method", choices=("quadrature", "series"), default="quadrature")
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> List[Any]:
    f = load_map(args.map)
    records: List[Any] = []
    for record in find_fixed_points(f):
        if not record.is_parabolic:
            continue
        for petal in build_petals(f, record, args.epsilon):
            chart = fatou_coordinate(petal, method=args.method)
            report = fatou_report(chart)
            if args.tol is not None and report.residual > args.tol:
                logger.warning(f"Fatou residual {report.residual:.3e} on petal {petal.index} exceeds {args.tol}")
            records.append(petal_report(petal, report.residual))
            records.append(report)
    if not records:
        logger.warning(f"No parabolic fixed point for {args.map}")
    return records
