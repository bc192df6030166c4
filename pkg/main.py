import argparse
import logging
import sys
from typing import Any, List, Optional, Sequence

from pydantic import BaseModel

import config
from errors import DynamicsError, exit_code
from routers import arith, classify, cycles, dispatch, linearize, petals, preset, render, siegel
from schemas.report import emit

logger = logging.getLogger(__name__)

ROUTERS = (classify, linearize, petals, arith, siegel, cycles, render, preset)
REPORT_FORMATS = ("text", "json")


class CliParser(argparse.ArgumentParser):
    """Usage errors raise instead of exiting, so they map to exit code 1."""

    def error(self, message):
        raise ValueError(message)


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # repeated on each subcommand with SUPPRESS defaults so flags work on either side of the command
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    flags = CliParser(add_help=False)
    flags.add_argument("--precision", type=int, default=default(config.DEFAULT_PRECISION),
                       help="decimal digits for rotation-number arithmetic")
    flags.add_argument("--max-iter", dest="max_iter", type=int, default=default(None))
    flags.add_argument("--tol", type=float, default=default(None), help="residual acceptance threshold")
    flags.add_argument("--out", default=default(None), help="output file (image, or report)")
    flags.add_argument("--threads", type=int, default=default(config.THREADS))
    flags.add_argument("--seed", type=int, default=default(0))
    flags.add_argument("--format", choices=REPORT_FORMATS, default=default("text"))
    flags.add_argument("--verbose", action="store_true", default=default(False))
    return flags


def build_parser() -> CliParser:
    parser = CliParser(prog="fixdyn", description="Local fixed-point theory of one-dimensional holomorphic maps",
                       parents=[_global_flags(suppress=False)])
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [_global_flags(suppress=True)]
    for router in ROUTERS:
        router.add_parser(subparsers, parents)
    return parser


def _as_records(result: Any) -> List[Any]:
    if isinstance(result, (BaseModel, dict)):
        return [result]
    return list(result)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return exit_code(e)

    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        records = _as_records(dispatch(args.handler, args))
    except DynamicsError as e:
        return exit_code(e)
    except (ValueError, KeyError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return exit_code(e)

    text = emit(records, args.format)
    if args.out and args.command not in ("render", "preset"):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        logger.info(f"Wrote {len(records)} records to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
