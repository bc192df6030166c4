import argparse
import logging
import sys
from typing import Any, Callable, List

from errors import DynamicsError
from expression import parse_map
from models.rational_map import RationalMap

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace], List[Any]]


def complex_arg(text: str) -> complex:
    """argparse type for complex values: '-0.35', '0.2+0.1i' or '0.2,0.1'."""
    try:
        if "," in text:
            re, im = text.split(",", 1)
            return complex(float(re), float(im))
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"Not a complex number: '{text}'")


def load_map(text: str) -> RationalMap:
    return parse_map(text).map


def dispatch(handler: Handler, args: argparse.Namespace) -> List[Any]:
    """Run a subcommand; numerical failures become a diagnostic on stderr and re-raise."""
    try:
        return handler(args)
    except DynamicsError as e:
        logger.error(f"{args.command} failed: {e.detail}")
        print(f"error: {e.detail}", file=sys.stderr)
        if e.partial is not None:
            print(f"partial: {e.partial!r}", file=sys.stderr)
        raise
