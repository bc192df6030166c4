import argparse
from typing import Any, List

import config
from render import render_julia
from routers import complex_arg
from schemas.render import Overlay, RenderSpec


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("render", parents=parents, help="Julia set image as binary PGM")
    parser.add_argument("--map", dest="map", required=True)
    parser.add_argument("--center", type=complex_arg, default=0j)
    parser.add_argument("--width", type=float, default=4.0, help="window width in the z-plane")
    parser.add_argument("--pixels", type=int, default=256)
    parser.add_argument("--height", type=int, help="rows; defaults to a square image")
    parser.add_argument("--overlay", choices=[o.value for o in Overlay], default=Overlay.none.value)
    parser.add_argument("--escape-radius", dest="escape_radius", type=float, default=config.ESCAPE_RADIUS)
    parser.set_defaults(handler=run)
    return parser


def render_spec(spec: RenderSpec, args: argparse.Namespace, default_path: str) -> List[Any]:
    result = render_julia(spec, threads=args.threads)
    path = args.out or default_path
    result.image.write(path)
    return [result.summary(path)] + list(result.warnings)


def run(args: argparse.Namespace) -> List[Any]:
    spec = RenderSpec(expression=args.map, center=args.center, width=args.width, pixels=args.pixels,
                      height=args.height, overlay=Overlay(args.overlay),
                      max_iter=args.max_iter or config.RENDER_MAX_ITER, escape_radius=args.escape_radius)
    return render_spec(spec, args, "julia.pgm")
