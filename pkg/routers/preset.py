import argparse
from typing import Any, List

from presets import figure_preset, preset_names
from routers.render import render_spec
from schemas.render import RenderSpec


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("preset", parents=parents, help="render one of the figure presets")
    parser.add_argument("name", choices=preset_names())
    parser.add_argument("--pixels", type=int, default=256)
    parser.set_defaults(handler=run)
    return parser


def run(args: argparse.Namespace) -> List[Any]:
    spec = figure_preset(args.name, args.pixels)
    if args.max_iter:
        spec = RenderSpec(**{**spec.model_dump(), "max_iter": args.max_iter})
    return render_spec(spec, args, f"{args.name}.pgm")
