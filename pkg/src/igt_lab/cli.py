"""Command-line entry point.

Usage:
    igt-lab <synth|bench|ablate|random-w|verify> [--config FILE] [--seed N]
            [--out DIR] [key=value ...]

Config precedence: command-line key=value overrides beat the config file.
"""

import argparse
import sys

from .errors import IgtLabError
from .experiments import (
    RunConfig,
    cmd_ablate,
    cmd_bench,
    cmd_random_w,
    cmd_synth,
    cmd_verify,
)

_COMMANDS = {
    "synth": (cmd_synth, "synthetic two-community sweep over the feature-spread gap"),
    "bench": (cmd_bench, "citation-dataset benchmark across split modes"),
    "ablate": (cmd_ablate, "smoothing-scale x order validation grid"),
    "random-w": (cmd_random_w, "accuracy drop with random untrained maps"),
    "verify": (cmd_verify, "run the bound-verification suite"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="igt-lab",
        description="graph-transform workbench: experiments and bound verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="key = value config file")
        p.add_argument("--seed", type=int, default=None, help="global seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument(
            "overrides",
            nargs="*",
            metavar="key=value",
            help="config overrides, highest precedence",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = args.out or f"runs/{args.command}"
    try:
        cfg = RunConfig.from_sources(args.config, args.overrides, out_dir, args.seed)
        handler = _COMMANDS[args.command][0]
        return handler(cfg)
    except IgtLabError as exc:
        print(f"igt-lab {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
