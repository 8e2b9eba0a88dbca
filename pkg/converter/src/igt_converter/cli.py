"""Command-line entry point for the dataset converters.

Usage:
    igt-convert planetoid --src DIR --name {cora|citeseer|pubmed} --out DIR
    igt-convert wikics --src data.json --out DIR [--no-validate]
"""

import argparse
import sys
from dataclasses import asdict

from .planetoid import ConversionError, convert_planetoid
from .wikics import convert_wikics


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="igt-convert")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("planetoid", help="convert an ind.<name>.* distribution")
    p.add_argument("--src", required=True, help="directory holding the eight files")
    p.add_argument("--name", required=True, help="dataset name (cora, citeseer, pubmed)")
    p.add_argument("--out", required=True, help="output dataset directory")

    w = sub.add_parser("wikics", help="convert the WikiCS JSON file")
    w.add_argument("--src", required=True, help="path to the WikiCS data JSON")
    w.add_argument("--out", required=True, help="output dataset directory")
    w.add_argument(
        "--no-validate",
        action="store_true",
        help="skip the canonical node/class/feature count checks",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "planetoid":
            summary = convert_planetoid(args.src, args.name.lower(), args.out)
        else:
            summary = convert_wikics(args.src, args.out, validate=not args.no_validate)
    except ConversionError as exc:
        print(f"igt-convert: {exc}", file=sys.stderr)
        return 2
    for key, value in asdict(summary).items():
        print(f"{key} = {value}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
