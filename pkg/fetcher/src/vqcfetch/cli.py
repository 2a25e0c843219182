"""CLI: ``vqcfetch fetch --dataset NAME --out DIR [--cache DIR]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .convert import fetch_and_convert
from .sources import SUPPORTED_DATASETS, SourceSpec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqcfetch",
        description="Fetch image-classification archives and emit dataset CSVs",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    fetch = commands.add_parser("fetch", help="download and convert one dataset")
    fetch.add_argument("--dataset", required=True, choices=SUPPORTED_DATASETS)
    fetch.add_argument("--out", required=True, help="output directory for CSVs")
    fetch.add_argument("--cache", default=None,
                       help="archive cache directory (default <out>/cache)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cache = Path(args.cache) if args.cache else Path(args.out) / "cache"
    spec = SourceSpec(name=args.dataset, cache_dir=cache, out_dir=Path(args.out))
    try:
        outputs = fetch_and_convert(spec)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for tag, path in outputs.items():
        print(f"{tag}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
