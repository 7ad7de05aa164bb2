"""Command line for the fixture generator."""

from __future__ import annotations

import argparse
import json
import sys

from .gen import generate_all


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="fixturegen")
    ap.add_argument("--out", required=True, help="output directory")
    args = ap.parse_args(argv)
    manifest = generate_all(args.out)
    json.dump(manifest, sys.stdout, indent=1, sort_keys=True)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
