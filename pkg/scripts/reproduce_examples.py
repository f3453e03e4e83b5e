#!/usr/bin/env python3
"""Replay the three worked examples and print each computed quantity next to the expected one."""

import argparse
import sys

from arbor_cubic.replay import MISMATCH, replay


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="*", default=["generic", "rational", "special"])
    args = parser.parse_args()
    bad = 0
    for name in args.names:
        key, lines = replay(name)
        print(f"== {key}")
        for line in lines:
            print(f"  {line.quantity:<24} {line.kind:<9} {line.status:<22} computed={line.computed or '-'}")
            if line.discrepancy:
                print(f"  {'':<24} note: {line.discrepancy}")
            bad += line.status == MISMATCH
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
