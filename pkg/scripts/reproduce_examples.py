#!/usr/bin/env python3
"""Run every worked example and print its tables; exits nonzero if any fails."""

import argparse
import sys

from modrecon.demos import DEMOS, run_demo


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(DEMOS), help=f"subset of {', '.join(DEMOS)}")
    ap.add_argument("-q", "--quiet", action="store_true", help="only print PASS/FAIL lines")
    args = ap.parse_args()
    ok = True
    for name in args.names:
        ok &= run_demo(name, sys.stdout, verbose=not args.quiet)
        print()
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
