#!/usr/bin/env python3
"""Scan primes for the Arnold example and list those whose modular basis is not the reduction of the rational one."""

import argparse
import time

from modrecon.arith import PrimeStream
from modrecon.modframe import arnold_ideal
from modrecon.poly import buchberger, reduce_poly_mod_p


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--limit", type=int, default=1000, help="scan primes below this bound (default: 1000)")
    ap.add_argument("--primes", type=int, nargs="*", help="check only these primes")
    args = ap.parse_args()

    _, gens = arnold_ideal()
    G0 = buchberger(gens)
    fp0 = G0.fingerprint()
    primes = args.primes or list(PrimeStream(start=args.limit - 1, direction="descending"))[::-1]
    t0 = time.perf_counter()
    for p in primes:
        fs = [reduce_poly_mod_p(f, p) for f in gens]
        if any(f is None for f in fs):
            print(f"{p}: input not defined mod p")
            continue
        Gp = buchberger([f for f in fs if f])
        red = G0.reduce_mod(p)
        if red is None:
            print(f"{p}: rational basis has p in a denominator; fingerprint {'same' if Gp.fingerprint() == fp0 else 'differs'}")
        elif Gp != red:
            print(f"{p}: basis differs; fingerprint {'same' if Gp.fingerprint() == fp0 else 'differs'}")
    print(f"checked {len(primes)} primes in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
