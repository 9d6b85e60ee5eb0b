#!/usr/bin/env python3
"""Random trials: how often each lifter recovers a/b when some images are garbage.

For every trial a random a/b and 1..k bad primes are drawn; good primes are
added until (a^2 + b^2) * M < N' holds with M the product of the bad primes.
Both lifters see the same combined residue.
"""

import argparse
import random
import time
from fractions import Fraction
from math import gcd, prod

from modrecon.arith import Residue, crt_combine, is_prime, rational_mod
from modrecon.lift import error_tolerant_lift, farey_preimage


def trial(rng, pool, max_bad, max_height):
    while True:
        a, b = rng.randint(-max_height, max_height), rng.randint(1, max_height)
        if gcd(a, b) == 1:
            break
    bad = rng.sample(pool, rng.randint(0, max_bad))
    M = prod(bad)
    good, Np = [], 1
    for p in rng.sample(pool, len(pool)):
        if p in bad or b % p == 0:
            continue
        good.append(p)
        Np *= p
        if (a * a + b * b) * M < Np:
            break
    res = [rational_mod(Fraction(a, b), p) for p in good] + [Residue(rng.randrange(p), p) for p in bad]
    r = crt_combine(res)
    x = Fraction(a, b)
    lift = error_tolerant_lift(r.modulus, r.value)
    return len(bad), farey_preimage(r.modulus, r.value) == x, lift.outcome == x, M % lift.cofactor == 0


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-bad", type=int, default=3, help="bad primes per trial (default: 3)")
    ap.add_argument("--height", type=int, default=10**6, help="bound on |a| and b (default: 1e6)")
    ap.add_argument("--prime-bits", type=int, default=14, help="size of the prime pool (default: 14)")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    pool = [p for p in range(3, 1 << args.prime_bits) if is_prime(p)]
    t0 = time.perf_counter()
    rows = {}
    for _ in range(args.trials):
        k, farey_ok, lift_ok, cof_ok = trial(rng, pool, args.max_bad, args.height)
        row = rows.setdefault(k, [0, 0, 0, 0])
        row[0] += 1
        row[1] += farey_ok
        row[2] += lift_ok
        row[3] += cof_ok
    print(f"{'bad':>4} {'trials':>7} {'farey ok':>9} {'errtol ok':>10} {'cofactor|M':>11}")
    for k in sorted(rows):
        n, f, e, c = rows[k]
        print(f"{k:>4} {n:>7} {f:>9} {e:>10} {c:>11}")
    print(f"{args.trials} trials in {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
