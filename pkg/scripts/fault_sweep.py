#!/usr/bin/env python3
"""Run a job under many random fault plans and tabulate rounds and prime labels."""

import argparse
import collections
import random
import time
from fractions import Fraction
from itertools import islice

from modrecon.arith import PrimeStream
from modrecon.modframe import BadPrimeType, FaultPlan, GroebnerBasis, RunConfig, groebner_job, linear_solve_job, run_job
from modrecon.poly import MonomialOrdering, Ring


def make_job(kind):
    if kind == "linear":
        A = [[Fraction(3), Fraction(1, 2), 0], [Fraction(-1), 4, Fraction(2, 7)], [0, Fraction(5), 9]]
        return linear_solve_job(A, [1, Fraction(-3, 4), 2])
    ring = Ring(("x", "y"), MonomialOrdering("lex"))
    return groebner_job([ring.parse("x^2 + 1/3*y - 2"), ring.parse("x*y - 5/7")])


def random_fault(job, p, rng):
    ring_p = job.ring.with_char(p)
    kind = rng.randrange(4)
    if kind == 0:
        return rng.choice([BadPrimeType.TYPE1, BadPrimeType.TYPE2, BadPrimeType.TYPE3])
    if kind == 1:
        return GroebnerBasis.from_polys([ring_p.one()], ring_p)
    G = job.compute(p)
    g = G[rng.randrange(len(G))]
    bumped = g + ring_p.constant(rng.randrange(1, p))
    return GroebnerBasis.from_polys([bumped if h is g else h for h in G], ring_p)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--job", choices=("linear", "gb"), default="linear")
    ap.add_argument("--plans", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--faults", type=int, default=6, help="max corrupted primes per plan (default: 6)")
    ap.add_argument("--batch", type=int, default=4)
    args = ap.parse_args()

    job = make_job(args.job)
    primes = list(islice(PrimeStream(start=1000), 400))
    clean, _ = run_job(job, RunConfig(primes=primes, batch=args.batch))
    print(f"fault-free answer: {clean}")
    rng = random.Random(args.seed)
    rounds = collections.Counter()
    labels = collections.Counter()
    wrong = 0
    t0 = time.perf_counter()
    for k in range(args.plans):
        bad = rng.sample(primes[: 3 * args.batch], rng.randint(1, args.faults))
        plan = FaultPlan(job, {p: random_fault(job, p, rng) for p in bad})
        G, report = run_job(plan.as_job(), RunConfig(primes=primes, batch=args.batch, seed=k, max_rounds=32))
        wrong += G != clean
        rounds[report.rounds] += 1
        labels.update(r.status for r in report.records if r.prime in bad)
    print(f"{args.plans} plans in {time.perf_counter() - t0:.2f}s, wrong answers: {wrong}")
    print("rounds needed:", dict(sorted(rounds.items())))
    print("labels of corrupted primes that were drawn:", dict(sorted(labels.items())))


if __name__ == "__main__":
    main()
