"""Modular reconstruction of an a priori unknown ideal.

A :class:`ModularJob` produces reduced Groebner bases modulo primes. The
driver :func:`run_job` computes them in batches, discards primes whose
leading monomials lose a weighted majority vote, lifts the survivors
coefficientwise (CRT followed by the error tolerant lift), checks the
candidate modulo a fresh prime and finally verifies it over Q.
"""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from math import prod
from typing import Callable, Iterable, Iterator, Sequence

from .arith import PrimeStream, Residue, crt_combine, is_prime
from .lift import LiftResult, diagnose_bad_factors, error_tolerant_lift
from .poly import (
    Fingerprint,
    GroebnerBasis,
    MonomialOrdering,
    Polynomial,
    Ring,
    buchberger,
    format_monomial,
    is_groebner,
    normal_form,
    parse_ideal,
    reduce_poly_mod_p,
)

log = logging.getLogger(__name__)

__all__ = [
    "BadPrimeType",
    "PrimeRejected",
    "ModularJob",
    "RoundState",
    "FaultPlan",
    "RunConfig",
    "PrimeRecord",
    "Report",
    "RoundsExhausted",
    "delete_by_majority_vote",
    "assign_round_weights",
    "lift_basis",
    "p_test",
    "run_job",
    "groebner_job",
    "linear_solve_job",
    "solution_from_basis",
    "type5_sextic_job",
    "arnold_ideal",
    "basis_from_strings",
    "fingerprint_hash",
]


class BadPrimeType(enum.Enum):
    GOOD = "good"
    TYPE1 = "type-1"  # input cannot be reduced mod p
    TYPE2 = "type-2"  # construction breaks down mod p
    TYPE3 = "type-3"  # known invariant has the wrong value
    TYPE4 = "type-4"  # lost the leading-monomial vote
    TYPE5 = "type-5"  # anything else; only visible after lifting

    def __str__(self):
        return self.value


class PrimeRejected(Exception):
    """Raised by ``ModularJob.compute`` when the prime must be discarded."""

    def __init__(self, kind: BadPrimeType, reason: str = ""):
        super().__init__(f"{kind}: {reason}" if reason else str(kind))
        self.kind = kind
        self.reason = reason


@dataclass
class ModularJob:
    compute: Callable[[int], GroebnerBasis]
    verify: Callable[[GroebnerBasis], bool]
    ring: Ring
    generators: list[Polynomial] = field(default_factory=list)
    describe: str = ""
    verify_note: str = ""


@dataclass
class RoundState:
    accepted: list[tuple[int, GroebnerBasis, int]] = field(default_factory=list)
    rejected: list[tuple[int, BadPrimeType]] = field(default_factory=list)
    round: int = 0
    batch_size: int = 4
    seed: int = 0
    pending: dict[int, int] = field(default_factory=dict)

    @property
    def total_weight(self) -> int:
        return sum(w for _, _, w in self.accepted)

    @property
    def primes(self) -> list[int]:
        return [p for p, _, _ in self.accepted]


def fingerprint_hash(fp: Fingerprint) -> str:
    return hashlib.sha256(repr(fp).encode()).hexdigest()[:10]


def delete_by_majority_vote(state: RoundState) -> RoundState:
    """Keep only the fingerprint class of largest total weight.

    Ties go to the lexicographically smallest fingerprint; every other
    accepted prime is moved to ``rejected`` as type-4.
    """
    if not state.accepted:
        raise ValueError("nothing to vote on")
    weight: dict[Fingerprint, int] = {}
    for _, G, w in state.accepted:
        fp = G.fingerprint()
        weight[fp] = weight.get(fp, 0) + w
    winner = min(weight, key=lambda fp: (-weight[fp], fp))
    keep = [e for e in state.accepted if e[1].fingerprint() == winner]
    lost = [(p, BadPrimeType.TYPE4) for p, G, _ in state.accepted if G.fingerprint() != winner]
    return replace(state, accepted=keep, rejected=state.rejected + lost)


def assign_round_weights(state: RoundState, new_primes: Sequence[int]) -> RoundState:
    """Give each new prime weight ``total // len(new) + 1`` so the batch outweighs the past."""
    seen = set(state.primes) | {p for p, _ in state.rejected} | set(state.pending)
    if seen.intersection(new_primes):
        raise ValueError("new primes must not have been used before")
    if not new_primes:
        return state
    w = state.total_weight // len(new_primes) + 1
    pending = dict(state.pending)
    pending.update((p, w) for p in new_primes)
    return replace(state, pending=pending)


def _lift_detail(bases: Sequence[tuple[int, GroebnerBasis]]) -> tuple[GroebnerBasis | None, list[LiftResult], int]:
    if not bases:
        raise ValueError("no bases to lift")
    primes = [p for p, _ in bases]
    if len(set(primes)) != len(primes):
        raise ValueError("moduli must be distinct primes")
    fps = {G.fingerprint() for _, G in bases}
    if len(fps) != 1:
        raise ValueError("bases do not share one fingerprint")
    ring = bases[0][1].ring.with_char(0)
    N = prod(primes)
    lifts: list[LiftResult] = []
    elements = []
    for i in range(len(bases[0][1])):
        monos = set()
        for _, G in bases:
            monos.update(G[i].terms)
        terms = {}
        for m in sorted(monos):
            r = crt_combine(Residue(G[i].terms.get(m, 0), p) for p, G in bases)
            res = error_tolerant_lift(r.modulus, r.value)
            lifts.append(res)
            if res.outcome is None:
                return None, lifts, N
            if res.outcome:
                terms[m] = res.outcome
        elements.append(Polynomial(ring, terms))
    return GroebnerBasis.from_polys(elements, ring), lifts, N


def lift_basis(bases: Sequence[tuple[int, GroebnerBasis]]) -> GroebnerBasis | None:
    """Lift modular bases with a common fingerprint to Q; None if some coefficient fails."""
    return _lift_detail(bases)[0]


def _coefficient_primes_ok(p: int, polys: Iterable[Polynomial]) -> bool:
    for f in polys:
        for c in f.terms.values():
            c = Fraction(c)
            if c.numerator % p == 0 or c.denominator % p == 0:
                return False
    return True


def _draw_test_prime(rng: random.Random, bits: tuple[int, int] = (28, 31)) -> int:
    lo, hi = 1 << (bits[0] - 1), (1 << bits[1]) - 1
    while True:
        n = rng.randint(lo, hi) | 1
        if is_prime(n):
            return n


def _p_test(
    job: ModularJob,
    G: GroebnerBasis,
    used: set[int],
    generators: Sequence[Polynomial],
    rng: random.Random,
    retries: int = 32,
) -> tuple[bool, int]:
    polys = list(G) + list(generators)
    for _ in range(retries):
        p = _draw_test_prime(rng)
        if p in used or not _coefficient_primes_ok(p, polys):
            continue
        try:
            Gp = job.compute(p)
        except PrimeRejected:
            used.add(p)
            continue
        return G.reduce_mod(p) == Gp, p
    raise RuntimeError(f"no admissible test prime found in {retries} draws")


def p_test(
    job: ModularJob,
    G: GroebnerBasis,
    used: set[int],
    generators: Sequence[Polynomial],
    rng: random.Random,
) -> bool:
    """Compare ``G mod p`` with ``job.compute(p)`` for a fresh random prime ``p``."""
    return _p_test(job, G, used, generators, rng)[0]


@dataclass
class FaultPlan:
    """Wrap a job so that some primes return a replacement basis or a rejection."""

    wrapped: ModularJob
    corruptions: dict[int, GroebnerBasis | BadPrimeType] = field(default_factory=dict)

    def compute(self, p: int) -> GroebnerBasis:
        bad = self.corruptions.get(p)
        if bad is None:
            return self.wrapped.compute(p)
        if isinstance(bad, BadPrimeType):
            raise PrimeRejected(bad, "injected fault")
        return bad

    def as_job(self) -> ModularJob:
        return replace(self.wrapped, compute=self.compute)


# -- reporting ---------------------------------------------------------------------


@dataclass
class PrimeRecord:
    prime: int
    weight: int
    status: str
    fingerprint: str
    round: int


@dataclass
class Report:
    records: list[PrimeRecord] = field(default_factory=list)
    rounds: int = 0
    events: list[str] = field(default_factory=list)
    good_product: int = 1
    modulus: int = 1
    cofactors: list[int] = field(default_factory=list)
    bad_factors: list[int] = field(default_factory=list)
    test_primes: list[int] = field(default_factory=list)
    verify_note: str = ""

    def to_text(self) -> str:
        lines = [
            f"p {r.prime} weight {r.weight} status {r.status} fingerprint {r.fingerprint}"
            for r in self.records
        ]
        lines.append(f"rounds {self.rounds}")
        lines.append(f"modulus-bits {self.modulus.bit_length()}")
        lines.append(f"good-product-bits {self.good_product.bit_length()}")
        lines.append(f"lift-cofactors {self.cofactors}")
        lines.append(f"bad-factors {self.bad_factors}")
        lines.append(f"test-primes {self.test_primes}")
        lines.extend(f"event {e}" for e in self.events)
        if self.verify_note:
            lines.append(f"verification {self.verify_note}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "primes": [vars(r) for r in self.records],
            "rounds": self.rounds,
            "modulus": str(self.modulus),
            "good_product": str(self.good_product),
            "cofactors": self.cofactors,
            "bad_factors": self.bad_factors,
            "test_primes": self.test_primes,
            "events": self.events,
            "verification": self.verify_note,
        }


class RoundsExhausted(RuntimeError):
    def __init__(self, msg: str, report: Report):
        super().__init__(msg)
        self.report = report


@dataclass
class RunConfig:
    batch: int = 4
    max_rounds: int = 16
    seed: int = 0
    primes: Iterable[int] | None = None
    threads: int | None = None

    def worker_count(self) -> int:
        n = self.threads
        if n is None:
            n = int(os.environ.get("MODRECON_THREADS", "0") or 0)
        return n if n > 0 else min(32, os.cpu_count() or 1)


def _compute_all(job: ModularJob, primes: list[int], workers: int) -> dict[int, GroebnerBasis | PrimeRejected]:
    def one(p):
        try:
            return job.compute(p)
        except PrimeRejected as exc:
            return exc

    if workers <= 1 or len(primes) <= 1:
        return {p: one(p) for p in primes}
    with ThreadPoolExecutor(max_workers=min(workers, len(primes))) as pool:
        return dict(zip(primes, pool.map(one, primes)))


def _fresh(stream: Iterator[int], used: set[int], k: int) -> list[int]:
    out: list[int] = []
    while len(out) < k:
        p = next(stream)
        if p not in used and p not in out:
            out.append(p)
    return out


def run_job(job: ModularJob, config: RunConfig | None = None) -> tuple[GroebnerBasis, Report]:
    """Reconstruct the reduced Groebner basis over Q computed by ``job``.

    Raises :class:`RoundsExhausted` (carrying the partial report) if no
    verified basis is found within ``config.max_rounds`` rounds.
    """
    config = config or RunConfig()
    stream = iter(config.primes if config.primes is not None else PrimeStream.random_primes(config.seed))
    rng = random.Random(config.seed ^ 0x9E3779B97F4A7C15)
    workers = config.worker_count()
    state = RoundState(batch_size=config.batch, seed=config.seed)
    used: set[int] = set()
    weights: dict[int, int] = {}
    rounds_of: dict[int, int] = {}
    fps: dict[int, Fingerprint] = {}
    images: dict[int, GroebnerBasis] = {}
    report = Report(verify_note=job.verify_note)

    for rnd in range(1, config.max_rounds + 1):
        try:
            new = _fresh(stream, used, config.batch)
        except StopIteration:
            report.events.append(f"round {rnd}: prime stream exhausted")
            break
        used.update(new)
        state = assign_round_weights(replace(state, round=rnd), new)
        results = _compute_all(job, new, workers)
        accepted = list(state.accepted)
        rejected = list(state.rejected)
        for p in sorted(new):
            w = state.pending[p]
            weights[p], rounds_of[p] = w, rnd
            res = results[p]
            if isinstance(res, PrimeRejected):
                rejected.append((p, res.kind))
            else:
                accepted.append((p, res, w))
                fps[p] = res.fingerprint()
                images[p] = res
        state = replace(state, accepted=accepted, rejected=rejected, pending={})
        report.rounds = rnd
        if not state.accepted:
            report.events.append(f"round {rnd}: every prime rejected")
            continue
        state = delete_by_majority_vote(state)
        bases = sorted((p, G) for p, G, _ in state.accepted)
        G, lifts, N = _lift_detail(bases)
        if G is None:
            report.events.append(f"round {rnd}: lift failed over {len(bases)} primes")
            continue
        ok, tp = _p_test(job, G, used, job.generators, rng)
        used.add(tp)
        report.test_primes.append(tp)
        if not ok:
            report.events.append(f"round {rnd}: pTest failed at {tp}")
            continue
        if not job.verify(G):
            report.events.append(f"round {rnd}: verification over Q failed")
            continue
        report.events.append(f"round {rnd}: verified")
        _finish_report(report, state, G, lifts, N, weights, rounds_of, fps, images)
        return G, report
    _finish_report(report, state, None, [], 1, weights, rounds_of, fps, images)
    raise RoundsExhausted(f"no verified basis after {report.rounds} rounds", report)


def _finish_report(report, state, G, lifts, N, weights, rounds_of, fps, images) -> None:
    status: dict[int, str] = {p: str(kind) for p, kind in state.rejected}
    good = 1
    for p, Gp, _ in state.accepted:
        if G is None:
            status[p] = "accepted"
        elif G.reduce_mod(p) == Gp:
            status[p] = "good"
            good *= p
        else:
            status[p] = "type-5-suspected"
    report.records = [
        PrimeRecord(p, weights[p], status[p], fingerprint_hash(fps[p]) if p in fps else "-", rounds_of[p])
        for p in sorted(weights)
    ]
    report.good_product = good
    report.modulus = N
    cof = sorted({r.cofactor for r in lifts if r.cofactor > 1})
    report.cofactors = cof
    bad: set[int] = set()
    for r in lifts:
        if r.cofactor > 1:
            bad.update(diagnose_bad_factors(r, N).factors)
    report.bad_factors = sorted(bad)


# -- concrete jobs -------------------------------------------------------------------


def groebner_job(generators: Sequence[Polynomial], ring: Ring | None = None) -> ModularJob:
    """Job computing the reduced Groebner basis of ``<generators>`` modulo p.

    Verification checks that the candidate is a Groebner basis (all
    S-polynomials reduce to 0) and contains the input ideal (every generator
    reduces to 0). Equality of the ideals is not certified.
    """
    generators = list(generators)
    if ring is None:
        if not generators:
            raise ValueError("need generators or an explicit ring")
        ring = generators[0].ring

    def compute(p: int) -> GroebnerBasis:
        gp = []
        for f in generators:
            fp = reduce_poly_mod_p(f, p)
            if fp is None:
                raise PrimeRejected(BadPrimeType.TYPE1, f"denominator divisible by {p}")
            gp.append(fp)
        if not any(gp):
            return GroebnerBasis((), ring.with_char(p))
        return buchberger(gp)

    def verify(G: GroebnerBasis) -> bool:
        elems = list(G)
        if not elems:
            return not any(generators)
        return is_groebner(elems) and all(not normal_form(f, elems) for f in generators)

    return ModularJob(
        compute,
        verify,
        ring,
        generators,
        describe=f"groebner basis of {len(generators)} generators ({ring.order.kind})",
        verify_note="S-polynomials reduce to 0 and generators lie in <G>; <G> subset <F> not certified",
    )


def linear_solve_job(A: Sequence[Sequence], b: Sequence) -> ModularJob:
    """Job solving ``A x = b`` modulo p, encoded as the basis ``{x_i - s_i}``.

    Primes dividing a denominator are type-1; primes where ``A`` becomes
    singular are type-2.
    """
    A = [[Fraction(c) for c in row] for row in A]
    b = [Fraction(c) for c in b]
    n = len(A)
    if any(len(row) != n for row in A) or len(b) != n:
        raise ValueError("A must be square and match b")
    ring = Ring(tuple(f"x{i + 1}" for i in range(n)), MonomialOrdering("lex"))

    def compute(p: int) -> GroebnerBasis:
        try:
            M = [[ring.with_char(p).coerce(c) for c in row] + [ring.with_char(p).coerce(bi)] for row, bi in zip(A, b)]
        except (ZeroDivisionError, ValueError):
            raise PrimeRejected(BadPrimeType.TYPE1, f"denominator divisible by {p}") from None
        for col in range(n):
            piv = next((r for r in range(col, n) if M[r][col]), None)
            if piv is None:
                raise PrimeRejected(BadPrimeType.TYPE2, f"matrix singular mod {p}")
            M[col], M[piv] = M[piv], M[col]
            inv = pow(M[col][col], -1, p)
            M[col] = [v * inv % p for v in M[col]]
            for r in range(n):
                if r != col and M[r][col]:
                    f = M[r][col]
                    M[r] = [(v - f * w) % p for v, w in zip(M[r], M[col])]
        sol = [M[i][n] for i in range(n)]
        return _solution_basis(ring.with_char(p), sol)

    def verify(G: GroebnerBasis) -> bool:
        try:
            x = solution_from_basis(G)
        except ValueError:
            return False
        return all(sum(a * xi for a, xi in zip(row, x)) == bi for row, bi in zip(A, b))

    return ModularJob(compute, verify, ring, [], describe=f"{n}x{n} linear system", verify_note="A*x == b exactly")


def _solution_basis(ring: Ring, sol: Sequence) -> GroebnerBasis:
    polys = []
    for i, s in enumerate(sol):
        polys.append(ring.gen(i) - ring.constant(s))
    return GroebnerBasis.from_polys(polys, ring)


def solution_from_basis(G: GroebnerBasis) -> list[Fraction]:
    """Read ``x`` back from a basis ``{x_i - s_i}``."""
    n = G.ring.nvars
    if len(G) != n:
        raise ValueError("basis is not a point")
    x: list[Fraction | None] = [None] * n
    zero = (0,) * n
    for g in G:
        lm = g.LM
        if sum(lm) != 1 or g.LC != 1 or set(g.terms) - {lm, zero}:
            raise ValueError("basis is not a point")
        x[lm.index(1)] = -Fraction(g.terms.get(zero, 0))
    if any(v is None for v in x):
        raise ValueError("basis is not a point")
    return x  # type: ignore[return-value]


def basis_from_strings(ring: Ring, polys: Iterable[str], p: int = 0) -> GroebnerBasis:
    """Reduced basis from polynomial strings (over ``F_p`` when ``p`` is given)."""
    r = ring.with_char(p) if p else ring
    return GroebnerBasis.from_polys([r.parse(s).monic() for s in polys], r)


def _load_data(name: str) -> str:
    return resources.files("modrecon.data").joinpath(name).read_text()


def arnold_ideal() -> tuple[Ring, list[Polynomial]]:
    """Partial derivatives of ``x^5 + y^11 + x*y^9 + x^3*y^9`` in lex order."""
    return parse_ideal(_load_data("arnold_jacobian.ideal"))


def type5_sextic_job() -> tuple[FaultPlan, dict]:
    """Fixture job for the sextic with a type-5 prime.

    The base job returns the reduction of the characteristic-zero radical
    ``<y, (x-4z)(x+6z)>`` for every prime; the fault plan overrides the
    primes listed in the data file (p = 5 yields ``<y, x^2 - z^2>``).
    """
    data = json.loads(_load_data("type5_sextic.json"))
    ring = Ring(tuple(data["vars"]), MonomialOrdering(data["order"]))
    u0 = [ring.parse(s) for s in data["radical_char0"]]
    expected = buchberger(u0)

    def compute(p: int) -> GroebnerBasis:
        return GroebnerBasis.from_polys([reduce_poly_mod_p(f, p).monic() for f in expected], ring.with_char(p))

    base = ModularJob(
        compute,
        lambda G: G == expected,
        ring,
        [ring.parse(data["sextic"])],
        describe="radical of the singular locus of the sextic (fixture tables)",
        verify_note="candidate equals the closed-form radical",
    )
    overrides = {
        int(p): basis_from_strings(ring, polys, int(p)) for p, polys in data["overrides"].items()
    }
    return FaultPlan(base, overrides), data
