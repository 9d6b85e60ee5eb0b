"""Reconstruction of a single rational from its images modulo primes."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .arith import PrimeStream, Residue, crt_pair
from .lift import error_tolerant_lift, farey_preimage

log = logging.getLogger(__name__)

__all__ = [
    "ModularOracle",
    "TerminationPolicy",
    "ReconstructionStats",
    "ReconstructionFailed",
    "reconstruct_rational",
    "verify_callback_equality",
    "oracle_from_value",
]


@dataclass
class ModularOracle:
    """Black box returning the image of the unknown rational mod ``p`` (or None).

    ``kind`` is ``"exact"`` when every non-None answer is correct, and
    ``"erroneous"`` when finitely many primes may return wrong values.
    """

    evaluate: Callable[[int], int | None]
    kind: str = "exact"

    def __call__(self, p: int) -> int | None:
        return self.evaluate(p)


def oracle_from_value(
    x: Fraction | int, corrupt: dict[int, int | None] | None = None
) -> ModularOracle:
    """Oracle for a known rational, optionally with wrong answers at some primes."""
    x = Fraction(x)
    corrupt = dict(corrupt or {})

    def evaluate(p: int) -> int | None:
        if p in corrupt:
            return corrupt[p]
        if x.denominator % p == 0:
            return None
        return x.numerator * pow(x.denominator, -1, p) % p

    return ModularOracle(evaluate, "erroneous" if corrupt else "exact")


@dataclass
class TerminationPolicy:
    """When to accept a lifted candidate.

    Either ``verifier`` (a posteriori check) or ``height_bound`` (a priori
    bound on ``max(|a|, |b|)``) must be set. With a height bound ``H`` the
    candidate is accepted once ``N > 4 * H**2 * bad_budget``.
    """

    verifier: Callable[[Fraction], bool] | None = None
    height_bound: int | None = None
    bad_budget: int = 1
    max_primes: int = 1000
    stride: int = 1

    def __post_init__(self):
        if (self.verifier is None) == (self.height_bound is None):
            raise ValueError("set exactly one of verifier / height_bound")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")

    def accepts(self, y: Fraction, N: int) -> bool:
        if self.verifier is not None:
            return bool(self.verifier(y))
        H = self.height_bound
        return (
            max(abs(y.numerator), y.denominator) <= H
            and N > 2 * (2 * H * H) * self.bad_budget
        )


@dataclass
class ReconstructionStats:
    used: list[int] = field(default_factory=list)
    rejected: list[int] = field(default_factory=list)
    lift_attempts: int = 0
    modulus: int = 1


class ReconstructionFailed(RuntimeError):
    def __init__(self, msg: str, stats: ReconstructionStats):
        super().__init__(msg)
        self.stats = stats


def verify_callback_equality(candidate: Fraction, target: Fraction) -> bool:
    return Fraction(candidate) == Fraction(target)


def reconstruct_rational(
    oracle: ModularOracle | Callable[[int], int | None],
    policy: TerminationPolicy,
    primes: PrimeStream | Iterator[int] | None = None,
    lifter: str = "farey",
    stats: ReconstructionStats | None = None,
) -> Fraction:
    """Accumulate residues by CRT and lift after each accepted prime.

    Rejected primes are skipped without touching the modulus. Raises
    :class:`ReconstructionFailed` once ``policy.max_primes`` primes have been
    tried without an accepted candidate.
    """
    if lifter not in ("farey", "errtol"):
        raise ValueError(f"unknown lifter {lifter!r}")
    if getattr(oracle, "kind", "exact") == "erroneous" and lifter == "farey":
        log.warning("erroneous oracle with the Farey lifter may never terminate")
    if primes is None:
        primes = PrimeStream()
    stats = stats if stats is not None else ReconstructionStats()
    primes = iter(primes)
    acc: Residue | None = None
    since_lift = 0

    for _ in range(policy.max_primes):
        p = next(primes)
        s = oracle(p)
        if s is None:
            stats.rejected.append(p)
            continue
        image = Residue(s % p, p)
        acc = image if acc is None else crt_pair(acc, image)
        stats.used.append(p)
        stats.modulus = acc.modulus
        since_lift += 1
        if since_lift < policy.stride:
            continue
        since_lift = 0
        stats.lift_attempts += 1
        if lifter == "farey":
            y = farey_preimage(acc.modulus, acc.value)
        else:
            y = error_tolerant_lift(acc.modulus, acc.value).outcome
        if y is None:
            continue
        if policy.accepts(y, acc.modulus):
            return y
    raise ReconstructionFailed(f"no accepted lift after {policy.max_primes} primes", stats)
