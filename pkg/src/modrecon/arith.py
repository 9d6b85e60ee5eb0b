"""Exact integer/rational arithmetic, Chinese remaindering and prime streams.

Rationals are :class:`fractions.Fraction` instances, which already keep the
canonical form we need (coprime parts, positive denominator, zero as 0/1).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator

Rational = Fraction

__all__ = [
    "Rational",
    "Residue",
    "PrimeStream",
    "PrimeStreamExhausted",
    "xgcd",
    "rational_mod",
    "crt_pair",
    "crt_combine",
    "is_prime",
    "next_prime",
    "parse_residues",
    "format_residues",
]


@dataclass(frozen=True)
class Residue:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"value {self.value} not reduced modulo {self.modulus}")

    def __iter__(self):
        # allows ``value, modulus = residue``
        yield self.value
        yield self.modulus


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, e, f)`` with ``g = gcd(a, b) = e*a + f*b`` and ``g >= 0``."""
    e0, e1, f0, f1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        e0, e1 = e1, e0 - q * e1
        f0, f1 = f1, f0 - q * f1
    if a < 0:
        return -a, -e0, -f0
    return a, e0, f0


def rational_mod(x: Fraction | int, N: int) -> Residue | None:
    """Value of ``x`` modulo ``N``, or ``None`` if the denominator is not invertible."""
    if N < 2:
        raise ValueError("N must be >= 2")
    x = Fraction(x)
    b = x.denominator % N
    g, inv, _ = xgcd(b, N)
    if g != 1:
        return None
    return Residue(x.numerator * inv % N, N)


def crt_pair(r1: Residue, r2: Residue) -> Residue:
    """Combine two residues over coprime moduli.

    Uses a Bezout relation ``1 = e*N + f*p`` and sets ``r = r1*f*p + r2*e*N``.
    """
    (r, N), (s, p) = r1, r2
    g, e, f = xgcd(N, p)
    if g != 1:
        raise ValueError(f"moduli {N} and {p} are not coprime")
    M = N * p
    return Residue((r * f * p + s * e * N) % M, M)


def crt_combine(residues: Iterable[Residue]) -> Residue:
    residues = list(residues)
    if not residues:
        raise ValueError("crt_combine needs at least one residue")
    return reduce(crt_pair, residues)


# Deterministic Miller-Rabin: these bases are exact for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = _MR_BASES


def _mr_witness(a: int, d: int, s: int, n: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime(n: int, rounds: int = 64) -> bool:
    """Primality test; deterministic below 2**64, ``rounds`` random bases above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < 1 << 64:
        bases: Iterable[int] = _MR_BASES
    else:
        rng = random.Random(n)  # reproducible answers for the same n
        bases = (rng.randrange(2, n - 1) for _ in range(rounds))
    return not any(_mr_witness(a, d, s, n) for a in bases)


class PrimeStreamExhausted(RuntimeError):
    pass


@dataclass
class PrimeStream:
    """Deterministic source of primes.

    ``sequential`` mode walks from ``start`` in ``direction``; ``random`` mode
    draws distinct primes with bit length in ``bits`` from a generator seeded
    with ``seed``. ``limit`` caps the number of emitted primes.
    """

    start: int = 2
    direction: str = "ascending"
    excluded: frozenset[int] = frozenset()
    seed: int = 0
    mode: str = "sequential"
    bits: tuple[int, int] = (28, 31)
    limit: int | None = None
    max_tries: int = 100_000
    _cursor: int | None = field(default=None, init=False, repr=False)
    _emitted: set[int] = field(default_factory=set, init=False, repr=False)
    _rng: random.Random | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.direction not in ("ascending", "descending"):
            raise ValueError(f"bad direction {self.direction!r}")
        if self.mode not in ("sequential", "random"):
            raise ValueError(f"bad mode {self.mode!r}")
        self.excluded = frozenset(self.excluded)

    @classmethod
    def random_primes(cls, seed: int = 0, bits: tuple[int, int] = (28, 31), **kw) -> PrimeStream:
        return cls(mode="random", seed=seed, bits=bits, **kw)

    def exclude(self, *primes: int) -> None:
        self.excluded = self.excluded | frozenset(primes)

    def __iter__(self) -> Iterator[int]:
        return self

    def __next__(self) -> int:
        # iteration just stops; next_prime() is the call that raises
        try:
            return next_prime(self)
        except PrimeStreamExhausted:
            raise StopIteration from None

    def _advance(self) -> int:
        if self.mode == "random":
            if self._rng is None:
                self._rng = random.Random(self.seed)
            lo, hi = 1 << (self.bits[0] - 1), (1 << self.bits[1]) - 1
            for _ in range(self.max_tries):
                n = self._rng.randint(lo, hi) | 1
                if n not in self._emitted and n not in self.excluded and is_prime(n):
                    return n
            raise PrimeStreamExhausted("no fresh random prime found")
        step = 1 if self.direction == "ascending" else -1
        n = self.start if self._cursor is None else self._cursor + step
        while True:
            if n < 2:
                raise PrimeStreamExhausted("descending stream ran below 2")
            if n not in self.excluded and is_prime(n):
                self._cursor = n
                return n
            n += step


def next_prime(stream: PrimeStream) -> int:
    if stream.limit is not None and len(stream._emitted) >= stream.limit:
        raise PrimeStreamExhausted(f"prime stream limit {stream.limit} reached")
    p = stream._advance()
    stream._emitted.add(p)
    return p


def parse_residues(text: str) -> list[Residue]:
    """Parse ``<value> <modulus>`` lines; ``#`` starts a comment."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<value> <modulus>'")
        value, modulus = (int(t) for t in parts)
        if modulus < 2:
            raise ValueError(f"line {lineno}: modulus must be >= 2")
        out.append(Residue(value % modulus, modulus))
    return out


def format_residues(residues: Iterable[Residue]) -> str:
    return "".join(f"{r.value} {r.modulus}\n" for r in residues)
