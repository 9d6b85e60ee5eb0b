"""Lifting residues to rationals.

Two independent kernels live here: the classical Farey preimage computed by a
truncated Euclidean algorithm, and the error tolerant lift which finds a
shortest vector of the lattice ``<(N, 0), (r, 1)>`` by Gaussian reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import NamedTuple

__all__ = [
    "LatticeVector",
    "LiftResult",
    "Diagnosis",
    "farey_preimage",
    "gaussian_reduce",
    "error_tolerant_lift",
    "cn_preimage",
    "cn_membership",
    "diagnose_bad_factors",
]


class LatticeVector(NamedTuple):
    a: int
    b: int

    @property
    def norm_sq(self) -> int:
        return self.a * self.a + self.b * self.b

    def dot(self, other: LatticeVector) -> int:
        return self.a * other.a + self.b * other.b

    def __sub__(self, other):
        return LatticeVector(self.a - other.a, self.b - other.b)

    def scale(self, k: int) -> LatticeVector:
        return LatticeVector(k * self.a, k * self.b)


@dataclass(frozen=True)
class LiftResult:
    outcome: Fraction | None
    shortest: LatticeVector
    cofactor: int
    steps: int = 0

    @property
    def ok(self) -> bool:
        return self.outcome is not None


class Diagnosis(NamedTuple):
    factors: list[int]
    remainder: int


def farey_preimage(N: int, r: int) -> Fraction | None:
    """Farey preimage of ``r`` modulo ``N``: a/b with 2a^2, 2b^2 <= N - 1.

    Returns ``None`` if ``r`` is not in the image of the Farey map.
    """
    if N < 2 or not 0 <= r < N:
        raise ValueError(f"need N >= 2 and 0 <= r < N, got N={N}, r={r}")
    a0, b0, a1, b1 = N, 0, r, 1
    while 2 * a1 * a1 > N - 1:
        q, a2 = divmod(a0, a1)
        a0, b0, a1, b1 = a1, b1, a2, b0 - q * b1
    if 2 * b1 * b1 <= N - 1 and gcd(a1, b1) == 1:
        return Fraction(a1, b1)
    return None


def _round_div(n: int, d: int) -> int:
    # nearest integer, ties to even
    return round(Fraction(n, d))


def gaussian_reduce(
    v1: LatticeVector | tuple[int, int], v2: LatticeVector | tuple[int, int]
) -> tuple[LatticeVector, LatticeVector, list[LatticeVector]]:
    """Reduce the rank-2 basis ``(v1, v2)``.

    Returns ``(shortest, second, trace)`` where ``trace`` lists every
    remainder vector produced, including the final one that failed to be
    shorter than its predecessor.
    """
    u, v = LatticeVector(*v1), LatticeVector(*v2)
    if u.a * v.b - u.b * v.a == 0:
        raise ValueError(f"basis vectors {tuple(u)}, {tuple(v)} are linearly dependent")
    if v.norm_sq > u.norm_sq:
        u, v = v, u
    trace = []
    while True:
        w = u - v.scale(_round_div(u.dot(v), v.norm_sq))
        trace.append(w)
        if w.norm_sq >= v.norm_sq:
            return v, w, trace
        u, v = v, w


def error_tolerant_lift(N: int, r: int) -> LiftResult:
    """Rational number determined by a shortest vector of ``<(N,0),(r,1)>``.

    The lift succeeds iff the shortest vector has squared norm below ``N``.
    """
    if N < 2 or not 0 <= r < N:
        raise ValueError(f"need N >= 2 and 0 <= r < N, got N={N}, r={r}")
    shortest, _, trace = gaussian_reduce((N, 0), (r, 1))
    a, b = shortest
    cofactor = gcd(a, b)
    if shortest.norm_sq >= N or b == 0:
        return LiftResult(None, shortest, cofactor, len(trace))
    return LiftResult(Fraction(a, b), shortest, cofactor, len(trace))


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def cn_preimage(N: int, r: int, bound: int = 10**6) -> Fraction | None:
    """Exhaustive-search oracle for the error tolerant lifting map.

    Looks for ``q | N`` and coprime ``u >= 0, v != 0`` with
    ``u^2 + v^2 < N/q^2`` and ``u = v*r (mod N/q)``; returns ``u/v`` or None.
    Only meant for small ``N``.
    """
    if N > bound:
        raise ValueError(f"N={N} exceeds oracle bound {bound}")
    if not 0 <= r < N:
        raise ValueError("need 0 <= r < N")
    for q in _divisors(N):
        M = N // q
        # u^2 + v^2 < N/q^2  <=>  (u^2 + v^2) * q^2 < N
        vmax = isqrt((N - 1) // (q * q)) if N > q * q else 0
        for vabs in range(1, vmax + 1):
            for v in (vabs, -vabs):
                u = v * r % M
                while (u * u + v * v) * q * q < N:
                    if gcd(u, v) == 1:
                        return Fraction(u, v)
                    u += M
    return None


def cn_membership(N: int, r: int, bound: int = 10**6) -> bool:
    return cn_preimage(N, r, bound) is not None


def diagnose_bad_factors(result: LiftResult, N: int, trial_bound: int = 10**6) -> Diagnosis:
    """Prime factors of ``gcd(cofactor, N)`` found by trial division.

    Whatever is left unfactored above ``trial_bound`` is returned as the
    remainder (1 when fully factored).
    """
    n = gcd(result.cofactor, N)
    factors = []
    d = 2
    while d * d <= n and d <= trial_bound:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1 and n <= trial_bound * trial_bound:
        # no divisor up to sqrt(n), so n is prime
        factors.append(n)
        n = 1
    return Diagnosis(factors, n)
