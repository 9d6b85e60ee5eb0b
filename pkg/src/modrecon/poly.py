"""Sparse multivariate polynomials over Q and prime fields, and Groebner bases.

A polynomial is a dict mapping exponent tuples to nonzero coefficients.
Coefficients are :class:`~fractions.Fraction` over Q (characteristic 0) and
plain ints in ``[1, p-1]`` over ``F_p``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Callable, Iterable, Sequence

__all__ = [
    "MonomialOrdering",
    "Ring",
    "Polynomial",
    "GroebnerBasis",
    "Fingerprint",
    "reduce_poly_mod_p",
    "normal_form",
    "s_polynomial",
    "buchberger",
    "is_groebner",
    "fingerprint",
    "clear_denominators",
    "parse_polynomial",
    "parse_ideal",
    "format_ideal",
    "format_monomial",
]

Monomial = tuple[int, ...]
Fingerprint = tuple[Monomial, ...]


@dataclass(frozen=True)
class MonomialOrdering:
    """Global monomial ordering: ``lex`` or ``degrevlex``.

    ``perm`` lists variable indices from most to least significant; ``None``
    means the ring's variable order.
    """

    kind: str = "degrevlex"
    perm: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("lex", "degrevlex"):
            raise ValueError(f"unsupported ordering {self.kind!r}")

    @cached_property
    def key(self) -> Callable[[Monomial], tuple] | None:
        """Sort key (larger key = larger monomial); None means the tuple itself."""
        perm = self.perm
        if self.kind == "lex":
            if perm is None:
                return None
            return lambda e: tuple(e[i] for i in perm)
        if perm is None:
            return lambda e: (sum(e), tuple(-x for x in reversed(e)))
        rev = tuple(reversed(perm))
        return lambda e: (sum(e), tuple(-e[i] for i in rev))

    def sort_key(self, e: Monomial) -> tuple:
        k = self.key
        return e if k is None else k(e)


@dataclass(frozen=True)
class Ring:
    vars: tuple[str, ...]
    order: MonomialOrdering = field(default_factory=MonomialOrdering)
    char: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def with_char(self, p: int) -> Ring:
        return Ring(self.vars, self.order, p)

    def coerce(self, c) -> Fraction | int:
        """Map a number into the coefficient field (raises ZeroDivisionError for 1/0 mod p)."""
        if self.char:
            c = Fraction(c)
            return c.numerator * pow(c.denominator, -1, self.char) % self.char
        return Fraction(c)

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return self.constant(1)

    def constant(self, c) -> Polynomial:
        c = self.coerce(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def gen(self, name: str | int) -> Polynomial:
        i = self.vars.index(name) if isinstance(name, str) else name
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): self.coerce(1)})

    def gens(self) -> tuple[Polynomial, ...]:
        return tuple(self.gen(i) for i in range(self.nvars))

    def parse(self, text: str) -> Polynomial:
        return parse_polynomial(text, self)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def _mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def format_monomial(e: Monomial, names: Sequence[str]) -> str:
    parts = [n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k]
    return "*".join(parts) if parts else "1"


class Polynomial:
    def __init__(self, ring: Ring, terms: dict[Monomial, Fraction | int]):
        self.ring = ring
        self.terms = terms

    @classmethod
    def from_terms(cls, ring: Ring, terms: Iterable[tuple[Monomial, object]]) -> Polynomial:
        out: dict[Monomial, Fraction | int] = {}
        p = ring.char
        for e, c in terms:
            e = tuple(e)
            if len(e) != ring.nvars:
                raise ValueError(f"monomial {e} has wrong length for {ring.vars}")
            v = out.get(e, 0) + ring.coerce(c)
            if p:
                v %= p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return cls(ring, out)

    # -- basic queries -----------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @cached_property
    def LM(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=self.ring.order.key)

    @property
    def LC(self):
        return self.terms[self.LM]

    def sorted_terms(self) -> list[tuple[Monomial, Fraction | int]]:
        return sorted(self.terms.items(), key=lambda t: self.ring.order.sort_key(t[0]), reverse=True)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def coefficients(self) -> list:
        return list(self.terms.values())

    def monic(self) -> Polynomial:
        if not self.terms:
            return self
        return self.scale(self._inv(self.LC))

    def _inv(self, c):
        p = self.ring.char
        return pow(c, -1, p) if p else 1 / c

    def scale(self, c) -> Polynomial:
        c = self.ring.coerce(c)
        p = self.ring.char
        if not c:
            return self.ring.zero()
        if p:
            return Polynomial(self.ring, {e: v * c % p for e, v in self.terms.items()})
        return Polynomial(self.ring, {e: v * c for e, v in self.terms.items()})

    def mul_term(self, m: Monomial, c) -> Polynomial:
        p = self.ring.char
        if p:
            return Polynomial(self.ring, {_mono_mul(e, m): v * c % p for e, v in self.terms.items()})
        return Polynomial(self.ring, {_mono_mul(e, m): v * c for e, v in self.terms.items()})

    def diff(self, var: str | int) -> Polynomial:
        i = self.ring.vars.index(var) if isinstance(var, str) else var
        terms = []
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                terms.append((tuple(e2), c * e[i]))
        return Polynomial.from_terms(self.ring, terms)

    # -- arithmetic ----------------------------------------------------------
    def _coerce_other(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.ring.vars != self.ring.vars or other.ring.char != self.ring.char:
                raise ValueError("polynomials live in different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    def _add(self, other: Polynomial, sign: int) -> Polynomial:
        p = self.ring.char
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + sign * c
            if p:
                v %= p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial(self.ring, out)

    def __add__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return other
        return self._add(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return other
        return self._add(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce_other(other)
        if other is NotImplemented:
            return other
        p = self.ring.char
        out: dict[Monomial, Fraction | int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _mono_mul(e1, e2)
                v = out.get(e, 0) + c1 * c2
                if p:
                    v %= p
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Polynomial:
        if k < 0:
            raise ValueError("negative exponent")
        result, base = self.ring.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.ring.vars == other.ring.vars
            and self.ring.char == other.ring.char
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ring.vars, self.ring.char, frozenset(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self.ring.vars
        out = []
        for e, c in self.sorted_terms():
            neg = c < 0
            c = -c if neg else c
            mono = format_monomial(e, names)
            if mono == "1":
                body = str(c)
            elif c == 1:
                body = mono
            else:
                body = f"{c}*{mono}"
            if not out:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Polynomial({self})" if not self.ring.char else f"Polynomial({self} mod {self.ring.char})"


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str, names: Sequence[str]) -> list[tuple[str, object]]:
    by_len = sorted(names, key=len, reverse=True)
    toks: list[tuple[str, object]] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        num, ident, op = m.groups()
        if num is not None:
            toks.append(("num", int(num)))
        elif ident is not None:
            # split juxtaposed variable names such as ``xy``
            while ident:
                for n in by_len:
                    if ident.startswith(n):
                        toks.append(("var", n))
                        ident = ident[len(n):]
                        break
                else:
                    raise ValueError(f"unknown variable in {ident!r}")
                if ident[:1].isdigit():
                    raise ValueError(f"unknown variable near {ident!r}")
        else:
            if op == "*" and text[pos:pos + 1] == "*":
                pos += 1
                op = "^"
            if op not in "+-*/^()":
                raise ValueError(f"unexpected character {op!r}")
            toks.append(("op", op))
    return toks


class _Parser:
    def __init__(self, text: str, ring: Ring):
        self.ring = ring
        self.toks = _tokenize(text, ring.vars)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op: str):
        if self.take() != ("op", op):
            raise ValueError(f"expected {op!r}")

    def parse(self) -> Polynomial:
        if not self.toks:
            raise ValueError("empty polynomial")
        f = self.expr()
        if self.i != len(self.toks):
            raise ValueError(f"trailing input at token {self.peek()}")
        return f

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        f = self.term() if sign > 0 else -self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            f = f + t if op == "+" else f - t
        return f

    def term(self) -> Polynomial:
        f = self.factor()
        while True:
            kind, val = self.peek()
            if (kind, val) == ("op", "*"):
                self.take()
                f = f * self.factor()
            elif (kind, val) == ("op", "/"):
                self.take()
                d = self.factor()
                if not d.terms or any(any(e) for e in d.terms):
                    raise ValueError("can only divide by a nonzero constant")
                f = f * d._inv(next(iter(d.terms.values())))
            elif kind in ("num", "var") or (kind, val) == ("op", "("):
                f = f * self.factor()
            else:
                return f

    def factor(self) -> Polynomial:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, k = self.take()
            if kind != "num":
                raise ValueError("exponent must be a non-negative integer")
            base = base ** k
        return base

    def atom(self) -> Polynomial:
        kind, val = self.take()
        if kind == "num":
            return self.ring.constant(val)
        if kind == "var":
            return self.ring.gen(val)
        if (kind, val) == ("op", "("):
            f = self.expr()
            self.expect(")")
            return f
        raise ValueError(f"unexpected token {val!r}")


def parse_polynomial(text: str, ring: Ring) -> Polynomial:
    """Parse ``3/4*x^2*y - z + 1``-style input; ``*`` may be omitted."""
    return _Parser(text, ring).parse()


def parse_ideal(text: str) -> tuple[Ring, list[Polynomial]]:
    """Parse an ideal file: ``vars:`` line, ``order:`` line, one polynomial per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) < 2 or not lines[0].startswith("vars:") or not lines[1].startswith("order:"):
        raise ValueError("ideal file must start with 'vars:' and 'order:' lines")
    names = tuple(v.strip() for v in lines[0][5:].split(",") if v.strip())
    if not names:
        raise ValueError("no variables declared")
    ring = Ring(names, MonomialOrdering(lines[1][6:].strip()))
    return ring, [parse_polynomial(ln, ring) for ln in lines[2:]]


def format_ideal(ring: Ring, polys: Iterable[Polynomial]) -> str:
    head = f"vars: {','.join(ring.vars)}\norder: {ring.order.kind}\n"
    return head + "".join(f"{f}\n" for f in polys)


# -- reduction mod p -------------------------------------------------------------


def reduce_poly_mod_p(f: Polynomial, p: int) -> Polynomial | None:
    """Coefficientwise image of ``f`` in ``F_p[X]``; None if a denominator vanishes mod p."""
    ring = f.ring.with_char(p)
    out = {}
    for e, c in f.terms.items():
        c = Fraction(c)
        if c.denominator % p == 0:
            return None
        v = c.numerator * pow(c.denominator, -1, p) % p
        if v:
            out[e] = v
    return Polynomial(ring, out)


# -- division and Groebner bases -----------------------------------------------


def normal_form(f: Polynomial, G: Sequence[Polynomial], ordering: MonomialOrdering | None = None) -> Polynomial:
    """Fully reduce ``f`` by ``G``; the first divisor in list order is used."""
    ring = f.ring
    if ordering is not None and ordering != ring.order:
        ring = Ring(ring.vars, ordering, ring.char)
    key = ring.order.key
    p = ring.char
    reducers = []
    for g in G:
        if not g.terms:
            raise ValueError("cannot reduce by the zero polynomial")
        lm = max(g.terms, key=key)
        lc = g.terms[lm]
        inv = pow(lc, -1, p) if p else 1 / lc
        tail = [(e, c) for e, c in g.terms.items() if e != lm]
        reducers.append((lm, inv, tail))
    work = dict(f.terms)
    rem: dict[Monomial, Fraction | int] = {}
    while work:
        m = max(work, key=key)
        c = work.pop(m)
        for lm, inv, tail in reducers:
            if all(x <= y for x, y in zip(lm, m)):
                q = c * inv
                shift = tuple(x - y for x, y in zip(m, lm))
                for e, gc in tail:
                    e2 = tuple(x + y for x, y in zip(e, shift))
                    v = work.get(e2, 0) - q * gc
                    if p:
                        v %= p
                    if v:
                        work[e2] = v
                    else:
                        work.pop(e2, None)
                break
        else:
            rem[m] = c
    return Polynomial(ring, rem)


def s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    L = _mono_lcm(f.LM, g.LM)
    a = f.mul_term(_mono_div(L, f.LM), f._inv(f.LC))
    b = g.mul_term(_mono_div(L, g.LM), g._inv(g.LC))
    return a - b


@dataclass(frozen=True, eq=False)
class GroebnerBasis:
    elements: tuple[Polynomial, ...]
    ring: Ring
    reduced: bool = True

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    @property
    def ordering(self) -> MonomialOrdering:
        return self.ring.order

    @property
    def char(self) -> int:
        return self.ring.char

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __eq__(self, other):
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return self.ring.vars == other.ring.vars and self.char == other.char and self.elements == other.elements

    def __hash__(self):
        return hash((self.ring.vars, self.char, self.elements))

    def __str__(self):
        return "\n".join(str(g) for g in self.elements)

    def __repr__(self):
        return f"GroebnerBasis([{', '.join(map(str, self.elements))}])"

    @classmethod
    def from_polys(cls, polys: Iterable[Polynomial], ring: Ring, reduced: bool = True) -> GroebnerBasis:
        polys = sorted(polys, key=lambda g: ring.order.sort_key(g.LM), reverse=True)
        return cls(tuple(polys), ring, reduced)

    def reduce_mod(self, p: int) -> GroebnerBasis | None:
        out = []
        for g in self.elements:
            gp = reduce_poly_mod_p(g, p)
            if gp is None:
                return None
            out.append(gp)
        return GroebnerBasis(tuple(out), self.ring.with_char(p), self.reduced)

    def fingerprint(self) -> Fingerprint:
        return fingerprint(self)


def _interreduce(G: list[Polynomial], ring: Ring) -> list[Polynomial]:
    key = ring.order.sort_key
    G = sorted((g.monic() for g in G if g), key=lambda g: key(g.LM))
    minimal: list[Polynomial] = []
    for g in G:
        # ascending LM order, so only earlier elements can divide g's LM
        if not any(_divides(h.LM, g.LM) for h in minimal):
            minimal.append(g)
    out = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        out.append(normal_form(g, others).monic() if others else g)
    return sorted(out, key=lambda g: key(g.LM), reverse=True)


def _update(f: list[Polynomial], G: list[int], B: set[tuple[int, int]], ih: int):
    """Add f[ih] to the basis indices G and pair set B, pruning useless pairs."""
    mh = f[ih].LM
    lcm = {ig: _mono_lcm(mh, f[ig].LM) for ig in G}

    def disjoint(ig):
        return all(min(x, y) == 0 for x, y in zip(mh, f[ig].LM))

    # new pairs (h, g): drop those whose lcm is a proper multiple of another new lcm
    C = sorted(G)
    D: list[int] = []
    for k, ig in enumerate(C):
        others = C[k + 1:] + D
        if disjoint(ig) or not any(_divides(lcm[o], lcm[ig]) for o in others):
            D.append(ig)
    E = {(min(ig, ih), max(ig, ih)) for ig in D if not disjoint(ig)}

    # old pairs survive unless h's LM strictly divides their lcm
    B_new = set()
    for i, j in B:
        L = _mono_lcm(f[i].LM, f[j].LM)
        if not _divides(mh, L) or _mono_lcm(f[i].LM, mh) == L or _mono_lcm(f[j].LM, mh) == L:
            B_new.add((i, j))
    G_new = [ig for ig in G if not _divides(mh, f[ig].LM)]
    G_new.append(ih)
    return G_new, B_new | E


def buchberger(generators: Iterable[Polynomial], ordering: MonomialOrdering | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``generators``.

    Pairs are taken smallest lcm first in the monomial order; new pairs
    and old pairs are pruned with the Gebauer-Moeller criteria, and basis
    elements made redundant by a new leading monomial stop being used.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator to know the ring")
    ring = gens[0].ring
    if ordering is not None and ordering != ring.order:
        ring = Ring(ring.vars, ordering, ring.char)
        gens = [Polynomial(ring, g.terms) for g in gens]
    key = ring.order.sort_key
    f = list(dict.fromkeys(g.monic() for g in gens if g))
    if not f:
        return GroebnerBasis((), ring)
    G: list[int] = []
    B: set[tuple[int, int]] = set()
    for ih in sorted(range(len(f)), key=lambda i: (key(f[i].LM), i)):
        G, B = _update(f, G, B, ih)

    while B:
        i, j = min(B, key=lambda ij: (key(_mono_lcm(f[ij[0]].LM, f[ij[1]].LM)), ij))
        B.discard((i, j))
        reducers = sorted((f[k] for k in G), key=lambda g: key(g.LM))
        h = normal_form(s_polynomial(f[i], f[j]), reducers)
        if h:
            f.append(h.monic())
            G, B = _update(f, G, B, len(f) - 1)
    return GroebnerBasis(tuple(_interreduce([f[k] for k in G], ring)), ring, True)


def is_groebner(G: Sequence[Polynomial]) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    G = list(G)
    return all(
        not normal_form(s_polynomial(G[i], G[j]), G)
        for j in range(len(G))
        for i in range(j)
    )


def fingerprint(G: GroebnerBasis | Sequence[Polynomial]) -> Fingerprint:
    """Leading monomials of ``G``, largest first."""
    elems = list(G)
    if not elems:
        return ()
    key = elems[0].ring.order.sort_key
    return tuple(sorted((g.LM for g in elems), key=key, reverse=True))


def clear_denominators(f: Polynomial) -> Polynomial:
    """Rescale ``f`` over Q to coprime integer coefficients with positive leading coefficient."""
    if not f.terms:
        raise ValueError("cannot normalise the zero polynomial")
    if f.ring.char:
        raise ValueError("clear_denominators works over Q only")
    coeffs = [Fraction(c) for c in f.terms.values()]
    den = lcm(*(c.denominator for c in coeffs))
    num = gcd(*(c.numerator for c in coeffs))
    scale = Fraction(den, num)
    if f.LC < 0:
        scale = -scale
    return Polynomial(f.ring, {e: Fraction(c) * scale for e, c in f.terms.items()})
