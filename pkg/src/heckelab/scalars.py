"""Exact arithmetic in the coefficient tower Q(zeta_n)(sqrt p).

An element is a rational linear combination of monomials zeta^a * sqrt(p)^b
with 0 <= a < n and b in {0, 1}.  Canonical form: the zeta-polynomial is
reduced modulo the n-th cyclotomic polynomial and sqrt(p)^2 collapses to p.
Equality is decidable; conjugation fixes Q and sqrt(p) and sends
zeta |-> zeta^(-1).

The cyclotomic order n and the prime p are fixed per ScalarContext; mixing
contexts raises ContextMismatchError instead of coercing.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

Rationalish = Union[int, Fraction]


class ContextMismatchError(ValueError):
    """Two scalars from different (n, p) contexts were combined."""


class NotRealEmbeddableError(ValueError):
    """A sign/ordering question was asked of a scalar with no decidable real embedding."""


class NotInTowerError(ValueError):
    """A requested value (root, sqrt p, ...) does not exist in the context's tower."""


def _poly_trim(c: list[Fraction]) -> list[Fraction]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_divmod(num: list[Fraction], den: list[Fraction]):
    num = list(num)
    q = [Fraction(0)] * max(0, len(num) - len(den) + 1)
    while len(num) >= len(den) and _poly_trim(num):
        shift = len(num) - len(den)
        factor = num[-1] / den[-1]
        q[shift] = factor
        for i, d in enumerate(den):
            num[i + shift] -= factor * d
        _poly_trim(num)
    return q, num


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[Fraction, ...]:
    """Coefficients (low to high) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("cyclotomic order must be >= 1")
    num = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num, rem = _poly_divmod(num, list(cyclotomic_polynomial(d)))
            assert not rem, "cyclotomic division must be exact"
    return tuple(num)


def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


_TOKEN = re.compile(r"\s*(?:(\d+/\d+|\d+)|(z(?:\^\d+)?)|(r)|(\*)|(\+)|(-))")


@dataclass(frozen=True)
class ScalarContext:
    """Fixed coefficient context: cyclotomic order n and optional prime p."""

    n: int = 1
    p: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("cyclotomic order must be >= 1")
        if self.p is not None and self.p < 2:
            raise ValueError("p must be a prime >= 2")

    @property
    def degree(self) -> int:
        return euler_phi(self.n)

    # -- polynomial plumbing over Q(zeta_n) -------------------------------

    def _reduction_table(self) -> list[tuple[Fraction, ...]]:
        # x^k mod Phi_n for k up to 2*(deg-1); cached on the (n,)-key.
        return _reduction_table(self.n)

    def _zero_poly(self) -> tuple[Fraction, ...]:
        return (Fraction(0),) * self.degree

    def _reduce(self, coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
        deg = self.degree
        table = self._reduction_table()
        out = [Fraction(0)] * deg
        for k, c in enumerate(coeffs):
            if c == 0:
                continue
            if k < deg:
                out[k] += c
            else:
                row = table[k]
                for i in range(deg):
                    out[i] += c * row[i]
        return tuple(out)

    def _poly_mul(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
        prod = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y == 0:
                    continue
                prod[i + j] += x * y
        return self._reduce(prod)

    def _poly_inv(self, a: Sequence[Fraction]) -> tuple[Fraction, ...]:
        # extended euclid against Phi_n; Phi_n irreducible over Q, so any
        # nonzero residue is invertible.
        if all(c == 0 for c in a):
            raise ZeroDivisionError("division by zero scalar")
        r0, r1 = list(cyclotomic_polynomial(self.n)), _poly_trim(list(a))
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while _poly_trim(list(r1)):
            q, r = _poly_divmod(r0, r1)
            qs1 = [Fraction(0)] * (len(q) + len(s1) - 1)
            for i, x in enumerate(q):
                for j, y in enumerate(s1):
                    qs1[i + j] += x * y
            s = [Fraction(0)] * max(len(s0), len(qs1))
            for i, x in enumerate(s0):
                s[i] += x
            for i, x in enumerate(qs1):
                s[i] -= x
            r0, r1, s0, s1 = r1, r, s1, _poly_trim(s)
            if not r1:
                break
        # r0 is the gcd, a nonzero constant
        g = r0[0]
        return self._reduce([c / g for c in s0])

    def _conj_poly(self, a: Sequence[Fraction]) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * (self.n + 1)
        for k, c in enumerate(a):
            if c == 0:
                continue
            out[(self.n - k) % self.n] += c
        return self._reduce(out)

    # -- constructors ------------------------------------------------------

    def scalar(self, value) -> "Scalar":
        """Coerce an int, Fraction, string, or Scalar into this context."""
        if isinstance(value, Scalar):
            if value.ctx != self:
                raise ContextMismatchError(f"scalar from {value.ctx} used in {self}")
            return value
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, (int, Fraction)):
            a = [Fraction(value)] + [Fraction(0)] * (self.degree - 1)
            return Scalar(self, tuple(a), self._zero_poly())
        raise TypeError(f"cannot coerce {type(value).__name__} to Scalar")

    @property
    def zero(self) -> "Scalar":
        return self.scalar(0)

    @property
    def one(self) -> "Scalar":
        return self.scalar(1)

    def zeta(self, power: int = 1) -> "Scalar":
        mono = [Fraction(0)] * (self.n + 1)
        mono[power % self.n] = Fraction(1)
        return Scalar(self, self._reduce(mono), self._zero_poly())

    def sqrt_p(self) -> "Scalar":
        if self.p is None:
            raise NotInTowerError("context has no prime p, so no sqrt(p)")
        b = [Fraction(1)] + [Fraction(0)] * (self.degree - 1)
        return Scalar(self, self._zero_poly(), tuple(b))

    def roots_of_unity(self) -> list["Scalar"]:
        """All roots of unity in the tower: the group generated by -1 and zeta_n."""
        seen = {}
        for k in range(self.n):
            for sign in (1, -1):
                s = self.zeta(k) * sign
                seen.setdefault(s, s)
        return sorted(seen.values(), key=str)

    # -- parsing -----------------------------------------------------------

    def parse(self, text: str) -> "Scalar":
        """Parse the serialization grammar: rationals 'a/b', sqrt p 'r', zeta 'z'."""
        pos = 0
        total = self.zero
        sign = 1
        term: Optional[Scalar] = None
        pending_mul = False
        pending_sign = False
        saw_term = False

        def flush():
            nonlocal total, term, sign
            if term is not None:
                total = total + term * sign
            term, sign = None, 1

        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                if text[pos:].strip():
                    raise ValueError(f"cannot parse scalar at: {text[pos:]!r}")
                break
            pos = m.end()
            rat, zt, rt, star, plus, minus = m.groups()
            if star:
                if term is None:
                    raise ValueError(f"misplaced '*' in {text!r}")
                pending_mul = True
                continue
            if plus or minus:
                if pending_mul:
                    raise ValueError(f"dangling '*' in {text!r}")
                if term is None:
                    # leading or repeated sign
                    sign = sign * (-1 if minus else 1)
                else:
                    flush()
                    sign = -1 if minus else 1
                pending_sign = True
                continue
            if rat is not None:
                factor = self.scalar(Fraction(rat))
            elif zt is not None:
                k = int(zt[2:]) if "^" in zt else 1
                factor = self.zeta(k)
            else:
                factor = self.sqrt_p()
            term = factor if term is None else term * factor
            pending_mul = False
            pending_sign = False
            saw_term = True
        if pending_mul:
            raise ValueError(f"dangling '*' in {text!r}")
        if pending_sign or not saw_term:
            raise ValueError(f"incomplete scalar expression: {text!r}")
        flush()
        return total


@lru_cache(maxsize=None)
def _reduction_table(n: int) -> list[tuple[Fraction, ...]]:
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    table: list[tuple[Fraction, ...]] = []
    for k in range(max(2 * deg - 1, n + 1)):
        mono = [Fraction(0)] * (k + 1)
        mono[k] = Fraction(1)
        _, rem = _poly_divmod(mono, list(phi))
        rem = rem + [Fraction(0)] * (deg - len(rem))
        table.append(tuple(rem))
    return table


class Scalar:
    """Immutable element of Q(zeta_n)(sqrt p) in canonical form."""

    __slots__ = ("ctx", "a", "b", "_hash")

    def __init__(self, ctx: ScalarContext, a: tuple[Fraction, ...], b: tuple[Fraction, ...]):
        self.ctx = ctx
        self.a = a  # zeta-polynomial of the rational part
        self.b = b  # zeta-polynomial of the sqrt(p) part
        self._hash = None

    # -- ring structure ----------------------------------------------------

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.ctx != self.ctx:
                raise ContextMismatchError(f"mixing contexts {self.ctx} and {other.ctx}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.scalar(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(
            self.ctx,
            tuple(x + y for x, y in zip(self.a, o.a)),
            tuple(x + y for x, y in zip(self.b, o.b)),
        )

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.ctx, tuple(-x for x in self.a), tuple(-x for x in self.b))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        ctx = self.ctx
        aa = ctx._poly_mul(self.a, o.a)
        bb = ctx._poly_mul(self.b, o.b)
        ab = ctx._poly_mul(self.a, o.b)
        ba = ctx._poly_mul(self.b, o.a)
        p = ctx.p if ctx.p is not None else 0
        rat = tuple(x + p * y for x, y in zip(aa, bb))
        irr = tuple(x + y for x, y in zip(ab, ba))
        return Scalar(ctx, rat, irr)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        ctx = self.ctx
        if self.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        if all(c == 0 for c in self.b):
            return Scalar(ctx, ctx._poly_inv(self.a), ctx._zero_poly())
        # (u + v r)^(-1) = (u - v r) / (u^2 - p v^2), the norm living in Q(zeta)
        p = ctx.p if ctx.p is not None else 0
        uu = ctx._poly_mul(self.a, self.a)
        vv = ctx._poly_mul(self.b, self.b)
        norm = tuple(x - p * y for x, y in zip(uu, vv))
        w = ctx._poly_inv(norm)
        return Scalar(ctx, ctx._poly_mul(self.a, w), tuple(-c for c in ctx._poly_mul(self.b, w)))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ctx.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- predicates and structure ------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.a) and all(c == 0 for c in self.b)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.a[1:]) and all(c == 0 for c in self.b)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise NotRealEmbeddableError(f"{self} is not rational")
        return self.a[0]

    def rational_and_r_parts(self) -> tuple[Fraction, Fraction]:
        """(u, v) with self = u + v*sqrt(p), or raise if zeta genuinely enters."""
        if any(c != 0 for c in self.a[1:]) or any(c != 0 for c in self.b[1:]):
            raise NotRealEmbeddableError(f"{self} has a nontrivial cyclotomic part")
        return self.a[0], self.b[0]

    def real_sign(self) -> int:
        """Sign under the embedding sending sqrt(p) to the positive real root."""
        u, v = self.rational_and_r_parts()
        if v == 0:
            return (u > 0) - (u < 0)
        if self.ctx.p is None:
            raise NotInTowerError("sqrt(p) part present but context has no p")
        if u == 0:
            return (v > 0) - (v < 0)
        if u > 0 and v > 0:
            return 1
        if u < 0 and v < 0:
            return -1
        # opposite signs: compare u^2 against p v^2
        if u * u > self.ctx.p * v * v:
            return 1 if u > 0 else -1
        return 1 if v > 0 else -1

    def conj(self) -> "Scalar":
        ctx = self.ctx
        return Scalar(ctx, ctx._conj_poly(self.a), ctx._conj_poly(self.b))

    # -- hashing, equality, display ------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ctx.scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.ctx == other.ctx and self.a == other.a and self.b == other.b

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, self.a, self.b))
        return self._hash

    def __str__(self) -> str:
        parts: list[tuple[Fraction, str]] = []
        for which, coeffs in ((0, self.a), (1, self.b)):
            for k, c in enumerate(coeffs):
                if c == 0:
                    continue
                mono = []
                if k == 1:
                    mono.append("z")
                elif k > 1:
                    mono.append(f"z^{k}")
                if which == 1:
                    mono.append("r")
                parts.append((c, "*".join(mono)))
        if not parts:
            return "0"
        out = []
        for i, (c, mono) in enumerate(parts):
            neg = c < 0
            mag = -c if neg else c
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            if i == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Scalar({self})"


# -- the named operations -----------------------------------------------------


def conj(c: Scalar) -> Scalar:
    """The involution fixing Q and sqrt(p), sending zeta to zeta^(-1)."""
    return c.conj()


def abs2(c: Scalar) -> Scalar:
    """c * conj(c); always fixed by conjugation."""
    return c * c.conj()


def half_power_of_p(ctx: ScalarContext, k: int) -> Scalar:
    """sqrt(p)^k in canonical form; k may be negative."""
    if ctx.p is None:
        raise NotInTowerError("context has no prime p")
    q, rem = divmod(k, 2)
    out = ctx.scalar(Fraction(ctx.p) ** q)
    if rem:
        out = out * ctx.sqrt_p()
    return out


@dataclass(frozen=True)
class CoeffPlusRule:
    """Total selection predicate on invertible scalars q != 1: which of {q, 1/q} is 'plus'."""

    name: str
    predicate: Callable[[Scalar], bool] = field(compare=False)

    def __call__(self, q: Scalar) -> bool:
        return self.predicate(q)


def _default_plus(q: Scalar) -> bool:
    # plus iff the real embedding satisfies q > 1 or q <= -1.  The q <= -1
    # clause keeps the rule total: for negative q exactly one of {q, 1/q} has
    # absolute value >= 1, and q = -1 is its own inverse so it must be plus.
    if (q - 1).real_sign() > 0:
        return True
    return q.real_sign() < 0 and (q + 1).real_sign() <= 0


def default_coeffplus_rule() -> CoeffPlusRule:
    return CoeffPlusRule("real>1", _default_plus)


def coeffplus_select(rule: CoeffPlusRule, q: Scalar) -> Scalar:
    """The member of {q, q^(-1)} selected by the rule.

    Raises on q = 0 or q = 1 (outside the rule's domain) and whenever the rule
    fails to select exactly one member.
    """
    if q.is_zero():
        raise ValueError("q = 0 is not invertible")
    if q == 1:
        raise ValueError("q = 1 is excluded from the plus-selection domain")
    qinv = q.inverse()
    if q == qinv:
        if not rule(q):
            raise ValueError(f"rule {rule.name} rejects self-inverse {q}")
        return q
    pq, pinv = rule(q), rule(qinv)
    if pq == pinv:
        raise ValueError(f"rule {rule.name} selects {'both' if pq else 'neither'} of {{{q}, {qinv}}}")
    return q if pq else qinv


def scalar_sqrt(ctx: ScalarContext, u: Scalar) -> Scalar:
    """A square root of u in the tower, if one exists.

    Searches the forms (alpha + beta*r) and zeta_4*(alpha + beta*r) with
    rational alpha, beta.  Raises NotInTowerError with the needed extension
    otherwise.
    """
    def rational_sqrt(f: Fraction) -> Optional[Fraction]:
        if f < 0:
            return None
        pn, qd = f.numerator, f.denominator
        rp, rq = math.isqrt(pn), math.isqrt(qd)
        if rp * rp == pn and rq * rq == qd:
            return Fraction(rp, rq)
        return None

    def real_sqrt(u0: Fraction, u1: Fraction) -> Optional[Scalar]:
        # solve (alpha + beta r)^2 = u0 + u1 r
        p = ctx.p
        if u1 == 0:
            a = rational_sqrt(u0)
            if a is not None:
                return ctx.scalar(a)
            if p is not None:
                bsq = rational_sqrt(u0 / p)
                if bsq is not None:
                    return ctx.scalar(bsq) * ctx.sqrt_p()
            return None
        if p is None:
            return None
        # alpha = u1 / (2 beta); p t^2 - u0 t + u1^2/4 = 0 with t = beta^2
        disc = u0 * u0 - p * u1 * u1
        rd = rational_sqrt(disc)
        if rd is None:
            return None
        for t in ((u0 + rd) / (2 * p), (u0 - rd) / (2 * p)):
            beta = rational_sqrt(t)
            if beta and beta != 0:
                alpha = u1 / (2 * beta)
                cand = ctx.scalar(alpha) + ctx.scalar(beta) * ctx.sqrt_p()
                if cand * cand == ctx.scalar(u0) + ctx.scalar(u1) * ctx.sqrt_p():
                    return cand
        return None

    try:
        u0, u1 = u.rational_and_r_parts()
    except NotRealEmbeddableError:
        raise NotInTowerError(f"sqrt of {u}: only real-embeddable radicands are supported")
    root = real_sqrt(u0, u1)
    if root is not None:
        return root
    # try zeta_4 * sqrt(-u)
    if ctx.n % 4 == 0:
        root = real_sqrt(-u0, -u1)
        if root is not None:
            return ctx.zeta(ctx.n // 4) * root
        raise NotInTowerError(f"no square root of {u} in Q(zeta_{ctx.n})(sqrt {ctx.p})")
    raise NotInTowerError(
        f"no square root of {u} in the tower; adjoining zeta_4 (order divisible by 4) may suffice"
    )
