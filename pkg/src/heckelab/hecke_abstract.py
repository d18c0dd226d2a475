"""The semidirect-product algebra C[Omega, mu] x H(W_aff, q).

Elements are finitely supported maps (Omega element, W_aff element) -> Scalar
on the basis gamma_t * T_w.  W_aff elements are keyed by their exact affine
isometry; Omega elements by the OmegaGroup's keys.  The defining relations:

    T_s * T_v = T_{sv}                        if len(sv) > len(v)
    T_s * T_v = (q_s - 1) T_v + q_s T_{sv}    otherwise
    gamma_t * T_w = T_{t w t^-1} * gamma_t
    gamma_s * gamma_t = mu(s, t) gamma_{st}

Products of general T_u are computed by peeling a reduced word of u from the
left; basis products are memoized on the group context.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from heckelab import linalg
from heckelab.geometry import InnerProduct
from heckelab.reflections import (
    AffineIso,
    OmegaGroup,
    ReflectionGroupData,
    conjugate_simple,
    simple_conjugacy_classes,
)
from heckelab.scalars import (
    CoeffPlusRule,
    Scalar,
    ScalarContext,
    coeffplus_select,
    conj,
)


class CocycleError(ValueError):
    """A map Omega x Omega -> scalars fails the 2-cocycle or normalization rules."""


@dataclass(frozen=True)
class Cocycle:
    """Normalized 2-cocycle on Omega, as a table keyed by Omega keys.

    For infinite cyclic Omega a bicharacter mu(a^i, a^j) = xi^(i*j) is stored
    via its value xi instead of a table.
    """

    ctx: ScalarContext
    table: Optional[dict] = None
    bicharacter_value: Optional[Scalar] = None

    def __call__(self, s, t) -> Scalar:
        if self.table is not None:
            return self.table[(s, t)]
        return self.bicharacter_value ** (s * t)

    @staticmethod
    def trivial(ctx: ScalarContext, omega) -> "Cocycle":
        """Trivial cocycle on an OmegaGroup or any finite group-like."""
        if getattr(omega, "infinite_cyclic", False):
            return Cocycle(ctx, bicharacter_value=ctx.one)
        keys = omega.keys()
        return Cocycle(ctx, table={(a, b): ctx.one for a in keys for b in keys})

    trivial_on = trivial

    @staticmethod
    def from_function(ctx: ScalarContext, omega: OmegaGroup, fn: Callable) -> "Cocycle":
        keys = omega.keys()
        return Cocycle(ctx, table={(a, b): ctx.scalar(fn(a, b)) for a in keys for b in keys})


def validate_cocycle(mu: Cocycle, omega) -> Optional[tuple]:
    """None when mu is a normalized 2-cocycle, else a witness.

    Witnesses: ('normalization', t) or ('cocycle', (v, w, u)).  Exhaustive for
    finite Omega; for infinite cyclic Omega the bicharacter form satisfies the
    identity automatically, so only normalization is checked.
    """
    if mu.table is None:
        if mu.bicharacter_value is None or mu.bicharacter_value.is_zero():
            return ("normalization", 0)
        return None
    keys = omega.keys()
    e = omega.identity_key if hasattr(omega, "identity_key") else omega.e
    for t in keys:
        if mu(e, t) != mu.ctx.one or mu(t, e) != mu.ctx.one:
            return ("normalization", t)
    for v in keys:
        for w in keys:
            for u in keys:
                lhs = mu(v, w) * mu(omega.mul(v, w), u)
                rhs = mu(w, u) * mu(v, omega.mul(w, u))
                if lhs != rhs:
                    return ("cocycle", (v, w, u))
    return None


def normalize_cocycle(mu: Cocycle, omega) -> Cocycle:
    """Divide out the constant coboundary so that mu(1, .) = mu(., 1) = 1."""
    if mu.table is None:
        return mu
    e = omega.identity_key if hasattr(omega, "identity_key") else omega.e
    c = mu(e, e)
    return Cocycle(mu.ctx, table={k: v / c for k, v in mu.table.items()})


def coboundary_search(mu1: Cocycle, mu2: Cocycle, omega, pool: Sequence[Scalar]):
    """beta: Omega -> pool with mu1 = mu2 * (d beta), or None if the pool has none.

    Exhaustive over pool assignments with beta(1) = 1; a None answer is
    inconclusive beyond the supplied pool.
    """
    keys = omega.keys()
    e = omega.identity_key if hasattr(omega, "identity_key") else omega.e
    others = [k for k in keys if k != e]
    if len(pool) ** len(others) > 500_000:
        raise ValueError("coboundary search space too large; shrink Omega or the pool")
    for assignment in itertools.product(pool, repeat=len(others)):
        beta = {e: mu1.ctx.one}
        beta.update(dict(zip(others, assignment)))
        ok = True
        for s in keys:
            for t in keys:
                if mu1(s, t) * beta[omega.mul(s, t)] != mu2(s, t) * beta[s] * beta[t]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return beta
    return None


def twisted_center_dimension(mu: Cocycle, omega) -> int:
    """Dimension of the center of the twisted group algebra Coeff[Omega, mu]."""
    keys = omega.keys()
    idx = {k: i for i, k in enumerate(keys)}
    ctx = mu.ctx
    rows = []
    for s in keys:
        # gamma_s z = z gamma_s, coefficients compared at each basis key u
        for u in keys:
            row = [ctx.zero] * len(keys)
            t_left = omega.mul(omega.inv(s), u)  # s*t = u
            row[idx[t_left]] = row[idx[t_left]] + mu(s, t_left)
            t_right = omega.mul(u, omega.inv(s))  # t*s = u
            row[idx[t_right]] = row[idx[t_right]] - mu(t_right, s)
            rows.append(tuple(row))
    kern = linalg.kernel_basis(linalg.mat(rows), ctx.one, ctx.zero)
    return len(kern)


@dataclass
class HeckeParams:
    """Parameter function q on the simple reflections, constant on declared classes."""

    ctx: ScalarContext
    q: dict[int, Scalar]
    classes: tuple[tuple[int, ...], ...]
    rule: CoeffPlusRule

    def validate(self, data: ReflectionGroupData, omega: Optional[OmegaGroup] = None,
                 cutoff: int = 24) -> None:
        declared = sorted(tuple(sorted(c)) for c in self.classes)
        if sorted(i for c in declared for i in c) != list(range(data.num_walls)):
            raise ValueError("declared classes must partition the wall indices")
        for s, qs in self.q.items():
            if qs.is_zero() or qs == 1:
                raise ValueError(f"q_{s} must be invertible and != 1")
            if coeffplus_select(self.rule, qs) != qs:
                raise ValueError(f"q_{s} = {qs} is not plus-selected")
        for cls in declared:
            vals = {str(self.q[i]) for i in cls}
            if len(vals) != 1:
                raise ValueError(f"q is not constant on declared class {cls}")
        # every forced (computed) class must sit inside one declared class
        computed = simple_conjugacy_classes(data, omega, cutoff)
        member_of = {i: c for c in declared for i in c}
        for cls in computed:
            if len({member_of[i] for i in cls}) != 1:
                raise ValueError(f"declared classes split the conjugacy class {cls}")


@dataclass
class GroupContext:
    """Shared group data for the algebra: reflections, Omega, parameters, cocycle."""

    ctx: ScalarContext
    data: ReflectionGroupData
    omega: OmegaGroup
    params: HeckeParams
    mu: Cocycle

    def __post_init__(self):
        self.omega.validate(self.data)
        self.params.validate(self.data, self.omega)
        witness = validate_cocycle(self.mu, self.omega)
        if witness is not None:
            raise CocycleError(f"cocycle invalid: {witness}")
        self._tmul_cache: dict[tuple, dict] = {}
        self._iso_cache: dict[tuple, AffineIso] = {}

    def iso_key(self, g: AffineIso):
        k = g.key()
        self._iso_cache.setdefault(k, g)
        return k

    def iso(self, key) -> AffineIso:
        return self._iso_cache[key]

    def q_of(self, wall_index: int) -> Scalar:
        return self.params.q[wall_index]

    def word_of(self, key) -> tuple[int, ...]:
        word, residual = self.data.walk(self.iso(key))
        if not residual.is_identity():
            raise ValueError("key does not belong to W_aff")
        return word

    def length_of(self, key) -> int:
        return len(self.word_of(key))

    # T_u * T_v as a dict {w_key: Scalar}, by left-peeling a reduced word of u
    def t_mul(self, ukey, vkey) -> dict:
        memo_key = (ukey, vkey)
        cached = self._tmul_cache.get(memo_key)
        if cached is not None:
            return cached
        word = self.word_of(ukey)
        if not word:
            result = {vkey: self.ctx.one}
        else:
            s = word[0]
            rest = self.data.element_of_word(word[1:])
            sub = self.t_mul(self.iso_key(rest), vkey)
            result: dict = {}
            s_iso = self.data.simple(s)
            qs = self.q_of(s)
            for wkey, c in sub.items():
                w_iso = self.iso(wkey)
                sw = s_iso.compose(w_iso)
                swkey = self.iso_key(sw)
                if self.length_of(swkey) > self.length_of(wkey):
                    result[swkey] = result.get(swkey, self.ctx.zero) + c
                else:
                    result[wkey] = result.get(wkey, self.ctx.zero) + c * (qs - 1)
                    result[swkey] = result.get(swkey, self.ctx.zero) + c * qs
            result = {k: v for k, v in result.items() if not v.is_zero()}
        self._tmul_cache[memo_key] = result
        return result

    def identity_keys(self):
        ident = AffineIso.identity(self.data.arrangement.dim)
        return self.omega.identity_key, self.iso_key(ident)


@dataclass
class ProductAlgElem:
    """Finitely supported map (Omega key, W_aff key) -> Scalar on the gamma_t T_w basis."""

    context: GroupContext
    coeffs: dict

    def __post_init__(self):
        self.coeffs = {k: v for k, v in self.coeffs.items() if not v.is_zero()}

    @staticmethod
    def zero(context: GroupContext) -> "ProductAlgElem":
        return ProductAlgElem(context, {})

    @staticmethod
    def basis(context: GroupContext, omega_key, w: AffineIso | tuple) -> "ProductAlgElem":
        wkey = w if isinstance(w, tuple) else context.iso_key(w)
        context.word_of(wkey)  # must lie in W_aff
        return ProductAlgElem(context, {(omega_key, wkey): context.ctx.one})

    @staticmethod
    def t_of_word(context: GroupContext, word: Sequence[int]) -> "ProductAlgElem":
        g = context.data.element_of_word(word)
        e, _ = context.identity_keys()
        return ProductAlgElem.basis(context, e, g)

    @staticmethod
    def gamma(context: GroupContext, omega_key) -> "ProductAlgElem":
        _, ident = context.identity_keys()
        return ProductAlgElem(context, {(omega_key, ident): context.ctx.one})

    @staticmethod
    def unit(context: GroupContext) -> "ProductAlgElem":
        e, ident = context.identity_keys()
        return ProductAlgElem(context, {(e, ident): context.ctx.one})

    def __add__(self, other: "ProductAlgElem") -> "ProductAlgElem":
        if other.context is not self.context:
            raise ValueError("mixing group contexts")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, self.context.ctx.zero) + v
        return ProductAlgElem(self.context, out)

    def __sub__(self, other: "ProductAlgElem") -> "ProductAlgElem":
        return self + other.scale(self.context.ctx.scalar(-1))

    def scale(self, c) -> "ProductAlgElem":
        c = self.context.ctx.scalar(c)
        return ProductAlgElem(self.context, {k: c * v for k, v in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, ProductAlgElem) and self.coeffs == other.coeffs

    def is_zero(self) -> bool:
        return not self.coeffs

    def __mul__(self, other: "ProductAlgElem") -> "ProductAlgElem":
        return hecke_mul(self.context, self, other)

    def support(self):
        return sorted(self.coeffs.keys(), key=lambda k: (k[0], k[1]))

    def to_json(self) -> list:
        out = []
        for (t, wkey) in self.support():
            word = self.context.word_of(wkey)
            out.append({"omega": t, "word": list(word), "coeff": str(self.coeffs[(t, wkey)])})
        return out

    @staticmethod
    def from_json(context: GroupContext, data: list) -> "ProductAlgElem":
        acc = ProductAlgElem.zero(context)
        for term in data:
            g = context.data.element_of_word(tuple(term["word"]))
            basis = ProductAlgElem.basis(context, term["omega"], g)
            acc = acc + basis.scale(context.ctx.parse(term["coeff"]))
        return acc


def hecke_mul(context: GroupContext, a: ProductAlgElem, b: ProductAlgElem) -> ProductAlgElem:
    """Bilinear product from the defining relations; associative."""
    if a.context is not context or b.context is not context:
        raise ValueError("elements belong to a different group context")
    omega = context.omega
    out: dict = {}
    for (t1, w1), c1 in a.coeffs.items():
        for (t2, w2), c2 in b.coeffs.items():
            t2_iso = omega.iso(t2)
            w1_conj = t2_iso.inverse().compose(context.iso(w1)).compose(t2_iso)
            w1c_key = context.iso_key(w1_conj)
            t = omega.mul(t1, t2)
            factor = c1 * c2 * context.mu(t1, t2)
            for wkey, c in context.t_mul(w1c_key, w2).items():
                key = (t, wkey)
                out[key] = out.get(key, context.ctx.zero) + factor * c
    return ProductAlgElem(context, out)


def star_compatible(mu: Cocycle, omega) -> bool:
    """conj(mu(t1, t2)) == mu(t2^-1, t1^-1) for all pairs; needed for * to reverse products."""
    if mu.table is None:
        xi = mu.bicharacter_value
        return conj(xi) == xi  # mu(i,j) = xi^(ij) and mu(-j,-i) = xi^(ij)
    for t1 in omega.keys():
        for t2 in omega.keys():
            if conj(mu(t1, t2)) != mu(omega.inv(t2), omega.inv(t1)):
                return False
    return True


def star(mu: Cocycle, elem: ProductAlgElem) -> ProductAlgElem:
    """(gamma_t T_w)* = gamma_{t^-1} T_{t w^-1 t^-1}, extended conjugate-linearly."""
    context = elem.context
    if not star_compatible(mu, context.omega):
        raise CocycleError("cocycle is not compatible with the anti-involution")
    out: dict = {}
    omega = context.omega
    for (t, wkey), c in elem.coeffs.items():
        t_iso = omega.iso(t)
        w_star = t_iso.compose(context.iso(wkey).inverse()).compose(t_iso.inverse())
        key = (omega.inv(t), context.iso_key(w_star))
        out[key] = out.get(key, context.ctx.zero) + conj(c)
    return ProductAlgElem(context, out)


def psi_chi(chi: dict, elem: ProductAlgElem) -> ProductAlgElem:
    """Support-preserving automorphism gamma_t T_w |-> chi(t) gamma_t T_w."""
    context = elem.context
    e = context.omega.identity_key
    if chi[e] != context.ctx.one:
        raise ValueError("chi(1) must be 1")
    return ProductAlgElem(
        context, {(t, w): chi[t] * c for (t, w), c in elem.coeffs.items()}
    )


def _generating_keys(omega: OmegaGroup) -> list:
    keys = omega.keys()
    e = omega.identity_key
    chosen: list = []
    span = {e}
    for k in keys:
        if k in span:
            continue
        chosen.append(k)
        frontier = [e]
        span = {e}
        while frontier:
            nxt = []
            for a in frontier:
                for g in chosen:
                    for b in (omega.mul(a, g), omega.mul(a, omega.inv(g))):
                        if b not in span:
                            span.add(b)
                            nxt.append(b)
            frontier = nxt
        if len(span) == len(keys):
            break
    return chosen


def homomorphisms_to_units(omega: OmegaGroup, pool: Sequence[Scalar]) -> list[dict]:
    """All group homomorphisms Omega -> pool (pool a finite set of units)."""
    keys = omega.keys()
    e = omega.identity_key
    gens = _generating_keys(omega)
    ctx = pool[0].ctx
    out = []
    for assignment in itertools.product(pool, repeat=len(gens)):
        chi = {e: ctx.one}
        images = dict(zip(gens, assignment))
        ok = True
        frontier = [e]
        while frontier and ok:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = omega.mul(a, g)
                    v = chi[a] * images[g]
                    if b in chi:
                        if chi[b] != v:
                            ok = False
                            break
                    else:
                        chi[b] = v
                        nxt.append(b)
                if not ok:
                    break
            frontier = nxt
        if ok and len(chi) == len(keys):
            out.append(chi)
    return out


def enumerate_support_preserving_autos(
    context: GroupContext,
    pool: Sequence[Scalar],
    star_preserving: bool = False,
    check_pairs: int = 5,
    seed: int = 0,
) -> list[dict]:
    """All Psi_chi for chi in Hom(Omega, pool); optionally only the *-preserving ones.

    Each returned chi is verified multiplicative on sampled element pairs.
    """
    omega = context.omega
    if not omega.is_finite:
        raise ValueError("automorphism enumeration needs a finite Omega")
    order = len(omega)
    nth_roots = [u for u in context.ctx.roots_of_unity() if (u ** order) == 1]
    if any(all(u != p for p in pool) for u in nth_roots):
        raise ValueError("pool must contain every |Omega|-th root of unity of the context")
    homs = homomorphisms_to_units(omega, pool)
    if star_preserving:
        from heckelab.scalars import abs2

        homs = [chi for chi in homs if all(abs2(v) == 1 for v in chi.values())]
    rng = random.Random(seed)
    elems = [ProductAlgElem.gamma(context, k) for k in omega.keys()]
    for s in range(context.data.num_walls):
        elems.append(ProductAlgElem.t_of_word(context, (s,)))
    for chi in homs:
        for _ in range(check_pairs):
            x, y = rng.choice(elems), rng.choice(elems)
            lhs = psi_chi(chi, hecke_mul(context, x, y))
            rhs = hecke_mul(context, psi_chi(chi, x), psi_chi(chi, y))
            if lhs != rhs:
                raise AssertionError("Psi_chi failed to be an algebra homomorphism")
    return homs
