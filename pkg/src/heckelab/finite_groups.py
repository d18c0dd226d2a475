"""Finite groups as multiplication tables, exact representations, convolution algebras.

Groups are index tables (numpy int arrays); elements are indices 0..n-1 with
optional labels for debugging.  Representations carry one exact Scalar matrix
per element.  The convolution algebra of (K, rho)-bi-equivariant functions is
computed literally, including the two-summand decomposition of the induced
representation and the resulting dimension-ratio parameter.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from heckelab import linalg
from heckelab.scalars import (
    CoeffPlusRule,
    NotInTowerError,
    Scalar,
    ScalarContext,
    coeffplus_select,
    scalar_sqrt,
)

Matrix = tuple[tuple[Scalar, ...], ...]


# -- tiny finite fields for GL2/SL2 constructors --------------------------------


class _GF:
    """GF(q) for q in {2, 3, 4, 5}; GF(4) uses the polynomial basis mod x^2+x+1."""

    def __init__(self, q: int):
        if q in (2, 3, 5):
            self.q = q
            self.add = lambda a, b: (a + b) % q
            self.mul = lambda a, b: (a * b) % q
            self.neg = lambda a: (-a) % q
        elif q == 4:
            self.q = 4
            self.add = lambda a, b: a ^ b

            def mul(a, b):
                # bits (a1 a0) as a1*x + a0
                res = 0
                y = b
                for bit in range(2):
                    if (a >> bit) & 1:
                        res ^= y << bit
                # reduce mod x^2 + x + 1
                for shift in (3, 2):
                    if res >> shift:
                        res ^= (0b111) << (shift - 2)
                while res >= 4:
                    res ^= 0b111
                return res

            self.mul = mul
            self.neg = lambda a: a
        else:
            raise ValueError("only GF(q) with q <= 5 is supported")

    def det2(self, m):
        a, b, c, d = m
        return self.add(self.mul(a, d), self.neg(self.mul(b, c)))

    def matmul2(self, m, n):
        a, b, c, d = m
        e, f, g, h = n
        return (
            self.add(self.mul(a, e), self.mul(b, g)),
            self.add(self.mul(a, f), self.mul(b, h)),
            self.add(self.mul(c, e), self.mul(d, g)),
            self.add(self.mul(c, f), self.mul(d, h)),
        )


@dataclass
class FinGroup:
    """A finite group by its multiplication table on element indices."""

    table: np.ndarray
    labels: Optional[list] = None
    name: str = "group"
    check: bool = True

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=np.int64)
        n = self.n
        if self.table.shape != (n, n):
            raise ValueError("multiplication table must be square")
        e = None
        for i in range(n):
            if all(self.table[i, j] == j for j in range(n)) and all(
                self.table[j, i] == j for j in range(n)
            ):
                e = i
                break
        if e is None:
            raise ValueError("no identity element")
        self.e = e
        inv = np.full(n, -1, dtype=np.int64)
        for i in range(n):
            js = np.where(self.table[i] == e)[0]
            if len(js) != 1 or self.table[js[0], i] != e:
                raise ValueError(f"element {i} has no unique inverse")
            inv[i] = js[0]
        self.inv_table = inv
        if self.check:
            self._check_associativity()

    def _check_associativity(self):
        n = self.n
        t = self.table
        if n <= 200:
            lhs = t[t, :]  # (i,j,k) -> t[t[i,j], k]
            rhs = t[:, t]  # (i,j,k) -> t[i, t[j,k]]
            if not np.array_equal(lhs, rhs):
                raise ValueError("multiplication table is not associative")
        else:
            rng = random.Random(0)
            for _ in range(1000):
                i, j, k = (rng.randrange(n) for _ in range(3))
                if t[t[i, j], k] != t[i, t[j, k]]:
                    raise ValueError("multiplication table is not associative")

    @property
    def n(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.n

    # group-like protocol shared with OmegaGroup
    @property
    def identity_key(self) -> int:
        return self.e

    def keys(self) -> list[int]:
        return list(range(self.n))

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inv_table[a])

    def conj(self, g: int, a: int) -> int:
        """g a g^-1."""
        return self.mul(self.mul(g, a), self.inv(g))

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_table(table, labels=None, name="group") -> "FinGroup":
        return FinGroup(np.asarray(table), labels, name)

    @staticmethod
    def cyclic(n: int) -> "FinGroup":
        t = [[(i + j) % n for j in range(n)] for i in range(n)]
        return FinGroup(np.array(t), labels=list(range(n)), name=f"C{n}")

    @staticmethod
    def dihedral(n: int) -> "FinGroup":
        """Order 2n: elements (rotation i, flip f)."""
        elems = [(i, f) for f in (0, 1) for i in range(n)]
        index = {e: k for k, e in enumerate(elems)}

        def mult(a, b):
            (i, f), (j, g) = a, b
            return ((i + (j if f == 0 else -j)) % n, f ^ g)

        t = [[index[mult(a, b)] for b in elems] for a in elems]
        return FinGroup(np.array(t), labels=elems, name=f"D{n}")

    @staticmethod
    def symmetric(n: int) -> "FinGroup":
        if n > 6:
            raise ValueError("symmetric groups are supported up to n = 6")
        elems = sorted(itertools.permutations(range(n)))
        index = {p: k for k, p in enumerate(elems)}
        perms = np.array(elems, dtype=np.int64)
        m = len(elems)
        t = np.empty((m, m), dtype=np.int64)
        for j, q in enumerate(elems):
            # (p q)(x) = p(q(x)): composite rows in one gather
            composed = perms[:, list(q)]
            t[:, j] = [index[tuple(row)] for row in composed]
        return FinGroup(t, labels=elems, name=f"S{n}")

    @staticmethod
    def gl2(q: int) -> "FinGroup":
        gf = _GF(q)
        elems = [
            m
            for m in itertools.product(range(q), repeat=4)
            if gf.det2(m) != 0
        ]
        index = {m: k for k, m in enumerate(elems)}
        t = [[index[gf.matmul2(a, b)] for b in elems] for a in elems]
        return FinGroup(np.array(t), labels=elems, name=f"GL2({q})")

    @staticmethod
    def sl2(q: int) -> "FinGroup":
        gf = _GF(q)
        one = 1
        elems = [m for m in itertools.product(range(q), repeat=4) if gf.det2(m) == one]
        index = {m: k for k, m in enumerate(elems)}
        t = [[index[gf.matmul2(a, b)] for b in elems] for a in elems]
        return FinGroup(np.array(t), labels=elems, name=f"SL2({q})")

    @staticmethod
    def direct_product(g: "FinGroup", h: "FinGroup") -> "FinGroup":
        pairs = [(a, b) for a in range(g.n) for b in range(h.n)]
        index = {p: k for k, p in enumerate(pairs)}
        t = [
            [index[(g.mul(a, c), h.mul(b, d))] for (c, d) in pairs]
            for (a, b) in pairs
        ]
        labels = [
            (g.labels[a] if g.labels else a, h.labels[b] if h.labels else b) for (a, b) in pairs
        ]
        return FinGroup(np.array(t), labels=labels, name=f"{g.name}x{h.name}")

    def subgroup(self, generators: Iterable[int]) -> "Subgroup":
        closure = {self.e}
        frontier = [self.e]
        gens = list(generators)
        gens += [self.inv(g) for g in gens]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = self.mul(a, g)
                    if b not in closure:
                        closure.add(b)
                        nxt.append(b)
            frontier = nxt
        return Subgroup(self, tuple(sorted(closure)))

    def all_elements_subgroup(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.n)))


@dataclass(frozen=True)
class Subgroup:
    group: FinGroup
    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(sorted(set(self.elements)))
        object.__setattr__(self, "elements", elems)
        s = set(elems)
        if self.group.e not in s:
            raise ValueError("subgroup must contain the identity")
        for a in elems:
            if self.group.inv(a) not in s:
                raise ValueError("subgroup not closed under inverse")
            for b in elems:
                if self.group.mul(a, b) not in s:
                    raise ValueError("subgroup not closed under multiplication")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in set(self.elements)

    def conjugate(self, g: int) -> "Subgroup":
        return Subgroup(self.group, tuple(self.group.conj(g, a) for a in self.elements))

    def intersect(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.group, tuple(set(self.elements) & set(other.elements)))

    def is_normal_in(self, other: "Subgroup") -> bool:
        mine = set(self.elements)
        return all(self.group.conj(g, a) in mine for g in other.elements for a in self.elements)

    def left_coset_reps(self, inside: Optional[Sequence[int]] = None) -> list[int]:
        """Minimal-index representatives of gK for g in `inside` (default: the whole group)."""
        universe = range(self.group.n) if inside is None else inside
        seen = set()
        reps = []
        for g in universe:
            if g in seen:
                continue
            coset = {self.group.mul(g, k) for k in self.elements}
            reps.append(min(coset))
            seen |= coset
        return sorted(reps)

    def right_coset_reps(self, inside: Optional[Sequence[int]] = None) -> list[int]:
        universe = range(self.group.n) if inside is None else inside
        seen = set()
        reps = []
        for g in universe:
            if g in seen:
                continue
            coset = {self.group.mul(k, g) for k in self.elements}
            reps.append(min(coset))
            seen |= coset
        return sorted(reps)


def double_cosets(h: FinGroup, k: Subgroup, kprime: Subgroup,
                  inside: Optional[Sequence[int]] = None) -> list[int]:
    """Minimal-index representatives of K \\ H / K' (or of the given subset)."""
    universe = range(h.n) if inside is None else inside
    seen: set[int] = set()
    reps = []
    for g in universe:
        if g in seen:
            continue
        coset = {h.mul(h.mul(a, g), b) for a in k.elements for b in kprime.elements}
        reps.append(min(coset))
        seen |= coset
    return sorted(reps)


@dataclass
class Rep:
    """An exact matrix representation of a subgroup."""

    ctx: ScalarContext
    domain: Subgroup
    dim: int
    mats: dict[int, Matrix]

    def __post_init__(self):
        self.validate()

    def validate(self):
        k = self.domain
        ident = linalg.identity(self.dim, self.ctx.one, self.ctx.zero)
        if not linalg.mat_eq(self.mats[k.group.e], ident):
            raise ValueError("rho(1) must be the identity matrix")
        pairs: Iterable
        elems = k.elements
        if len(elems) <= 200:
            pairs = itertools.product(elems, repeat=2)
        else:
            rng = random.Random(0)
            pairs = ((rng.choice(elems), rng.choice(elems)) for _ in range(2000))
        for a, b in pairs:
            if not linalg.mat_eq(
                self.mats[k.group.mul(a, b)], linalg.mat_mul(self.mats[a], self.mats[b])
            ):
                raise ValueError(f"rho({a}) rho({b}) != rho({a}{b})")

    def __call__(self, g: int) -> Matrix:
        return self.mats[g]

    @staticmethod
    def trivial(ctx: ScalarContext, domain: Subgroup) -> "Rep":
        one = ((ctx.one,),)
        return Rep(ctx, domain, 1, {g: one for g in domain.elements})

    @staticmethod
    def character(ctx: ScalarContext, domain: Subgroup, values: dict[int, Scalar]) -> "Rep":
        return Rep(ctx, domain, 1, {g: ((values[g],),) for g in domain.elements})

    @staticmethod
    def from_generator_images(
        ctx: ScalarContext, domain: Subgroup, images: dict[int, Matrix]
    ) -> "Rep":
        """Extend generator images multiplicatively over the subgroup; closure validated."""
        dims = {len(m) for m in images.values()}
        if len(dims) != 1:
            raise ValueError("generator images must share a dimension")
        dim = dims.pop()
        grp = domain.group
        mats = {grp.e: linalg.identity(dim, ctx.one, ctx.zero)}
        gens = dict(images)
        for g, m in list(gens.items()):
            gens[grp.inv(g)] = linalg.mat_inv(m)
        frontier = [grp.e]
        while frontier:
            nxt = []
            for a in frontier:
                for g, m in gens.items():
                    b = grp.mul(a, g)
                    cand = linalg.mat_mul(mats[a], m)
                    if b in mats:
                        if not linalg.mat_eq(mats[b], cand):
                            raise ValueError("generator images are inconsistent")
                    else:
                        mats[b] = cand
                        nxt.append(b)
            frontier = nxt
        if set(mats) != set(domain.elements):
            raise ValueError("generators do not generate the subgroup")
        return Rep(ctx, domain, dim, mats)

    def conjugated(self, g: int) -> "Rep":
        """^g rho on gKg^-1: x |-> rho(g^-1 x g)."""
        grp = self.domain.group
        dom = self.domain.conjugate(g)
        mats = {x: self.mats[grp.conj(grp.inv(g), x)] for x in dom.elements}
        return Rep(self.ctx, dom, self.dim, mats)

    def restrict(self, sub: Subgroup) -> "Rep":
        return Rep(self.ctx, sub, self.dim, {g: self.mats[g] for g in sub.elements})


@dataclass
class InducedRep:
    """ind_K^H(rho) in the block-permutation model.

    Functions f: H -> V with f(kh) = rho(k) f(h) are coordinatized by their
    values at minimal right-coset representatives (identity's coset first);
    the embedding v |-> f_v lands in block 0.
    """

    rep: Rep
    sub: Subgroup
    cosets: list[int]

    @staticmethod
    def build(rho: Rep) -> "InducedRep":
        sub = rho.domain
        reps = sub.right_coset_reps()
        # identity coset first, the rest in index order
        e_rep = min(sub.elements)
        reps = [e_rep] + [r for r in reps if r != e_rep]
        return InducedRep(rho, sub, reps)

    @property
    def dim(self) -> int:
        return len(self.cosets) * self.rep.dim

    @property
    def group(self) -> FinGroup:
        return self.sub.group

    @property
    def ctx(self) -> ScalarContext:
        return self.rep.ctx

    def coset_index(self, g: int) -> tuple[int, int]:
        """(block j, kappa) with g = kappa * h_j and kappa in K."""
        grp = self.group
        for j, h in enumerate(self.cosets):
            kappa = grp.mul(g, grp.inv(h))
            if kappa in self.sub:
                return j, kappa
        raise AssertionError("coset decomposition failed")

    def matrix(self, g: int) -> Matrix:
        """Right-regular action: (g . f)(h) = f(h g)."""
        grp = self.group
        d = self.rep.dim
        zero = self.ctx.zero
        blocks = [[None] * len(self.cosets) for _ in self.cosets]
        for i, hi in enumerate(self.cosets):
            j, kappa = self.coset_index(grp.mul(hi, g))
            blocks[i][j] = self.rep(kappa)
        rows = []
        for i in range(len(self.cosets)):
            for r in range(d):
                row = []
                for j in range(len(self.cosets)):
                    blk = blocks[i][j]
                    row.extend(blk[r] if blk is not None else (zero,) * d)
                rows.append(tuple(row))
        return tuple(rows)

    def embed(self, v: Sequence[Scalar]) -> tuple[Scalar, ...]:
        """The function f_v: supported on K, f_v(k) = rho(k) v."""
        zero = self.ctx.zero
        out = list(v) + [zero] * (self.dim - self.rep.dim)
        return tuple(out)

    def value_at(self, f: Sequence[Scalar], g: int) -> tuple[Scalar, ...]:
        """f(g) for the coordinatized function f."""
        j, kappa = self.coset_index(g)
        d = self.rep.dim
        block = f[j * d : (j + 1) * d]
        return linalg.mat_vec(self.rep(kappa), tuple(block))


def induce(rho: Rep) -> InducedRep:
    return InducedRep.build(rho)


def generators_of(sub: Subgroup) -> list[int]:
    """A small generating set, found greedily."""
    grp = sub.group
    gens: list[int] = []
    span = {grp.e}
    for g in sub.elements:
        if g in span:
            continue
        gens.append(g)
        frontier = list(span)
        span = set(span)
        while frontier:
            nxt = []
            for a in frontier:
                for h in gens + [grp.inv(x) for x in gens]:
                    b = grp.mul(a, h)
                    if b not in span:
                        span.add(b)
                        nxt.append(b)
            frontier = nxt
        if len(span) == sub.order:
            break
    return gens


def intertwiner_space(h: FinGroup, k: Subgroup, rho: Rep, g: int) -> list[Matrix]:
    """Basis of Hom_{K cap gKg^-1}(^g rho, rho): T rho(g^-1 x g) = rho(x) T."""
    ctx = rho.ctx
    d = rho.dim
    inter = k.intersect(k.conjugate(g))
    # unknowns T_{rс}: maintain a kernel basis, refining one constraint at a time
    basis = [
        tuple(ctx.one if idx == t else ctx.zero for idx in range(d * d)) for t in range(d * d)
    ]
    for x in generators_of(inter) or [h.e]:
        rx = rho(x)
        rgx = rho(h.conj(h.inv(g), x))
        rows = []
        for r in range(d):
            for c in range(d):
                row = [ctx.zero] * (d * d)
                for m in range(d):
                    row[r * d + m] = row[r * d + m] + rgx[m][c]
                    row[m * d + c] = row[m * d + c] - rx[r][m]
                rows.append(tuple(row))
        # restrict current basis to the kernel of these rows
        constrained = [tuple(sum((row[i] * v[i] for i in range(d * d)), ctx.zero) for v in basis) for row in rows]
        kern = linalg.kernel_basis(linalg.mat(constrained), ctx.one, ctx.zero) if basis else []
        if not any(any(x != 0 for x in row) for row in constrained):
            kern = linalg.identity(len(basis), ctx.one, ctx.zero)
        basis = [
            tuple(
                sum((coeffs[i] * basis[i][t] for i in range(len(basis))), ctx.zero)
                for t in range(d * d)
            )
            for coeffs in kern
        ]
        if not basis:
            return []
    return [tuple(tuple(vecT[r * d + c] for c in range(d)) for r in range(d)) for vecT in basis]


def intertwines(h: FinGroup, k: Subgroup, rho: Rep, g: int) -> bool:
    return bool(intertwiner_space(h, k, rho, g))


@dataclass
class HeckeFunc:
    """A (K, rho)-bi-equivariant End(V)-valued function on H, supported on K-double cosets."""

    hgroup: FinGroup
    sub: Subgroup
    rho: Rep
    values: dict[int, Matrix]

    def __post_init__(self):
        self.values = {
            g: m for g, m in self.values.items() if any(any(x != 0 for x in row) for row in m)
        }

    @property
    def ctx(self) -> ScalarContext:
        return self.rho.ctx

    def support(self) -> list[int]:
        return sorted(self.values)

    def support_cosets(self) -> list[int]:
        return double_cosets(self.hgroup, self.sub, self.sub, inside=self.support())

    def value(self, g: int) -> Matrix:
        zero = self.ctx.zero
        return self.values.get(
            g, tuple((zero,) * self.rho.dim for _ in range(self.rho.dim))
        )

    def validate(self) -> None:
        grp, k = self.hgroup, self.sub
        gens = generators_of(k) or [grp.e]
        for g in self.support():
            for k1 in gens:
                if not linalg.mat_eq(
                    self.value(grp.mul(k1, g)), linalg.mat_mul(self.rho(k1), self.value(g))
                ):
                    raise ValueError("function is not left K-equivariant")
                if not linalg.mat_eq(
                    self.value(grp.mul(g, k1)), linalg.mat_mul(self.value(g), self.rho(k1))
                ):
                    raise ValueError("function is not right K-equivariant")

    @staticmethod
    def unit(hgroup: FinGroup, k: Subgroup, rho: Rep) -> "HeckeFunc":
        return HeckeFunc(hgroup, k, rho, {x: rho(x) for x in k.elements})

    @staticmethod
    def from_coset(hgroup: FinGroup, k: Subgroup, rho: Rep, g: int, t: Matrix) -> "HeckeFunc":
        """The function supported on KgK with value t at g (t must intertwine)."""
        values: dict[int, Matrix] = {}
        for k1 in k.elements:
            for k2 in k.elements:
                x = hgroup.mul(hgroup.mul(k1, g), k2)
                cand = linalg.mat_mul(linalg.mat_mul(rho(k1), t), rho(k2))
                if x in values:
                    if not linalg.mat_eq(values[x], cand):
                        raise ValueError("value does not define a bi-equivariant function")
                else:
                    values[x] = cand
        return HeckeFunc(hgroup, k, rho, values)

    def add(self, other: "HeckeFunc") -> "HeckeFunc":
        values = dict(self.values)
        for g, m in other.values.items():
            values[g] = linalg.mat_add(values[g], m) if g in values else m
        return HeckeFunc(self.hgroup, self.sub, self.rho, values)

    def scale(self, c: Scalar) -> "HeckeFunc":
        return HeckeFunc(
            self.hgroup, self.sub, self.rho, {g: linalg.mat_scale(c, m) for g, m in self.values.items()}
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, HeckeFunc):
            return NotImplemented
        keys = set(self.values) | set(other.values)
        return all(linalg.mat_eq(self.value(g), other.value(g)) for g in keys)


def convolve(phi1: HeckeFunc, phi2: HeckeFunc) -> HeckeFunc:
    """(phi1 * phi2)(g) = sum over h in H/K of phi1(h) phi2(h^-1 g)."""
    if phi1.sub != phi2.sub:
        raise ValueError("convolution needs a shared (K, rho)")
    grp, k, ctx, d = phi1.hgroup, phi1.sub, phi1.ctx, phi1.rho.dim
    reps = k.left_coset_reps(inside=phi1.support())
    values: dict[int, Matrix] = {}
    zero_mat = tuple((ctx.zero,) * d for _ in range(d))
    for g in range(grp.n):
        acc = zero_mat
        hit = False
        for h in reps:
            rhs = phi2.values.get(grp.mul(grp.inv(h), g))
            if rhs is None:
                continue
            acc = linalg.mat_add(acc, linalg.mat_mul(phi1.values[h], rhs))
            hit = True
        if hit:
            values[g] = acc
    return HeckeFunc(grp, k, phi1.rho, values)


def hecke_end_transport(phi: HeckeFunc, ind: InducedRep) -> Matrix:
    """The endomorphism of ind_K^H(rho) corresponding to phi under convolution-vs-composition."""
    grp, k, d = phi.hgroup, phi.sub, phi.rho.dim
    ctx = phi.ctx
    reps = k.left_coset_reps(inside=phi.support())
    r = len(ind.cosets)
    blocks = [[None] * r for _ in range(r)]
    for i, hi in enumerate(ind.cosets):
        for h in reps:
            x = grp.mul(grp.inv(h), hi)
            j, kappa = ind.coset_index(x)
            contrib = linalg.mat_mul(phi.values[h], phi.rho(kappa))
            blocks[i][j] = contrib if blocks[i][j] is None else linalg.mat_add(blocks[i][j], contrib)
    zero = ctx.zero
    rows = []
    for i in range(r):
        for rr in range(d):
            row = []
            for j in range(r):
                blk = blocks[i][j]
                row.extend(blk[rr] if blk is not None else (zero,) * d)
            rows.append(tuple(row))
    return tuple(rows)


def hecke_func_from_end(endo: Matrix, ind: InducedRep) -> HeckeFunc:
    """Inverse transport: phi(g) v = (endo f_v)(g)."""
    grp = ind.group
    d = ind.rep.dim
    ctx = ind.ctx
    values = {}
    columns = []
    for c in range(d):
        v = tuple(ctx.one if i == c else ctx.zero for i in range(d))
        columns.append(linalg.mat_vec(endo, ind.embed(v)))
    for g in range(grp.n):
        cols = [ind.value_at(col, g) for col in columns]
        m = tuple(tuple(cols[c][rr] for c in range(d)) for rr in range(d))
        if any(any(x != 0 for x in row) for row in m):
            values[g] = m
    return HeckeFunc(grp, ind.sub, ind.rep, values)


@dataclass
class TwoDecomposition:
    dims: tuple[int, int]
    projections: tuple[Matrix, Matrix]
    idempotents: tuple[HeckeFunc, HeckeFunc]


def _coefficients_in_basis(phi: HeckeFunc, unit: HeckeFunc, gen: HeckeFunc, gen_rep: int) -> tuple[Scalar, Scalar]:
    """(a, b) with phi = a*gen + b*unit, read off at gen_rep and at the identity."""
    ctx = phi.ctx
    gval = gen.values[gen_rep]
    pval = phi.value(gen_rep)
    a = None
    for r, row in enumerate(gval):
        for c, x in enumerate(row):
            if x != 0:
                a = pval[r][c] / x
                break
        if a is not None:
            break
    assert a is not None
    ident = phi.value(phi.hgroup.e)
    b = ident[0][0] / unit.values[phi.hgroup.e][0][0]
    check = gen.scale(a).add(unit.scale(b))
    if check != phi:
        raise ValueError("element does not lie in the span of the unit and the generator")
    return a, b


def decompose_two(
    h: FinGroup,
    k: Subgroup,
    rho: Rep,
    character_oracle: Optional[Callable[[int], Scalar]] = None,
) -> TwoDecomposition:
    """Split ind_K^H(rho) into its two inequivalent irreducible summands.

    Requires End to be 2-dimensional: exactly one nontrivial intertwining
    double coset, with a 1-dimensional intertwiner space.  The projections are
    found by solving p^2 = p in the 2-dimensional endomorphism algebra.
    """
    ctx = rho.ctx
    cosets = double_cosets(h, k, k)
    nontrivial = []
    for g in cosets:
        if g in k:
            continue
        basis = intertwiner_space(h, k, rho, g)
        if len(basis) > 1:
            raise ValueError("endomorphism algebra has dimension > 2")
        if len(basis) == 1:
            nontrivial.append((g, basis[0]))
    if len(nontrivial) != 1:
        raise ValueError(f"endomorphism algebra dimension is {1 + len(nontrivial)}, not 2")
    (g0, t0) = nontrivial[0]
    unit = HeckeFunc.unit(h, k, rho)
    gen = HeckeFunc.from_coset(h, k, rho, g0, t0)
    sq = convolve(gen, gen)
    a, b = _coefficients_in_basis(sq, unit, gen, g0)
    disc = a * a + 4 * b
    mu2 = disc.inverse()
    mu = scalar_sqrt(ctx, mu2)
    lam = (ctx.one - mu * a) / 2
    ind = induce(rho)
    p1 = unit.scale(lam).add(gen.scale(mu))
    p2 = unit.scale(ctx.one - lam).add(gen.scale(-mu))
    m1 = hecke_end_transport(p1, ind)
    m2 = hecke_end_transport(p2, ind)
    d1s, d2s = linalg.trace(m1), linalg.trace(m2)
    d1, d2 = d1s.as_fraction(), d2s.as_fraction()
    if d1.denominator != 1 or d2.denominator != 1 or d1 <= 0 or d2 <= 0:
        raise ValueError("projection traces are not positive integers; decomposition failed")
    if character_oracle is not None:
        # trace-formula cross-check: p = (dim/|H|) sum_h tr(rho1(h^-1)) Ind(h)
        total = None
        for x in range(h.n):
            contrib = linalg.mat_scale(character_oracle(h.inv(x)), ind.matrix(x))
            total = contrib if total is None else linalg.mat_add(total, contrib)
        formula = linalg.mat_scale(ctx.scalar(Fraction(int(d1), h.n)), total)
        if not (linalg.mat_eq(formula, m1) or linalg.mat_eq(formula, m2)):
            raise AssertionError("trace-formula projector disagrees with the idempotent route")
    return TwoDecomposition((int(d1), int(d2)), (m1, m2), (p1, p2))


def q_parameter(
    h: FinGroup, k: Subgroup, rho: Rep, gen_rep: int, rule: CoeffPlusRule
) -> Scalar:
    """dim(rho_1)/dim(rho_2), plus-selected; gen_rep must intertwine and avoid K."""
    if gen_rep in k:
        raise ValueError("generator representative must lie outside K")
    if not intertwines(h, k, rho, gen_rep):
        raise ValueError("generator representative does not intertwine rho")
    dec = decompose_two(h, k, rho)
    d1, d2 = dec.dims
    ratio = rho.ctx.scalar(Fraction(d1, d2))
    if ratio == 1:
        return ratio
    return coeffplus_select(rule, ratio)


def normalized_generator(
    h: FinGroup, k: Subgroup, rho: Rep, gen_rep: int, rule: CoeffPlusRule
) -> HeckeFunc:
    """The generator rescaled so that Phi^2 = (q - 1) Phi + q.

    Solves (Phi')^2 = a Phi' + b in the 2-dimensional algebra and rescales by
    d = (q - 1)/a; the degenerate a = 0 branch forces q = -1 and d^2 = -1/b.
    """
    ctx = rho.ctx
    if gen_rep in k:
        raise ValueError("generator representative must lie inside a nontrivial double coset")
    basis = intertwiner_space(h, k, rho, gen_rep)
    if len(basis) != 1:
        raise ValueError("generator coset must carry a 1-dimensional intertwiner space")
    unit = HeckeFunc.unit(h, k, rho)
    gen = HeckeFunc.from_coset(h, k, rho, gen_rep, basis[0])
    sq = convolve(gen, gen)
    a, b = _coefficients_in_basis(sq, unit, gen, gen_rep)
    if not a.is_zero():
        q = q_parameter(h, k, rho, gen_rep, rule)
        d = (q - 1) / a
        if d * d * b != q:
            raise ValueError("quadratic relation is inconsistent with the dimension ratio")
    else:
        d = scalar_sqrt(ctx, -b.inverse())
    return gen.scale(d)
