"""Reflection groups generated by arrangement hyperplanes.

Chamber walls are found exactly: per periodic family only the two offsets
nearest the base point can bound its chamber, so the chamber is a finite
intersection of strict half-spaces and a candidate is a wall iff the
constraint set with that inequality turned into an equality is feasible.
Feasibility is decided by Fourier-Motzkin elimination over the rationals.

Group elements are exact affine isometries (matrix + translation); equality
is always by matrix, never by word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from heckelab import linalg
from heckelab.geometry import (
    AffineForm,
    Arrangement,
    HyperplaneFamily,
    InnerProduct,
    Point,
    Vec,
    distance,
    is_generic,
    reflection_parts,
    separating,
    vec,
)


class NotIsometryError(ValueError):
    """The linear part does not preserve the inner product."""


class WalkError(RuntimeError):
    """A descent walk failed to terminate; the input does not act discretely."""


@dataclass(frozen=True)
class AffineIso:
    """x |-> A x + b with A an isometry of the ambient inner product."""

    matrix: tuple[tuple[Fraction, ...], ...]
    translation: Vec

    def __post_init__(self):
        object.__setattr__(self, "matrix", linalg.mat([[Fraction(x) for x in r] for r in self.matrix]))
        object.__setattr__(self, "translation", vec(self.translation))

    @staticmethod
    def identity(dim: int) -> "AffineIso":
        return AffineIso(linalg.identity(dim, Fraction(1), Fraction(0)), (Fraction(0),) * dim)

    @staticmethod
    def translation_by(v) -> "AffineIso":
        v = vec(v)
        return AffineIso(linalg.identity(len(v), Fraction(1), Fraction(0)), v)

    @staticmethod
    def reflection(h: AffineForm, ip: InnerProduct) -> "AffineIso":
        a, b = reflection_parts(h, ip)
        return AffineIso(a, b)

    @property
    def dim(self) -> int:
        return len(self.translation)

    def apply(self, x: Point) -> Point:
        return Point(linalg.vec_add(linalg.mat_vec(self.matrix, x.coords), self.translation))

    def compose(self, other: "AffineIso") -> "AffineIso":
        """self after other: (self*other)(x) = self(other(x))."""
        return AffineIso(
            linalg.mat_mul(self.matrix, other.matrix),
            linalg.vec_add(linalg.mat_vec(self.matrix, other.translation), self.translation),
        )

    def __mul__(self, other: "AffineIso") -> "AffineIso":
        return self.compose(other)

    def inverse(self) -> "AffineIso":
        ainv = linalg.mat_inv(self.matrix)
        return AffineIso(ainv, tuple(-t for t in linalg.mat_vec(ainv, self.translation)))

    def is_identity(self) -> bool:
        n = self.dim
        return self.matrix == linalg.identity(n, Fraction(1), Fraction(0)) and all(
            t == 0 for t in self.translation
        )

    def preserves(self, ip: InnerProduct) -> bool:
        at = linalg.transpose(self.matrix)
        return linalg.mat_mul(linalg.mat_mul(at, ip.gram), self.matrix) == ip.gram

    def key(self) -> tuple:
        return (self.matrix, self.translation)

    def to_json(self) -> dict:
        return {
            "A": [[str(x) for x in row] for row in self.matrix],
            "b": [str(x) for x in self.translation],
        }

    @staticmethod
    def from_json(data: dict) -> "AffineIso":
        return AffineIso(
            tuple(tuple(Fraction(x) for x in row) for row in data["A"]),
            tuple(Fraction(x) for x in data["b"]),
        )


def transform_family(fam: HyperplaneFamily, iso: AffineIso) -> HyperplaneFamily:
    """Image family {iso(H) : H in fam}: substitute iso^(-1) into the forms."""
    inv = iso.inverse()
    gradient = linalg.mat_vec(linalg.transpose(inv.matrix), fam.gradient)
    shift = sum((g * t for g, t in zip(fam.gradient, inv.translation)), Fraction(0))
    return HyperplaneFamily(gradient, fam.base + shift, fam.period, fam.relevant)


# -- exact strict-inequality feasibility ---------------------------------------


def _fourier_motzkin(ineqs: list[tuple[Vec, Fraction]]) -> bool:
    """Feasibility of {c.t + d > 0}; exact over Q."""
    if not ineqs:
        return True
    nvars = len(ineqs[0][0])
    system = [(list(c), d) for c, d in ineqs]
    for var in range(nvars):
        pos = [row for row in system if row[0][var] > 0]
        neg = [row for row in system if row[0][var] < 0]
        zero = [row for row in system if row[0][var] == 0]
        new = zero
        if pos and neg:
            for cp, dp in pos:
                for cn, dn in neg:
                    # cp[var] * (cn,dn) + (-cn[var]) * (cp,dp), both multipliers > 0
                    a, b = cp[var], -cn[var]
                    coeffs = [a * x + b * y for x, y in zip(cn, cp)]
                    new.append((coeffs, a * dn + b * dp))
        system = new
        if not system:
            return True
    return all(d > 0 for _, d in system)


def _canonical_form(f: AffineForm) -> AffineForm:
    from heckelab.geometry import _canonical_scale

    lam = _canonical_scale(f.gradient)
    return AffineForm(tuple(lam * g for g in f.gradient), lam * f.constant)


def _nearest_constraints(arr: Arrangement, base: Point) -> list[AffineForm]:
    """Forms positive at the base point whose zero sets can bound its chamber."""
    constraints = []
    for fam in arr.iter_families(relevant_only=True):
        v = fam.value(base)
        if fam.period == 0:
            form = fam.form(0)
            if v < 0:
                form = AffineForm(tuple(-g for g in form.gradient), -form.constant)
            constraints.append(form)
            continue
        k_hi = math.ceil(-v / fam.period)
        if v + k_hi * fam.period == 0:
            raise ValueError("base point lies on a hyperplane")
        if v + k_hi * fam.period < 0:
            k_hi += 1
        k_lo = k_hi - 1
        up = fam.form(k_hi)  # positive at base
        down = fam.form(k_lo)  # negative at base
        constraints.append(up)
        constraints.append(AffineForm(tuple(-g for g in down.gradient), -down.constant))
    return constraints


def _is_wall(candidate_index: int, constraints: list[AffineForm], dim: int) -> bool:
    """Is the zero set of constraints[i] a codimension-1 face of {all > 0}?"""
    h = constraints[candidate_index]
    # parametrize the hyperplane h = 0
    g = h.gradient
    norm2 = sum(x * x for x in g)
    x_p = tuple(-h.constant * x / norm2 for x in g)
    null = linalg.kernel_basis(linalg.mat([g]), Fraction(1), Fraction(0))
    ineqs = []
    for j, other in enumerate(constraints):
        if j == candidate_index:
            continue
        const = sum((a * b for a, b in zip(other.gradient, x_p)), other.constant)
        coeffs = tuple(sum(a * b for a, b in zip(other.gradient, direction)) for direction in null)
        ineqs.append((coeffs, const))
    return _fourier_motzkin(ineqs)


@dataclass
class ReflectionGroupData:
    """Chamber walls, simple reflections, and walk machinery for one arrangement."""

    arrangement: Arrangement
    inner_product: InnerProduct
    base: Point
    strict: bool = True
    walls: list[AffineForm] = field(default_factory=list)
    simple_reflections: list[AffineIso] = field(default_factory=list)

    def __post_init__(self):
        if not is_generic(self.arrangement, self.base):
            raise ValueError("base point must be generic")
        constraints = _nearest_constraints(self.arrangement, self.base)
        walls = [
            _canonical_form(c)
            for i, c in enumerate(constraints)
            if _is_wall(i, constraints, self.arrangement.dim)
        ]
        walls.sort(key=lambda f: (f.gradient, -f.constant))
        self.walls = walls
        self.simple_reflections = [AffineIso.reflection(w, self.inner_product) for w in walls]
        if self.strict:
            # fails exactly when the relevant arrangement is not invariant
            # under its own wall reflections; pass strict=False to inspect
            # such arrangements (e.g. for the affine-root-condition report).
            for s in self.simple_reflections:
                if distance(self.arrangement, self.base, s.apply(self.base), relevant_only=True) != 1:
                    raise AssertionError(
                        "wall reflection does not move the base point across exactly one wall"
                    )
        self._word_cache: dict[tuple, tuple[Optional[tuple[int, ...]], AffineIso]] = {}

    @property
    def num_walls(self) -> int:
        return len(self.walls)

    def simple(self, i: int) -> AffineIso:
        return self.simple_reflections[i]

    def rel_distance(self, x: Point, y: Point) -> int:
        return distance(self.arrangement, x, y, relevant_only=True)

    # -- descent walk -------------------------------------------------------

    def _descents(self, target: Point) -> list[int]:
        out = []
        for i, w in enumerate(self.walls):
            if w(self.base) * w(target) < 0:
                out.append(i)
        return out

    def walk(
        self, g: AffineIso, tie_break: Optional[Callable[[list[int]], int]] = None
    ) -> tuple[tuple[int, ...], AffineIso]:
        """Factor g = s_{i1} ... s_{ik} * residual with the residual fixing the chamber.

        The word (i1, ..., ik) is reduced; `tie_break` picks among available
        descents (default: lowest wall index).  The walk is bounded by the
        initial separation count; exceeding it means g does not act on the
        arrangement.
        """
        if not g.preserves(self.inner_product):
            raise NotIsometryError("walk input must preserve the inner product")
        use_cache = tie_break is None
        if use_cache and g.key() in self._word_cache:
            return self._word_cache[g.key()]
        current = g
        point = g.apply(self.base)
        d0 = self.rel_distance(self.base, point)
        word: list[int] = []
        for _ in range(d0):
            descents = self._descents(point)
            if not descents:
                break
            i = descents[0] if tie_break is None else tie_break(descents)
            s = self.simple_reflections[i]
            word.append(i)
            current = s.compose(current)
            point = s.apply(point)
        if self.rel_distance(self.base, point) != 0:
            raise WalkError("descent walk did not reach the base chamber within its step bound")
        residual = current
        result = (tuple(word), residual)
        if use_cache:
            self._word_cache[g.key()] = result
        return result

    def reduced_word(self, g: AffineIso, tie_break=None) -> tuple[Optional[tuple[int, ...]], AffineIso]:
        """(word, residual); word is None when the residual is not the identity."""
        word, residual = self.walk(g, tie_break)
        if residual.is_identity():
            return word, residual
        return None, residual

    def element_of_word(self, word: Sequence[int]) -> AffineIso:
        g = AffineIso.identity(self.arrangement.dim)
        for i in word:
            g = g.compose(self.simple_reflections[i])
        return g

    def length(self, g: AffineIso) -> int:
        word, residual = self.walk(g)
        if not residual.is_identity():
            raise ValueError("element is not in the affine Weyl group of the arrangement")
        return len(word)

    def in_waff(self, g: AffineIso) -> bool:
        return self.walk(g)[1].is_identity()


def braid_order(s: AffineIso, t: AffineIso, cutoff: int = 24) -> Optional[int]:
    """Order of s*t, or None when it exceeds the cutoff (recorded as >= cutoff)."""
    st = s.compose(t)
    power = st
    for k in range(1, cutoff + 1):
        if power.is_identity():
            return k
        power = power.compose(st)
    return None


@dataclass
class OmegaGroup:
    """The chamber-stabilizing complement, given by explicit isometries.

    Finite groups are enumerated from their generators; an infinite cyclic
    group keeps elements as powers of the generator.  Element keys are
    indices (finite) or integer exponents (infinite cyclic).
    """

    generators: list[AffineIso]
    infinite_cyclic: bool = False
    max_enumeration: int = 4096

    def __post_init__(self):
        dim = self.generators[0].dim if self.generators else 0
        self._dim = dim
        if self.infinite_cyclic:
            if len(self.generators) != 1:
                raise ValueError("infinite cyclic Omega takes exactly one generator")
            if self.generators[0].is_identity():
                raise ValueError("infinite cyclic generator must not be the identity")
            self.elements = None
            return
        ident = AffineIso.identity(dim) if dim else AffineIso.identity(0)
        elems = {ident.key(): ident}
        frontier = [ident]
        gens = list(self.generators) + [g.inverse() for g in self.generators]
        while frontier:
            nxt = []
            for e in frontier:
                for g in gens:
                    prod = e.compose(g)
                    if prod.key() not in elems:
                        elems[prod.key()] = prod
                        nxt.append(prod)
                        if len(elems) > self.max_enumeration:
                            raise ValueError("Omega generators do not generate a small finite group")
            frontier = nxt
        ordered = sorted(elems.values(), key=lambda e: e.key())
        # identity first for readability
        ordered.sort(key=lambda e: not e.is_identity())
        self.elements = ordered
        self._index = {e.key(): i for i, e in enumerate(ordered)}

    @staticmethod
    def trivial(dim: int) -> "OmegaGroup":
        return OmegaGroup([AffineIso.identity(dim)])

    @property
    def is_finite(self) -> bool:
        return not self.infinite_cyclic

    @property
    def identity_key(self):
        return 0

    def keys(self) -> list:
        if not self.is_finite:
            raise ValueError("infinite Omega cannot be enumerated")
        return list(range(len(self.elements)))

    def __len__(self) -> int:
        if not self.is_finite:
            raise ValueError("infinite Omega has no order")
        return len(self.elements)

    def iso(self, key) -> AffineIso:
        if self.infinite_cyclic:
            g = self.generators[0]
            out = AffineIso.identity(self._dim)
            step = g if key >= 0 else g.inverse()
            for _ in range(abs(key)):
                out = out.compose(step)
            return out
        return self.elements[key]

    def key_of(self, iso: AffineIso):
        if self.infinite_cyclic:
            # powers of the generator: search a widening window
            g = self.generators[0]
            fwd = AffineIso.identity(self._dim)
            bwd = AffineIso.identity(self._dim)
            ginv = g.inverse()
            for k in range(self.max_enumeration):
                if fwd.key() == iso.key():
                    return k
                if k > 0 and bwd.key() == iso.key():
                    return -k
                fwd = fwd.compose(g)
                bwd = bwd.compose(ginv)
            raise KeyError("isometry is not a tracked power of the cyclic generator")
        idx = self._index.get(iso.key())
        if idx is None:
            raise KeyError("isometry does not belong to Omega")
        return idx

    def mul(self, a, b):
        if self.infinite_cyclic:
            return a + b
        return self.key_of(self.iso(a).compose(self.iso(b)))

    def inv(self, a):
        if self.infinite_cyclic:
            return -a
        return self.key_of(self.iso(a).inverse())

    def validate(self, data: ReflectionGroupData) -> None:
        """Generators must fix the base chamber, permute the walls, and preserve families."""
        relevant_keys = {f.key() for f in data.arrangement.families if f.relevant}
        for g in self.generators:
            if data.rel_distance(data.base, g.apply(data.base)) != 0:
                raise ValueError("Omega generator moves the base chamber")
            for f in data.arrangement.families:
                if f.relevant and transform_family(f, g).key() not in relevant_keys:
                    raise ValueError("Omega generator does not preserve the relevant families")
            for s in data.simple_reflections:
                conj = g.compose(s).compose(g.inverse())
                if all(conj.key() != t.key() for t in data.simple_reflections):
                    raise ValueError("Omega generator conjugation does not permute the simple reflections")

    def to_json(self) -> dict:
        return {
            "generators": [g.to_json() for g in self.generators],
            "order": "infinite" if self.infinite_cyclic else len(self.elements),
        }


def conjugate_simple(data: ReflectionGroupData, t: AffineIso, i: int) -> int:
    """Index of t s_i t^(-1) among the simple reflections."""
    conj = t.compose(data.simple_reflections[i]).compose(t.inverse())
    for j, s in enumerate(data.simple_reflections):
        if s.key() == conj.key():
            return j
    raise ValueError("conjugate of a simple reflection is not simple")


def decompose(
    data: ReflectionGroupData, omega: OmegaGroup, g: AffineIso
) -> tuple[object, tuple[int, ...]]:
    """Unique (omega key t, reduced word v) with g = t * (product of v)."""
    word, residual = data.walk(g)
    t_key = omega.key_of(residual)  # raises if the residual is not in Omega
    tinv = residual.inverse()
    v = tuple(conjugate_simple(data, tinv, i) for i in word)
    check = omega.iso(t_key).compose(data.element_of_word(v))
    if check.key() != g.key():
        raise AssertionError("decomposition failed to reproduce the element")
    return t_key, v


def simple_conjugacy_classes(data: ReflectionGroupData, omega: Optional[OmegaGroup] = None,
                             cutoff: int = 24) -> list[tuple[int, ...]]:
    """Finest partition of the simple reflections forced to share a parameter.

    Simple reflections joined by an odd finite braid order are conjugate in
    the affine Weyl group; Omega conjugation adds further identifications.
    """
    n = data.num_walls
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        parent[find(i)] = find(j)

    for i in range(n):
        for j in range(i + 1, n):
            m = braid_order(data.simple_reflections[i], data.simple_reflections[j], cutoff)
            if m is not None and m % 2 == 1:
                union(i, j)
    if omega is not None:
        for g in omega.generators:
            for i in range(n):
                union(i, conjugate_simple(data, g, i))
    classes: dict[int, list[int]] = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    return sorted(tuple(sorted(c)) for c in classes.values())
