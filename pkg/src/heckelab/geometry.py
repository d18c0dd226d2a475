"""Rational affine geometry: hyperplane arrangements, separation distance, reflections.

A locally finite arrangement is stored as finitely many periodic families.
The family (gradient g, base b, period P > 0) encodes the hyperplanes
{x : <g,x> + b + k*P = 0} for k in Z; period 0 encodes the single hyperplane
<g,x> + b = 0.  All data is rational; every query is exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from heckelab import linalg

Vec = tuple[Fraction, ...]


def vec(values) -> Vec:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class Point:
    coords: Vec

    def __post_init__(self):
        object.__setattr__(self, "coords", vec(self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __add__(self, other: Vec) -> "Point":
        return Point(tuple(c + d for c, d in zip(self.coords, vec(other))))

    def __sub__(self, other: "Point") -> Vec:
        return tuple(c - d for c, d in zip(self.coords, other.coords))


@dataclass(frozen=True)
class AffineForm:
    """x |-> <gradient, x> + constant; the hyperplane is its zero set."""

    gradient: Vec
    constant: Fraction

    def __post_init__(self):
        object.__setattr__(self, "gradient", vec(self.gradient))
        object.__setattr__(self, "constant", Fraction(self.constant))
        if all(g == 0 for g in self.gradient):
            raise ValueError("affine form needs a nonzero gradient")

    def __call__(self, x: Point) -> Fraction:
        return sum((g * c for g, c in zip(self.gradient, x.coords)), self.constant)


def _canonical_scale(gradient: Vec) -> Fraction:
    """lambda > 0 or < 0 making lambda*gradient primitive-integer with first nonzero > 0."""
    denom_lcm = 1
    for g in gradient:
        denom_lcm = denom_lcm * g.denominator // math.gcd(denom_lcm, g.denominator)
    ints = [int(g * denom_lcm) for g in gradient]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    lam = Fraction(denom_lcm, g)
    first = next(x for x in gradient if x != 0)
    if first < 0:
        lam = -lam
    return lam


@dataclass(frozen=True)
class HyperplaneFamily:
    gradient: Vec
    base: Fraction
    period: Fraction
    relevant: bool = False

    def __post_init__(self):
        object.__setattr__(self, "gradient", vec(self.gradient))
        object.__setattr__(self, "base", Fraction(self.base))
        object.__setattr__(self, "period", Fraction(self.period))
        if all(g == 0 for g in self.gradient):
            raise ValueError("family needs a nonzero gradient")
        if self.period < 0:
            raise ValueError("period must be >= 0")

    def canonical(self) -> "HyperplaneFamily":
        lam = _canonical_scale(self.gradient)
        g = tuple(lam * x for x in self.gradient)
        b = lam * self.base
        per = abs(lam) * self.period
        if per > 0:
            b = b % per
        return HyperplaneFamily(g, b, per, self.relevant)

    def value(self, x: Point) -> Fraction:
        return sum((g * c for g, c in zip(self.gradient, x.coords)), self.base)

    def offsets_separating(self, vx: Fraction, vy: Fraction) -> list[int]:
        """Integers k with (vx + k*P)(vy + k*P) < 0; [0] or [] when P = 0."""
        if self.period == 0:
            return [0] if vx * vy < 0 else []
        lo = min(-vx / self.period, -vy / self.period)
        hi = max(-vx / self.period, -vy / self.period)
        start = math.floor(lo) + 1
        stop = math.ceil(hi) - 1
        return list(range(start, stop + 1))

    def form(self, k: int) -> AffineForm:
        return AffineForm(self.gradient, self.base + k * self.period)

    def contains_point(self, x: Point) -> bool:
        v = self.value(x)
        if self.period == 0:
            return v == 0
        return (v / self.period).denominator == 1

    def key(self) -> tuple:
        c = self.canonical()
        return (c.gradient, c.base, c.period)


@dataclass(frozen=True)
class Arrangement:
    """Finitely many periodic families on a rational affine space, none through the basepoint."""

    dim: int
    basepoint: Point
    families: tuple[HyperplaneFamily, ...]

    def __init__(self, dim: int, basepoint, families: Iterable[HyperplaneFamily]):
        object.__setattr__(self, "dim", dim)
        if not isinstance(basepoint, Point):
            basepoint = Point(basepoint)
        object.__setattr__(self, "basepoint", basepoint)
        canon: dict[tuple, HyperplaneFamily] = {}
        for fam in families:
            c = fam.canonical()
            k = (c.gradient, c.base, c.period)
            prev = canon.get(k)
            if prev is None:
                canon[k] = c
            elif prev.relevant != c.relevant:
                raise ValueError(f"duplicate family {k} with conflicting relevance flags")
        object.__setattr__(self, "families", tuple(canon.values()))
        if basepoint.dim != dim:
            raise ValueError("basepoint dimension mismatch")
        for fam in self.families:
            if len(fam.gradient) != dim:
                raise ValueError("family dimension mismatch")
            if fam.contains_point(basepoint):
                raise ValueError(f"basepoint lies on a hyperplane of family {fam.key()}")

    def _check_dim(self, *points: Point):
        for x in points:
            if x.dim != self.dim:
                raise ValueError(f"point dimension {x.dim} != arrangement dimension {self.dim}")

    def iter_families(self, relevant_only: bool = False):
        for fam in self.families:
            if relevant_only and not fam.relevant:
                continue
            yield fam

    def relevant_subset(self) -> "Arrangement":
        return Arrangement(self.dim, self.basepoint, [f for f in self.families if f.relevant])

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "basepoint": [str(c) for c in self.basepoint.coords],
            "families": [
                {
                    "gradient": [str(g) for g in f.gradient],
                    "base": str(f.base),
                    "period": str(f.period),
                    "relevant": f.relevant,
                }
                for f in self.families
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "Arrangement":
        fams = [
            HyperplaneFamily(
                vec(f["gradient"]),
                Fraction(f["base"]),
                Fraction(f["period"]),
                bool(f.get("relevant", False)),
            )
            for f in data["families"]
        ]
        return Arrangement(int(data["dim"]), Point(vec(data["basepoint"])), fams)


def separating(arr: Arrangement, x: Point, y: Point, relevant_only: bool = False) -> list[AffineForm]:
    """All hyperplanes with x and y strictly on opposite sides.

    A hyperplane through x or y does not separate; the sign change must be
    strict.
    """
    arr._check_dim(x, y)
    forms = []
    for fam in arr.iter_families(relevant_only):
        vx, vy = fam.value(x), fam.value(y)
        for k in fam.offsets_separating(vx, vy):
            forms.append(fam.form(k))
    return forms


def distance(arr: Arrangement, x: Point, y: Point, relevant_only: bool = False) -> int:
    """Number of (relevant) hyperplanes separating x from y."""
    return len(separating(arr, x, y, relevant_only))


def _form_key(f: AffineForm) -> tuple:
    lam = _canonical_scale(f.gradient)
    return (tuple(lam * g for g in f.gradient), lam * f.constant)


def triangle_mode(
    arr: Arrangement, x: Point, y: Point, z: Point, relevant_only: bool = False
) -> tuple[str, Optional[AffineForm]]:
    """('additive', None) when d(x,y)+d(y,z) = d(x,z); else ('strict', witness).

    The witness is a hyperplane separating both (x,y) and (y,z): crossing it
    twice is what breaks additivity.
    """
    sxy = separating(arr, x, y, relevant_only)
    syz = separating(arr, y, z, relevant_only)
    dxz = distance(arr, x, z, relevant_only)
    if len(sxy) + len(syz) == dxz:
        return ("additive", None)
    keys_yz = {_form_key(f) for f in syz}
    shared = [f for f in sxy if _form_key(f) in keys_yz]
    # deterministic witness: the shared wall crossed first walking from x to y
    witness = min(shared, key=lambda f: wall_crossing_point(f, x, y)[1])
    return ("strict", witness)


def is_generic(arr: Arrangement, x: Point) -> bool:
    arr._check_dim(x)
    return not any(fam.contains_point(x) for fam in arr.families)


@dataclass(frozen=True)
class InnerProduct:
    """Symmetric positive-definite rational Gram matrix."""

    gram: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        g = linalg.mat([[Fraction(x) for x in row] for row in self.gram])
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix must be symmetric")
        # leading principal minors > 0
        for k in range(1, n + 1):
            minor = linalg.mat([row[:k] for row in g[:k]])
            if _det(minor) <= 0:
                raise ValueError("Gram matrix must be positive definite")

    @staticmethod
    def standard(n: int) -> "InnerProduct":
        return InnerProduct(tuple(tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.gram)

    def pairing(self, u: Vec, v: Vec) -> Fraction:
        return sum(ui * sum(g * vj for g, vj in zip(row, v)) for ui, row in zip(u, self.gram))

    def dual_vector(self, functional: Vec) -> Vec:
        """The vector a# with <a#, v> = functional(v) for all v."""
        sol = linalg.solve(self.gram, vec(functional))
        assert sol is not None
        return sol


def _det(a) -> Fraction:
    n = len(a)
    rows = [list(r) for r in a]
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        det *= rows[c][c]
        inv = rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] / inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return det


def reflect(h: AffineForm, ip: InnerProduct, x: Point) -> Point:
    """Orthogonal reflection of x across the hyperplane h = 0, w.r.t. ip."""
    dual = ip.dual_vector(h.gradient)
    denom = ip.pairing(dual, dual)
    factor = 2 * h(x) / denom
    return Point(tuple(c - factor * d for c, d in zip(x.coords, dual)))


def reflection_parts(h: AffineForm, ip: InnerProduct) -> tuple[tuple[tuple[Fraction, ...], ...], Vec]:
    """(A, b) with reflect(x) = A x + b."""
    dual = ip.dual_vector(h.gradient)
    denom = ip.pairing(dual, dual)
    n = len(dual)
    a = tuple(
        tuple(Fraction(1 if i == j else 0) - 2 * dual[i] * h.gradient[j] / denom for j in range(n))
        for i in range(n)
    )
    b = tuple(-2 * h.constant * d / denom for d in dual)
    return a, b


def wall_crossing_point(h: AffineForm, x: Point, y: Point) -> tuple[Point, Fraction]:
    """The unique point of the open segment (x, y) on the hyperplane, with its parameter."""
    vx, vy = h(x), h(y)
    if vx * vy >= 0:
        raise ValueError("hyperplane does not separate the two points")
    t = vx / (vx - vy)
    direction = y - x
    return x + tuple(t * d for d in direction), t
