"""Finite crystallographic root systems and the arrangements they induce.

Simple roots live in a standard rational realization (A_n in the sum-zero
hyperplane of Q^(n+1), B/C/D_n in Q^n, G_2 in the sum-zero hyperplane of Q^3).
Affine roots are pairs alpha + k with integer level k (split convention).
The coweight space is modelled as the rational span of the roots, so that the
Levi-fixed directions V_M have the expected dimension rank - |levi|.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from heckelab import linalg
from heckelab.geometry import (
    Arrangement,
    HyperplaneFamily,
    InnerProduct,
    Point,
    Vec,
    is_generic,
    vec,
)

ROOT_COUNTS = {"A": lambda n: n * (n + 1), "B": lambda n: 2 * n * n, "C": lambda n: 2 * n * n,
               "D": lambda n: 2 * n * (n - 1), "G": lambda n: 12}

CARTAN = {
    "A": lambda n: [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)],
    "B": lambda n: _cartan_bc(n, last=("B")),
    "C": lambda n: _cartan_bc(n, last=("C")),
    "D": lambda n: _cartan_d(n),
    "G": lambda n: [[2, -1], [-3, 2]],
}


def _cartan_bc(n, last):
    # convention C_ij = 2(a_i, a_j)/(a_j, a_j)
    c = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
    if n >= 2:
        if last == "B":
            c[n - 2][n - 1] = -2
            c[n - 1][n - 2] = -1
        else:
            c[n - 2][n - 1] = -1
            c[n - 1][n - 2] = -2
    return c


def _cartan_d(n):
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i in range(n - 2):
        c[i][i + 1] = c[i + 1][i] = -1
    if n >= 3:
        c[n - 3][n - 1] = c[n - 1][n - 3] = -1
    return c


def _dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _simple_roots(letter: str, rank: int) -> list[Vec]:
    if letter == "A":
        m = rank + 1
        return [vec([1 if j == i else (-1 if j == i + 1 else 0) for j in range(m)]) for i in range(rank)]
    if letter in ("B", "C", "D"):
        rs = [vec([1 if j == i else (-1 if j == i + 1 else 0) for j in range(rank)]) for i in range(rank - 1)]
        if letter == "B":
            rs.append(vec([1 if j == rank - 1 else 0 for j in range(rank)]))
        elif letter == "C":
            rs.append(vec([2 if j == rank - 1 else 0 for j in range(rank)]))
        else:
            rs.append(vec([1 if j >= rank - 2 else 0 for j in range(rank)]))
        return rs
    if letter == "G":
        return [vec([1, -1, 0]), vec([-2, 1, 1])]
    raise ValueError(f"unsupported Cartan type {letter!r}")


@dataclass(frozen=True)
class RootSystem:
    """A finite crystallographic root system of type A/B/C/D/G2."""

    label: str

    def __post_init__(self):
        letter, rank = self.letter, self.rank
        if letter not in CARTAN:
            raise ValueError(f"unsupported type {self.label!r}")
        if letter == "G" and rank != 2:
            raise ValueError("only G2 is supported in the G series")
        if letter == "D" and rank < 3:
            raise ValueError("D_n needs rank >= 3")
        if rank < 1:
            raise ValueError("rank must be positive")
        # declared Cartan matrix must match the realization
        simple = self.simple_roots
        cartan = [
            [2 * _dot(a, b) / _dot(b, b) for b in simple]
            for a in simple
        ]
        want = CARTAN[letter](rank)
        if [[int(x) for x in row] for row in cartan] != want or any(
            x.denominator != 1 for row in cartan for x in row
        ):
            raise AssertionError("realized Cartan matrix disagrees with the declared type")
        if len(self.roots) != ROOT_COUNTS[letter](rank):
            raise AssertionError("root count disagrees with the declared type")

    @property
    def letter(self) -> str:
        return self.label[0].upper()

    @property
    def rank(self) -> int:
        return int(self.label[1:])

    @property
    def ambient_dim(self) -> int:
        return len(self.simple_roots[0])

    @property
    def simple_roots(self) -> tuple[Vec, ...]:
        return tuple(_simple_roots(self.letter, self.rank))

    @property
    def roots(self) -> tuple[Vec, ...]:
        return _all_roots(self.label)

    @property
    def positive_roots(self) -> tuple[Vec, ...]:
        return tuple(r for r in self.roots if all(c >= 0 for c in self._simple_coords(r)))

    def _simple_coords(self, root: Vec) -> tuple[Fraction, ...]:
        cols = linalg.transpose(linalg.mat(self.simple_roots))
        sol = linalg.solve(cols, root)
        if sol is None:
            raise ValueError("vector outside the root span")
        return sol

    def contains(self, v: Vec) -> bool:
        return v in set(self.roots)


@dataclass(frozen=True)
class AffineRoot:
    """alpha + k: the affine functional x |-> <alpha, x> + k."""

    root: Vec
    level: int

    def __post_init__(self):
        object.__setattr__(self, "root", vec(self.root))

    def value(self, x: Point) -> Fraction:
        return _dot(self.root, x.coords) + self.level


def _cache_key(label):  # tiny memo; RootSystem is immutable
    return label


_rootcache: dict[str, tuple[Vec, ...]] = {}


def _all_roots(label: str) -> tuple[Vec, ...]:
    if label in _rootcache:
        return _rootcache[label]
    simple = _simple_roots(label[0].upper(), int(label[1:]))
    roots = set(simple)
    frontier = set(simple)
    while frontier:
        new = set()
        for beta in list(roots):
            for alpha in simple:
                coeff = 2 * _dot(beta, alpha) / _dot(alpha, alpha)
                image = tuple(b - coeff * a for b, a in zip(beta, alpha))
                if image not in roots:
                    new.add(image)
        if not new:
            break
        roots |= new
        frontier = new
    roots |= {tuple(-x for x in r) for r in roots}
    _rootcache[label] = tuple(sorted(roots))
    return _rootcache[label]


@dataclass(frozen=True)
class LeviSubset:
    """A subset of simple-root indices and the sub-root-system it generates."""

    system: RootSystem
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(set(self.indices)))
        object.__setattr__(self, "indices", idx)
        if any(i < 0 or i >= self.system.rank for i in idx):
            raise ValueError("Levi index out of range")

    @property
    def levi_roots(self) -> tuple[Vec, ...]:
        """Roots lying in the span of the selected simple roots."""
        out = []
        for r in self.system.roots:
            coords = self.system._simple_coords(r)
            if all(c == 0 for i, c in enumerate(coords) if i not in self.indices):
                out.append(r)
        return tuple(out)

    @property
    def fixed_directions(self) -> tuple[Vec, ...]:
        """Canonical rational basis of V_M = {v in span(roots) : alpha_i(v) = 0, i in levi}."""
        simple = self.system.simple_roots
        span_basis = simple  # simple roots are a basis of the root span
        rows = [[_dot(simple[i], b) for b in span_basis] for i in self.indices]
        if not rows:
            coeff_basis = linalg.identity(len(span_basis), Fraction(1), Fraction(0))
            coeffs = [tuple(row) for row in coeff_basis]
        else:
            coeffs = linalg.kernel_basis(linalg.mat(rows), Fraction(1), Fraction(0))
        vectors = []
        for cs in coeffs:
            v = tuple(
                sum((c * b[k] for c, b in zip(cs, span_basis)), Fraction(0))
                for k in range(self.system.ambient_dim)
            )
            vectors.append(v)
        return tuple(vectors)


def affine_roots_in_slab(rs: RootSystem, x: Point, y: Point) -> list[AffineRoot]:
    """Affine roots whose value changes sign or vanishes somewhere on [x, y]."""
    if x.dim != rs.ambient_dim or y.dim != rs.ambient_dim:
        raise ValueError("point dimension does not match the root realization")
    out = []
    for alpha in rs.roots:
        vx, vy = _dot(alpha, x.coords), _dot(alpha, y.coords)
        lo, hi = min(vx, vy), max(vx, vy)
        k = math.ceil(-hi)
        while k <= math.floor(-lo):
            out.append(AffineRoot(alpha, k))
            k += 1
    return out


def vanishing_roots_at(rs: RootSystem, x: Point) -> list[AffineRoot]:
    """All affine roots alpha + k with alpha(x) + k = 0."""
    out = []
    for alpha in rs.roots:
        v = _dot(alpha, x.coords)
        if v.denominator == 1:
            out.append(AffineRoot(alpha, -int(v)))
    return out


def depthzero_arrangement(
    rs: RootSystem,
    levi: LeviSubset,
    x0: Point,
    basis: Optional[Sequence[Vec]] = None,
    relevant: bool = True,
) -> Arrangement:
    """Restriction of the non-Levi affine root hyperplanes to x0 + V_M.

    The result lives in intrinsic coordinates for the chosen (default:
    canonical) rational basis of V_M; proportional restrictions are merged and
    every family is periodic.
    """
    if x0.dim != rs.ambient_dim:
        raise ValueError("x0 dimension does not match the root realization")
    b = tuple(basis) if basis is not None else levi.fixed_directions
    if basis is not None:
        _check_spans_fixed_directions(levi, b)
    levi_roots = set(levi.levi_roots)
    families = []
    for alpha in rs.positive_roots:
        if alpha in levi_roots:
            continue
        value0 = _dot(alpha, x0.coords)
        if value0.denominator == 1:
            raise ValueError(
                f"x0 lies on an excluded affine root hyperplane (root {alpha}, level {-value0})"
            )
        gradient = tuple(_dot(alpha, direction) for direction in b)
        families.append(HyperplaneFamily(gradient, value0, Fraction(1), relevant=relevant))
    return Arrangement(len(b), Point((Fraction(0),) * len(b)), families)


def _check_spans_fixed_directions(levi: LeviSubset, basis: Sequence[Vec]):
    canonical = levi.fixed_directions
    if len(basis) != len(canonical):
        raise ValueError("basis has the wrong number of vectors")
    rows = linalg.mat(list(canonical) + list(basis))
    if linalg.rank(rows) != len(canonical):
        raise ValueError("basis does not span V_M")


def vanishing_monotone_check(rs: RootSystem, levi: LeviSubset, x: Point, y: Point) -> bool:
    """For generic x, the vanishing set at x is contained in the one at y.

    Genericity means every affine root vanishing at x comes from the Levi
    subsystem; y must differ from x by a Levi-fixed direction.
    """
    diff = y - x
    for i in levi.indices:
        if _dot(rs.simple_roots[i], diff) != 0:
            raise ValueError("y does not lie in the affine slice through x")
    levi_roots = set(levi.levi_roots)
    vx = vanishing_roots_at(rs, x)
    if any(a.root not in levi_roots for a in vx):
        raise ValueError("x is not generic for the depth-zero arrangement")
    vy = {(a.root, a.level) for a in vanishing_roots_at(rs, y)}
    return all((a.root, a.level) in vy for a in vx)


@dataclass(frozen=True)
class QuotientSpace:
    """Projection of the arrangement space along the common kernel of relevant gradients."""

    projection: tuple[tuple[Fraction, ...], ...]  # maps ambient coords to quotient coords
    kernel_basis: tuple[Vec, ...]  # basis of V^Krel
    inner_product: Optional[InnerProduct]
    arrangement: Optional[Arrangement]

    @property
    def dim(self) -> int:
        return len(self.projection)


def quotient_space(arr: Arrangement, ip: InnerProduct) -> QuotientSpace:
    """Quotient by V^Krel = intersection of kernels of relevant gradients.

    Coordinates on the quotient are taken along the ip-orthogonal complement
    of V^Krel, so the restricted inner product transports directly.
    """
    relevant = [f for f in arr.families if f.relevant]
    n = arr.dim
    if relevant:
        rows = linalg.mat([f.gradient for f in relevant])
        kern = linalg.kernel_basis(rows, Fraction(1), Fraction(0))
    else:
        kern = list(linalg.identity(n, Fraction(1), Fraction(0)))
    if not kern:
        comp = list(linalg.identity(n, Fraction(1), Fraction(0)))
    else:
        # orthogonal complement of V^Krel w.r.t. ip: kernel of v |-> <k_i, v>_ip
        rows = linalg.mat([linalg.mat_vec(ip.gram, k) for k in kern])
        comp = linalg.kernel_basis(rows, Fraction(1), Fraction(0))
    if not comp:
        return QuotientSpace(tuple(), tuple(kern), None, None)
    # projection: coordinates of (v mod V^Krel) in the basis comp
    cols = linalg.transpose(linalg.mat(list(comp) + list(kern)))
    change = linalg.mat_inv(cols)  # full coordinates in basis comp + kern
    proj = tuple(change[: len(comp)])
    gram = linalg.mat([[ip.pairing(u, v) for v in comp] for u in comp])
    quotient_ip = InnerProduct(gram)
    base = linalg.mat_vec(proj, arr.basepoint.coords)
    fams = []
    for f in relevant:
        gradient = tuple(_dot(f.gradient, c) for c in comp)
        fams.append(HyperplaneFamily(gradient, f.base, f.period, relevant=True))
    qarr = Arrangement(len(comp), Point(base), fams)
    return QuotientSpace(proj, tuple(kern), quotient_ip, qarr)


def verify_affine_root_conditions(arr: Arrangement, group) -> dict:
    """Check the affine-root-system conditions on a relevant arrangement.

    Conditions: (1) the generated reflection group maps relevant families to
    relevant families; (2) properness, delegated to the finite periodic-family
    representation; (3) every relevant family has infinitely many parallels,
    i.e. period > 0.  `group` is a reflections.ReflectionGroupData.
    """
    from heckelab.reflections import transform_family

    report: dict = {"conditions": {}, "passed": True}
    relevant = [f for f in arr.families if f.relevant]
    keys = {f.key() for f in relevant}
    invariance_witness = None
    for s in group.simple_reflections:
        for f in relevant:
            image = transform_family(f, s)
            if image.key() not in keys:
                invariance_witness = {"family": [str(g) for g in f.gradient], "reflection": s.to_json()}
                break
        if invariance_witness:
            break
    report["conditions"]["reflection_invariance"] = {
        "passed": invariance_witness is None,
        "witness": invariance_witness,
    }
    report["conditions"]["properness"] = {
        "passed": True,
        "note": "finitely many periodic families; the generated group acts discretely",
    }
    parallel_witness = None
    for f in relevant:
        if f.period == 0:
            parallel_witness = {"family": [str(g) for g in f.gradient], "period": str(f.period)}
            break
    report["conditions"]["infinitely_many_parallels"] = {
        "passed": parallel_witness is None,
        "witness": parallel_witness,
    }
    report["passed"] = all(c["passed"] for c in report["conditions"].values())
    return report
