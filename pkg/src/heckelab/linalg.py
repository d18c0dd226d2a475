"""Small exact linear algebra over any field whose elements support +,-,*,/,==.

Works for fractions.Fraction and for heckelab.scalars.Scalar alike.  Matrices
are tuples of tuples (rows); vectors are tuples.  Everything returns new
values; nothing is mutated.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = tuple[tuple, ...]
Vector = tuple


def mat(rows) -> Matrix:
    return tuple(tuple(r) for r in rows)


def shape(a: Matrix) -> tuple[int, int]:
    return (len(a), len(a[0]) if a else 0)


def identity(n: int, one, zero) -> Matrix:
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def zeros(nrows: int, ncols: int, zero) -> Matrix:
    return tuple((zero,) * ncols for _ in range(nrows))


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))

def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k = shape(a)
    k2, m = shape(b)
    if k != k2:
        raise ValueError(f"shape mismatch {shape(a)} x {shape(b)}")
    bt = list(zip(*b))
    out = []
    for row in a:
        out.append(tuple(_dot(row, col) for col in bt))
    return tuple(out)


def _dot(u: Sequence, v: Sequence):
    it = iter(zip(u, v))
    x, y = next(it)
    acc = x * y
    for x, y in it:
        acc = acc + x * y
    return acc


def mat_vec(a: Matrix, v: Vector) -> Vector:
    return tuple(_dot(row, v) for row in a)


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(x + y for x, y in zip(u, v))


def vec_sub(u: Vector, v: Vector) -> Vector:
    return tuple(x - y for x, y in zip(u, v))


def vec_scale(c, v: Vector) -> Vector:
    return tuple(c * x for x in v)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def trace(a: Matrix):
    acc = a[0][0]
    for i in range(1, len(a)):
        acc = acc + a[i][i]
    return acc


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot column indices."""
    rows = [list(r) for r in a]
    nrows, ncols = len(rows), len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return mat(rows), pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def kernel_basis(a: Matrix, one, zero) -> list[Vector]:
    """Basis of the right kernel {v : a v = 0}, from the RREF free columns."""
    if not a:
        return []
    red, pivots = rref(a)
    ncols = shape(a)[1]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(tuple(v))
    return basis


def solve(a: Matrix, b: Vector):
    """One solution of a x = b, or None if inconsistent."""
    nrows, ncols = shape(a)
    aug = tuple(row + (bv,) for row, bv in zip(a, b))
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    zero = a[0][0] - a[0][0] if a and a[0] else Fraction(0)
    x = [zero] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return tuple(x)


def mat_inv(a: Matrix) -> Matrix:
    n, m = shape(a)
    if n != m:
        raise ValueError("inverse of non-square matrix")
    zero = a[0][0] - a[0][0]
    one = None
    for row in a:
        for e in row:
            if e != zero:
                one = e / e
                break
        if one is not None:
            break
    if one is None:
        raise ValueError("singular matrix")
    aug = tuple(row + tuple(one if i == j else zero for j in range(n)) for i, row in enumerate(a))
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("singular matrix")
    return tuple(row[n:] for row in red)


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return shape(a) == shape(b) and all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_scalar_multiple_of_identity(a: Matrix):
    """The scalar c with a == c*I, or None if a is not scalar."""
    n, m = shape(a)
    if n != m or n == 0:
        return None
    c = a[0][0]
    zero = c - c
    for i in range(n):
        for j in range(n):
            want = c if i == j else zero
            if a[i][j] != want:
                return None
    return c
