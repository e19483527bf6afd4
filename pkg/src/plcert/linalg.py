"""Exact rational vectors and matrices.

Scalars are :class:`fractions.Fraction`, which keeps every value in reduced
form with a positive denominator. Vectors are tuples of fractions and
matrices are tuples of row tuples; both are immutable and hashable.
"""
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

Vector = Tuple[Fraction, ...]
Matrix = Tuple[Vector, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return Fraction(value)


def vec(values: Iterable) -> Vector:
    v = tuple(as_fraction(x) for x in values)
    if not v:
        raise DimensionError("vectors must have positive dimension")
    return v


def mat(rows: Iterable[Iterable]) -> Matrix:
    m = tuple(tuple(as_fraction(x) for x in row) for row in rows)
    if not m or not m[0]:
        raise DimensionError("matrices must have at least one row and column")
    width = len(m[0])
    if any(len(row) != width for row in m):
        raise DimensionError("ragged matrix rows")
    return m


def identity(n: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def unit(n: int, k: int) -> Vector:
    return tuple(ONE if i == k else ZERO for i in range(n))


def shape(M: Matrix) -> Tuple[int, int]:
    return len(M), len(M[0])


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionError(f"dot of lengths {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v)), ZERO)


def add(u: Vector, v: Vector) -> Vector:
    if len(u) != len(v):
        raise DimensionError(f"add of lengths {len(u)} and {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Vector, v: Vector) -> Vector:
    if len(u) != len(v):
        raise DimensionError(f"sub of lengths {len(u)} and {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def scale(s, v: Vector) -> Vector:
    return tuple(s * a for a in v)


def matvec(M: Matrix, x: Vector) -> Vector:
    if len(M[0]) != len(x):
        raise DimensionError(f"{len(M)}x{len(M[0])} matrix times vector of length {len(x)}")
    return tuple(dot(row, x) for row in M)


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if len(A[0]) != len(B):
        raise DimensionError("inner dimensions differ")
    cols = list(zip(*B))
    return tuple(tuple(dot(row, col) for col in cols) for row in A)


def transpose(M: Matrix) -> Matrix:
    return tuple(zip(*M))


def norm_inf(v: Sequence[Fraction]) -> Fraction:
    return max((abs(a) for a in v), default=ZERO)


def _require_square(M: Matrix) -> int:
    n = len(M)
    if any(len(row) != n for row in M):
        raise DimensionError(f"expected a square matrix, got {len(M)}x{len(M[0])}")
    return n


def det(M: Matrix) -> Fraction:
    """Exact determinant by Gaussian elimination with row swaps."""
    n = _require_square(M)
    a = [[as_fraction(v) for v in row] for row in M]
    d = ONE
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return ZERO
        if p != k:
            a[k], a[p] = a[p], a[k]
            d = -d
        piv = a[k][k]
        d *= piv
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                row_i, row_k = a[i], a[k]
                for j in range(k + 1, n):
                    row_i[j] -= f * row_k[j]
    return d


def det_sign(M: Matrix) -> int:
    d = det(M)
    return (d > 0) - (d < 0)


def solve_unique(A: Matrix, c: Vector) -> Optional[Vector]:
    """Return the unique solution of ``A x = c``, or None when A is singular."""
    n = _require_square(A)
    if len(c) != n:
        raise DimensionError(f"right-hand side has length {len(c)}, expected {n}")
    a = [[as_fraction(v) for v in row] + [as_fraction(c[i])] for i, row in enumerate(A)]
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return None
        a[k], a[p] = a[p], a[k]
        piv = a[k][k]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k] / piv
                row_i, row_k = a[i], a[k]
                for j in range(k, n + 1):
                    row_i[j] -= f * row_k[j]
    return tuple(a[i][n] / a[i][i] for i in range(n))


def rref(A: Sequence[Sequence[Fraction]]):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    a = [[as_fraction(v) for v in row] for row in A]
    rows, cols = len(a), len(a[0]) if a else 0
    pivots = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if a[i][col] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][col]
        a[r] = [v / piv for v in a[r]]
        for i in range(rows):
            if i != r and a[i][col]:
                f = a[i][col]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    return a, pivots


def kernel_basis(A: Matrix) -> Tuple[Vector, ...]:
    cols = len(A[0])
    reduced, pivots = rref(A)
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for fcol in free:
        v = [ZERO] * cols
        v[fcol] = ONE
        for r, pcol in enumerate(pivots):
            v[pcol] = -reduced[r][fcol]
        basis.append(tuple(v))
    return tuple(basis)


def affine_solution_set(A: Matrix, c: Vector):
    """Full solution set of ``A x = c``.

    Returns ``(particular, kernel_basis)`` or None when the system is
    inconsistent. Free variables are set to zero in the particular solution.
    """
    n = _require_square(A)
    if len(c) != n:
        raise DimensionError(f"right-hand side has length {len(c)}, expected {n}")
    reduced, pivots = rref([list(row) + [c[i]] for i, row in enumerate(A)])
    if n in pivots:
        return None
    x = [ZERO] * n
    for r, pcol in enumerate(pivots):
        x[pcol] = reduced[r][n]
    return tuple(x), kernel_basis(A)


def orthogonal_complement(v: Vector) -> Tuple[Vector, ...]:
    """Basis of the hyperplane ``{d : v . d = 0}``."""
    return kernel_basis((tuple(v),))


def inverse(A: Matrix) -> Optional[Matrix]:
    """Exact inverse, or None when A is singular."""
    n = _require_square(A)
    reduced, pivots = rref([list(row) + list(unit(n, i)) for i, row in enumerate(A)])
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        return None
    return tuple(tuple(row[n:]) for row in reduced)
