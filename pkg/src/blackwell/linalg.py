"""Dense exact linear algebra over :class:`fractions.Fraction`.

Matrices are tuples of row tuples and vectors are tuples, so every value is
immutable and hashable (the chain-level caches rely on that).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


class SingularMatrixError(ArithmeticError):
    """Raised when exact elimination finds no nonzero pivot."""

    def __init__(self, column: int):
        super().__init__(f"matrix is singular: no nonzero pivot in column {column}")
        self.column = column


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def as_vector(xs: Sequence) -> Vector:
    return tuple(Fraction(x) for x in xs)


def identity(n: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def zeros(n: int, m: int | None = None) -> Matrix:
    m = n if m is None else m
    return tuple((ZERO,) * m for _ in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = transpose(b)
    return tuple(tuple(_dot(row, col) for col in cols) for row in a)


def matvec(a: Matrix, x: Vector) -> Vector:
    return tuple(_dot(row, x) for row in a)


def vecmat(x: Vector, a: Matrix) -> Vector:
    """Row vector times matrix."""
    n = len(a[0]) if a else 0
    out = [ZERO] * n
    for xi, row in zip(x, a):
        if xi:
            for j, aij in enumerate(row):
                if aij:
                    out[j] += xi * aij
    return tuple(out)


def matadd(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def matsub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def vecadd(x: Vector, y: Vector) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def vecsub(x: Vector, y: Vector) -> Vector:
    return tuple(a - b for a, b in zip(x, y))


def matpow(a: Matrix, k: int) -> Matrix:
    """``a**k`` by repeated squaring (``k >= 0``)."""
    if k < 0:
        raise ValueError("negative exponent")
    result = identity(len(a))
    base = a
    while k:
        if k & 1:
            result = matmul(result, base)
        k >>= 1
        if k:
            base = matmul(base, base)
    return result


def solve_exact(a: Matrix, b: Vector) -> Vector:
    """Solve ``a x = b`` exactly by Gaussian elimination with partial pivoting.

    Pivot choice only needs a nonzero entry in exact arithmetic; we take the
    first one so that results are reproducible.

    Raises
    ------
    SingularMatrixError
        If a column has no nonzero pivot; ``.column`` is its 0-based index.
    """
    n = len(a)
    if any(len(row) != n for row in a) or len(b) != n:
        raise ValueError("solve_exact needs a square matrix and a matching vector")
    m = [list(row) + [bi] for row, bi in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError(col)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
        prow = m[col]
        inv = 1 / prow[col]
        for r in range(col + 1, n):
            factor = m[r][col]
            if factor:
                factor *= inv
                row = m[r]
                for c in range(col, n + 1):
                    if prow[c]:
                        row[c] -= factor * prow[c]
    x = [ZERO] * n
    for r in range(n - 1, -1, -1):
        acc = m[r][n]
        for c in range(r + 1, n):
            if m[r][c]:
                acc -= m[r][c] * x[c]
        x[r] = acc / m[r][r]
    return tuple(x)


def inverse_exact(a: Matrix) -> Matrix:
    n = len(a)
    cols = [solve_exact(a, tuple(ONE if i == j else ZERO for i in range(n))) for j in range(n)]
    return transpose(tuple(cols))


def _dot(x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    acc = ZERO
    for a, b in zip(x, y):
        if a and b:
            acc += a * b
    return acc
