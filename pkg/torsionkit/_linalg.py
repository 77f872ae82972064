"""
Exact integer linear algebra shared by the algebra modules.

Integer matrices are plain nested lists (rows). Determinants and inverses
go through sympy so results stay exact; the echelon lattice is kept by hand
because it has to be updated one relation at a time.
"""

from __future__ import annotations

from math import gcd
from typing import Callable, Sequence, TypeVar

from sympy import Matrix, mod_inverse
from sympy.core.intfunc import igcdex

from .errors import DegenerateFormError

T = TypeVar("T")


def identity_rows(size: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(size)] for i in range(size)]


def to_matrix(rows: Sequence[Sequence[int]], cols: int | None = None) -> Matrix:
    """Build a sympy Matrix, keeping the shape for empty inputs."""
    if not rows:
        return Matrix(0, cols or 0, [])
    return Matrix([list(r) for r in rows])


def from_matrix(m: Matrix) -> list[list[int]]:
    return [[int(m[i, j]) for j in range(m.cols)] for i in range(m.rows)]


def integer_determinant(rows: Sequence[Sequence[int]]) -> int:
    if not rows:
        return 1
    return int(to_matrix(rows).det())


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def transpose(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    return [list(col) for col in zip(*rows)]


def unit_inverse(value: int, modulus: int | None) -> int:
    """Inverse of a unit of Z or Z_r."""
    if modulus is None:
        if value not in (1, -1):
            raise DegenerateFormError(f"{value} is not a unit of Z")
        return value
    try:
        return int(mod_inverse(value % modulus, modulus))
    except ValueError as e:
        raise DegenerateFormError(f"{value} is not a unit mod {modulus}") from e


def is_unit(value: int, modulus: int | None) -> bool:
    if modulus is None:
        return value in (1, -1)
    return gcd(value, modulus) == 1


def inverse_matrix(rows: Sequence[Sequence[int]], modulus: int | None) -> list[list[int]]:
    """Inverse of a matrix invertible over Z (unimodular) or over Z_r."""
    size = len(rows)
    if size == 0:
        return []
    m = to_matrix(rows)
    if modulus is None:
        det = int(m.det())
        if det not in (1, -1):
            raise DegenerateFormError(f"matrix with determinant {det} is not invertible over Z")
        return from_matrix(m.adjugate() * det)
    try:
        inv = m.inv_mod(modulus)
    except ValueError as e:
        raise DegenerateFormError(f"matrix is not invertible mod {modulus}") from e
    return [[x % modulus for x in row] for row in from_matrix(inv)]


def cofactor_determinant(matrix: Sequence[Sequence[T]], one: T, zero: T) -> T:
    """Laplace expansion along the first row, memoized on column subsets.

    Works for any commutative ring element supporting ``+``, ``-`` and ``*``.
    """
    size = len(matrix)
    if size == 0:
        return one
    memo: dict[tuple[int, frozenset[int]], T] = {}

    def minor(row: int, cols: frozenset[int]) -> T:
        if row == size:
            return one
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = zero
        ordered = sorted(cols)
        for position, col in enumerate(ordered):
            entry = matrix[row][col]
            if _is_zero(entry):
                continue
            term = entry * minor(row + 1, cols - {col})
            total = total - term if position % 2 else total + term
        memo[key] = total
        return total

    return minor(0, frozenset(range(size)))


def _is_zero(entry) -> bool:
    check: Callable[[], bool] | None = getattr(entry, "is_zero", None)
    if check is None:
        return entry == 0
    return check() if callable(check) else bool(check)


class EchelonLattice:
    """Integer row echelon form grown one vector at a time.

    Pivots sit in increasing column order; inserting a vector merges it
    into existing pivot rows with extended gcd steps. ``reduce`` returns
    the canonical representative of a vector modulo the lattice, obtained
    by reducing each pivot column to ``[0, pivot)`` in column order.
    With a modulus the lattice contains ``modulus * e_c`` for every column.
    """

    def __init__(self, dimension: int, modulus: int | None = None):
        self.dimension = dimension
        self.modulus = modulus
        self._rows: dict[int, list[int]] = {}
        if modulus is not None:
            for c in range(dimension):
                row = [0] * dimension
                row[c] = modulus
                self._rows[c] = row

    def _mod(self, vector: list[int]) -> list[int]:
        if self.modulus is None:
            return vector
        return [x % self.modulus for x in vector]

    def add(self, vector: Sequence[int]) -> None:
        v = self._mod(list(vector))
        for c in range(self.dimension):
            if v[c] == 0:
                continue
            row = self._rows.get(c)
            if row is None:
                if v[c] < 0:
                    v = [-x for x in v]
                self._rows[c] = v
                return
            a, b = row[c], v[c]
            s, t, g = igcdex(a, b)
            merged = [s * x + t * y for x, y in zip(row, v)]
            v = [(a // g) * y - (b // g) * x for x, y in zip(row, v)]
            if self.modulus is not None:
                merged = self._mod(merged)
                if merged[c] == 0:
                    merged[c] = self.modulus
                v = self._mod(v)
            self._rows[c] = merged

    def reduce(self, vector: Sequence[int]) -> tuple[int, ...]:
        v = self._mod(list(vector))
        for c in sorted(self._rows):
            pivot_row = self._rows[c]
            q = v[c] // pivot_row[c]
            if q:
                v = [x - q * y for x, y in zip(v, pivot_row)]
        return tuple(self._mod(v))

    def pivots(self) -> dict[int, int]:
        return {c: row[c] for c, row in self._rows.items()}
