"""
Determinants of trilinear forms and of their Massey-product analogues.

A form ``f: L x K x K -> R`` with ``K`` free of rank n and ``L`` free of
rank n - 1 is stored as a table ``f[i][j][k]`` over working bases
``b_1..b_{n-1}`` of L and ``a_1..a_n`` of K (zero-indexed in Python).
Polynomials live in the symmetric algebra ``S = R[a_1*, ..., a_n*]`` and
are handled by ``MultiPoly``, a thin wrapper around a sympy integer
polynomial ring that reduces coefficients mod r when ``R = Z_r``.

For the theta matrix ``theta_ij = sum_k f(b_i, a_k, a_j) a_k*`` the
determinant ``d`` is characterized by ``det theta(j) = (-1)^j a_j* d`` for
every struck column j (one-indexed).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Sequence

from sympy.polys.domains import ZZ
from sympy.polys.rings import PolyRing

from ._linalg import cofactor_determinant, integer_determinant, inverse_matrix, is_unit
from .errors import DivisionError, FormError
from .utils.utils_logger import logger

Monomial = tuple[int, ...]

#####################################
# Polynomials in the symmetric algebra
#####################################


@lru_cache(maxsize=None)
def _poly_ring(nvars: int) -> PolyRing:
    return PolyRing(",".join(f"a{i}" for i in range(1, nvars + 1)), ZZ)


class MultiPoly:
    """Polynomial over Z or Z_r in the dual basis variables ``a_1*, ..., a_n*``."""

    __slots__ = ("nvars", "modulus", "_poly")

    def __init__(self, nvars: int, terms: Mapping[Monomial, int] | None = None, modulus: int | None = None):
        if nvars < 1:
            raise FormError("a polynomial ring needs at least one variable")
        self.nvars = nvars
        self.modulus = modulus
        cleaned: dict[Monomial, int] = {}
        for mono, c in (terms or {}).items():
            if len(mono) != nvars:
                raise FormError(f"monomial {mono} does not have {nvars} exponents")
            c = int(c)
            if modulus is not None:
                c %= modulus
            if c:
                cleaned[tuple(mono)] = c
        self._poly = _poly_ring(nvars).from_dict(cleaned) if cleaned else _poly_ring(nvars).zero

    @classmethod
    def _wrap(cls, nvars: int, poly, modulus: int | None) -> MultiPoly:
        return cls(nvars, {m: int(c) for m, c in poly.items()}, modulus)

    @classmethod
    def zero(cls, nvars: int, modulus: int | None = None) -> MultiPoly:
        return cls(nvars, {}, modulus)

    @classmethod
    def constant(cls, nvars: int, value: int, modulus: int | None = None) -> MultiPoly:
        return cls(nvars, {(0,) * nvars: value}, modulus)

    @classmethod
    def one(cls, nvars: int, modulus: int | None = None) -> MultiPoly:
        return cls.constant(nvars, 1, modulus)

    @classmethod
    def variable(cls, index: int, nvars: int, modulus: int | None = None) -> MultiPoly:
        """The zero-indexed variable ``a_{index+1}*``."""
        mono = [0] * nvars
        mono[index] = 1
        return cls(nvars, {tuple(mono): 1}, modulus)

    def _check(self, other: MultiPoly) -> None:
        if other.nvars != self.nvars or other.modulus != self.modulus:
            raise FormError(
                f"cannot combine polynomials over ({self.nvars}, mod {self.modulus}) and ({other.nvars}, mod {other.modulus})"
            )

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, int):
            return MultiPoly.constant(self.nvars, other, self.modulus)
        self._check(other)
        return other

    def __add__(self, other) -> MultiPoly:
        other = self._coerce(other)
        return MultiPoly._wrap(self.nvars, self._poly + other._poly, self.modulus)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly._wrap(self.nvars, -self._poly, self.modulus)

    def __sub__(self, other) -> MultiPoly:
        other = self._coerce(other)
        return MultiPoly._wrap(self.nvars, self._poly - other._poly, self.modulus)

    def __rsub__(self, other) -> MultiPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> MultiPoly:
        if isinstance(other, int):
            return MultiPoly._wrap(self.nvars, self._poly * other, self.modulus)
        self._check(other)
        return MultiPoly._wrap(self.nvars, self._poly * other._poly, self.modulus)

    def __rmul__(self, other: int) -> MultiPoly:
        return self * other

    def __pow__(self, exponent: int) -> MultiPoly:
        result = MultiPoly.one(self.nvars, self.modulus)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = MultiPoly.constant(self.nvars, other, self.modulus)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.modulus == other.modulus and self._poly == other._poly

    def __hash__(self) -> int:
        return hash((self.nvars, self.modulus, frozenset(self.terms())))

    def terms(self) -> list[tuple[Monomial, int]]:
        return sorted((tuple(m), int(c)) for m, c in self._poly.items())

    def is_zero(self) -> bool:
        return not self._poly

    def degrees(self) -> set[int]:
        return {sum(m) for m, _ in self.terms()}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int | None:
        """Degree of a homogeneous polynomial, ``None`` for zero."""
        degrees = self.degrees()
        if not degrees:
            return None
        if len(degrees) > 1:
            raise FormError(f"{self} is not homogeneous")
        return degrees.pop()

    def divide_by_variable(self, index: int) -> MultiPoly:
        """Exact division by ``a_{index+1}*``."""
        result: dict[Monomial, int] = {}
        for mono, c in self.terms():
            if mono[index] == 0:
                raise DivisionError(f"{self} is not divisible by a{index + 1}")
            shifted = list(mono)
            shifted[index] -= 1
            result[tuple(shifted)] = c
        return MultiPoly(self.nvars, result, self.modulus)

    def substitute(self, images: Sequence[MultiPoly]) -> MultiPoly:
        """Replace ``a_{l+1}*`` by ``images[l]``."""
        if len(images) != self.nvars:
            raise FormError(f"need {self.nvars} images, got {len(images)}")
        target = images[0]
        total = MultiPoly.zero(target.nvars, target.modulus)
        for mono, c in self.terms():
            term = MultiPoly.constant(target.nvars, c, target.modulus)
            for var, e in enumerate(mono):
                if e:
                    term = term * images[var] ** e
            total = total + term
        return total

    def with_modulus(self, modulus: int) -> MultiPoly:
        return MultiPoly(self.nvars, dict(self.terms()), modulus)

    def to_json(self) -> dict[str, int]:
        return {_monomial_label(m): c for m, c in self.terms()}

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        return " + ".join(f"{c}*{_monomial_label(m)}" for m, c in self.terms())


def _monomial_label(mono: Monomial) -> str:
    parts = []
    for i, e in enumerate(mono, start=1):
        if e == 1:
            parts.append(f"a{i}")
        elif e > 1:
            parts.append(f"a{i}^{e}")
    return "*".join(parts) or "1"


#####################################
# Change of basis
#####################################


@dataclass(frozen=True)
class ChangeOfBasis:
    """Rows are the new basis vectors written in the old basis."""

    matrix: tuple[tuple[int, ...], ...]
    modulus: int | None = None

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if any(len(row) != len(rows) for row in rows):
            raise FormError("change of basis matrix must be square")
        object.__setattr__(self, "matrix", rows)
        if not is_unit(integer_determinant(rows), self.modulus):
            raise FormError(f"change of basis with determinant {integer_determinant(rows)} is not invertible")

    @property
    def size(self) -> int:
        return len(self.matrix)

    @property
    def det(self) -> int:
        d = integer_determinant(self.matrix)
        return d if self.modulus is None else d % self.modulus


def dual_substitution(change: ChangeOfBasis, modulus: int | None = None) -> list[MultiPoly]:
    """Images of the old dual variables in the new ones: ``a_l* = sum_j C[j][l] a'_j*``."""
    n = change.size
    modulus = modulus if modulus is not None else change.modulus
    return [
        MultiPoly(
            n,
            {tuple(1 if v == j else 0 for v in range(n)): change.matrix[j][l] for j in range(n)},
            modulus,
        )
        for l in range(n)
    ]


def dual_inverse_substitution(change: ChangeOfBasis, modulus: int | None = None) -> list[MultiPoly]:
    """Images of the new dual variables in the old ones: ``a'_j* = sum_l ((C^T)^-1)[j][l] a_l*``."""
    n = change.size
    modulus = modulus if modulus is not None else change.modulus
    inverse = inverse_matrix(change.matrix, modulus)
    # ((C^T)^-1)[j][l] == (C^-1)[l][j]
    return [
        MultiPoly(n, {tuple(1 if v == l else 0 for v in range(n)): inverse[l][j] for l in range(n)}, modulus)
        for j in range(n)
    ]


#####################################
# Trilinear forms
#####################################


@dataclass(frozen=True)
class AlternatingForm:
    """Trilinear form ``f(b_i, a_j, a_k)``, skew in its last two slots.

    ``table`` has shape ``(n - 1) x n x n``. Over Z_r with r even the
    diagonal ``f[i][j][j]`` may be ``r / 2``; otherwise it must vanish.
    """

    n: int
    table: tuple[tuple[tuple[int, ...], ...], ...]
    modulus: int | None = None

    def __post_init__(self):
        n, r = self.n, self.modulus
        if n < 2:
            raise FormError(f"K must have rank at least 2, got {n}")
        reduce_entry = (lambda x: int(x)) if r is None else (lambda x: int(x) % r)
        table = tuple(tuple(tuple(reduce_entry(x) for x in row) for row in block) for block in self.table)
        if len(table) != n - 1 or any(len(block) != n or any(len(row) != n for row in block) for block in table):
            raise FormError(f"form table must have shape {n - 1} x {n} x {n}")
        for i, block in enumerate(table):
            for j in range(n):
                for k in range(n):
                    total = block[j][k] + block[k][j]
                    if (total if r is None else total % r) != 0:
                        raise FormError(f"f[{i}][{j}][{k}] and f[{i}][{k}][{j}] are not opposite")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_entries(
        cls, n: int, entries: Mapping[tuple[int, int, int], int], modulus: int | None = None
    ) -> AlternatingForm:
        """Build from values on ``j < k`` (and diagonal ``j == k``), filling in the skew partners."""
        table = [[[0] * n for _ in range(n)] for _ in range(n - 1)]
        for (i, j, k), value in entries.items():
            table[i][j][k] = value
            table[i][k][j] = -value if j != k else value
        return cls(n, tuple(tuple(tuple(row) for row in block) for block in table), modulus)

    def value(self, i: int, j: int, k: int) -> int:
        return self.table[i][j][k]

    def diagonal_support(self) -> frozenset[int]:
        """Columns j with a nonzero diagonal value ``f[i][j][j]`` for some i."""
        return frozenset(j for j in range(self.n) for block in self.table if block[j][j])

    def to_json(self) -> dict:
        return {"n": self.n, "modulus": self.modulus, "table": [[list(row) for row in block] for block in self.table]}


def theta_matrix(form: AlternatingForm) -> list[list[MultiPoly]]:
    """``theta_ij = sum_k f(b_i, a_k, a_j) a_k*``."""
    n, r = form.n, form.modulus
    variables = [MultiPoly.variable(k, n, r) for k in range(n)]
    return [
        [sum((variables[k] * form.table[i][k][j] for k in range(n)), MultiPoly.zero(n, r)) for j in range(n)]
        for i in range(n - 1)
    ]


def beta_matrix(form: AlternatingForm) -> list[list[MultiPoly]]:
    """``beta_ij = theta_ij * a_j*``; its rows sum to zero for alternating forms."""
    n = form.n
    theta = theta_matrix(form)
    return [[theta[i][j] * MultiPoly.variable(j, n, form.modulus) for j in range(n)] for i in range(n - 1)]


def _strike(matrix: Sequence[Sequence[MultiPoly]], column: int) -> list[list[MultiPoly]]:
    return [[x for c, x in enumerate(row) if c != column] for row in matrix]


def _reduce_half_squares(poly: MultiPoly, support: Iterable[int]) -> MultiPoly:
    """Normal form modulo the ideal ``((r/2) a_j*^2 : j in support)`` over Z_r, r even."""
    support = frozenset(support)
    if not support or poly.modulus is None:
        return poly
    half = poly.modulus // 2
    reduced = {}
    for mono, c in poly.terms():
        if any(mono[j] >= 2 for j in support):
            c %= half
        reduced[mono] = c
    return MultiPoly(poly.nvars, reduced, poly.modulus)


def _determinant_from_theta(
    theta: Sequence[Sequence[MultiPoly]],
    n: int,
    modulus: int | None,
    support: frozenset[int] = frozenset(),
    strike: int | None = None,
) -> MultiPoly:
    zero = MultiPoly.zero(n, modulus)
    one = MultiPoly.one(n, modulus)
    minors = [cofactor_determinant(_strike(theta, c), one, zero) for c in range(n)]
    if strike is not None:
        if not 1 <= strike <= n:
            raise DivisionError(f"strike column {strike} outside 1..{n}")
        if strike - 1 in support:
            raise DivisionError(f"column {strike} carries a diagonal term and cannot be struck")
        column = strike - 1
    else:
        free_columns = [c for c in range(n) if c not in support]
        if not free_columns:
            raise DivisionError("every column carries a diagonal term; no column can be struck")
        column = free_columns[0]

    normal = lambda p: _reduce_half_squares(p, support)
    sign = 1 if column % 2 else -1  # (-1)^(column + 1)
    d = normal(minors[column] * sign).divide_by_variable(column)
    d = normal(d)
    for c in range(n):
        lhs = normal(minors[c] * (1 if c % 2 else -1))
        rhs = normal(d * MultiPoly.variable(c, n, modulus))
        if lhs != rhs:
            raise DivisionError(
                f"struck minor {c + 1} is not (-1)^{c + 1} a{c + 1} times the determinant"
            )
    return d


def form_determinant(form: AlternatingForm, strike: int | None = None) -> MultiPoly:
    """Determinant ``d(f, a, b)`` in ``S^{n-2}``, independent of the struck column."""
    support = form.diagonal_support()
    if support:
        logger.debug(f"Diagonal terms in columns {sorted(support)}; comparing modulo half squares")
    return _determinant_from_theta(theta_matrix(form), form.n, form.modulus, support, strike)


def change_of_basis(form: AlternatingForm, change_a: ChangeOfBasis, change_b: ChangeOfBasis) -> AlternatingForm:
    """The same form written in the bases ``a' = C_a a`` and ``b' = C_b b``."""
    n, r = form.n, form.modulus
    if change_a.size != n or change_b.size != n - 1:
        raise FormError(f"changes of basis must have sizes {n} and {n - 1}")
    ca, cb = change_a.matrix, change_b.matrix
    table = [[[0] * n for _ in range(n)] for _ in range(n - 1)]
    for i2, j2, k2 in product(range(n - 1), range(n), range(n)):
        value = form.table[i2][j2][k2]
        if not value:
            continue
        for i, j, k in product(range(n - 1), range(n), range(n)):
            coefficient = cb[i][i2] * ca[j][j2] * ca[k][k2]
            if coefficient:
                table[i][j][k] += coefficient * value
    return AlternatingForm(n, tuple(tuple(tuple(row) for row in block) for block in table), r)


def sign_refine(d: MultiPoly, sign: int) -> MultiPoly:
    """``Det_omega = [omega / omega_tilde] * d`` for an orientation sign."""
    if sign not in (1, -1):
        raise FormError(f"orientation sign must be 1 or -1, got {sign}")
    return d * sign


#####################################
# Massey forms
#####################################


@dataclass(frozen=True)
class MasseyForm:
    """Form ``f(b_i, a_j, a_{i_1}, ..., a_{i_m})`` of order m.

    ``entries`` maps ``(i, j, (i_1, ..., i_m))`` to its nonzero value. Every
    row must satisfy ``f0(b_i) = sum f(b_i, a_j, a_I) a_j* a_I* = 0``.
    """

    n: int
    order: int
    entries: tuple[tuple[tuple[int, int, tuple[int, ...]], int], ...]
    modulus: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise FormError(f"K must have rank at least 2, got {self.n}")
        if self.order < 1:
            raise FormError(f"Massey order must be positive, got {self.order}")
        merged: dict[tuple[int, int, tuple[int, ...]], int] = {}
        for (i, j, multi), value in dict(self.entries).items():
            multi = tuple(multi)
            if len(multi) != self.order:
                raise FormError(f"multi-index {multi} does not have length {self.order}")
            if not (0 <= i < self.n - 1 and 0 <= j < self.n and all(0 <= x < self.n for x in multi)):
                raise FormError(f"entry {(i, j, multi)} is out of range")
            value = int(value) if self.modulus is None else int(value) % self.modulus
            if value:
                merged[(i, j, multi)] = value
        object.__setattr__(self, "entries", tuple(sorted(merged.items())))
        for i in range(self.n - 1):
            if not massey_f0(self, i).is_zero():
                raise FormError(f"f0(b_{i + 1}) does not vanish")

    @classmethod
    def from_mapping(
        cls, n: int, order: int, values: Mapping[tuple[int, int, tuple[int, ...]], int], modulus: int | None = None
    ) -> MasseyForm:
        return cls(n, order, tuple(values.items()), modulus)

    @classmethod
    def from_alternating(cls, form: AlternatingForm) -> MasseyForm:
        """Order-one Massey form with the same values as an alternating form."""
        values = {
            (i, j, (k,)): form.table[i][j][k]
            for i in range(form.n - 1)
            for j in range(form.n)
            for k in range(form.n)
            if form.table[i][j][k]
        }
        return cls.from_mapping(form.n, 1, values, form.modulus)

    def as_dict(self) -> dict[tuple[int, int, tuple[int, ...]], int]:
        return dict(self.entries)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "order": self.order,
            "modulus": self.modulus,
            "entries": [[i, j, list(multi), v] for (i, j, multi), v in self.entries],
        }


def _multi_monomial(multi: Sequence[int], n: int) -> Monomial:
    mono = [0] * n
    for x in multi:
        mono[x] += 1
    return tuple(mono)


def massey_g(form: MasseyForm, i: int, j: int) -> MultiPoly:
    """``g(b_i, a_j) = sum_I f(b_i, a_j, a_I) a_I*`` in ``S^m``."""
    terms: dict[Monomial, int] = {}
    for (ii, jj, multi), value in form.entries:
        if ii == i and jj == j:
            mono = _multi_monomial(multi, form.n)
            terms[mono] = terms.get(mono, 0) + value
    return MultiPoly(form.n, terms, form.modulus)


def massey_f0(form: MasseyForm, i: int) -> MultiPoly:
    """``f0(b_i) = sum_j a_j* g(b_i, a_j)``."""
    terms: dict[Monomial, int] = {}
    for (ii, j, multi), value in form.entries:
        if ii == i:
            mono = _multi_monomial((j, *multi), form.n)
            terms[mono] = terms.get(mono, 0) + value
    return MultiPoly(form.n, terms, form.modulus)


def massey_theta_matrix(form: MasseyForm) -> list[list[MultiPoly]]:
    """``theta_ij = -g(b_i, a_j)``, matching ``theta_matrix`` in order one."""
    return [[-massey_g(form, i, j) for j in range(form.n)] for i in range(form.n - 1)]


def massey_determinant(form: MasseyForm, strike: int | None = None) -> MultiPoly:
    """Determinant of a Massey form, homogeneous of degree ``m (n - 1) - 1``."""
    return _determinant_from_theta(massey_theta_matrix(form), form.n, form.modulus, frozenset(), strike)


def massey_change_of_basis(form: MasseyForm, change_a: ChangeOfBasis, change_b: ChangeOfBasis) -> MasseyForm:
    n, m = form.n, form.order
    if change_a.size != n or change_b.size != n - 1:
        raise FormError(f"changes of basis must have sizes {n} and {n - 1}")
    ca, cb = change_a.matrix, change_b.matrix
    values: dict[tuple[int, int, tuple[int, ...]], int] = {}
    for (i2, j2, multi2), value in form.entries:
        for i, j in product(range(n - 1), range(n)):
            base = cb[i][i2] * ca[j][j2] * value
            if not base:
                continue
            for multi in product(range(n), repeat=m):
                coefficient = base
                for x, x2 in zip(multi, multi2):
                    coefficient *= ca[x][x2]
                    if not coefficient:
                        break
                if coefficient:
                    key = (i, j, multi)
                    values[key] = values.get(key, 0) + coefficient
    return MasseyForm.from_mapping(n, m, values, form.modulus)
