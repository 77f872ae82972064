"""
Group rings R[H] for R = Z or Z_r and their truncations by powers of the
augmentation ideal.

``R[H] / I^k`` is modelled as a quotient of the truncated polynomial ring
``R[x_1, ..., x_n, y_1, ..., y_t] / (monomials of degree >= k)``: a free
generator ``h_i`` becomes ``1 + x_i`` and a torsion generator ``g_j`` of
order ``d_j`` becomes ``1 + y_j`` subject to ``(1 + y_j)**d_j = 1``. The
quotient is presented as an integer lattice over the monomial basis and
elements are stored as their canonical representative, so equality and
``I^l`` membership are plain coordinate checks.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import TYPE_CHECKING, Mapping, Sequence

from ._linalg import EchelonLattice, cofactor_determinant
from .abelian import AbelianGroup, GroupElement, prime_power
from .errors import ContextMismatchError, NotFreeError, TorsionKitError
from .utils.utils_logger import logger

if TYPE_CHECKING:
    from .detform import MultiPoly

Monomial = tuple[int, ...]

#####################################
# Group ring elements
#####################################


class GroupRingElement:
    """Finite R-linear combination of elements of an abelian group."""

    __slots__ = ("group", "modulus", "_terms")

    def __init__(
        self,
        group: AbelianGroup,
        terms: Mapping[GroupElement, int] | None = None,
        modulus: int | None = None,
    ):
        self.group = group
        self.modulus = modulus
        cleaned: dict[GroupElement, int] = {}
        for h, c in (terms or {}).items():
            if h.group != group:
                raise ContextMismatchError(f"{h} is not an element of {group}")
            c = int(c) if modulus is None else int(c) % modulus
            if c:
                cleaned[h] = cleaned.get(h, 0) + c
        if modulus is not None:
            cleaned = {h: c % modulus for h, c in cleaned.items() if c % modulus}
        self._terms = cleaned

    @classmethod
    def zero(cls, group: AbelianGroup, modulus: int | None = None) -> GroupRingElement:
        return cls(group, {}, modulus)

    @classmethod
    def one(cls, group: AbelianGroup, modulus: int | None = None) -> GroupRingElement:
        return cls(group, {group.identity(): 1}, modulus)

    @classmethod
    def from_group_element(cls, h: GroupElement, coefficient: int = 1, modulus: int | None = None) -> GroupRingElement:
        return cls(h.group, {h: coefficient}, modulus)

    @property
    def terms(self) -> dict[GroupElement, int]:
        return dict(self._terms)

    def _check(self, other: GroupRingElement) -> None:
        if other.group != self.group or other.modulus != self.modulus:
            raise ContextMismatchError(
                f"cannot combine elements of {self.group} (mod {self.modulus}) and {other.group} (mod {other.modulus})"
            )

    def _coerce(self, other) -> GroupRingElement:
        if isinstance(other, int):
            return GroupRingElement.one(self.group, self.modulus) * other
        self._check(other)
        return other

    def __add__(self, other) -> GroupRingElement:
        other = self._coerce(other)
        terms = dict(self._terms)
        for h, c in other._terms.items():
            terms[h] = terms.get(h, 0) + c
        return GroupRingElement(self.group, terms, self.modulus)

    __radd__ = __add__

    def __neg__(self) -> GroupRingElement:
        return GroupRingElement(self.group, {h: -c for h, c in self._terms.items()}, self.modulus)

    def __sub__(self, other) -> GroupRingElement:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> GroupRingElement:
        return self._coerce(other) - self

    def __mul__(self, other) -> GroupRingElement:
        if isinstance(other, int):
            return GroupRingElement(self.group, {h: c * other for h, c in self._terms.items()}, self.modulus)
        self._check(other)
        terms: dict[GroupElement, int] = {}
        for g, a in self._terms.items():
            for h, b in other._terms.items():
                key = g + h
                terms[key] = terms.get(key, 0) + a * b
        return GroupRingElement(self.group, terms, self.modulus)

    def __rmul__(self, other: int) -> GroupRingElement:
        return self * other

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = GroupRingElement.one(self.group, self.modulus) * other
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.group == other.group and self.modulus == other.modulus and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.group, self.modulus, frozenset(self._terms.items())))

    def is_zero(self) -> bool:
        return not self._terms

    def augmentation(self) -> int:
        total = sum(self._terms.values())
        return total if self.modulus is None else total % self.modulus

    def with_modulus(self, modulus: int) -> GroupRingElement:
        """Image under coefficient reduction Z -> Z_r."""
        if self.modulus is not None and self.modulus % modulus:
            raise ContextMismatchError(f"cannot reduce mod {self.modulus} coefficients to mod {modulus}")
        return GroupRingElement(self.group, self._terms, modulus)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = [f"{c}*{list(h.coordinates)}" for h, c in sorted(self._terms.items(), key=lambda t: t[0].coordinates)]
        return " + ".join(parts)


#####################################
# Truncated polynomial arithmetic
#####################################


def _binomial(e: int, i: int) -> int:
    """Generalized binomial coefficient ``C(e, i)`` for any integer e."""
    if e >= 0:
        return comb(e, i)
    return (-1) ** i * comb(i - e - 1, i)


def _poly_mul(a: Mapping[Monomial, int], b: Mapping[Monomial, int], bound: int) -> dict[Monomial, int]:
    result: dict[Monomial, int] = {}
    for ma, ca in a.items():
        da = sum(ma)
        for mb, cb in b.items():
            if da + sum(mb) >= bound:
                continue
            key = tuple(x + y for x, y in zip(ma, mb))
            result[key] = result.get(key, 0) + ca * cb
    return {m: c for m, c in result.items() if c}


def _poly_pow_one_plus(var: int, nvars: int, exponent: int, bound: int) -> dict[Monomial, int]:
    """Expansion of ``(1 + v)**exponent`` truncated below degree ``bound``."""
    poly = {}
    for i in range(bound):
        c = _binomial(exponent, i)
        if c:
            mono = [0] * nvars
            mono[var] = i
            poly[tuple(mono)] = c
    return poly


class TruncationContext:
    """Model of ``R[H] / I^k``.

    Variables are ordered free generators first, then torsion generators.
    Monomials of degree ``< k`` are ordered by degree and then
    lexicographically, so the canonical representative of an element of
    ``I^l`` has no support below degree ``l``.
    """

    def __init__(self, group: AbelianGroup, degree_bound: int, modulus: int | None = None):
        if degree_bound < 1:
            raise TorsionKitError(f"truncation degree must be positive, got {degree_bound}")
        self.group = group
        self.degree_bound = degree_bound
        self.modulus = modulus
        self.num_variables = group.free_rank + group.torsion_rank
        nv = self.num_variables
        monomials: list[Monomial] = []
        for degree in range(degree_bound):
            level = [
                m for m in itertools.product(range(degree + 1), repeat=nv) if sum(m) == degree
            ]
            monomials.extend(sorted(level, reverse=True))
        self.monomials = tuple(monomials)
        self._index = {m: i for i, m in enumerate(self.monomials)}
        self._lattice = EchelonLattice(len(self.monomials), modulus)
        self._element_cache: dict[GroupElement, TruncatedElement] = {}

        for j, d in enumerate(group.torsion_orders):
            var = group.free_rank + j
            relation = _poly_pow_one_plus(var, nv, d, degree_bound)
            relation[(0,) * nv] = relation.get((0,) * nv, 0) - 1
            for shift in self.monomials:
                if sum(shift) > degree_bound - 2:
                    break
                self._lattice.add(self._vector(_poly_mul({shift: 1}, relation, degree_bound)))
        logger.debug(
            f"Built truncation context for {group} below degree {degree_bound} "
            f"(modulus {modulus}, {len(self.monomials)} monomials)"
        )

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    def _vector(self, poly: Mapping[Monomial, int]) -> list[int]:
        vec = [0] * len(self.monomials)
        for m, c in poly.items():
            if sum(m) < self.degree_bound:
                vec[self._index[m]] += c
        return vec

    def from_poly(self, poly: Mapping[Monomial, int]) -> TruncatedElement:
        return TruncatedElement(self, self._lattice.reduce(self._vector(poly)))

    def to_poly(self, element: TruncatedElement) -> dict[Monomial, int]:
        return {self.monomials[i]: c for i, c in enumerate(element.coordinates) if c}

    def zero(self) -> TruncatedElement:
        return self.from_poly({})

    def one(self) -> TruncatedElement:
        return self.from_poly({(0,) * self.num_variables: 1})

    def variable(self, index: int) -> TruncatedElement:
        """Image of ``g - 1`` for the index-th generator of the group."""
        mono = [0] * self.num_variables
        mono[index] = 1
        return self.from_poly({tuple(mono): 1})

    def group_element(self, h: GroupElement) -> TruncatedElement:
        """Image of a single group element."""
        if h.group != self.group:
            raise ContextMismatchError(f"{h} is not an element of {self.group}")
        cached = self._element_cache.get(h)
        if cached is not None:
            return cached
        nv = self.num_variables
        poly: dict[Monomial, int] = {(0,) * nv: 1}
        for var, e in enumerate(h.coordinates):
            if e:
                poly = _poly_mul(poly, _poly_pow_one_plus(var, nv, e, self.degree_bound), self.degree_bound)
        result = self.from_poly(poly)
        self._element_cache[h] = result
        return result

    def monomial_label(self, monomial: Monomial) -> str:
        names = [f"x{i + 1}" for i in range(self.group.free_rank)] + [
            f"y{j + 1}" for j in range(self.group.torsion_rank)
        ]
        parts = []
        for name, e in zip(names, monomial):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"

    def __repr__(self) -> str:
        return f"TruncationContext({self.group}, k={self.degree_bound}, modulus={self.modulus})"


def build_truncation_context(group: AbelianGroup, degree_bound: int, modulus: int | None = None) -> TruncationContext:
    """Fresh context for ``R[group] / I^degree_bound``."""
    return TruncationContext(group, degree_bound, modulus)


@lru_cache(maxsize=64)
def truncation_context(group: AbelianGroup, degree_bound: int, modulus: int | None = None) -> TruncationContext:
    """Shared, memoized context for ``R[group] / I^degree_bound``."""
    return build_truncation_context(group, degree_bound, modulus)


class TruncatedElement:
    """Element of ``R[H] / I^k`` in canonical coordinates."""

    __slots__ = ("context", "coordinates")

    def __init__(self, context: TruncationContext, coordinates: Sequence[int]):
        self.context = context
        self.coordinates = tuple(coordinates)

    def _check(self, other: TruncatedElement) -> None:
        if other.context is not self.context:
            raise ContextMismatchError(f"elements of {self.context} and {other.context} cannot be combined")

    def _coerce(self, other) -> TruncatedElement:
        if isinstance(other, int):
            return self.context.one() * other
        self._check(other)
        return other

    def __add__(self, other) -> TruncatedElement:
        other = self._coerce(other)
        return self.context.from_poly(_add_polys(self.context.to_poly(self), self.context.to_poly(other)))

    __radd__ = __add__

    def __neg__(self) -> TruncatedElement:
        return self * -1

    def __sub__(self, other) -> TruncatedElement:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> TruncatedElement:
        return self._coerce(other) - self

    def __mul__(self, other) -> TruncatedElement:
        ctx = self.context
        if isinstance(other, int):
            return ctx.from_poly({m: c * other for m, c in ctx.to_poly(self).items()})
        self._check(other)
        return ctx.from_poly(_poly_mul(ctx.to_poly(self), ctx.to_poly(other), ctx.degree_bound))

    def __rmul__(self, other: int) -> TruncatedElement:
        return self * other

    def __pow__(self, exponent: int) -> TruncatedElement:
        result = self.context.one()
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.context.one() * other
        if not isinstance(other, TruncatedElement):
            return NotImplemented
        return other.context is self.context and other.coordinates == self.coordinates

    def __hash__(self) -> int:
        return hash((id(self.context), self.coordinates))

    def is_zero(self) -> bool:
        return not any(self.coordinates)

    def lowest_degree(self) -> int | None:
        """Smallest degree carrying a nonzero coordinate, ``None`` for zero."""
        degrees = [sum(self.context.monomials[i]) for i, c in enumerate(self.coordinates) if c]
        return min(degrees) if degrees else None

    def leading_terms(self) -> dict[str, int]:
        """Coefficients of the lowest-degree part, keyed by monomial label."""
        low = self.lowest_degree()
        if low is None:
            return {}
        ctx = self.context
        return {
            ctx.monomial_label(ctx.monomials[i]): c
            for i, c in enumerate(self.coordinates)
            if c and sum(ctx.monomials[i]) == low
        }

    def as_dict(self) -> dict[str, int]:
        ctx = self.context
        return {ctx.monomial_label(ctx.monomials[i]): c for i, c in enumerate(self.coordinates) if c}

    def __repr__(self) -> str:
        terms = self.as_dict()
        return " + ".join(f"{c}*{m}" for m, c in terms.items()) or "0"


def _add_polys(a: Mapping[Monomial, int], b: Mapping[Monomial, int]) -> dict[Monomial, int]:
    result = dict(a)
    for m, c in b.items():
        result[m] = result.get(m, 0) + c
    return result


#####################################
# Truncation, ideal membership, q maps
#####################################


def truncate(x: GroupRingElement, context: TruncationContext) -> TruncatedElement:
    """Image of a group ring element in ``R[H] / I^k``."""
    if x.group != context.group or x.modulus != context.modulus:
        raise ContextMismatchError(
            f"element of {x.group} (mod {x.modulus}) does not live in {context}"
        )
    total = context.zero()
    for h, c in x.terms.items():
        total = total + context.group_element(h) * c
    return total


def in_ideal_power(x: GroupRingElement | TruncatedElement, power: int, context: TruncationContext) -> bool:
    """Decide ``x in I^power + I^k`` for the context bound ``k > power``."""
    if power >= context.degree_bound:
        raise TorsionKitError(
            f"cannot decide membership in I^{power} below truncation degree {context.degree_bound}"
        )
    element = truncate(x, context) if isinstance(x, GroupRingElement) else x
    low = element.lowest_degree()
    return low is None or low >= power


def _image_of_poly(
    poly: MultiPoly, images: Sequence[TruncatedElement], context: TruncationContext
) -> TruncatedElement:
    total = context.zero()
    for monomial, c in poly.terms():
        term = context.one() * c
        for var, e in enumerate(monomial):
            if e:
                term = term * images[var] ** e
        total = total + term
    return total


def _check_homogeneous(poly: MultiPoly, context: TruncationContext) -> None:
    if not poly.is_homogeneous():
        raise TorsionKitError(f"{poly} is not homogeneous")
    degree = poly.degree()
    if degree is not None and context.degree_bound < degree + 1:
        raise TorsionKitError(
            f"degree {degree} polynomial needs truncation degree at least {degree + 1}, got {context.degree_bound}"
        )


def q_map(
    poly: MultiPoly,
    context: TruncationContext,
    section: Sequence[GroupElement] | None = None,
) -> TruncatedElement:
    """Integral q map ``S^l(G) -> I^l / I^(l+1)`` lifted into ``Z[H] / I^k``.

    A monomial ``prod a_i^{e_i}`` goes to ``|T| * prod (s_i - 1)^{e_i}`` where
    ``s_i`` is the section image of the i-th basis vector of ``G = H/Tors``.
    The default section is the free generators of H.
    """
    if context.modulus is not None:
        raise ContextMismatchError("the integral q map needs a Z coefficient context")
    group = context.group
    if section is None:
        section = [group.free_generator(i) for i in range(group.free_rank)]
    if len(section) != group.free_rank:
        raise TorsionKitError(f"section has {len(section)} elements but G has rank {group.free_rank}")
    if poly.nvars != len(section):
        raise TorsionKitError(f"polynomial in {poly.nvars} variables, section of size {len(section)}")
    _check_homogeneous(poly, context)
    images = [context.group_element(s) - 1 for s in section]
    return _image_of_poly(poly, images, context) * group.torsion_order


def q_r_map(
    poly: MultiPoly,
    context: TruncationContext,
    lifts: Sequence[GroupElement] | None = None,
) -> TruncatedElement:
    """Mod-r q map ``S^l(H/r) -> I^l / I^(l+1)`` over ``Z_r[H]``, for ``r = p**s``.

    ``lifts`` are elements of H lifting a basis of the free Z_r module H/r;
    the default lifts are the free generators followed by the torsion
    generators whose order r divides.
    """
    r = context.modulus
    if r is None:
        raise ContextMismatchError("the mod-r q map needs a Z_r coefficient context")
    prime_power(r)
    group = context.group
    if not group.is_free_mod(r):
        raise NotFreeError(f"{group} / {r} is not a free Z_{r} module")
    if lifts is None:
        lifts = [group.free_generator(i) for i in range(group.free_rank)] + [
            group.torsion_generator(j) for j, d in enumerate(group.torsion_orders) if d % r == 0
        ]
    if len(lifts) != group.rank_mod(r):
        raise NotFreeError(f"{len(lifts)} lifts for a rank {group.rank_mod(r)} module")
    if poly.nvars != len(lifts):
        raise TorsionKitError(f"polynomial in {poly.nvars} variables, {len(lifts)} lifts")
    _check_homogeneous(poly, context)
    images = [context.group_element(g) - 1 for g in lifts]
    return _image_of_poly(poly, images, context)


def matrix_determinant(
    matrix: Sequence[Sequence[GroupRingElement]],
    group: AbelianGroup | None = None,
    modulus: int | None = None,
) -> GroupRingElement:
    """Exact determinant of a square matrix over ``R[H]`` by cofactor expansion.

    ``group`` and ``modulus`` are only needed for the empty matrix, whose
    determinant is 1.
    """
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise TorsionKitError(f"determinant of a non-square {size} x {len(matrix[0])} matrix")
    if size:
        group, modulus = matrix[0][0].group, matrix[0][0].modulus
        for row in matrix:
            for entry in row:
                if entry.group != group or entry.modulus != modulus:
                    raise ContextMismatchError("matrix entries live in different group rings")
    elif group is None:
        raise TorsionKitError("the empty determinant needs its group")
    return cofactor_determinant(matrix, GroupRingElement.one(group, modulus), GroupRingElement.zero(group, modulus))
