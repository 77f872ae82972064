"""
Finitely generated abelian groups.

Groups are kept in invariant-factor form ``Z^free_rank + Z_d1 + ... + Z_dt``
with ``d1 | d2 | ... | dt`` and every ``d_i >= 2``. Elements are coordinate
vectors over that decomposition and are written additively.

Also here: Smith normal form of integer matrices, p-primary parts with
pseudo-bases, linking forms on torsion groups, and the Z_r-valued dot
pairing they induce.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterator, Sequence

from sympy import Matrix, factorint, isprime, multiplicity

from ._linalg import identity_rows, to_matrix
from .errors import DegenerateFormError, TorsionKitError
from .utils.utils_logger import logger

#####################################
# Smith normal form
#####################################

# An elementary move is ("add", target, source, c) for target += c * source,
# ("swap", a, b) or ("negate", a).
Move = tuple


@dataclass
class SmithForm:
    """Result of ``smith_form_with_moves``: ``U * A * V == D``."""

    u: list[list[int]]
    d: list[list[int]]
    v: list[list[int]]
    row_moves: list[Move] = field(default_factory=list)
    col_moves: list[Move] = field(default_factory=list)

    @property
    def diagonal(self) -> list[int]:
        return [self.d[i][i] for i in range(min(len(self.d), len(self.d[0]) if self.d else 0))]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def _apply_row_move(rows: list[list[int]], move: Move) -> None:
    kind = move[0]
    if kind == "add":
        _, target, source, c = move
        rows[target] = [x + c * y for x, y in zip(rows[target], rows[source])]
    elif kind == "swap":
        _, a, b = move
        rows[a], rows[b] = rows[b], rows[a]
    else:
        _, a = move
        rows[a] = [-x for x in rows[a]]


def _apply_col_move(rows: list[list[int]], move: Move) -> None:
    kind = move[0]
    for row in rows:
        if kind == "add":
            _, target, source, c = move
            row[target] += c * row[source]
        elif kind == "swap":
            _, a, b = move
            row[a], row[b] = row[b], row[a]
        else:
            _, a = move
            row[a] = -row[a]


def smith_form_with_moves(matrix: Sequence[Sequence[int]], num_cols: int | None = None) -> SmithForm:
    """Diagonalize an integer matrix, recording every elementary move.

    Row moves act on the left (``U``), column moves on the right (``V``).
    The diagonal ends non-negative with each entry dividing the next.
    """
    a = [list(map(int, row)) for row in matrix]
    m = len(a)
    n = len(a[0]) if a else (num_cols or 0)
    u = identity_rows(m)
    v = identity_rows(n)
    row_moves: list[Move] = []
    col_moves: list[Move] = []

    def row_op(move: Move) -> None:
        _apply_row_move(a, move)
        _apply_row_move(u, move)
        row_moves.append(move)

    def col_op(move: Move) -> None:
        _apply_col_move(a, move)
        _apply_col_move(v, move)
        col_moves.append(move)

    for t in range(min(m, n)):
        entries = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        if pi != t:
            row_op(("swap", t, pi))
        if pj != t:
            col_op(("swap", t, pj))

        while True:
            settled = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    if q:
                        row_op(("add", i, t, -q))
                    if a[i][t]:
                        row_op(("swap", t, i))
                        settled = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    if q:
                        col_op(("add", j, t, -q))
                    if a[t][j]:
                        col_op(("swap", t, j))
                        settled = False
            if not settled:
                continue
            pivot = a[t][t]
            offender = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % pivot),
                None,
            )
            if offender is None:
                break
            row_op(("add", t, offender, 1))

        if a[t][t] < 0:
            row_op(("negate", t))

    return SmithForm(u=u, d=a, v=v, row_moves=row_moves, col_moves=col_moves)


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return sympy matrices ``(U, D, V)`` with ``U*A*V == D``, U and V unimodular."""
    rows = [list(r) for r in matrix]
    form = smith_form_with_moves(rows)
    cols = len(rows[0]) if rows else 0
    return to_matrix(form.u, len(rows)), to_matrix(form.d, cols), to_matrix(form.v, cols)


#####################################
# Groups and elements
#####################################


@dataclass(frozen=True)
class AbelianGroup:
    free_rank: int
    torsion_orders: tuple[int, ...] = ()

    def __post_init__(self):
        orders = tuple(int(d) for d in self.torsion_orders)
        object.__setattr__(self, "torsion_orders", orders)
        if self.free_rank < 0:
            raise TorsionKitError(f"negative free rank {self.free_rank}")
        for d in orders:
            if d < 2:
                raise TorsionKitError(f"torsion order {d} must be at least 2")
        for small, big in zip(orders, orders[1:]):
            if big % small:
                raise TorsionKitError(f"torsion orders {orders} do not form a divisibility chain")

    @classmethod
    def from_orders(cls, free_rank: int, orders: Sequence[int]) -> AbelianGroup:
        """Canonical form of ``Z^free_rank + Z_o1 + ...`` for arbitrary positive orders."""
        orders = [o for o in orders if o != 1]
        if any(o <= 0 for o in orders):
            raise TorsionKitError(f"torsion orders must be positive: {orders}")
        if not orders:
            return cls(free_rank)
        diag = [[o if i == j else 0 for j in range(len(orders))] for i, o in enumerate(orders)]
        form = smith_form_with_moves(diag)
        return cls(free_rank, tuple(d for d in form.diagonal if d > 1))

    @classmethod
    def from_relations(
        cls, relations: Sequence[Sequence[int]], num_generators: int
    ) -> tuple[AbelianGroup, list[GroupElement]]:
        """Group ``Z^num_generators / rowspace(relations)`` with generator images."""
        rows = [list(r) for r in relations if any(r)]
        if not rows:
            group = cls(num_generators)
            return group, [group.free_generator(i) for i in range(num_generators)]
        for r in rows:
            if len(r) != num_generators:
                raise TorsionKitError(f"relation {r} has length {len(r)}, expected {num_generators}")
        form = smith_form_with_moves(rows)
        diagonal = form.diagonal
        rank = form.rank
        torsion_slots = [i for i in range(rank) if diagonal[i] > 1]
        free_slots = list(range(rank, num_generators))
        group = cls(len(free_slots), tuple(diagonal[i] for i in torsion_slots))
        images = [
            group.element([form.v[g][i] for i in free_slots], [form.v[g][i] for i in torsion_slots])
            for g in range(num_generators)
        ]
        return group, images

    @property
    def torsion_rank(self) -> int:
        return len(self.torsion_orders)

    @property
    def num_generators(self) -> int:
        return self.free_rank + self.torsion_rank

    @property
    def torsion_order(self) -> int:
        return reduce(lambda x, y: x * y, self.torsion_orders, 1)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int:
        if not self.is_finite:
            raise TorsionKitError(f"{self} is infinite")
        return self.torsion_order

    def identity(self) -> GroupElement:
        return GroupElement(self, (0,) * self.free_rank, (0,) * self.torsion_rank)

    def element(self, free: Sequence[int], torsion: Sequence[int] = ()) -> GroupElement:
        return GroupElement(self, tuple(free), tuple(torsion))

    def free_generator(self, i: int) -> GroupElement:
        free = [0] * self.free_rank
        free[i] = 1
        return GroupElement(self, tuple(free), (0,) * self.torsion_rank)

    def torsion_generator(self, j: int) -> GroupElement:
        torsion = [0] * self.torsion_rank
        torsion[j] = 1
        return GroupElement(self, (0,) * self.free_rank, tuple(torsion))

    def generators(self) -> list[GroupElement]:
        return [self.free_generator(i) for i in range(self.free_rank)] + [
            self.torsion_generator(j) for j in range(self.torsion_rank)
        ]

    def elements(self) -> Iterator[GroupElement]:
        """Enumerate a finite group."""
        self.order()
        for torsion in itertools.product(*(range(d) for d in self.torsion_orders)):
            yield GroupElement(self, (), torsion)

    def torsion_subgroup(self) -> AbelianGroup:
        return AbelianGroup(0, self.torsion_orders)

    def mod_r_invariants(self, r: int) -> tuple[int, ...]:
        """Orders of the cyclic summands of ``H/r``, one per generator."""
        return (r,) * self.free_rank + tuple(gcd(d, r) for d in self.torsion_orders)

    def is_free_mod(self, r: int) -> bool:
        return all(o in (1, r) for o in self.mod_r_invariants(r))

    def rank_mod(self, r: int) -> int:
        """Rank of ``H/r`` when it is a free Z_r module."""
        return sum(1 for o in self.mod_r_invariants(r) if o == r)

    def __str__(self) -> str:
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z_{d}" for d in self.torsion_orders]
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class GroupElement:
    group: AbelianGroup
    free_part: tuple[int, ...]
    torsion_part: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.free_part) != self.group.free_rank or len(self.torsion_part) != self.group.torsion_rank:
            raise TorsionKitError(
                f"coordinates {self.free_part}/{self.torsion_part} do not fit {self.group}"
            )
        object.__setattr__(self, "free_part", tuple(int(x) for x in self.free_part))
        object.__setattr__(
            self,
            "torsion_part",
            tuple(int(x) % d for x, d in zip(self.torsion_part, self.group.torsion_orders)),
        )

    def _check(self, other: GroupElement) -> None:
        if other.group != self.group:
            raise TorsionKitError(f"elements of {self.group} and {other.group} cannot be combined")

    def __add__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(
            self.group,
            tuple(a + b for a, b in zip(self.free_part, other.free_part)),
            tuple(a + b for a, b in zip(self.torsion_part, other.torsion_part)),
        )

    def __neg__(self) -> GroupElement:
        return GroupElement(self.group, tuple(-a for a in self.free_part), tuple(-a for a in self.torsion_part))

    def __sub__(self, other: GroupElement) -> GroupElement:
        return self + (-other)

    def __rmul__(self, k: int) -> GroupElement:
        return GroupElement(self.group, tuple(k * a for a in self.free_part), tuple(k * a for a in self.torsion_part))

    @property
    def coordinates(self) -> tuple[int, ...]:
        return self.free_part + self.torsion_part

    @property
    def is_identity(self) -> bool:
        return not any(self.coordinates)

    def order(self) -> int | None:
        """Order of the element, or ``None`` when it is infinite."""
        if any(self.free_part):
            return None
        result = 1
        for x, d in zip(self.torsion_part, self.group.torsion_orders):
            result = lcm(result, d // gcd(x, d))
        return result

    def __repr__(self) -> str:
        return f"GroupElement({list(self.free_part)}|{list(self.torsion_part)})"


#####################################
# Primary parts and pseudo-bases
#####################################


def prime_power(r: int) -> tuple[int, int]:
    """Split ``r = p**s``; raise when r is not a prime power."""
    factors = factorint(r) if r > 1 else {}
    if len(factors) != 1:
        raise TorsionKitError(f"{r} is not a prime power")
    ((p, s),) = factors.items()
    return int(p), int(s)


def _p_valuation(d: int, p: int) -> int:
    return int(multiplicity(p, d))


@dataclass(frozen=True)
class PseudoBasis:
    """Elements ``(x_1, ..., x_k)`` of ``H_(p)`` with nondecreasing p-power orders."""

    p: int
    elements: tuple[GroupElement, ...]
    orders: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.elements)


def primary_part(group: AbelianGroup, p: int) -> tuple[AbelianGroup, PseudoBasis]:
    """The p-primary subgroup of the torsion of ``group`` with its canonical pseudo-basis.

    For each invariant factor ``d`` with ``p**v || d`` and ``v >= 1`` the
    element ``(d / p**v) * g`` generates the ``Z_{p**v}`` summand.
    """
    if not isprime(p):
        raise TorsionKitError(f"{p} is not prime")
    elements = []
    orders = []
    for j, d in enumerate(group.torsion_orders):
        v = _p_valuation(d, p)
        if v == 0:
            continue
        elements.append((d // p**v) * group.torsion_generator(j))
        orders.append(p**v)
    return AbelianGroup(0, tuple(orders)), PseudoBasis(p, tuple(elements), tuple(orders))


def is_pseudo_basis(group: AbelianGroup, p: int, elements: Sequence[GroupElement]) -> bool:
    """Check that the elements have nondecreasing p-power orders and split ``H_(p)``."""
    orders = [x.order() for x in elements]
    if any(o is None for o in orders):
        return False
    if any(o != p ** _p_valuation(o, p) for o in orders):
        return False
    if any(big < small for small, big in zip(orders, orders[1:])):
        return False
    primary, _ = primary_part(group, p)
    expected = primary.order()
    if reduce(lambda x, y: x * y, orders, 1) != expected:
        return False
    span = set()
    for coefficients in itertools.product(*(range(o) for o in orders)):
        total = group.identity()
        for c, x in zip(coefficients, elements):
            total = total + c * x
        span.add(total)
    return len(span) == expected


def iter_pseudo_bases(group: AbelianGroup, p: int) -> Iterator[tuple[GroupElement, ...]]:
    """Brute-force every pseudo-basis of ``H_(p)``; only sensible for tiny groups."""
    primary, canonical = primary_part(group, p)
    members = [x for x in _primary_elements(group, canonical)]
    by_order: dict[int, list[GroupElement]] = {}
    for x in members:
        by_order.setdefault(x.order(), []).append(x)
    choices = [by_order.get(o, []) for o in canonical.orders]
    for candidate in itertools.product(*choices):
        if is_pseudo_basis(group, p, candidate):
            yield candidate


def _primary_elements(group: AbelianGroup, basis: PseudoBasis) -> Iterator[GroupElement]:
    for coefficients in itertools.product(*(range(o) for o in basis.orders)):
        total = group.identity()
        for c, x in zip(coefficients, basis.elements):
            total = total + c * x
        yield total


#####################################
# Linking forms
#####################################


def _frac_mod_one(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class LinkingForm:
    """A bilinear pairing ``left x right -> Q/Z`` of finite abelian groups.

    ``table[i][j]`` is the value on the i-th torsion generator of ``left``
    and the j-th torsion generator of ``right``, stored in ``[0, 1)``.
    """

    left: AbelianGroup
    right: AbelianGroup
    table: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not (self.left.is_finite and self.right.is_finite):
            raise TorsionKitError("linking forms are defined on finite groups")
        rows = tuple(tuple(_frac_mod_one(Fraction(x)) for x in row) for row in self.table)
        if len(rows) != self.left.torsion_rank or any(len(r) != self.right.torsion_rank for r in rows):
            raise TorsionKitError(
                f"linking table shape does not match {self.left} x {self.right}"
            )
        for i, di in enumerate(self.left.torsion_orders):
            for j, dj in enumerate(self.right.torsion_orders):
                value = rows[i][j]
                if (di * value).denominator != 1 or (dj * value).denominator != 1:
                    raise TorsionKitError(
                        f"linking value {value} at ({i}, {j}) is not killed by orders {di}, {dj}"
                    )
        object.__setattr__(self, "table", rows)

    def value(self, z: GroupElement, w: GroupElement) -> Fraction:
        total = Fraction(0)
        for i, zi in enumerate(z.torsion_part):
            if not zi:
                continue
            for j, wj in enumerate(w.torsion_part):
                total += zi * wj * self.table[i][j]
        return _frac_mod_one(total)


def dot_pairing(form: LinkingForm, z: GroupElement, w: GroupElement, r: int) -> int:
    """Z_r-valued dot pairing ``z . w`` induced by a linking form, with ``r = p**s``.

    Uses the p-power order ``p**k >= r`` of ``w`` (or of ``z``) and returns
    ``p**k * L(z, w) mod r``.
    """
    p, s = prime_power(r)
    for candidate in (w, z):
        order = candidate.order()
        if order == 1:
            return 0
        if order is None or order != p ** _p_valuation(order, p):
            continue
        if _p_valuation(order, p) >= s:
            scaled = order * form.value(z, w)
            return int(scaled) % r
    raise TorsionKitError(
        f"neither {z} nor {w} has p-power order at least {r}; the dot pairing is undefined"
    )


def is_nondegenerate(form: LinkingForm) -> bool:
    """Check that no nonzero element of ``left`` pairs trivially with all of ``right``."""
    if form.left.order() != form.right.order():
        raise DegenerateFormError(
            f"linking form between groups of orders {form.left.order()} and {form.right.order()}"
        )
    generators = form.right.generators()
    for z in form.left.elements():
        if z.is_identity:
            continue
        if all(form.value(z, w) == 0 for w in generators):
            logger.debug(f"{z} is in the left kernel")
            return False
    return True
