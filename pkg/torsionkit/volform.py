"""
Paired volume forms.

A paired volume form on free R-modules ``K`` (rank n) and ``L`` (rank l)
assigns to every pair of bases an element of R, scaling by the
determinants of base changes: ``mu(a', b') = [a'/a][b'/b] mu(a, b)``. It is
stored by its value on one distinguished pair of bases, given as rows in
the standard coordinates of K and L.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ._linalg import identity_rows, integer_determinant, inverse_matrix, is_unit, matmul, transpose, unit_inverse
from .abelian import AbelianGroup, GroupElement, LinkingForm, PseudoBasis, dot_pairing, prime_power, primary_part
from .detform import AlternatingForm, MasseyForm, MultiPoly, form_determinant, massey_determinant
from .errors import DegenerateFormError, NotFreeError, TorsionKitError
from .utils.utils_logger import logger

Rows = tuple[tuple[int, ...], ...]


def _rows(matrix: Sequence[Sequence[int]]) -> Rows:
    return tuple(tuple(int(x) for x in row) for row in matrix)


@dataclass(frozen=True)
class PairedVolumeForm:
    rank_k: int
    rank_l: int
    value: int
    modulus: int | None = None
    basis_k: Rows | None = None
    basis_l: Rows | None = None

    def __post_init__(self):
        basis_k = _rows(self.basis_k) if self.basis_k is not None else _rows(identity_rows(self.rank_k))
        basis_l = _rows(self.basis_l) if self.basis_l is not None else _rows(identity_rows(self.rank_l))
        for name, basis, rank in (("K", basis_k, self.rank_k), ("L", basis_l, self.rank_l)):
            if len(basis) != rank or any(len(row) != rank for row in basis):
                raise TorsionKitError(f"distinguished basis of {name} must be {rank} x {rank}")
            if not is_unit(integer_determinant(basis), self.modulus):
                raise TorsionKitError(f"distinguished rows of {name} do not form a basis")
        value = int(self.value) if self.modulus is None else int(self.value) % self.modulus
        object.__setattr__(self, "basis_k", basis_k)
        object.__setattr__(self, "basis_l", basis_l)
        object.__setattr__(self, "value", value)

    @classmethod
    def from_distinguished(
        cls,
        basis_k: Sequence[Sequence[int]],
        basis_l: Sequence[Sequence[int]],
        modulus: int | None = None,
    ) -> PairedVolumeForm:
        """The form taking the value 1 on the given pair of bases."""
        return cls(len(basis_k), len(basis_l), 1, modulus, _rows(basis_k), _rows(basis_l))

    @classmethod
    def from_orientation(cls, sign: int, rank_k: int, rank_l: int) -> PairedVolumeForm:
        """Integral form: ``sign`` on the standard bases, so ``+-1`` on every pair of bases."""
        if sign not in (1, -1):
            raise TorsionKitError(f"orientation sign must be 1 or -1, got {sign}")
        return cls(rank_k, rank_l, sign)

    def _ratio(self, basis: Sequence[Sequence[int]], reference: Rows) -> int:
        det = integer_determinant(basis)
        return det * unit_inverse(integer_determinant(reference), self.modulus)

    def evaluate(self, basis_k: Sequence[Sequence[int]], basis_l: Sequence[Sequence[int]]) -> int:
        """``mu(a, b)`` for rows ``a`` of K and ``b`` of L in standard coordinates."""
        if len(basis_k) != self.rank_k or len(basis_l) != self.rank_l:
            raise TorsionKitError(f"need {self.rank_k} rows of K and {self.rank_l} rows of L")
        value = self._ratio(basis_k, self.basis_k) * self._ratio(basis_l, self.basis_l) * self.value
        return value if self.modulus is None else value % self.modulus

    def standard_value(self) -> int:
        return self.evaluate(identity_rows(self.rank_k), identity_rows(self.rank_l))

    def is_nondegenerate(self) -> bool:
        return is_unit(self.value, self.modulus)

    def agrees_with(self, other: PairedVolumeForm) -> bool:
        return (
            (self.rank_k, self.rank_l, self.modulus) == (other.rank_k, other.rank_l, other.modulus)
            and self.standard_value() == other.standard_value()
        )


@dataclass(frozen=True)
class ExactSplitting:
    """Splitting data for ``0 -> M1 -> M -> M2 -> 0`` of free modules.

    ``inclusion`` rows are the images of the standard basis of M1 and
    ``lifts`` rows lift the standard basis of M2, both in M coordinates.
    """

    inclusion: Rows
    lifts: Rows

    @classmethod
    def direct_sum(cls, rank1: int, rank2: int) -> ExactSplitting:
        total = rank1 + rank2
        inclusion = tuple(tuple(1 if c == i else 0 for c in range(total)) for i in range(rank1))
        lifts = tuple(tuple(1 if c == rank1 + i else 0 for c in range(total)) for i in range(rank2))
        return cls(inclusion, lifts)


def combine_exact(
    first: PairedVolumeForm,
    second: PairedVolumeForm,
    splitting_k: ExactSplitting,
    splitting_l: ExactSplitting,
) -> PairedVolumeForm:
    """Volume form on the middle terms with ``mu(a1 + a2~, b1 + b2~) = mu1(a1, b1) mu2(a2, b2)``."""
    if first.modulus != second.modulus:
        raise TorsionKitError("combined forms must share their coefficient ring")

    def stacked(basis1: Rows, basis2: Rows, split: ExactSplitting) -> list[list[int]]:
        sub = matmul(basis1, split.inclusion) if basis1 else []
        lifted = matmul(basis2, split.lifts) if basis2 else []
        return sub + lifted

    basis_k = stacked(first.basis_k, second.basis_k, splitting_k)
    basis_l = stacked(first.basis_l, second.basis_l, splitting_l)
    return PairedVolumeForm(
        first.rank_k + second.rank_k,
        first.rank_l + second.rank_l,
        first.value * second.value,
        first.modulus,
        _rows(basis_k),
        _rows(basis_l),
    )


def dual_form(form: PairedVolumeForm) -> PairedVolumeForm:
    """``mu*(a*, b*) = mu(a, b)^-1`` on the dual modules."""
    if not form.is_nondegenerate():
        raise DegenerateFormError(f"value {form.value} is not invertible")

    def dual_basis(basis: Rows) -> Rows:
        if not basis:
            return ()
        return _rows(transpose(inverse_matrix(basis, form.modulus)))

    return PairedVolumeForm(
        form.rank_k,
        form.rank_l,
        unit_inverse(form.value, form.modulus),
        form.modulus,
        dual_basis(form.basis_k),
        dual_basis(form.basis_l),
    )


def reduce_mod_r(form: PairedVolumeForm, r: int) -> PairedVolumeForm:
    """Induced form on ``K/r`` and ``L/r``."""
    if form.modulus is not None:
        raise TorsionKitError("only integral forms can be reduced")
    if not form.is_nondegenerate():
        raise DegenerateFormError(f"integral form with value {form.value} is degenerate")
    return PairedVolumeForm(form.rank_k, form.rank_l, form.value, r, form.basis_k, form.basis_l)


def _check_primary_free(basis: PseudoBasis, r: int, side: str) -> None:
    for order in basis.orders:
        if order % r:
            raise NotFreeError(f"{side} p-part summand of order {order} is not divisible by r = {r}")


def linking_volume_value(form: LinkingForm, r: int, left: Sequence, right: Sequence) -> int:
    """``det(x_i . y_j) mod r`` for chosen pseudo-bases of both p-parts."""
    matrix = [[dot_pairing(form, x, y, r) for y in right] for x in left]
    return integer_determinant(matrix) % r if matrix else 1 % r


def linking_volume_form(
    form: LinkingForm,
    r: int,
    left: Sequence[GroupElement] | None = None,
    right: Sequence[GroupElement] | None = None,
) -> PairedVolumeForm:
    """Volume form on the p-parts of ``left/r`` and ``right/r`` given by the dot pairing.

    The standard coordinates are those of the canonical pseudo-bases. The
    value is taken on the pseudo-bases ``left`` and ``right`` (canonical
    when omitted), which become the distinguished bases of the result.
    """
    p, _ = prime_power(r)
    _, left_basis = primary_part(form.left, p)
    _, right_basis = primary_part(form.right, p)
    _check_primary_free(left_basis, r, "left")
    _check_primary_free(right_basis, r, "right")
    if len(left_basis) != len(right_basis):
        raise DegenerateFormError(
            f"p-parts of ranks {len(left_basis)} and {len(right_basis)} cannot carry a volume form"
        )
    left = tuple(left) if left is not None else left_basis.elements
    right = tuple(right) if right is not None else right_basis.elements
    if len(left) != len(left_basis) or len(right) != len(right_basis):
        raise TorsionKitError(f"pseudo-bases must have {len(left_basis)} elements")
    value = linking_volume_value(form, r, left, right)
    logger.debug(f"Linking volume value mod {r}: {value}")
    return PairedVolumeForm(
        len(left_basis),
        len(right_basis),
        value,
        r,
        tuple(pseudo_basis_coordinates(form.left, p, r, x) for x in left),
        tuple(pseudo_basis_coordinates(form.right, p, r, y) for y in right),
    )


def pseudo_basis_coordinates(group: AbelianGroup, p: int, r: int, element: GroupElement) -> tuple[int, ...]:
    """Coordinates mod r of an element of ``H_(p)`` in the canonical pseudo-basis."""
    _, basis = primary_part(group, p)
    coordinates = []
    slot = 0
    for j, d in enumerate(group.torsion_orders):
        if d % p:
            continue
        order = basis.orders[slot]
        step = d // order
        value = element.torsion_part[j]
        if value % step:
            raise TorsionKitError(f"{element} is not in the {p}-primary part")
        coordinates.append((value // step) % r)
        slot += 1
    return tuple(coordinates)


def canonical_cohomology_form(
    free_rank: int,
    orientation_sign: int,
    linking: LinkingForm | None,
    r: int,
) -> PairedVolumeForm:
    """Canonical mod-r form on ``H^1(M; Z_r) x H^2(M; Z_r)``.

    Combines the reduced orientation form on the free parts (ranks n and
    n - 1) with the linking volume form on the p-torsion, then dualizes.
    """
    free = reduce_mod_r(PairedVolumeForm.from_orientation(orientation_sign, free_rank, free_rank - 1), r)
    if linking is None or linking.left.torsion_rank == 0:
        homology = free
    else:
        torsion = linking_volume_form(linking, r)
        homology = combine_exact(
            free,
            torsion,
            ExactSplitting.direct_sum(free.rank_k, torsion.rank_k),
            ExactSplitting.direct_sum(free.rank_l, torsion.rank_l),
        )
    return dual_form(homology)


def refined_determinant(
    form: AlternatingForm | MasseyForm,
    volume: PairedVolumeForm,
    basis_k: Sequence[Sequence[int]] | None = None,
    basis_l: Sequence[Sequence[int]] | None = None,
) -> MultiPoly:
    """``Det_mu(f) = mu(a, b)^-1 d(f, a, b)`` for the working bases of the form."""
    if volume.rank_k != form.n or volume.rank_l != form.n - 1:
        raise TorsionKitError(
            f"volume form ranks ({volume.rank_k}, {volume.rank_l}) do not fit a form on rank {form.n}"
        )
    if volume.modulus != form.modulus:
        raise TorsionKitError(f"volume form over mod {volume.modulus}, form over mod {form.modulus}")
    basis_k = basis_k if basis_k is not None else identity_rows(form.n)
    basis_l = basis_l if basis_l is not None else identity_rows(form.n - 1)
    scale = unit_inverse(volume.evaluate(basis_k, basis_l), volume.modulus)
    d = massey_determinant(form) if isinstance(form, MasseyForm) else form_determinant(form)
    return d * scale
