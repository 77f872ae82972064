"""
Two-path verification of torsion against determinants of forms.

Each check computes the normalized torsion numerator ``tau_0 * N_s`` in a
truncated group ring (left side) and the image of the refined determinant
under the q map times ``h_s - 1`` (right side), then compares them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any

from .._linalg import cofactor_determinant, integer_determinant, is_unit
from ..abelian import prime_power
from ..detform import AlternatingForm, MultiPoly, form_determinant, massey_determinant, sign_refine
from ..errors import NotFreeError, PreconditionError, TorsionKitError
from ..fox import alexander_matrix
from ..groupring import (
    GroupRingElement,
    TruncatedElement,
    TruncationContext,
    in_ideal_power,
    matrix_determinant,
    q_map,
    q_r_map,
    truncate,
    truncation_context,
)
from ..utils.utils_logger import logger
from ..volform import PairedVolumeForm, canonical_cohomology_form, dual_form, linking_volume_value, refined_determinant
from .forms import cup_form_from_expansions, massey_form_from_higher_fox, mod_r_cup_form, mod_r_rank
from .presentation import NicePresentation

EQUAL = "equal"
EQUAL_UP_TO_SIGN = "equal-up-to-sign"
UNEQUAL = "unequal"

#####################################
# Torsion numerator
#####################################


def _check_strike(pres: NicePresentation, strike: int) -> None:
    if not 1 <= strike <= pres.rank:
        raise PreconditionError(f"strike index {strike} outside 1..{pres.rank}")


def tau_zero(pres: NicePresentation) -> int:
    """``(-1)^m sign(det v)``."""
    return (-1) ** pres.num_generators * pres.torsion_sign


def torsion_numerator(pres: NicePresentation, strike: int, modulus: int | None = None) -> GroupRingElement:
    """``N_s = (-1)^(m+s) det Delta(s)`` over ``R[H]``, with Delta the Alexander matrix."""
    _check_strike(pres, strike)
    group = pres.group
    matrix = alexander_matrix(pres.presentation, group, pres.assignment, modulus)
    struck = [[x for c, x in enumerate(row) if c != strike - 1] for row in matrix]
    det = matrix_determinant(struck, group, modulus)
    return det * (-1) ** (pres.num_generators + strike)


def truncated_numerator(pres: NicePresentation, strike: int, context: TruncationContext) -> TruncatedElement:
    """Image of ``N_s`` in ``R[H] / I^k``, with the determinant taken after truncation."""
    _check_strike(pres, strike)
    matrix = alexander_matrix(pres.presentation, pres.group, pres.assignment, context.modulus)
    struck = [[truncate(x, context) for c, x in enumerate(row) if c != strike - 1] for row in matrix]
    det = cofactor_determinant(struck, context.one(), context.zero())
    return det * (-1) ** (pres.num_generators + strike)


#####################################
# Reports
#####################################


def compare(left: TruncatedElement, right: TruncatedElement) -> str:
    if left == right:
        return EQUAL
    if left == -right:
        return EQUAL_UP_TO_SIGN
    return UNEQUAL


@dataclass
class TheoremReport:
    mode: str
    name: str
    truncation_degree: int
    strike: int
    left: TruncatedElement
    right: TruncatedElement
    verdict: str
    details: dict[str, Any] = field(default_factory=dict)
    elapsed_seconds: float = 0.0

    @property
    def leading_terms(self) -> dict[str, dict[str, int]]:
        return {"left": self.left.leading_terms(), "right": self.right.leading_terms()}

    def to_json(self) -> dict[str, Any]:
        return {
            "presentation": self.name,
            "mode": self.mode,
            "truncation_degree": self.truncation_degree,
            "strike": self.strike,
            "left": self.left.as_dict(),
            "right": self.right.as_dict(),
            "leading_degree": {"left": self.left.lowest_degree(), "right": self.right.lowest_degree()},
            "leading_terms": self.leading_terms,
            "verdict": self.verdict,
            "details": self.details,
            "elapsed_seconds": round(self.elapsed_seconds, 4),
        }

    def summary(self) -> str:
        return (
            f"{self.name} [{self.mode}] strike {self.strike}, mod I^{self.truncation_degree}: {self.verdict}\n"
            f"  torsion side:     {self.left}\n"
            f"  determinant side: {self.right}"
        )


def _finish(report: TheoremReport, started: float) -> TheoremReport:
    report.elapsed_seconds = time.perf_counter() - started
    if report.verdict == EQUAL:
        logger.info(f"{report.name} [{report.mode}]: both sides agree mod I^{report.truncation_degree}")
    elif report.verdict == EQUAL_UP_TO_SIGN:
        logger.warning(f"{report.name} [{report.mode}]: sides agree only up to sign")
    else:
        logger.error(f"{report.name} [{report.mode}]: sides differ: {report.left} vs {report.right}")
    return report


#####################################
# Integral cup form check
#####################################


def integral_refined_determinant(pres: NicePresentation) -> tuple[AlternatingForm, MultiPoly]:
    """The integral cup form and ``Det_omega`` for the standard homology orientation."""
    n = pres.rank
    form = cup_form_from_expansions(pres)
    volume = dual_form(PairedVolumeForm.from_orientation(1, n, n - 1))
    return form, refined_determinant(form, volume)


def check_integral_theorem(pres: NicePresentation, strike: int = 1) -> TheoremReport:
    """``tau_0 N_s`` against ``(h_s - 1) q(Det_omega(f_M))`` in ``Z[H] / I^n``."""
    started = time.perf_counter()
    n = pres.rank
    _check_strike(pres, strike)
    form, det = integral_refined_determinant(pres)
    context = truncation_context(pres.group, n)
    section = pres.assignment[:n]
    left = truncated_numerator(pres, strike, context) * tau_zero(pres)
    h_minus_one = context.group_element(section[strike - 1]) - 1
    right = h_minus_one * q_map(det, context, section)
    report = TheoremReport(
        "integral",
        pres.name,
        n,
        strike,
        left,
        right,
        compare(left, right),
        {
            "tau_zero": tau_zero(pres),
            "torsion_order": pres.torsion_order,
            "group": str(pres.group),
            "determinant": det.to_json(),
            "unrefined_determinant": form_determinant(form).to_json(),
            "orientation_sign": 1,
        },
    )
    return _finish(report, started)


#####################################
# Mod-r cup form check
#####################################


def _p_block(pres: NicePresentation, r: int) -> tuple[int, list[int], int]:
    """Validate the torsion block for the mod-r check.

    Returns ``(b, p_orders, T)`` where the p-part block is diagonal with
    orders divisible by r and ``T = |det v'|`` is the order of the
    prime-to-p part of the torsion; ``|Tors| / r`` matches it only when
    the p-part is a single ``Z_r``.
    """
    p, _ = prime_power(r)
    n, m = pres.rank, pres.num_generators
    b = mod_r_rank(pres, r)
    t = b - n
    block = pres.torsion_block
    p_orders = [block[k][k] for k in range(t)]
    for k in range(t):
        for c in range(len(block)):
            if c != k and (block[k][c] or block[c][k]):
                raise NotFreeError(
                    f"torsion block of {pres.name} is not split at row {n + k}; normalize it first"
                )
        if p_orders[k] <= 0 or p_orders[k] % r:
            raise NotFreeError(f"p-part order {p_orders[k]} of x{n + k + 1} is not a positive multiple of {r}")
    if any(big < small for small, big in zip(p_orders, p_orders[1:])):
        raise NotFreeError(f"p-part orders {p_orders} are not nondecreasing")
    rest = [row[t:] for row in block[t:]]
    det_rest = integer_determinant(rest)
    if det_rest % p == 0:
        raise NotFreeError(f"the prime-to-{p} block has determinant {det_rest}")

    images = pres.assignment
    group = pres.group
    coordinates = []
    for h in images:
        coordinates.append(
            [x % r for x in h.free_part]
            + [x % r for x, d in zip(h.torsion_part, group.torsion_orders) if d % r == 0]
        )
    if any(any(row) for row in coordinates[b:m]):
        raise NotFreeError(f"generators beyond x{b} must vanish in H/{r}")
    if not is_unit(integer_determinant(coordinates[:b]), r):
        raise NotFreeError(f"x1..x{b} do not map to a basis of H/{r}")
    return b, p_orders, abs(det_rest)


def _mod_r_setup(pres: NicePresentation, r: int, include_even_term: bool):
    b, p_orders, t_factor = _p_block(pres, r)
    linking = pres.linking_form(p_orders, r) if p_orders else None
    dots = None
    if linking is not None:
        dots = linking_volume_value(linking, r, linking.left.generators(), linking.right.generators())
    form = mod_r_cup_form(pres, r, include_even_term)
    volume = canonical_cohomology_form(pres.rank, 1, linking, r)
    return b, p_orders, t_factor, dots, form, volume


def mod_r_refined_determinant(
    pres: NicePresentation, r: int, include_even_term: bool = True
) -> tuple[AlternatingForm, MultiPoly]:
    """The mod-r cup form and ``Det_r`` refined by the canonical cohomology form."""
    *_, form, volume = _mod_r_setup(pres, r, include_even_term)
    return form, refined_determinant(form, volume)


def check_mod_r_theorem(
    pres: NicePresentation, r: int, strike: int = 1, include_even_term: bool = True
) -> TheoremReport:
    """``tau_0 N_s`` against ``T (h_s - 1) q_r(Det_r)`` in ``Z_r[H] / I^b``."""
    started = time.perf_counter()
    p, _ = prime_power(r)
    n = pres.rank
    _check_strike(pres, strike)
    b, p_orders, t_factor, dots, form, volume = _mod_r_setup(pres, r, include_even_term)
    det = refined_determinant(form, volume)
    context = truncation_context(pres.group, b, r)
    lifts = pres.assignment[:b]
    left = truncated_numerator(pres, strike, context) * tau_zero(pres)
    h_minus_one = context.group_element(lifts[strike - 1]) - 1
    right = h_minus_one * q_r_map(det, context, lifts) * t_factor
    report = TheoremReport(
        "modr",
        pres.name,
        b,
        strike,
        left,
        right,
        compare(left, right),
        {
            "modulus": r,
            "prime": p,
            "mod_r_rank": b,
            "p_orders": p_orders,
            "prime_to_p_order": t_factor,
            "tau_zero": tau_zero(pres),
            "group": str(pres.group),
            "determinant": det.to_json(),
            "volume_value": volume.standard_value(),
            "linking_dot": dots,
            "even_term": include_even_term,
        },
    )
    return _finish(report, started)


#####################################
# Massey check
#####################################


def check_massey_theorem(pres: NicePresentation, order: int, strike: int = 1) -> TheoremReport:
    """``tau_0 N_s`` against ``(h_s - 1) q(Det_omega(f_m))`` in ``Z[H] / I^(m(n-1)+1)``."""
    started = time.perf_counter()
    if order < 1:
        raise TorsionKitError(f"Massey order must be positive, got {order}")
    n = pres.rank
    _check_strike(pres, strike)
    form = massey_form_from_higher_fox(pres, order)
    d = massey_determinant(form)
    det = sign_refine(d, 1)
    degree = order * (n - 1) + 1
    context = truncation_context(pres.group, degree)
    section = pres.assignment[:n]

    matrix = alexander_matrix(pres.presentation, pres.group, pres.assignment)
    bookkeeping = all(in_ideal_power(entry, order, context) for row in matrix[: n - 1] for entry in row)
    if not bookkeeping:
        logger.warning(f"Some upper Alexander entries of {pres.name} are not in I^{order}")

    left = truncated_numerator(pres, strike, context) * tau_zero(pres)
    h_minus_one = context.group_element(section[strike - 1]) - 1
    right = h_minus_one * q_map(det, context, section)
    report = TheoremReport(
        "massey",
        pres.name,
        degree,
        strike,
        left,
        right,
        compare(left, right),
        {
            "order": order,
            "tau_zero": tau_zero(pres),
            "torsion_order": pres.torsion_order,
            "group": str(pres.group),
            "determinant": det.to_json(),
            "entries_in_ideal_power": bookkeeping,
            "numerator_in_ideal_power": in_ideal_power(left, order * (n - 1), context),
        },
    )
    return _finish(report, started)
