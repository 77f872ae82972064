"""
Forms read off a nice presentation.

Sign convention: with ``h_1..h_n`` the basis of ``G = H/Tors`` given by the
first n generators and ``<h_p*, w>`` the exponent sum of ``x_p`` in ``w``,

    f(b_i, a_j, a_p) = -sum_mu (<h_p*, alpha_mu> <h_j*, beta_mu>
                                 - <h_p*, beta_mu> <h_j*, alpha_mu>)

for relator ``r_i = prod [alpha_mu, beta_mu]``. With it the Fox derivative
satisfies ``eta(d r_i / d x_j) = theta_ij(h - 1)`` modulo ``I^2`` and every
check below compares against the orientation sign ``+1``.
"""

from __future__ import annotations

from itertools import product
from typing import Sequence

from ..abelian import AbelianGroup, prime_power
from ..detform import AlternatingForm, MasseyForm
from ..errors import ExpansionError, PreconditionError, TorsionKitError
from ..fox import CommutatorExpansion, FreeWord, WordCombination, abelianize, fox_derivative
from ..groupring import truncate, truncation_context
from ..utils.utils_logger import logger
from .presentation import NicePresentation


def _bracket(alpha: FreeWord, beta: FreeWord, j: int, p: int) -> int:
    """``<h_p*, alpha><h_j*, beta> - <h_p*, beta><h_j*, alpha>`` for one-indexed generators."""
    return alpha.exponent_sum(p) * beta.exponent_sum(j) - beta.exponent_sum(p) * alpha.exponent_sum(j)


def _expansion_entry(
    expansion: CommutatorExpansion, j: int, p: int, modulus: int | None, include_even_term: bool
) -> int:
    value = sum(_bracket(alpha, beta, j, p) for alpha, beta in expansion.pairs)
    if modulus is not None and modulus % 2 == 0 and include_even_term:
        value += (modulus // 2) * sum(g.exponent_sum(j) * g.exponent_sum(p) for g in expansion.power_words)
    return -value


def cup_form_from_expansions(pres: NicePresentation) -> AlternatingForm:
    """Integral cup form ``f_M`` on ``H^2 x H^1 x H^1`` from commutator expansions."""
    n = pres.rank
    if n < 2:
        raise PreconditionError("the cup form needs rank at least 2")
    table = []
    for i in range(1, n):
        expansion = pres.expansion(i)
        if expansion.power_words:
            raise ExpansionError(f"relator {i} has power blocks; the integral form needs pure commutators")
        table.append(
            tuple(
                tuple(_expansion_entry(expansion, j, p, None, False) for p in range(1, n + 1))
                for j in range(1, n + 1)
            )
        )
    form = AlternatingForm(n, tuple(table))
    logger.debug(f"Cup form of {pres.name}: {form.to_json()}")
    return form


def mod_r_rank(pres: NicePresentation, r: int) -> int:
    """Rank b of the free Z_r module ``H/r``."""
    group = pres.group
    if not group.is_free_mod(r):
        raise PreconditionError(f"H/{r} is not free for H = {group}")
    return group.rank_mod(r)


def mod_r_cup_form(pres: NicePresentation, r: int, include_even_term: bool = True) -> AlternatingForm:
    """Mod-r cup form ``f_M^r`` on ``H^2(M; Z_r) x H^1 x H^1``.

    Relators ``1..b-1`` may carry r-th power blocks; for even r their
    ``(r/2) gamma_j gamma_p`` contribution is added unless
    ``include_even_term`` is off.
    """
    prime_power(r)
    b = mod_r_rank(pres, r)
    if b < 2:
        raise PreconditionError(f"H/{r} has rank {b}; the mod-r form needs rank at least 2")
    table = []
    for i in range(1, b):
        expansion = pres.expansion(i, r)
        if expansion.power_words and expansion.exponent != r:
            raise ExpansionError(f"relator {i} has power blocks of exponent {expansion.exponent}, not {r}")
        table.append(
            tuple(
                tuple(_expansion_entry(expansion, j, p, r, include_even_term) for p in range(1, b + 1))
                for j in range(1, b + 1)
            )
        )
    return AlternatingForm(b, tuple(table), r)


#####################################
# Higher Fox derivatives and Massey forms
#####################################


def _augmented_derivatives(word: FreeWord, depth: int, indices: Sequence[int]) -> dict[tuple[int, ...], int]:
    """Augmentations of every iterated derivative of length ``depth`` over ``indices``."""
    level: dict[tuple[int, ...], WordCombination] = {(): WordCombination.of(word)}
    for _ in range(depth):
        level = {
            seq + (j,): fox_derivative(combo, j)
            for seq, combo in level.items()
            for j in indices
        }
    return {seq: combo.augmentation() for seq, combo in level.items()}


def massey_vanishing_order(word: FreeWord, num_generators: int, order: int) -> bool:
    """True when all augmented derivatives of orders ``1..order`` vanish."""
    indices = range(1, num_generators + 1)
    for depth in range(1, order + 1):
        if any(_augmented_derivatives(word, depth, indices).values()):
            return False
    return True


def massey_form_from_higher_fox(pres: NicePresentation, order: int) -> MasseyForm:
    """Massey form of order m from augmented derivatives of order ``m + 1``.

    ``f(b_i, a_j, a_{i_1}, ..., a_{i_m})`` is minus the augmentation of the
    derivative taken first in ``x_j`` and then in ``x_{i_m}, ..., x_{i_1}``.
    """
    n, m_gen = pres.rank, pres.num_generators
    if n < 2:
        raise PreconditionError("Massey forms need rank at least 2")
    values: dict[tuple[int, int, tuple[int, ...]], int] = {}
    for i in range(1, n):
        relator = pres.relators[i - 1]
        if not massey_vanishing_order(relator, m_gen, order):
            raise PreconditionError(f"relator {i} has a nonvanishing derivative of order at most {order}")
        augmented = _augmented_derivatives(relator, order + 1, range(1, n + 1))
        for seq, value in augmented.items():
            if not value:
                continue
            j, *reversed_multi = seq
            multi = tuple(x - 1 for x in reversed(reversed_multi))
            values[(i - 1, j - 1, multi)] = -value
    return MasseyForm.from_mapping(n, order, values)


#####################################
# Fox derivative versus cup form
#####################################


def check_fox_cup_congruence(
    expansion: CommutatorExpansion,
    j: int,
    num_generators: int,
    modulus: int | None = None,
    include_even_term: bool = True,
) -> bool:
    """Compare ``eta(d w / d x_j)`` with ``sum_p theta_jp (h_p - 1)`` modulo ``I^2``.

    The group is free abelian on all generators, or ``Z_r^m`` when a
    modulus is given.
    """
    if not 1 <= j <= num_generators:
        raise TorsionKitError(f"generator index {j} outside 1..{num_generators}")
    word = expansion.expand()
    if word.max_index > num_generators:
        raise TorsionKitError(f"expansion uses x{word.max_index} beyond {num_generators} generators")
    if modulus is None:
        group = AbelianGroup(num_generators)
    else:
        group = AbelianGroup(0, (modulus,) * num_generators)
    assignment = group.generators()
    context = truncation_context(group, 2, modulus)
    left = truncate(abelianize(fox_derivative(word, j), group, assignment, modulus), context)
    right = context.zero()
    for p in range(1, num_generators + 1):
        coefficient = -_expansion_entry(expansion, j, p, modulus, include_even_term)
        if coefficient:
            right = right + context.variable(p - 1) * coefficient
    return left == right


def congruence_failures(
    pres: NicePresentation, modulus: int | None = None, include_even_term: bool = True
) -> list[tuple[int, int]]:
    """Relator and generator pairs where the congruence fails."""
    rows = pres.rank - 1 if modulus is None else mod_r_rank(pres, modulus) - 1
    failures = []
    for i, j in product(range(1, rows + 1), range(1, pres.num_generators + 1)):
        expansion = pres.expansion(i, modulus)
        if not check_fox_cup_congruence(expansion, j, pres.num_generators, modulus, include_even_term):
            failures.append((i, j))
    return failures
