"""Nice presentations, form extraction and the torsion checks."""

from .checks import (
    EQUAL,
    EQUAL_UP_TO_SIGN,
    UNEQUAL,
    TheoremReport,
    check_integral_theorem,
    check_massey_theorem,
    check_mod_r_theorem,
    compare,
    integral_refined_determinant,
    mod_r_refined_determinant,
    tau_zero,
    torsion_numerator,
    truncated_numerator,
)
from .forms import (
    check_fox_cup_congruence,
    congruence_failures,
    cup_form_from_expansions,
    massey_form_from_higher_fox,
    massey_vanishing_order,
    mod_r_cup_form,
    mod_r_rank,
)
from .presentation import (
    NicePresentation,
    format_presentation,
    import_presentation,
    linking_number,
    milnor_invariant,
    parse_presentation,
)
from .sampler import PresentationSampler

__all__ = [
    "EQUAL",
    "EQUAL_UP_TO_SIGN",
    "UNEQUAL",
    "NicePresentation",
    "PresentationSampler",
    "TheoremReport",
    "check_fox_cup_congruence",
    "check_integral_theorem",
    "check_massey_theorem",
    "check_mod_r_theorem",
    "compare",
    "congruence_failures",
    "cup_form_from_expansions",
    "format_presentation",
    "import_presentation",
    "integral_refined_determinant",
    "linking_number",
    "massey_form_from_higher_fox",
    "massey_vanishing_order",
    "milnor_invariant",
    "mod_r_cup_form",
    "mod_r_refined_determinant",
    "mod_r_rank",
    "parse_presentation",
    "tau_zero",
    "torsion_numerator",
    "truncated_numerator",
]
