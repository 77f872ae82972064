"""
torsionkit

Exact checks of torsion of 3-manifolds with boundary against determinants
of cup product and Massey forms, computed from nice presentations.
"""

from .abelian import AbelianGroup, GroupElement, LinkingForm
from .detform import AlternatingForm, MasseyForm, MultiPoly, form_determinant, massey_determinant
from .errors import PresentationError, TorsionKitError
from .fox import FreeWord, Presentation, fox_derivative
from .groupring import GroupRingElement, TruncatedElement, truncation_context
from .volform import PairedVolumeForm

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup",
    "AlternatingForm",
    "FreeWord",
    "GroupElement",
    "GroupRingElement",
    "LinkingForm",
    "MasseyForm",
    "MultiPoly",
    "PairedVolumeForm",
    "Presentation",
    "PresentationError",
    "TorsionKitError",
    "TruncatedElement",
    "form_determinant",
    "fox_derivative",
    "massey_determinant",
    "truncation_context",
]
