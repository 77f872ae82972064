"""
Exceptions raised by torsionkit.

Every error derives from ``TorsionKitError``, which is itself a
``ValueError`` so callers that only guard against bad values keep working.
"""


class TorsionKitError(ValueError):
    """Base class for all torsionkit failures."""


class PresentationError(TorsionKitError):
    """Malformed presentation input, optionally tied to a source line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RankError(PresentationError):
    """Declared rank does not match the relator matrix."""


class ExpansionError(PresentationError):
    """A commutator expansion does not expand to its relator."""


class NotFreeError(TorsionKitError):
    """H/r is not a free Z_r module, or the lift data does not span it."""


class ContextMismatchError(TorsionKitError):
    """Elements from different groups, moduli or truncation contexts were combined."""


class FormError(TorsionKitError):
    """Invalid form table: wrong shape, not skew, or a non-vanishing total."""


class DivisionError(FormError):
    """A determinant failed the exact-division or column-consistency check."""


class DegenerateFormError(TorsionKitError):
    """A pairing or volume form is not invertible where it has to be."""


class PreconditionError(TorsionKitError):
    """Input violates a structural hypothesis of the requested check."""
