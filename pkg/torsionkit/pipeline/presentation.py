"""
Nice presentations and the ``.pres`` text format.

A nice presentation has ``m`` generators and ``m - 1`` relators with rank
``n = rank H_1``. The first ``n`` generators have zero exponent sum in
every relator, the first ``n - 1`` relators lie in ``[F, F]``, and the
lower right block ``v`` of the relator matrix is square and nonsingular.

Text format, one directive per line, ``#`` starts a comment::

    name hopf
    generators 2
    rank 2
    relator x1 x2 X1 X2
    expansion 1: pairs=[(x1, x2)] powers=[] exponent=0
    linking 3 2 1/2
    crossing 1 2 1
    longitude 1 x2
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

from ..abelian import AbelianGroup, GroupElement, LinkingForm, dot_pairing
from ..errors import ExpansionError, NotFreeError, PresentationError, RankError
from ..fox import (
    CommutatorExpansion,
    FreeWord,
    Presentation,
    Substitution,
    commutator_expansion,
    magnus_expansion,
    nielsen_normalize,
)
from .._linalg import identity_rows, integer_determinant
from ..utils.utils_logger import logger

#####################################
# Nice presentations
#####################################


@dataclass(frozen=True)
class NicePresentation:
    presentation: Presentation
    rank: int
    expansions: tuple[CommutatorExpansion | None, ...] = ()
    linking: tuple[tuple[int, int, Fraction], ...] = ()
    crossings: tuple[tuple[int, int, int], ...] = ()
    longitudes: tuple[tuple[int, FreeWord], ...] = ()
    declared_torsion: tuple[int, ...] | None = None
    name: str = "presentation"
    substitution: Substitution | None = field(default=None, compare=False)

    def __post_init__(self):
        m = self.presentation.num_generators
        n = self.rank
        relators = self.presentation.relators
        if len(relators) != m - 1:
            raise RankError(f"{m} generators need {m - 1} relators, got {len(relators)}")
        if not 1 <= n <= m:
            raise RankError(f"rank {n} outside 1..{m}")
        matrix = self.presentation.relator_matrix()
        for i, row in enumerate(matrix, start=1):
            if any(row[:n]):
                raise PresentationError(f"relator {i} has nonzero exponent sum in the first {n} generators")
            if i < n and any(row):
                raise PresentationError(f"relator {i} is not in the commutator subgroup")
        if self.torsion_block and integer_determinant(self.torsion_block) == 0:
            raise RankError(f"torsion block is singular; rank exceeds {n}")

        expansions = tuple(self.expansions) + (None,) * (m - 1 - len(self.expansions))
        if len(expansions) != m - 1:
            raise ExpansionError(f"{len(self.expansions)} expansions for {m - 1} relators")
        for i, (expansion, relator) in enumerate(zip(expansions, relators), start=1):
            if expansion is not None and not expansion.expand().equals(relator):
                raise ExpansionError(f"expansion {i} does not multiply out to relator {i}")
        object.__setattr__(self, "expansions", expansions)

        if self.declared_torsion is not None:
            declared = AbelianGroup.from_orders(0, self.declared_torsion).torsion_orders
            if declared != self.group.torsion_orders:
                raise PresentationError(
                    f"declared torsion {list(self.declared_torsion)} but the relators give {list(self.group.torsion_orders)}"
                )

    @property
    def num_generators(self) -> int:
        return self.presentation.num_generators

    @property
    def relators(self) -> tuple[FreeWord, ...]:
        return self.presentation.relators

    @cached_property
    def torsion_block(self) -> list[list[int]]:
        """Rows ``n..m-1`` and columns ``n+1..m`` of the relator matrix."""
        n = self.rank
        return [row[n:] for row in self.presentation.relator_matrix()[n - 1 :]]

    @property
    def torsion_order(self) -> int:
        """``|T| = |det v|``."""
        return abs(integer_determinant(self.torsion_block))

    @property
    def torsion_sign(self) -> int:
        return 1 if integer_determinant(self.torsion_block) > 0 else -1

    @cached_property
    def _abelianization(self) -> tuple[AbelianGroup, list[GroupElement]]:
        return self.presentation.abelianization()

    @property
    def group(self) -> AbelianGroup:
        return self._abelianization[0]

    @property
    def assignment(self) -> list[GroupElement]:
        """Images of the generators in H."""
        return self._abelianization[1]

    def expansion(self, index: int, exponent: int | None = None) -> CommutatorExpansion:
        """Expansion of relator ``index`` (one-indexed), derived when not supplied.

        With ``exponent`` the expansion may carry power blocks of that
        exponent; supplied expansions with other exponents are replaced.
        """
        supplied = self.expansions[index - 1]
        if supplied is not None:
            if not supplied.power_words or supplied.exponent == exponent:
                return supplied
            logger.warning(
                f"Expansion {index} uses exponent {supplied.exponent}, re-deriving with exponent {exponent}"
            )
        return commutator_expansion(self.relators[index - 1], exponent)

    def linking_table(self, p_orders: list[int]) -> list[list[Fraction]]:
        """Linking values on the p-part block, defaulting to ``1 / order`` on the diagonal."""
        size = len(p_orders)
        n = self.rank
        if not self.linking:
            return [[Fraction(1, p_orders[i]) if i == j else Fraction(0) for j in range(size)] for i in range(size)]
        table = [[Fraction(0)] * size for _ in range(size)]
        for generator, relator, value in self.linking:
            row, col = generator - n - 1, relator - n
            if not (0 <= row < size and 0 <= col < size):
                raise PresentationError(
                    f"linking entry ({generator}, {relator}) is outside the p-part block"
                )
            table[row][col] = value
        return table

    def linking_form(self, p_orders: list[int], r: int | None = None) -> LinkingForm:
        """Linking form on the p-part block.

        With ``r`` given, the dot pairing ``h_i . k_j`` of the block generators
        must be the identity mod r, as the split torsion block forces.
        """
        group = AbelianGroup(0, tuple(p_orders))
        form = LinkingForm(group, group, tuple(tuple(row) for row in self.linking_table(p_orders)))
        if r is not None:
            generators = group.generators()
            dots = [[dot_pairing(form, h, k, r) for k in generators] for h in generators]
            if dots != identity_rows(len(generators)):
                raise NotFreeError(
                    f"linking table of {self.name} gives dot matrix {dots} mod {r}, "
                    "but the split torsion block requires the identity"
                )
        return form


#####################################
# Link data carried alongside presentations
#####################################


def linking_number(pres: NicePresentation, a: int, b: int) -> Fraction:
    """Half the signed count of crossings between components a and b."""
    total = sum(sign for i, j, sign in pres.crossings if {i, j} == {a, b} and i != j)
    return Fraction(total, 2)


def milnor_invariant(pres: NicePresentation, indices: tuple[int, ...]) -> int:
    """Milnor invariant ``mu(i_1 ... i_k j)`` read off the longitude of component j.

    It is the coefficient of ``X_{i_1} ... X_{i_k}`` in the Magnus
    expansion of the longitude; it is only a link invariant once all
    lower invariants vanish.
    """
    *first, last = indices
    longitudes = dict(pres.longitudes)
    if last not in longitudes:
        raise PresentationError(f"no longitude recorded for component {last}")
    expansion = magnus_expansion(longitudes[last], len(first))
    return expansion.get(tuple(first), 0)


#####################################
# Parsing and formatting
#####################################

_EXPANSION = re.compile(r"^(\d+)\s*:\s*(.*)$")
_PAIRS = re.compile(r"pairs\s*=\s*\[(.*?)\]")
_POWERS = re.compile(r"powers\s*=\s*\[(.*?)\]")
_EXPONENT = re.compile(r"exponent\s*=\s*(-?\d+)")


def _parse_word(text: str, line: int) -> FreeWord:
    try:
        return FreeWord.parse(text)
    except PresentationError as e:
        raise PresentationError(str(e), line) from e


def _parse_int(text: str, line: int, what: str) -> int:
    try:
        return int(text)
    except ValueError as e:
        raise PresentationError(f"{what} must be an integer, got {text!r}", line) from e


def _parse_expansion(body: str, line: int) -> tuple[int, CommutatorExpansion]:
    match = _EXPANSION.match(body)
    if match is None:
        raise PresentationError("expansion must look like '<i>: pairs=[...] powers=[...] exponent=<r>'", line)
    index = int(match.group(1))
    rest = match.group(2)
    pairs = []
    pairs_match = _PAIRS.search(rest)
    if pairs_match and pairs_match.group(1).strip():
        for chunk in pairs_match.group(1).split(";"):
            chunk = chunk.strip().strip("()")
            if "," not in chunk:
                raise PresentationError(f"commutator pair {chunk!r} needs two words", line)
            left, right = chunk.split(",", 1)
            pairs.append((_parse_word(left, line), _parse_word(right, line)))
    powers = []
    powers_match = _POWERS.search(rest)
    if powers_match and powers_match.group(1).strip():
        powers = [_parse_word(chunk, line) for chunk in powers_match.group(1).split(";")]
    exponent_match = _EXPONENT.search(rest)
    exponent = int(exponent_match.group(1)) if exponent_match else 0
    try:
        return index, CommutatorExpansion(tuple(pairs), tuple(powers), exponent)
    except ExpansionError as e:
        raise PresentationError(str(e), line) from e


def _parse_fraction(text: str, line: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise PresentationError(f"bad linking value {text!r}", line) from e


def parse_presentation(text: str, name: str = "presentation", normalize: bool = True) -> NicePresentation:
    """Parse the ``.pres`` format; non-nice inputs are normalized when allowed."""
    num_generators = None
    rank = None
    torsion = None
    relators: list[FreeWord] = []
    expansions: dict[int, tuple[CommutatorExpansion, int]] = {}
    linking: list[tuple[int, int, Fraction]] = []
    crossings: list[tuple[int, int, int]] = []
    longitudes: list[tuple[int, FreeWord]] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, body = line.partition(" ")
        body = body.strip()
        if keyword == "name":
            name = body or name
        elif keyword == "generators":
            num_generators = _parse_int(body, number, "generator count")
        elif keyword == "rank":
            rank = _parse_int(body, number, "rank")
        elif keyword == "torsion":
            torsion = tuple(_parse_int(x, number, "torsion order") for x in body.split())
        elif keyword == "relator":
            relators.append(_parse_word(body, number))
        elif keyword == "expansion":
            index, expansion = _parse_expansion(body, number)
            expansions[index] = (expansion, number)
        elif keyword == "linking":
            parts = body.split()
            if len(parts) != 3:
                raise PresentationError("linking needs '<i> <j> <num>/<den>'", number)
            linking.append(
                (
                    _parse_int(parts[0], number, "generator"),
                    _parse_int(parts[1], number, "relator"),
                    _parse_fraction(parts[2], number),
                )
            )
        elif keyword == "crossing":
            parts = body.split()
            if len(parts) != 3 or parts[2] not in ("1", "-1", "+1"):
                raise PresentationError("crossing needs '<component> <component> <+1|-1>'", number)
            crossings.append((int(parts[0]), int(parts[1]), int(parts[2])))
        elif keyword == "longitude":
            index, _, word = body.partition(" ")
            longitudes.append((_parse_int(index, number, "component"), _parse_word(word, number)))
        else:
            raise PresentationError(f"unknown directive {keyword!r}", number)

    if num_generators is None:
        raise PresentationError("missing 'generators' line")
    if rank is None:
        raise PresentationError("missing 'rank' line")
    for index, (expansion, number) in expansions.items():
        if not 1 <= index <= len(relators):
            raise PresentationError(f"expansion for relator {index} but only {len(relators)} relators", number)
        expansion.verify(relators[index - 1], number)

    presentation = Presentation(num_generators, tuple(relators), rank)
    ordered = tuple(expansions[i][0] if i in expansions else None for i in range(1, len(relators) + 1))
    try:
        return NicePresentation(
            presentation,
            rank,
            ordered,
            tuple(linking),
            tuple(crossings),
            tuple(longitudes),
            torsion,
            name,
        )
    except PresentationError as e:
        if isinstance(e, (RankError, ExpansionError)) or not normalize:
            raise
        logger.warning(f"{name} is not in block form ({e}); normalizing")

    normalized, substitution = nielsen_normalize(presentation)
    if expansions or linking:
        logger.warning("Dropping expansions and linking data that refer to the original relators")
    rewritten = tuple((i, substitution.rewrite(w)) for i, w in longitudes)
    return NicePresentation(
        normalized,
        rank,
        (),
        (),
        tuple(crossings),
        rewritten,
        torsion,
        name,
        substitution,
    )


def import_presentation(path: str | Path, normalize: bool = True) -> NicePresentation:
    """Read a ``.pres`` file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise PresentationError(f"cannot read {path}: {e}") from e
    logger.info(f"Reading presentation from {path}")
    return parse_presentation(text, path.stem, normalize)


def format_presentation(pres: NicePresentation) -> str:
    """Write a nice presentation back to the ``.pres`` format."""
    lines = [
        f"name {pres.name}",
        f"generators {pres.num_generators}",
        f"rank {pres.rank}",
    ]
    if pres.declared_torsion is not None:
        lines.append("torsion " + " ".join(str(d) for d in pres.declared_torsion))
    lines += [f"relator {r}" for r in pres.relators]
    lines += [f"expansion {i}: {e}" for i, e in enumerate(pres.expansions, start=1) if e is not None]
    lines += [f"linking {g} {r} {v}" for g, r, v in pres.linking]
    lines += [f"crossing {a} {b} {s}" for a, b, s in pres.crossings]
    lines += [f"longitude {i} {w}" for i, w in pres.longitudes]
    return "\n".join(lines) + "\n"
