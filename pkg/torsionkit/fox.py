"""
Free groups, Fox calculus and presentations.

Words are tuples of signed generator indices: ``3`` is ``x3`` and ``-3`` is
``x3^-1``. Generator indices start at 1, matching the text format where
``x3`` is a letter and ``X3`` its inverse.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .abelian import AbelianGroup, GroupElement, Move, smith_form_with_moves
from .errors import ExpansionError, PresentationError, RankError, TorsionKitError
from .groupring import GroupRingElement
from .utils.utils_logger import logger

_TOKEN = re.compile(r"^([xX])(\d+)(?:\^(-?\d+))?$")

#####################################
# Free words
#####################################


def _free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for letter in letters:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


@dataclass(frozen=True)
class FreeWord:
    """A word in the generators of a free group, not necessarily reduced."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        if any(x == 0 for x in letters):
            raise TorsionKitError("generator index 0 is not allowed")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def identity(cls) -> FreeWord:
        return cls(())

    @classmethod
    def generator(cls, index: int) -> FreeWord:
        return cls((index,))

    @classmethod
    def parse(cls, text: str) -> FreeWord:
        """Parse whitespace separated tokens such as ``x1 X2 x3^2``; ``1`` is the empty word."""
        letters: list[int] = []
        for token in text.split():
            if token in ("1", "e"):
                continue
            match = _TOKEN.match(token)
            if match is None:
                raise PresentationError(f"bad word token {token!r}")
            case, index, power = match.groups()
            index = int(index)
            if index == 0:
                raise PresentationError(f"bad word token {token!r}")
            letter = index if case == "x" else -index
            power = int(power) if power is not None else 1
            letters.extend([letter if power > 0 else -letter] * abs(power))
        return cls(tuple(letters))

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"x{x}" if x > 0 else f"X{-x}" for x in self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: FreeWord) -> FreeWord:
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> FreeWord:
        return FreeWord(tuple(-x for x in reversed(self.letters)))

    def __pow__(self, exponent: int) -> FreeWord:
        base = self if exponent >= 0 else self.inverse()
        return FreeWord(base.letters * abs(exponent))

    def reduced(self) -> FreeWord:
        return FreeWord(_free_reduce(self.letters))

    def is_trivial(self) -> bool:
        return not _free_reduce(self.letters)

    def equals(self, other: FreeWord) -> bool:
        """Equality in the free group."""
        return _free_reduce(self.letters) == _free_reduce(other.letters)

    @property
    def max_index(self) -> int:
        return max((abs(x) for x in self.letters), default=0)

    def exponent_sum(self, index: int) -> int:
        return sum(1 if x == index else -1 for x in self.letters if abs(x) == index)

    def exponent_vector(self, num_generators: int) -> list[int]:
        vec = [0] * num_generators
        for x in self.letters:
            vec[abs(x) - 1] += 1 if x > 0 else -1
        return vec

    def substitute(self, images: Mapping[int, FreeWord]) -> FreeWord:
        """Replace each generator by a word; generators missing from ``images`` are kept."""
        letters: list[int] = []
        for x in self.letters:
            image = images.get(abs(x))
            if image is None:
                letters.append(x)
            else:
                letters.extend(image.letters if x > 0 else image.inverse().letters)
        return FreeWord(_free_reduce(letters))


def commutator(a: FreeWord, b: FreeWord) -> FreeWord:
    """``[a, b] = a b a^-1 b^-1``."""
    return a * b * a.inverse() * b.inverse()


#####################################
# Integral group ring of the free group
#####################################


class WordCombination:
    """Finite integer combination of reduced free words, an element of Z[F]."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[FreeWord, int] | None = None):
        cleaned: dict[FreeWord, int] = {}
        for w, c in (terms or {}).items():
            key = w.reduced()
            cleaned[key] = cleaned.get(key, 0) + int(c)
        self._terms = {w: c for w, c in cleaned.items() if c}

    @classmethod
    def of(cls, word: FreeWord, coefficient: int = 1) -> WordCombination:
        return cls({word: coefficient})

    def items(self) -> Iterator[tuple[FreeWord, int]]:
        return iter(self._terms.items())

    def __add__(self, other: WordCombination) -> WordCombination:
        terms = dict(self._terms)
        for w, c in other._terms.items():
            terms[w] = terms.get(w, 0) + c
        return WordCombination(terms)

    def __neg__(self) -> WordCombination:
        return WordCombination({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: WordCombination) -> WordCombination:
        return self + (-other)

    def __mul__(self, other: WordCombination | int) -> WordCombination:
        if isinstance(other, int):
            return WordCombination({w: c * other for w, c in self._terms.items()})
        terms: dict[FreeWord, int] = {}
        for u, a in self._terms.items():
            for v, b in other._terms.items():
                key = (u * v).reduced()
                terms[key] = terms.get(key, 0) + a * b
        return WordCombination(terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WordCombination):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def augmentation(self) -> int:
        return sum(self._terms.values())

    def is_zero(self) -> bool:
        return not self._terms

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*({w})" for w, c in sorted(self._terms.items(), key=lambda t: t[0].letters))


#####################################
# Fox derivatives
#####################################


def fox_derivative(w: FreeWord | WordCombination, j: int) -> WordCombination:
    """Fox derivative ``d/dx_j``, extended linearly to combinations."""
    if j < 1:
        raise TorsionKitError(f"generator index {j} must be at least 1")
    if isinstance(w, WordCombination):
        total = WordCombination()
        for word, c in w.items():
            total = total + fox_derivative(word, j) * c
        return total
    terms: dict[FreeWord, int] = {}
    letters = w.letters
    for k, x in enumerate(letters):
        if x == j:
            prefix = FreeWord(letters[:k])
            terms[prefix] = terms.get(prefix, 0) + 1
        elif x == -j:
            prefix = FreeWord(letters[: k + 1])
            terms[prefix] = terms.get(prefix, 0) - 1
    return WordCombination(terms)


def higher_fox_derivative(w: FreeWord | WordCombination, indices: Sequence[int]) -> WordCombination:
    """Iterated Fox derivative, applying ``indices[0]`` first."""
    result = w if isinstance(w, WordCombination) else WordCombination.of(w)
    for j in indices:
        result = fox_derivative(result, j)
    return result


def augmented_fox_derivative(w: FreeWord, indices: Sequence[int]) -> int:
    """Augmentation of ``higher_fox_derivative(w, indices)``."""
    return higher_fox_derivative(w, indices).augmentation()


def magnus_expansion(w: FreeWord, degree: int) -> dict[tuple[int, ...], int]:
    """Magnus expansion ``x_j -> 1 + X_j`` truncated above ``degree``.

    Keys are tuples of generator indices read left to right as a
    noncommutative monomial. The augmented derivative
    ``augmented_fox_derivative(w, (i1, ..., ik))`` equals the coefficient
    of ``X_ik ... X_i1``.
    """
    series: dict[tuple[int, ...], int] = {(): 1}
    for x in w.letters:
        j = abs(x)
        if x > 0:
            factor = {(): 1, (j,): 1}
        else:
            factor = {(j,) * k: (-1) ** k for k in range(degree + 1)}
        product: dict[tuple[int, ...], int] = {}
        for key, c in series.items():
            for fkey, fc in factor.items():
                if len(key) + len(fkey) > degree:
                    continue
                combined = key + fkey
                product[combined] = product.get(combined, 0) + c * fc
        series = {k: c for k, c in product.items() if c}
    return series


#####################################
# Abelianization
#####################################


def abelianize(
    c: FreeWord | WordCombination,
    group: AbelianGroup,
    assignment: Sequence[GroupElement],
    modulus: int | None = None,
) -> GroupRingElement:
    """Image in ``R[H]`` under ``x_q -> assignment[q - 1]``."""
    combo = c if isinstance(c, WordCombination) else WordCombination.of(c)
    terms: dict[GroupElement, int] = {}
    for word, coefficient in combo.items():
        if word.max_index > len(assignment):
            raise TorsionKitError(
                f"word {word} uses a generator beyond the {len(assignment)} assigned ones"
            )
        h = group.identity()
        for x in word.letters:
            h = h + assignment[x - 1] if x > 0 else h - assignment[-x - 1]
        terms[h] = terms.get(h, 0) + coefficient
    return GroupRingElement(group, terms, modulus)


#####################################
# Presentations
#####################################


@dataclass(frozen=True)
class Presentation:
    """Group presentation ``<x_1..x_m | r_1..r_k>``, optionally with a declared rank."""

    num_generators: int
    relators: tuple[FreeWord, ...]
    rank: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(self.relators))
        if self.num_generators < 1:
            raise PresentationError("a presentation needs at least one generator")
        for i, r in enumerate(self.relators, start=1):
            if r.max_index > self.num_generators:
                raise PresentationError(
                    f"relator {i} uses x{r.max_index} but there are {self.num_generators} generators"
                )

    def relator_matrix(self) -> list[list[int]]:
        """Exponent sums: row i is the abelianization of relator i."""
        return [r.exponent_vector(self.num_generators) for r in self.relators]

    def abelianization(self) -> tuple[AbelianGroup, list[GroupElement]]:
        return AbelianGroup.from_relations(self.relator_matrix(), self.num_generators)


def alexander_matrix(
    presentation: Presentation,
    group: AbelianGroup,
    assignment: Sequence[GroupElement],
    modulus: int | None = None,
) -> list[list[GroupRingElement]]:
    """Matrix of ``eta(d r_i / d x_j)`` over ``R[H]``."""
    return [
        [
            abelianize(fox_derivative(r, j), group, assignment, modulus)
            for j in range(1, presentation.num_generators + 1)
        ]
        for r in presentation.relators
    ]


#####################################
# Commutator expansions
#####################################


@dataclass(frozen=True)
class CommutatorExpansion:
    """Relator written as ``prod [alpha, beta] * prod gamma^exponent``."""

    pairs: tuple[tuple[FreeWord, FreeWord], ...] = ()
    power_words: tuple[FreeWord, ...] = ()
    exponent: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((a, b) for a, b in self.pairs))
        object.__setattr__(self, "power_words", tuple(self.power_words))
        if self.power_words and self.exponent < 2:
            raise ExpansionError(f"power blocks need an exponent of at least 2, got {self.exponent}")

    def expand(self) -> FreeWord:
        word = FreeWord()
        for a, b in self.pairs:
            word = word * commutator(a, b)
        for g in self.power_words:
            word = word * g**self.exponent
        return word.reduced()

    def verify(self, relator: FreeWord, line: int | None = None) -> None:
        if not self.expand().equals(relator):
            raise ExpansionError(f"expansion does not multiply out to relator {relator}", line)

    def __str__(self) -> str:
        pairs = "; ".join(f"({a}, {b})" for a, b in self.pairs)
        powers = "; ".join(str(g) for g in self.power_words)
        return f"pairs=[{pairs}] powers=[{powers}] exponent={self.exponent}"


def commutator_expansion(w: FreeWord, exponent: int | None = None) -> CommutatorExpansion:
    """Write ``w`` as a product of commutators, times one r-th power when ``exponent`` is given.

    Adjacent letters out of generator order are swapped with
    ``A a b B = (A b a B) [B^-1 a^-1 B, B^-1 b^-1 B]`` until the word
    cancels. The result is correct but not minimal.
    """
    m = max(w.max_index, 1)
    exponents = w.exponent_vector(m)
    power_words: tuple[FreeWord, ...] = ()
    residual = w
    if exponent:
        if any(e % exponent for e in exponents):
            raise ExpansionError(f"{w} does not abelianize into {exponent} * Z^{m}")
        counts = [e // exponent for e in exponents]
        if any(counts):
            gamma = FreeWord(tuple(letter for j, c in enumerate(counts, start=1) for letter in [j if c > 0 else -j] * abs(c)))
            power_words = (gamma,)
            residual = w * (gamma**exponent).inverse()
    elif any(exponents):
        raise ExpansionError(f"{w} is not in the commutator subgroup")

    letters = list(_free_reduce(residual.letters))
    found: list[tuple[FreeWord, FreeWord]] = []
    while True:
        letters = list(_free_reduce(letters))
        position = next((t for t in range(len(letters) - 1) if abs(letters[t]) > abs(letters[t + 1])), None)
        if position is None:
            break
        a, b = letters[position], letters[position + 1]
        tail = FreeWord(tuple(letters[position + 2 :]))
        tail_inverse = tail.inverse()
        alpha = (tail_inverse * FreeWord((-a,)) * tail).reduced()
        beta = (tail_inverse * FreeWord((-b,)) * tail).reduced()
        found.append((alpha, beta))
        letters[position], letters[position + 1] = b, a
    if letters:
        raise ExpansionError(f"{residual} did not cancel to the identity")
    expansion = CommutatorExpansion(tuple(reversed(found)), power_words, exponent or 0)
    expansion.verify(w)
    return expansion


#####################################
# Nielsen normalization
#####################################


@dataclass
class Substitution:
    """Generator change produced by ``nielsen_normalize``.

    ``new_in_old[j]`` writes new generator ``j + 1`` in the old generators
    and ``old_in_new[i]`` writes old generator ``i + 1`` in the new ones.
    """

    new_in_old: list[FreeWord]
    old_in_new: list[FreeWord]
    row_moves: list[Move] = field(default_factory=list)
    col_moves: list[Move] = field(default_factory=list)

    def rewrite(self, word: FreeWord) -> FreeWord:
        """Express a word in the old generators through the new ones."""
        return word.substitute({i + 1: w for i, w in enumerate(self.old_in_new)})

    def to_json(self) -> dict:
        return {
            "new_in_old": [str(w) for w in self.new_in_old],
            "old_in_new": [str(w) for w in self.old_in_new],
        }


def _apply_column_move(
    move: Move,
    relators: list[FreeWord],
    substitution: Substitution,
) -> None:
    kind = move[0]
    if kind == "add":
        _, target, source, c = move
        images = {source + 1: FreeWord((source + 1,)) * FreeWord((target + 1,)) ** c}
        old = substitution.new_in_old
        old[source] = (old[source] * old[target] ** (-c)).reduced()
    elif kind == "swap":
        _, a, b = move
        images = {a + 1: FreeWord((b + 1,)), b + 1: FreeWord((a + 1,))}
        old = substitution.new_in_old
        old[a], old[b] = old[b], old[a]
    else:
        _, a = move
        images = {a + 1: FreeWord((-(a + 1),))}
        substitution.new_in_old[a] = substitution.new_in_old[a].inverse()
    relators[:] = [r.substitute(images) for r in relators]
    substitution.old_in_new[:] = [w.substitute(images) for w in substitution.old_in_new]


def _apply_relator_move(move: Move, relators: list[FreeWord]) -> None:
    kind = move[0]
    if kind == "add":
        _, target, source, c = move
        relators[target] = (relators[target] * relators[source] ** c).reduced()
    elif kind == "swap":
        _, a, b = move
        relators[a], relators[b] = relators[b], relators[a]
    else:
        _, a = move
        relators[a] = relators[a].inverse()


def nielsen_normalize(presentation: Presentation) -> tuple[Presentation, Substitution]:
    """Bring a deficiency-one presentation into block form.

    The first ``n - 1`` relators of the result lie in ``[F, F]``, the
    first ``n`` generators have zero exponent sum in every relator, and
    the remaining square block of the relator matrix is diagonal.
    """
    m = presentation.num_generators
    if len(presentation.relators) != m - 1:
        raise RankError(f"expected {m - 1} relators for {m} generators, got {len(presentation.relators)}")
    form = smith_form_with_moves(presentation.relator_matrix(), m)
    rho = form.rank
    n = m - rho
    if presentation.rank is not None and presentation.rank != n:
        raise RankError(f"declared rank {presentation.rank} but the relator matrix gives {n}")
    if n < 1:
        raise RankError("relator matrix has full column rank; H_1 is finite")

    relators = list(presentation.relators)
    substitution = Substitution(
        new_in_old=[FreeWord((i,)) for i in range(1, m + 1)],
        old_in_new=[FreeWord((i,)) for i in range(1, m + 1)],
        row_moves=list(form.row_moves),
        col_moves=list(form.col_moves),
    )
    for move in form.col_moves:
        _apply_column_move(move, relators, substitution)
    for move in form.row_moves:
        _apply_relator_move(move, relators)

    row_order = list(range(rho, m - 1)) + list(range(rho))
    col_order = list(range(rho, m)) + list(range(rho))
    relators = [relators[i] for i in row_order]
    rename = {old + 1: FreeWord((new + 1,)) for new, old in enumerate(col_order)}
    relators = [r.substitute(rename) for r in relators]
    substitution.old_in_new = [w.substitute(rename) for w in substitution.old_in_new]
    substitution.new_in_old = [substitution.new_in_old[old] for old in col_order]

    normalized = Presentation(m, tuple(relators), n)
    logger.info(f"Normalized presentation: rank {n}, torsion block {form.diagonal[:rho]}")
    return normalized, substitution
