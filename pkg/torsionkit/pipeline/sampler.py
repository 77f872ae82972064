"""
Random nice presentations and random forms for self-tests.

Every sampler draws from a ``random.Random`` so runs are reproducible from
a seed. Presentations are built from their commutator expansions, so the
expansion data is always present and exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .._linalg import identity_rows, integer_determinant, is_unit
from ..abelian import prime_power
from ..detform import AlternatingForm, ChangeOfBasis, MasseyForm
from ..fox import CommutatorExpansion, FreeWord, Presentation, commutator
from ..utils.utils_logger import logger
from .presentation import NicePresentation


@dataclass
class PresentationSampler:
    rng: random.Random
    max_letters: int = 2
    max_genus: int = 2

    @classmethod
    def seeded(cls, seed: int, **kwargs) -> PresentationSampler:
        return cls(random.Random(seed), **kwargs)

    #####################################
    # Words
    #####################################

    def word(self, generators: Sequence[int], length: int | None = None) -> FreeWord:
        """Random word in the given generators, not necessarily reduced."""
        length = length if length is not None else self.rng.randint(1, self.max_letters)
        letters = [self.rng.choice(generators) * self.rng.choice((1, -1)) for _ in range(length)]
        return FreeWord(tuple(letters))

    def commutator_pairs(self, generators: Sequence[int], genus: int | None = None) -> tuple[tuple[FreeWord, FreeWord], ...]:
        genus = genus if genus is not None else self.rng.randint(1, self.max_genus)
        return tuple((self.word(generators), self.word(generators)) for _ in range(genus))

    def triple_commutator_pairs(self, generators: Sequence[int], count: int = 1) -> tuple[tuple[FreeWord, FreeWord], ...]:
        """Pairs ``([a, b], c)`` whose commutators lie in the third lower central term."""
        return tuple(
            (commutator(self.word(generators, 1), self.word(generators, 1)), self.word(generators, 1))
            for _ in range(count)
        )

    def _cancelling_power_words(self, generators: Sequence[int]) -> tuple[FreeWord, ...]:
        """Two power words with opposite exponent sums that are not inverse to each other."""
        first = self.word(generators, 2)
        letters = [-x for x in first.letters]
        self.rng.shuffle(letters)
        second = FreeWord(tuple(letters))
        return (first, second)

    #####################################
    # Presentations
    #####################################

    def _torsion_relators(
        self, n: int, orders: Sequence[int], generators: Sequence[int], exponent: int | None = None
    ) -> list[tuple[FreeWord, CommutatorExpansion | None]]:
        """Rows ``x_k^d`` times a random commutator; r-th powers keep their expansion."""
        relators: list[tuple[FreeWord, CommutatorExpansion | None]] = []
        for k, order in enumerate(orders):
            if order < 1:
                raise ValueError(f"torsion orders must be positive, got {order}")
            x = FreeWord.generator(n + k + 1)
            pairs = self.commutator_pairs(generators, self.rng.randint(0, 1))
            if exponent and order % exponent == 0:
                expansion = CommutatorExpansion(pairs, (x ** (order // exponent),), exponent)
                relators.append((expansion.expand(), expansion))
            else:
                word = CommutatorExpansion(pairs).expand() * x**order
                relators.append((word.reduced(), None))
        return relators

    def integral(self, n: int, orders: Sequence[int] = (), name: str = "sample") -> NicePresentation:
        """Nice presentation with ``H = Z^n + T`` where ``T`` has the given diagonal orders."""
        m = n + len(orders)
        generators = list(range(1, m + 1))
        words: list[FreeWord] = []
        expansions: list[CommutatorExpansion | None] = []
        for _ in range(n - 1):
            expansion = CommutatorExpansion(self.commutator_pairs(generators))
            words.append(expansion.expand())
            expansions.append(expansion)
        for word, expansion in self._torsion_relators(n, orders, generators):
            words.append(word)
            expansions.append(expansion)
        return NicePresentation(Presentation(m, tuple(words), n), n, tuple(expansions), name=name)

    def massey(self, n: int, orders: Sequence[int] = (), name: str = "massey-sample") -> NicePresentation:
        """Nice presentation whose first relators are products of triple commutators."""
        m = n + len(orders)
        generators = list(range(1, m + 1))
        words: list[FreeWord] = []
        expansions: list[CommutatorExpansion | None] = []
        for _ in range(n - 1):
            expansion = CommutatorExpansion(self.triple_commutator_pairs(generators, self.rng.randint(1, 2)))
            words.append(expansion.expand())
            expansions.append(expansion)
        for word, expansion in self._torsion_relators(n, orders, generators):
            words.append(word)
            expansions.append(expansion)
        return NicePresentation(Presentation(m, tuple(words), n), n, tuple(expansions), name=name)

    def mod_r(
        self,
        n: int,
        r: int,
        p_count: int = 0,
        coprime_orders: Sequence[int] = (),
        name: str = "modr-sample",
    ) -> NicePresentation:
        """Nice presentation with ``H/r`` free of rank ``n + p_count``.

        The p-part generators have order exactly r; the remaining torsion
        generators have orders prime to p.
        """
        p, _ = prime_power(r)
        if any(d % p == 0 for d in coprime_orders):
            raise ValueError(f"orders {list(coprime_orders)} must be prime to {p}")
        b = n + p_count
        m = b + len(coprime_orders)
        generators = list(range(1, m + 1))
        words: list[FreeWord] = []
        expansions: list[CommutatorExpansion | None] = []
        for _ in range(n - 1):
            powers = self._cancelling_power_words(generators) if self.rng.random() < 0.5 else ()
            expansion = CommutatorExpansion(self.commutator_pairs(generators), powers, r if powers else 0)
            words.append(expansion.expand())
            expansions.append(expansion)
        orders = [r] * p_count + list(coprime_orders)
        for word, expansion in self._torsion_relators(n, orders, generators, exponent=r):
            words.append(word)
            expansions.append(expansion)
        pres = NicePresentation(Presentation(m, tuple(words), n), n, tuple(expansions), name=name)
        logger.debug(f"Sampled mod-{r} presentation with H = {pres.group}")
        return pres

    #####################################
    # Forms and base changes
    #####################################

    def alternating_form(self, n: int, modulus: int | None = None, bound: int = 3) -> AlternatingForm:
        entries = {}
        for i, j, k in product(range(n - 1), range(n), range(n)):
            if j < k:
                entries[(i, j, k)] = self.rng.randint(-bound, bound)
        return AlternatingForm.from_entries(n, entries, modulus)

    def massey_form(self, n: int, order: int, bound: int = 2) -> MasseyForm:
        """Random Massey form; antisymmetrizing the first two K slots kills ``f0``."""
        values: dict[tuple[int, int, tuple[int, ...]], int] = {}
        for i in range(n - 1):
            for j, multi in product(range(n), product(range(n), repeat=order)):
                c = self.rng.randint(-bound, bound)
                if not c:
                    continue
                partner = (i, multi[0], (j,) + multi[1:])
                values[(i, j, multi)] = values.get((i, j, multi), 0) + c
                values[partner] = values.get(partner, 0) - c
        return MasseyForm.from_mapping(n, order, values)

    def change_of_basis(self, size: int, modulus: int | None = None, steps: int = 6) -> ChangeOfBasis:
        """Random invertible matrix built from elementary row operations."""
        rows = identity_rows(size)
        for _ in range(steps):
            if size == 1:
                break
            a, b = self.rng.sample(range(size), 2)
            c = self.rng.choice((-2, -1, 1, 2))
            rows[a] = [x + c * y for x, y in zip(rows[a], rows[b])]
        if self.rng.random() < 0.5:
            rows[0] = [-x for x in rows[0]]
        if modulus is not None:
            unit = self.rng.choice([u for u in range(1, modulus) if is_unit(u, modulus)])
            rows[-1] = [(unit * x) % modulus for x in rows[-1]]
            rows = [[x % modulus for x in row] for row in rows]
        assert is_unit(integer_determinant(rows), modulus)
        return ChangeOfBasis(tuple(tuple(row) for row in rows), modulus)
