"""Finite monoids and morphisms from free monoids.

Elements are dense integer ids ``0..n-1``; the identity need not be 0.
Words are strings of single-character letters, or tuples of letter symbols
(the tuple form is what marked words use).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm

from .errors import BadIdentity, NotAssociative, NotInImage, UnknownLetter


@dataclass(frozen=True)
class FiniteMonoid:
    """A finite monoid given by its full multiplication table.

    ``table[x][y]`` is the product x.y.  Construct through ``validate`` unless
    the table is known to satisfy the monoid laws.
    """

    table: tuple[tuple[int, ...], ...]
    identity: int
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.names:
            object.__setattr__(self, "names", tuple(str(i) for i in range(self.size)))

    @property
    def size(self) -> int:
        return len(self.table)

    @staticmethod
    def validate(table, identity, names=()) -> "FiniteMonoid":
        """Check the monoid laws exhaustively and return the monoid.

        Raises ``BadIdentity`` or ``NotAssociative`` on the first violated law.
        """
        n = len(table)
        rows = []
        for row in table:
            if len(row) != n:
                raise ValueError("multiplication table must be square")
            for v in row:
                if not (0 <= v < n):
                    raise ValueError(f"table entry {v} out of range 0..{n - 1}")
            rows.append(tuple(int(v) for v in row))
        t = tuple(rows)
        if not (0 <= identity < n):
            raise ValueError(f"identity {identity} out of range")
        for x in range(n):
            if t[identity][x] != x or t[x][identity] != x:
                raise BadIdentity(x)
        for x in range(n):
            for y in range(n):
                xy = t[x][y]
                for z in range(n):
                    if t[xy][z] != t[x][t[y][z]]:
                        raise NotAssociative(x, y, z)
        return FiniteMonoid(t, identity, tuple(names))

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def product(self, elements) -> int:
        acc = self.identity
        row = self.table
        for e in elements:
            acc = row[acc][e]
        return acc

    def power(self, x: int, t: int) -> int:
        acc = self.identity
        for _ in range(t):
            acc = self.table[acc][x]
        return acc

    def is_idempotent(self, x: int) -> bool:
        return self.table[x][x] == x

    def idempotents(self) -> tuple[int, ...]:
        return tuple(x for x in range(self.size) if self.is_idempotent(x))

    def idempotence_index(self) -> int:
        """Smallest i > 0 such that x**i is idempotent for every element x."""
        # For each x the working exponents are eventually the multiples of the
        # cycle length past the tail, so the search below terminates well
        # before size * lcm(1..size).
        bound = self.size * max(1, lcm(*range(1, self.size + 1)))
        powers = [self.identity] * self.size
        for i in range(1, bound + 1):
            ok = True
            for x in range(self.size):
                powers[x] = self.table[powers[x]][x]
                if not self.is_idempotent(powers[x]):
                    ok = False
            if ok:
                return i
        raise AssertionError("no idempotence index found; table is not a monoid")

    def name_of(self, x: int) -> str:
        return self.names[x]

    def element_by_name(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no monoid element named {name!r}") from None


def monoid_validate(table, identity, names=()) -> FiniteMonoid:
    return FiniteMonoid.validate(table, identity, names)


TRIVIAL_MONOID = FiniteMonoid(((0,),), 0, ("1",))


def mark(letter: str) -> str:
    """Marked copy of a letter; marking is idempotent."""
    return letter if letter.startswith("^") else "^" + letter


def is_marked(letter: str) -> bool:
    return letter.startswith("^")


def mark_word(word, i: int) -> tuple[str, ...]:
    """The word with position i (1-based) carrying the mark."""
    symbols = list(word)
    symbols[i - 1] = mark(symbols[i - 1])
    return tuple(symbols)


@dataclass(frozen=True)
class Morphism:
    """A morphism from the free monoid over ``alphabet`` into ``monoid``.

    ``preimages`` caches, per reachable element, the canonical witness word:
    the shortest one, ties broken lexicographically in alphabet order.
    """

    alphabet: tuple[str, ...]
    monoid: FiniteMonoid
    letter_image: dict[str, int]
    preimages: dict[int, tuple[str, ...]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for a in self.alphabet:
            if a not in self.letter_image:
                raise UnknownLetter(a)
        if not self.preimages:
            self.preimages.update(self._bfs_preimages())

    def _bfs_preimages(self):
        found = {self.monoid.identity: ()}
        frontier = [self.monoid.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for a in self.alphabet:
                    y = self.monoid.mul(x, self.letter_image[a])
                    if y not in found:
                        found[y] = found[x] + (a,)
                        nxt.append(y)
            frontier = nxt
        return found

    def eval(self, word) -> int:
        acc = self.monoid.identity
        row = self.monoid.table
        img = self.letter_image
        for a in word:
            if a not in img:
                raise UnknownLetter(a)
            acc = row[acc][img[a]]
        return acc

    def prefix_images(self, word) -> list[int]:
        """Images of w[1:0], w[1:1], ..., w[1:n]  (n+1 values)."""
        out = [self.monoid.identity]
        acc = self.monoid.identity
        row = self.monoid.table
        img = self.letter_image
        for a in word:
            if a not in img:
                raise UnknownLetter(a)
            acc = row[acc][img[a]]
            out.append(acc)
        return out

    def suffix_images(self, word) -> list[int]:
        """Images of w[i+1:n] for i = 0..n  (n+1 values, last is identity)."""
        n = len(word)
        out = [self.monoid.identity] * (n + 1)
        acc = self.monoid.identity
        row = self.monoid.table
        img = self.letter_image
        for i in range(n - 1, -1, -1):
            a = word[i]
            if a not in img:
                raise UnknownLetter(a)
            acc = row[img[a]][acc]
            out[i] = acc
        return out

    @property
    def image_elements(self) -> frozenset[int]:
        return frozenset(self.preimages)

    @property
    def is_surjective(self) -> bool:
        return len(self.preimages) == self.monoid.size

    def preimage_word(self, x: int) -> tuple[str, ...]:
        try:
            return self.preimages[x]
        except KeyError:
            raise NotInImage(x) from None

    def restrict_to_image(self):
        """Replace the monoid by the submonoid generated by the letter images.

        Returns ``(morphism, translation)`` where ``translation`` maps old
        element ids to new ones (identity mapping when already surjective).
        """
        if self.is_surjective:
            return self, {x: x for x in range(self.monoid.size)}
        old = sorted(self.preimages)
        translation = {x: i for i, x in enumerate(old)}
        table = tuple(
            tuple(translation[self.monoid.mul(x, y)] for y in old) for x in old
        )
        sub = FiniteMonoid(
            table,
            translation[self.monoid.identity],
            tuple(self.monoid.names[x] for x in old),
        )
        images = {a: translation[m] for a, m in self.letter_image.items()}
        pre = {translation[x]: w for x, w in self.preimages.items()}
        return Morphism(self.alphabet, sub, images, pre), translation

    def extend_marked(self) -> "Morphism":
        """Extension to the marked alphabet, mapping each ^a like a."""
        if all(is_marked(a) or mark(a) in self.letter_image for a in self.alphabet):
            return self
        letters = self.alphabet + tuple(mark(a) for a in self.alphabet)
        images = dict(self.letter_image)
        for a in self.alphabet:
            images[mark(a)] = images[a]
        return Morphism(letters, self.monoid, images)


def morphism_eval(morphism: Morphism, word) -> int:
    return morphism.eval(word)


def idempotence_index(monoid: FiniteMonoid) -> int:
    return monoid.idempotence_index()


def preimage_word(morphism: Morphism, x: int) -> tuple[str, ...]:
    return morphism.preimage_word(x)


def product_monoid(m1: FiniteMonoid, m2: FiniteMonoid):
    """Direct product with pairs ordered (x1 * size2 + x2)."""
    n1, n2 = m1.size, m2.size
    table = tuple(
        tuple(
            m1.table[x1][y1] * n2 + m2.table[x2][y2]
            for y1 in range(n1)
            for y2 in range(n2)
        )
        for x1 in range(n1)
        for x2 in range(n2)
    )
    names = tuple(
        f"({m1.names[x1]},{m2.names[x2]})" for x1 in range(n1) for x2 in range(n2)
    )
    return FiniteMonoid(table, m1.identity * n2 + m2.identity, names)


def product_morphism(mu1: Morphism, mu2: Morphism) -> Morphism:
    """Pairing morphism into the direct product (same alphabet required)."""
    if mu1.alphabet != mu2.alphabet:
        raise ValueError("morphisms must share an alphabet to be paired")
    prod = product_monoid(mu1.monoid, mu2.monoid)
    n2 = mu2.monoid.size
    images = {
        a: mu1.letter_image[a] * n2 + mu2.letter_image[a] for a in mu1.alphabet
    }
    return Morphism(mu1.alphabet, prod, images)


# ({empty, nonempty}, or): flags whether a factor is nonempty.
NONEMPTY_FLAG_MONOID = FiniteMonoid(((0, 1), (1, 1)), 0, ("eps", "ne"))


def nonempty_flag_morphism(alphabet) -> Morphism:
    return Morphism(tuple(alphabet), NONEMPTY_FLAG_MONOID, {a: 1 for a in alphabet})
