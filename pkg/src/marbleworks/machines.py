"""Bimachines and nested (marble / blind / pebble) bimachines.

A bimachine reads its input once; at each position it combines the letter
with the morphism images of the strict prefix and strict suffix.  Nested
machines replace the per-position number by a call to a lower-level machine:
marble machines pass the prefix ending at the call position, blind machines
pass the whole word, pebble machines pass the word with the call position
marked.  All levels of one machine share a single morphism; for the pebble
kind that morphism is extended to marked letters (a marked letter has the
same image as its plain copy).
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Morphism, is_marked, mark_word
from .errors import UnknownLetter

KINDS = ("marble", "blind", "pebble")


def table_from_fn(morphism: Morphism, fn):
    """Dense (element, letter, element) -> fn(m, a, m2) table."""
    n = morphism.monoid.size
    return tuple(
        tuple(
            tuple(int(fn(m, a, m2)) for m2 in range(n)) for a in morphism.alphabet
        )
        for m in range(n)
    )


@dataclass(frozen=True)
class Bimachine:
    """One-pass machine: word w maps to the sum over positions i of
    table[mu(w[1:i-1])][w[i]][mu(w[i+1:])]."""

    morphism: Morphism
    table: tuple

    def __post_init__(self):
        n = self.morphism.monoid.size
        na = len(self.morphism.alphabet)
        if len(self.table) != n or any(
            len(row) != na or any(len(cell) != n for cell in row)
            for row in self.table
        ):
            raise ValueError("output table must cover M x A x M")

    def letter_index(self, a: str) -> int:
        try:
            return self.morphism.alphabet.index(a)
        except ValueError:
            raise UnknownLetter(a) from None

    def value(self, m: int, a: str, m2: int) -> int:
        return self.table[m][self.letter_index(a)][m2]

    def eval(self, word) -> int:
        pre = self.morphism.prefix_images(word)
        suf = self.morphism.suffix_images(word)
        letters = self.morphism.alphabet
        total = 0
        for i, a in enumerate(word):
            total += self.table[pre[i]][letters.index(a)][suf[i + 1]]
        return total


@dataclass(frozen=True)
class NestedMachine:
    """A k-level marble, blind, or pebble bimachine.

    level 1 wraps a plain ``Bimachine`` (kinds coincide there).  At higher
    levels ``selector`` picks, per (prefix image, letter, suffix image), the
    index of the external machine to call; ``externals`` hold the level-(k-1)
    machines.
    """

    kind: str
    level: int
    morphism: Morphism
    base: Bimachine | None = None
    selector: tuple | None = None
    externals: tuple["NestedMachine", ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown machine kind {self.kind!r}")
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if self.level == 1:
            if self.base is None or self.base.morphism != self.morphism:
                raise ValueError("level-1 machine needs a base bimachine over the shared morphism")
        else:
            if self.selector is None or not self.externals:
                raise ValueError("nested machine needs a selector and externals")
            n = self.morphism.monoid.size
            na = len(self.morphism.alphabet)
            if len(self.selector) != n or any(
                len(row) != na or any(len(cell) != n for cell in row)
                for row in self.selector
            ):
                raise ValueError("selector must cover M x A x M")
            for row in self.selector:
                for cell in row:
                    for h in cell:
                        if not (0 <= h < len(self.externals)):
                            raise ValueError(f"external index {h} out of range")
            for ext in self.externals:
                if ext.level != self.level - 1:
                    raise ValueError("externals must sit one level below")
                if ext.kind != self.kind:
                    raise ValueError("externals must have the machine's kind")
                if ext.morphism.monoid.table != self.morphism.monoid.table or any(
                    ext.morphism.letter_image[a] != self.morphism.letter_image[a]
                    for a in self.morphism.alphabet
                ):
                    raise ValueError("all levels must share one morphism")

    @property
    def alphabet(self):
        return self.morphism.alphabet

    def select(self, m: int, a: str, m2: int) -> int:
        try:
            ai = self.morphism.alphabet.index(a)
        except ValueError:
            raise UnknownLetter(a) from None
        return self.selector[m][ai][m2]


def level1(kind: str, bimachine: Bimachine) -> NestedMachine:
    return NestedMachine(kind, 1, bimachine.morphism, base=bimachine)


def nested(kind: str, morphism: Morphism, selector, externals) -> NestedMachine:
    externals = tuple(externals)
    return NestedMachine(
        kind, externals[0].level + 1, morphism, selector=selector, externals=externals
    )


def eval_machine(machine: NestedMachine, word) -> int:
    """Exact output of the machine on the word (0 on the empty word)."""
    if machine.kind == "pebble" and machine.level >= 2:
        for a in word:
            if is_marked(a):
                raise UnknownLetter(a)
    return _eval(machine, tuple(word) if not isinstance(word, str) else word)


def _eval(machine: NestedMachine, word) -> int:
    if machine.level == 1:
        return machine.base.eval(word)
    mu = machine.morphism
    pre = mu.prefix_images(word)
    suf = mu.suffix_images(word)
    letters = mu.alphabet
    sel = machine.selector
    total = 0
    blind_cache: dict[int, int] = {}
    for i in range(1, len(word) + 1):
        h = sel[pre[i - 1]][letters.index(word[i - 1])][suf[i]]
        if machine.kind == "marble":
            total += _eval(machine.externals[h], word[:i])
        elif machine.kind == "blind":
            if h not in blind_cache:
                blind_cache[h] = _eval(machine.externals[h], word)
            total += blind_cache[h]
        else:
            total += _eval(machine.externals[h], mark_word(word, i))
    return total


def zero_machine(morphism: Morphism, level: int, kind: str) -> NestedMachine:
    if level == 1:
        return level1(kind, Bimachine(morphism, table_from_fn(morphism, lambda *_: 0)))
    inner = zero_machine(morphism, level - 1, kind)
    return nested(kind, morphism, table_from_fn(morphism, lambda *_: 0), (inner,))


def scale_machine(machine: NestedMachine, factor: int) -> NestedMachine:
    """Machine computing factor * f, by scaling the bottom-level outputs."""
    if machine.level == 1:
        table = tuple(
            tuple(tuple(v * factor for v in cell) for cell in row)
            for row in machine.base.table
        )
        return level1(machine.kind, Bimachine(machine.morphism, table))
    return nested(
        machine.kind,
        machine.morphism,
        machine.selector,
        tuple(scale_machine(e, factor) for e in machine.externals),
    )


def lift_machine(machine: NestedMachine, morphism: Morphism, proj) -> NestedMachine:
    """Reindex a machine over a refined morphism.

    ``proj[x]`` maps each element of the new monoid to the old one, and must
    satisfy mu_old = proj . mu_new on letters.
    """
    old = machine.morphism
    if morphism.alphabet != old.alphabet:
        raise ValueError("refined morphism must keep the alphabet")
    if machine.level == 1:
        tbl = table_from_fn(
            morphism, lambda m, a, m2: machine.base.value(proj[m], a, proj[m2])
        )
        return level1(machine.kind, Bimachine(morphism, tbl))
    sel = table_from_fn(
        morphism, lambda m, a, m2: machine.select(proj[m], a, proj[m2])
    )
    return nested(
        machine.kind,
        morphism,
        sel,
        tuple(lift_machine(e, morphism, proj) for e in machine.externals),
    )


def blind_sum(left: NestedMachine, right: NestedMachine) -> NestedMachine:
    """Blind machine computing f + g; both sides must share a morphism and level."""
    if left.morphism != right.morphism or left.level != right.level:
        raise ValueError("blind_sum needs machines over one morphism at one level")
    mu = left.morphism
    if left.level == 1:
        tbl = table_from_fn(
            mu, lambda m, a, m2: left.base.value(m, a, m2) + right.base.value(m, a, m2)
        )
        return level1("blind", Bimachine(mu, tbl))
    pairs: list[tuple[int, int]] = []
    index: dict[tuple[int, int], int] = {}

    def pick(m, a, m2):
        key = (left.select(m, a, m2), right.select(m, a, m2))
        if key not in index:
            index[key] = len(pairs)
            pairs.append(key)
        return index[key]

    sel = table_from_fn(mu, pick)
    exts = tuple(blind_sum(left.externals[i], right.externals[j]) for i, j in pairs)
    return nested("blind", mu, sel, exts)


def blind_hadamard(left: NestedMachine, right: NestedMachine) -> NestedMachine:
    """Blind machine computing the pointwise product f * g (shared morphism)."""
    if left.morphism != right.morphism:
        raise ValueError("blind_hadamard needs machines over one morphism")
    mu = left.morphism
    if left.level == 1:
        values: list[int] = []
        index: dict[int, int] = {}

        def pick(m, a, m2):
            v = left.base.value(m, a, m2)
            if v not in index:
                index[v] = len(values)
                values.append(v)
            return index[v]

        sel = table_from_fn(mu, pick)
        exts = tuple(scale_machine(right, v) for v in values)
        return nested("blind", mu, sel, exts)
    return nested(
        "blind",
        mu,
        left.selector,
        tuple(blind_hadamard(e, right) for e in left.externals),
    )


def marble_from_blind(machine: NestedMachine) -> NestedMachine:
    """Marble machine computing the same function as a blind machine (level <= 2).

    The marble machine sums over ordered position pairs i1 <= i2; the external
    chosen at i2 replays, on the prefix, both the blind call made at i2
    (inner position i1) and the blind call made at i1 (inner position i2).
    The suffix image and emptiness of the factor between i1 and the prefix
    end are the only extra facts it needs, so the shared morphism is refined
    with a nonempty-flag component.
    """
    if machine.kind != "blind":
        raise ValueError("input must be a blind machine")
    if machine.level == 1:
        return level1("marble", machine.base)
    if machine.level != 2:
        raise NotImplementedError("conversion implemented for levels 1 and 2")

    from .algebra import nonempty_flag_morphism, product_morphism

    mu = machine.morphism
    flagged = product_morphism(mu, nonempty_flag_morphism(mu.alphabet))
    n_flag = 2
    proj = [x // n_flag for x in range(flagged.monoid.size)]
    empty_flag = [x % n_flag == 0 for x in range(flagged.monoid.size)]
    mul = mu.monoid.mul

    externals: list[NestedMachine] = []
    index: dict[tuple[int, int, int], int] = {}

    def external_for(m_pre2: int, a2_idx: int, m_suf2: int) -> int:
        key = (m_pre2, a2_idx, m_suf2)
        if key in index:
            return index[key]
        a2 = mu.alphabet[a2_idx]
        h2 = machine.selector[m_pre2][a2_idx][m_suf2]
        g2 = machine.externals[h2].base

        def lam(mp, a1, mm):
            m_pre1, m_mid = proj[mp], proj[mm]
            total = g2.value(m_pre1, a1, mul(m_mid, m_suf2))
            if not empty_flag[mm]:
                h1 = machine.selector[m_pre1][mu.alphabet.index(a1)][mul(m_mid, m_suf2)]
                total += machine.externals[h1].base.value(m_pre2, a2, m_suf2)
            return total

        externals.append(level1("marble", Bimachine(flagged, table_from_fn(flagged, lam))))
        index[key] = len(externals) - 1
        return index[key]

    sel = table_from_fn(
        flagged,
        lambda m, a, m2: external_for(proj[m], mu.alphabet.index(a), proj[m2]),
    )
    return nested("marble", flagged, sel, tuple(externals))
