"""Brute-force reference implementations, used only by the test suite.

Everything here recomputes from the definitions with no sharing, caching,
or clever recursion, so that agreement with the main code paths is a real
cross-check and not a tautology.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

from .algebra import mark_word
from .errors import StarOnNonProper
from .machines import NestedMachine
from .series import Cauchy, Hadamard, Reg, Star, Sum


@dataclass(frozen=True)
class OracleReport:
    instance: str
    oracle_value: int
    subject_value: int

    @property
    def equal(self) -> bool:
        return self.oracle_value == self.subject_value


def _image(machine, word):
    mu = machine.morphism
    acc = mu.monoid.identity
    for a in word:
        acc = mu.monoid.mul(acc, mu.letter_image[a])
    return acc


def oracle_eval(machine: NestedMachine, word) -> int:
    """Literal nested-sum semantics of a marble/blind/pebble machine."""
    total = 0
    for i in range(1, len(word) + 1):
        m_pre = _image(machine, word[: i - 1])
        m_suf = _image(machine, word[i:])
        a = word[i - 1]
        ai = machine.morphism.alphabet.index(a)
        if machine.level == 1:
            total += machine.base.table[m_pre][ai][m_suf]
        else:
            ext = machine.externals[machine.selector[m_pre][ai][m_suf]]
            if machine.kind == "marble":
                total += oracle_eval(ext, word[:i])
            elif machine.kind == "blind":
                total += oracle_eval(ext, word)
            else:
                total += oracle_eval(ext, mark_word(word, i))
    return total


def oracle_prod(machine: NestedMachine, word, positions) -> int:
    """Literal production recursion on a sorted position multiset."""
    ms = sorted(positions)
    i = ms[-1]
    m_pre = _image(machine, word[: i - 1])
    m_suf = _image(machine, word[i:])
    ai = machine.morphism.alphabet.index(word[i - 1])
    if machine.level == 1:
        return machine.base.table[m_pre][ai][m_suf]
    ext = machine.externals[machine.selector[m_pre][ai][m_suf]]
    return oracle_prod(ext, word[:i], ms[:-1])


def oracle_prod_sum(machine: NestedMachine, word) -> int:
    """Sum of productions over every position multiset of size level."""
    return sum(
        oracle_prod(machine, word, ms)
        for ms in combinations_with_replacement(range(1, len(word) + 1), machine.level)
    )


def oracle_series(expr, word) -> int:
    """Definitional series evaluation; the star is the literal sum of Cauchy
    powers up to the word length."""
    if isinstance(expr, Reg):
        return oracle_eval_bimachine(expr.machine, word)
    if isinstance(expr, Sum):
        return oracle_series(expr.left, word) + oracle_series(expr.right, word)
    if isinstance(expr, Hadamard):
        return oracle_series(expr.left, word) * oracle_series(expr.right, word)
    if isinstance(expr, Cauchy):
        return sum(
            oracle_series(expr.left, word[:i]) * oracle_series(expr.right, word[i:])
            for i in range(len(word) + 1)
        )
    if isinstance(expr, Star):
        if oracle_series(expr.child, word[:0]) != 0:
            raise StarOnNonProper()

        def power(n, w):
            if n == 0:
                return 1 if len(w) == 0 else 0
            return sum(
                oracle_series(expr.child, w[:i]) * power(n - 1, w[i:])
                for i in range(len(w) + 1)
            )

        return sum(power(n, word) for n in range(len(word) + 1))
    raise TypeError(f"not a series expression: {expr!r}")


def oracle_eval_bimachine(machine, word) -> int:
    total = 0
    mu = machine.morphism
    for i in range(1, len(word) + 1):
        m_pre = mu.eval(word[: i - 1])
        m_suf = mu.eval(word[i:])
        total += machine.table[m_pre][mu.alphabet.index(word[i - 1])][m_suf]
    return total
