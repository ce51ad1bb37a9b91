"""Rational-series expression trees over regular functions.

Expressions combine bimachines with sum, Cauchy product (convolution over
splittings of the word), Hadamard product (pointwise product), and Kleene
star.  Expressions without Cauchy and star translate to blind machines and
back.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import product_morphism, nonempty_flag_morphism
from .errors import StarOnNonProper, UnsupportedNode
from .machines import (
    Bimachine,
    NestedMachine,
    blind_hadamard,
    blind_sum,
    eval_machine,
    level1,
    lift_machine,
    nested,
    table_from_fn,
    zero_machine,
)


@dataclass(frozen=True)
class Reg:
    machine: Bimachine


@dataclass(frozen=True)
class Sum:
    left: "SeriesExpr"
    right: "SeriesExpr"


@dataclass(frozen=True)
class Cauchy:
    left: "SeriesExpr"
    right: "SeriesExpr"


@dataclass(frozen=True)
class Hadamard:
    left: "SeriesExpr"
    right: "SeriesExpr"


@dataclass(frozen=True)
class Star:
    child: "SeriesExpr"


SeriesExpr = Reg | Sum | Cauchy | Hadamard | Star


def eval_series(expr: SeriesExpr, word) -> int:
    """Exact value of the expression on the word.

    The star sums f^n for n up to |w|: since a starred series must vanish on
    the empty word, longer products contribute nothing.
    """
    if isinstance(expr, Reg):
        return expr.machine.eval(word)
    if isinstance(expr, Sum):
        return eval_series(expr.left, word) + eval_series(expr.right, word)
    if isinstance(expr, Hadamard):
        return eval_series(expr.left, word) * eval_series(expr.right, word)
    if isinstance(expr, Cauchy):
        return sum(
            eval_series(expr.left, word[:i]) * eval_series(expr.right, word[i:])
            for i in range(len(word) + 1)
        )
    if isinstance(expr, Star):
        if eval_series(expr.child, word[:0]) != 0:
            raise StarOnNonProper()
        # suffix_value[i] = (child*)(w[i+1:]); every nonempty first part
        # shortens the suffix, so the recursion is well founded.
        n = len(word)
        suffix_value = [0] * (n + 1)
        suffix_value[n] = 1
        for i in range(n - 1, -1, -1):
            suffix_value[i] = sum(
                eval_series(expr.child, word[i:j]) * suffix_value[j]
                for j in range(i + 1, n + 1)
            )
        return suffix_value[0]
    raise TypeError(f"not a series expression: {expr!r}")


def validate_star_children(expr: SeriesExpr):
    """Raise StarOnNonProper if some starred child maps the empty word to
    a nonzero value."""
    if isinstance(expr, Reg):
        return
    if isinstance(expr, Star):
        if eval_series(expr.child, "") != 0:
            raise StarOnNonProper()
        validate_star_children(expr.child)
        return
    validate_star_children(expr.left)
    validate_star_children(expr.right)


def blind_to_series(machine: NestedMachine) -> SeriesExpr:
    """Expand a blind machine into sums and Hadamard products of regular
    functions: per external, the count of positions selecting it times the
    external's own expansion."""
    if machine.kind != "blind" and machine.level > 1:
        raise ValueError("expansion is defined for blind machines")
    if machine.level == 1:
        return Reg(machine.base)
    mu = machine.morphism
    expr = None
    for h, ext in enumerate(machine.externals):
        counter = Bimachine(
            mu,
            table_from_fn(mu, lambda m, a, m2, h=h: 1 if machine.select(m, a, m2) == h else 0),
        )
        term = Hadamard(Reg(counter), blind_to_series(ext))
        expr = term if expr is None else Sum(expr, term)
    return expr


def _as_blind(machine: Bimachine) -> NestedMachine:
    return level1("blind", machine)


def _unify(left: NestedMachine, right: NestedMachine):
    """Lift both machines over the product of their morphisms."""
    if left.morphism == right.morphism:
        return left, right
    mu = product_morphism(left.morphism, right.morphism)
    n2 = right.morphism.monoid.size
    proj_l = [x // n2 for x in range(mu.monoid.size)]
    proj_r = [x % n2 for x in range(mu.monoid.size)]
    return lift_machine(left, mu, proj_l), lift_machine(right, mu, proj_r)


def _pad_level(machine: NestedMachine, level: int) -> NestedMachine:
    """Wrap a blind machine so it sits at a deeper level, calling the real
    machine from the first position only (detected by the emptiness flag
    refined into the morphism)."""
    if machine.level == level:
        return machine
    mu = machine.morphism
    flag = nonempty_flag_morphism(mu.alphabet)
    flagged = product_morphism(mu, flag)
    proj = [x // 2 for x in range(flagged.monoid.size)]
    first = [x % 2 == 0 for x in range(flagged.monoid.size)]
    lifted = lift_machine(machine, flagged, proj)
    while lifted.level < level:
        sel = table_from_fn(flagged, lambda m, a, m2: 0 if first[m] else 1)
        lifted = nested(
            "blind", flagged, sel, (lifted, zero_machine(flagged, lifted.level, "blind"))
        )
    return lifted


def series_to_blind(expr: SeriesExpr) -> NestedMachine:
    """Compile a Cauchy-free, star-free expression into a blind machine."""
    if isinstance(expr, Reg):
        return _as_blind(expr.machine)
    if isinstance(expr, Sum):
        left, right = _unify(series_to_blind(expr.left), series_to_blind(expr.right))
        k = max(left.level, right.level)
        left, right = _pad_level(left, k), _pad_level(right, k)
        left, right = _unify(left, right)
        return blind_sum(left, right)
    if isinstance(expr, Hadamard):
        left, right = _unify(series_to_blind(expr.left), series_to_blind(expr.right))
        return blind_hadamard(left, right)
    raise UnsupportedNode(type(expr).__name__.lower())


def growth_probe(fn, sampler, lengths=(4, 8, 16, 32, 64), max_degree: int = 6):
    """Estimate the least d with max_{|w|=n} fn(w) = O(n^d); advisory only.

    ``sampler(n)`` yields candidate words of length n.  The estimate takes
    the smallest degree whose normalized values stop growing between the
    first and last sampled lengths.
    """
    peaks = []
    for n in lengths:
        words = list(sampler(n))
        peaks.append((n, max((fn(w) for w in words), default=0)))
    for d in range(max_degree + 1):
        ratios = [v / max(n, 1) ** d for n, v in peaks]
        if max(ratios[-2:]) <= 1.25 * max(ratios[:2]) + 1e-9:
            return d
    return max_degree + 1
