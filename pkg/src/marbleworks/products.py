"""Productions of marble bimachines.

A production is the contribution of one multiset of call positions to a
machine's output.  Productions lift from position multisets to multisets of
disjoint position sets, and further to multicontexts ``m0 [u1]_r1 m1 ...``
where the factors between the bracketed words are abstracted by their
monoid images.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb

from .algebra import Morphism
from .errors import ArityMismatch, DegreeExceeded
from .machines import NestedMachine


def _check_marble(machine: NestedMachine):
    if machine.level > 1 and machine.kind != "marble":
        raise ValueError("productions are defined for marble machines")


def _concat_words(parts):
    if all(isinstance(p, str) for p in parts):
        return "".join(parts)
    out = []
    for p in parts:
        out.extend(p)
    return tuple(out)


def prod_positions(machine: NestedMachine, word, positions, cache: dict | None = None) -> int:
    """Production on a multiset of positions (1-based), |positions| = level.

    Recurses on the largest position: the outermost call happens there, and
    the remaining marbles land in the prefix it passes down.  A shared
    ``cache`` dict keeps prefix/suffix images across calls on one word.
    """
    _check_marble(machine)
    ms = tuple(sorted(positions))
    if len(ms) != machine.level:
        raise ArityMismatch(f"need {machine.level} positions, got {len(ms)}")
    if any(not 1 <= i <= len(word) for i in ms):
        raise ValueError("positions must lie in 1..|w|")
    return _prod_pos(machine, word, ms, {} if cache is None else cache)


def _prod_pos(machine, word, ms, images_cache):
    key = (machine.level, word if isinstance(word, str) else tuple(word))
    cached = images_cache.get(key)
    if cached is None:
        mu = machine.morphism
        cached = (mu.prefix_images(word), mu.suffix_images(word))
        images_cache[key] = cached
    pre, suf = cached
    i = ms[-1]
    a = word[i - 1]
    if machine.level == 1:
        return machine.base.value(pre[i - 1], a, suf[i])
    h = machine.select(pre[i - 1], a, suf[i])
    return _prod_pos(machine.externals[h], word[:i], ms[:-1], images_cache)


def prod_sets(machine: NestedMachine, word, sets) -> int:
    """Production on a multiset of disjoint position sets.

    ``sets`` is an iterable of (positions, multiplicity) pairs; a set with
    multiplicity r contributes every size-r position multiset drawn from it,
    each counted once.
    """
    _check_marble(machine)
    entries = [(tuple(sorted(set(ps))), int(r)) for ps, r in sets]
    total = sum(r for _, r in entries)
    if total != machine.level:
        raise ArityMismatch(f"total multiplicity {total} != level {machine.level}")
    seen: set[int] = set()
    for ps, r in entries:
        if r < 0:
            raise ValueError("multiplicities must be >= 0")
        if seen.intersection(ps):
            raise ValueError("position sets must be disjoint")
        seen.update(ps)
        if any(not 1 <= i <= len(word) for i in ps):
            raise ValueError("positions must lie in 1..|w|")

    cache: dict = {}

    def rec(idx, chosen):
        if idx == len(entries):
            return _prod_pos(machine, word, tuple(sorted(chosen)), cache)
        ps, r = entries[idx]
        if r == 0:
            return rec(idx + 1, chosen)
        acc = 0
        for pick in combinations_with_replacement(ps, r):
            acc += rec(idx + 1, chosen + list(pick))
        return acc

    return rec(0, [])


@dataclass(frozen=True)
class Multicontext:
    """``ms[0] [us[0]]_{rs[0]} ms[1] ... [us[-1]]_{rs[-1]} ms[-1]``.

    Monoid elements alternate with bracketed concrete words; each bracket
    carries a multiplicity saying how many marbles it must absorb.
    """

    ms: tuple[int, ...]
    us: tuple
    rs: tuple[int, ...]

    def __post_init__(self):
        if len(self.ms) != len(self.us) + 1 or len(self.us) != len(self.rs):
            raise ValueError("malformed multicontext")
        if any(r < 0 for r in self.rs):
            raise ValueError("multiplicities must be >= 0")

    @property
    def total_multiplicity(self) -> int:
        return sum(self.rs)

    def absorb_zeros(self, morphism: Morphism) -> "Multicontext":
        """Replace every bracket of multiplicity 0 by the image of its word."""
        ms = [self.ms[0]]
        us, rs = [], []
        mul = morphism.monoid.mul
        for u, r, m in zip(self.us, self.rs, self.ms[1:]):
            if r == 0:
                ms[-1] = mul(mul(ms[-1], morphism.eval(u)), m)
            else:
                us.append(u)
                rs.append(r)
                ms.append(m)
        return Multicontext(tuple(ms), tuple(us), tuple(rs))


def context_of_element(m: int) -> Multicontext:
    return Multicontext((m,), (), ())


def context_of_word(u, r: int = 1, left: int | None = None, right: int | None = None, identity: int = 0) -> Multicontext:
    l = identity if left is None else left
    rr = identity if right is None else right
    return Multicontext((l, rr), (u,), (r,))


def concat_contexts(morphism: Morphism, *contexts: Multicontext) -> Multicontext:
    """Concatenate multicontexts, multiplying the touching monoid elements."""
    mul = morphism.monoid.mul
    ms = [morphism.monoid.identity]
    us, rs = [], []
    for c in contexts:
        ms[-1] = mul(ms[-1], c.ms[0])
        us.extend(c.us)
        rs.extend(c.rs)
        ms.extend(c.ms[1:])
    return Multicontext(tuple(ms), tuple(us), tuple(rs))


@dataclass(frozen=True)
class IteratorCtx:
    """``m0 (e1 [u1] e1 m1) ... (ex [ux] ex mx)`` with every ei = mu(ui)
    idempotent and |ui| <= K: the factors can be iterated in place."""

    morphism: Morphism
    m0: int
    parts: tuple  # ((u, m), ...)
    K: int

    def __post_init__(self):
        for u, _ in self.parts:
            if not 1 <= len(u) <= self.K:
                raise ValueError(f"iterator factor length must be in 1..{self.K}")
            e = self.morphism.eval(u)
            if not self.morphism.monoid.is_idempotent(e):
                raise ValueError("iterator factors must have idempotent images")

    @property
    def arity(self) -> int:
        return len(self.parts)

    @property
    def context(self) -> Multicontext:
        mul = self.morphism.monoid.mul
        images = [self.morphism.eval(u) for u, _ in self.parts]
        ms = [self.m0]
        us, rs = [], []
        for (u, m), e in zip(self.parts, images):
            ms[-1] = mul(ms[-1], e)
            us.append(u)
            rs.append(1)
            ms.append(mul(e, m))
        return Multicontext(tuple(ms), tuple(us), tuple(rs))


def realize_context(morphism: Morphism, ctx: Multicontext):
    """Instantiate the abstract elements by their canonical preimage words.

    Returns ``(word, position_sets)`` where the i-th set covers the
    occurrence of ``us[i]`` in the realized word.
    """
    parts = [morphism.preimage_word(ctx.ms[0])]
    sets = []
    pos = len(parts[0])
    for u, m in zip(ctx.us, ctx.ms[1:]):
        sets.append(tuple(range(pos + 1, pos + len(u) + 1)))
        pos += len(u)
        parts.append(tuple(u))
        v = morphism.preimage_word(m)
        parts.append(v)
        pos += len(v)
    return _concat_words(parts), sets


def prod_multicontext(machine: NestedMachine, ctx: Multicontext) -> int:
    """Production on a multicontext, via any realization of its elements.

    Well-definedness (independence of the witness words) is a tested
    property of marble machines, not an assumption of this code path.
    """
    _check_marble(machine)
    total = ctx.total_multiplicity
    if total == 0:
        return 0
    if total != machine.level:
        raise ArityMismatch(f"total multiplicity {total} != level {machine.level}")
    word, sets = realize_context(machine.morphism, ctx)
    return prod_sets(machine, word, [(s, r) for s, r in zip(sets, ctx.rs) if r > 0])


def compositions(total: int, parts: int):
    """All tuples of ``parts`` naturals summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class SplitReport:
    lhs: int
    rhs: int
    terms: tuple

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def split_factors(machine: NestedMachine, left: Multicontext, u_parts, r: int, right: Multicontext) -> SplitReport:
    """Compare ``[u1...uX]_r`` against the sum over all ways of spreading the
    r marbles over the individual factors.  Both sides are computed
    independently and reported."""
    mu = machine.morphism
    whole = concat_contexts(mu, left, context_of_word(_concat_words(u_parts), r, identity=mu.monoid.identity), right)
    lhs = prod_multicontext(machine, whole)
    terms = []
    rhs = 0
    for split in compositions(r, len(u_parts)):
        mid = Multicontext(
            (mu.monoid.identity,) * (len(u_parts) + 1), tuple(u_parts), split
        )
        v = prod_multicontext(machine, concat_contexts(mu, left, mid, right))
        terms.append((split, v))
        rhs += v
    return SplitReport(lhs, rhs, tuple(terms))


def shape_of(rs) -> tuple[int, ...]:
    """Collapse every maximal block of zeros to a single zero."""
    out: list[int] = []
    for v in rs:
        if v == 0 and out and out[-1] == 0:
            continue
        out.append(int(v))
    return tuple(out)


def shapes_enum(r: int) -> tuple[tuple[int, ...], ...]:
    """All shapes realizable by length-X tuples summing to r, for X >= 2r+1.

    Shapes without zeros only occur at X = their own length < 2r+1, so they
    are excluded; every other shape already shows up at X = 2r+1.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    found = {shape_of(c) for c in compositions(r, 2 * r + 1)}
    return tuple(sorted(found))


def shape_count_poly(shape, x: int) -> int:
    """Number of length-x tuples summing to r whose shape is ``shape``.

    Stars and bars over the zero blocks: each zero of the shape expands to a
    nonempty run of zeros.
    """
    s = tuple(shape)
    if shape_of(s) != s:
        raise ValueError(f"{s} is not a shape")
    y = len(s)
    z = sum(1 for v in s if v == 0)
    if z == 0:
        return 1 if x == y else 0
    if x < y:
        return 0
    return comb(x - y + z - 1, z - 1)


@dataclass(frozen=True)
class Poly:
    """Polynomial with exact rational coefficients, lowest degree first."""

    coeffs: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def coefficient(self, power: int) -> Fraction:
        return self.coeffs[power] if power < len(self.coeffs) else Fraction(0)


def interpolate(points) -> Poly:
    """Newton interpolation through exact rational points."""
    xs = [Fraction(x) for x, _ in points]
    divided = [Fraction(v) for _, v in points]
    for j in range(1, len(points)):
        for i in range(len(points) - 1, j - 1, -1):
            divided[i] = (divided[i] - divided[i - 1]) / (xs[i] - xs[i - j])
    coeffs = [Fraction(0)] * len(points)
    coeffs[0] = divided[-1]
    for i in range(len(points) - 2, -1, -1):
        for j in range(len(points) - 1, 0, -1):
            coeffs[j] = coeffs[j - 1] - coeffs[j] * xs[i]
        coeffs[0] = divided[i] - coeffs[0] * xs[i]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return Poly(tuple(coeffs))


def _repeat_word(u, times: int):
    if isinstance(u, str):
        return u * times
    return tuple(u) * times


def prod_power_poly(machine: NestedMachine, left: Multicontext, u, r: int, right: Multicontext, extra_points: int = 3) -> Poly:
    """The production of ``left [u^X]_r right`` as a polynomial in X.

    Samples r+1 points at X >= 2r+1, interpolates exactly, and verifies both
    the degree bound and agreement on ``extra_points`` further samples; for
    r = 1 the linear coefficient must equal the production with the factor
    sandwiched between copies of its idempotent image.
    """
    mu = machine.morphism
    e = mu.eval(u)
    if not mu.monoid.is_idempotent(e):
        raise ValueError("the iterated factor must have an idempotent image")

    def value_at(x: int) -> int:
        mid = context_of_word(_repeat_word(u, x), r, identity=mu.monoid.identity)
        return prod_multicontext(machine, concat_contexts(mu, left, mid, right))

    base = 2 * r + 1
    nodes = [(x, value_at(x)) for x in range(base, base + r + 1)]
    poly = interpolate(nodes)
    if poly.degree > r:
        raise DegreeExceeded(f"degree {poly.degree} > multiplicity {r}")
    for x in range(base + r + 1, base + r + 1 + extra_points):
        if poly(x) != value_at(x):
            raise DegreeExceeded(f"interpolant disagrees with the production at X={x}")
    if r == 1:
        sandwich = Multicontext((e, e), (u,), (1,))
        slope = prod_multicontext(machine, concat_contexts(mu, left, sandwich, right))
        if poly.coefficient(1) != slope:
            raise DegreeExceeded(
                "linear coefficient does not match the idempotent-sandwich production"
            )
    return poly
