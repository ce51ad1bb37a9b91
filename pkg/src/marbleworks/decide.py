"""Decision machinery over forests and marble machines.

Covers independent node sets and their architectures, the production on an
architecture, counting architectures with the polyblind/lower-growth split,
dependent and independent production sums, the one-step decomposition
``f = f' + f''``, the bounded permutability check, and the repetitiveness
falsifier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations, product
from math import comb

from .algebra import Morphism
from .errors import (
    ArityMismatch,
    BudgetExceeded,
    NoRepresentative,
    NotIndependent,
    NotPermutable,
)
from .forest import Forest, build_forest, height_bound, is_independent, linearize, partition_check, validate_forest
from .machines import NestedMachine, eval_machine
from .products import (
    IteratorCtx,
    Multicontext,
    concat_contexts,
    prod_multicontext,
    prod_positions,
    prod_sets,
)

# -- independent sets --------------------------------------------------------


def enumerate_independent(forest: Forest, k: int) -> list[tuple]:
    """All size-k independent sets of iterable nodes, in path-lex order."""
    if k == 0:
        return [()]
    nodes = forest.iterable_nodes()
    out = []
    for combo in combinations(nodes, k):
        if is_independent(forest, combo):
            out.append(combo)
    return out


def prod_nodes(machine: NestedMachine, forest: Forest, nodes) -> int:
    """Production on a multiset of nodes: the production on the multiset of
    their frontiers.  The nodes must come from It(F) + {root}, whose
    frontiers are disjoint."""
    counts: dict[tuple, int] = {}
    for p in nodes:
        counts[tuple(p)] = counts.get(tuple(p), 0) + 1
    return prod_sets(
        machine,
        forest.word,
        [(forest.frontier(p), r) for p, r in counts.items()],
    )


# -- architectures -----------------------------------------------------------


EPS_ARCH = ("eps",)


def _node_type(forest: Forest, seq, path):
    """(linearization as (m, u, m'), relative depth) of a node within the
    sibling sequence ``seq`` viewed as a forest."""
    mu = forest.morphism
    mul = mu.monoid.mul
    holder = next(i for i, s in enumerate(seq) if path[: len(s)] == s)
    left = mu.monoid.identity
    for s in seq[:holder]:
        left = mul(left, forest.image(s))
    right = mu.monoid.identity
    for s in seq[holder + 1 :]:
        right = mul(right, forest.image(s))

    def descend(at):
        nonlocal left, right
        while at != path:
            node = forest.node_at(at)
            i = path[len(at)]
            for j in range(i):
                left = mul(left, forest.image(at + (j,)))
            acc = mu.monoid.identity
            for j in range(i + 1, len(node.children)):
                acc = mul(acc, forest.image(at + (j,)))
            right = mul(acc, right)
            at = at + (i,)

    descend(seq[holder])
    depth = len(path) - len(seq[0]) + 2
    return ((left, forest.frontier_word(path), right), depth)


def _types_multiset(forest: Forest, seq, nodes) -> tuple:
    return tuple(sorted(_node_type(forest, seq, t) for t in nodes))


def architecture_of(forest: Forest, nodes) -> tuple:
    """The architecture of an independent node set, as a hashable tree.

    Items of a sequence are ("box", sub-architecture), ("boxm", element), or
    ("types", multiset of (linearization, depth)); a whole architecture is
    ("eps",), ("elem", element) for a one-letter forest, or ("seq", items).
    """
    tset = {tuple(p) for p in nodes}
    if tset and not is_independent(forest, tset):
        raise NotIndependent(f"nodes {sorted(tset)} are not independent")
    if forest.root is None:
        return EPS_ARCH
    from .forest import Leaf

    if isinstance(forest.root, Leaf):
        return ("elem", forest.image(()))
    seq = tuple(() + (i,) for i in range(forest.child_count(())))
    return _arch_seq(forest, seq, tset)


def _under(path, tset):
    return {t for t in tset if t[: len(path)] == path}


def _seq_image(forest: Forest, seq) -> int:
    mul = forest.morphism.monoid.mul
    acc = forest.morphism.monoid.identity
    for s in seq:
        acc = mul(acc, forest.image(s))
    return acc


def _arch_tree(forest: Forest, path, tset) -> tuple:
    from .forest import Leaf

    node = forest.node_at(path)
    if isinstance(node, Leaf):
        if tset:
            raise NotIndependent(f"nodes below leaf {path}")
        return ("elem", forest.image(path))
    if not tset:
        return ("seq", (("boxm", forest.image(path)),))
    seq = tuple(path + (i,) for i in range(len(node.children)))
    return _arch_seq(forest, seq, tset)


def _arch_seq(forest: Forest, seq, tset) -> tuple:
    if not tset:
        return ("seq", (("boxm", _seq_image(forest, seq)),))
    t_first = _under(seq[0], tset)
    if t_first:
        sub = _arch_tree(forest, seq[0], t_first)
        rest = tset - t_first
        if len(seq) == 1:
            if rest:
                raise NotIndependent("nodes outside the forest")
            return ("seq", (("box", sub),))
        rest_arch = _arch_seq(forest, seq[1:], rest)
        return ("seq", (("box", sub),) + rest_arch[1])
    t_last = _under(seq[-1], tset)
    if t_last:
        sub = _arch_tree(forest, seq[-1], t_last)
        left_arch = _arch_seq(forest, seq[:-1], tset - t_last)
        return ("seq", left_arch[1] + (("box", sub),))
    return ("seq", (("types", _types_multiset(forest, seq, tset)),))


def arch_rank(arch) -> int:
    kind = arch[0]
    if kind in ("eps", "elem"):
        return 0
    total = 0
    for item in arch[1]:
        if item[0] == "box":
            total += arch_rank(item[1])
        elif item[0] == "types":
            total += len(item[1])
    return total


def count_architecture(forest: Forest, arch) -> int:
    """Number of independent sets realizing the architecture (by definition)."""
    k = arch_rank(arch)
    return sum(1 for t in enumerate_independent(forest, k) if architecture_of(forest, t) == arch)


def p_poly(r: int, x: int) -> int:
    """Binary strings of length x with r ones and no two ones adjacent."""
    if r < 0 or x < 0:
        return 0
    return comb(x - r + 1, r) if x - r + 1 >= r else 0


# -- the count' / count'' split ---------------------------------------------


def count_split(forest: Forest, arch) -> tuple[int, int]:
    """Split count_arch into a leading polyblind part and a lower-growth rest.

    The leading part multiplies, per idempotent leaf, the closed-form count
    of spread-out placements for the shallowest node type; the remainder is
    the exact correction.  The two parts always sum to ``count_architecture``.
    """
    from .forest import Leaf

    if arch == EPS_ARCH:
        return (1 if forest.root is None else 0, 0)
    if arch[0] == "elem":
        ok = isinstance(forest.root, Leaf) and forest.image(()) == arch[1]
        return (1 if ok else 0, 0)
    if forest.root is None or isinstance(forest.root, Leaf):
        return (0, 0)
    seq = tuple((i,) for i in range(forest.child_count(())))
    return _count_seq(forest, seq, arch)


def _count_tree(forest: Forest, path, arch) -> tuple[int, int]:
    from .forest import Leaf

    node = forest.node_at(path)
    if arch[0] == "elem":
        ok = isinstance(node, Leaf) and forest.image(path) == arch[1]
        return (1 if ok else 0, 0)
    if arch[0] == "eps" or isinstance(node, Leaf):
        return (0, 0)
    seq = tuple(path + (i,) for i in range(len(node.children)))
    return _count_seq(forest, seq, arch)


def _mul_split(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    total = (a[0] + a[1]) * (b[0] + b[1])
    lead = a[0] * b[0]
    return (lead, total - lead)


def _count_seq(forest: Forest, seq, arch) -> tuple[int, int]:
    if arch[0] == "eps":
        return (1 if not seq else 0, 0)
    if arch[0] == "elem":
        return (0, 0)
    items = arch[1]
    if arch_rank(arch) == 0:
        if len(items) == 1 and items[0][0] == "boxm":
            ok = seq and _seq_image(forest, seq) == items[0][1]
            return (1 if ok else 0, 0)
        return (0, 0)
    if items[0][0] == "box" and arch_rank(items[0][1]) >= 1:
        if not seq:
            return (0, 0)
        head = _count_tree(forest, seq[0], items[0][1])
        rest_arch = ("seq", items[1:]) if items[1:] else EPS_ARCH
        return _mul_split(head, _count_seq(forest, seq[1:], rest_arch))
    if items[-1][0] == "box" and arch_rank(items[-1][1]) >= 1:
        if not seq:
            return (0, 0)
        tail = _count_tree(forest, seq[-1], items[-1][1])
        left_arch = ("seq", items[:-1]) if items[:-1] else EPS_ARCH
        return _mul_split(_count_seq(forest, seq[:-1], left_arch), tail)
    if len(items) == 1 and items[0][0] == "types" and items[0][1]:
        return _count_types(forest, seq, items[0][1])
    raise ValueError(f"malformed architecture {arch!r}")


def _leaf_frame_ok(forest: Forest, seq, types_ms) -> bool:
    if len(seq) < 3:
        return False
    mu = forest.morphism
    (m, u, m2), _ = types_ms[0]
    e = mu.monoid.mul(mu.monoid.mul(m, mu.eval(u)), m2)
    return forest.image(seq[0]) == e and forest.image(seq[-1]) == e


def _middle_candidates(forest: Forest, seq):
    """Iterable nodes whose subtree lies under the inner part of the sequence."""
    inner = seq[1:-1]
    for t in forest.iterable_nodes():
        if any(t[: len(s)] == s for s in inner):
            yield t


def _count_types_direct(forest: Forest, seq, types_ms) -> int:
    by_type: dict = {}
    for t in types_ms:
        by_type[t] = by_type.get(t, 0) + 1
    pools = {}
    for tau in by_type:
        pools[tau] = [t for t in _middle_candidates(forest, seq) if _node_type(forest, seq, t) == tau]
    taus = sorted(by_type)
    total = 0
    for picks in product(*(combinations(pools[tau], by_type[tau]) for tau in taus)):
        chosen = [t for pick in picks for t in pick]
        if is_independent(forest, chosen):
            total += 1
    return total


def _count_types(forest: Forest, seq, types_ms) -> tuple[int, int]:
    if not types_ms:
        return (1 if len(seq) >= 3 else 0, 0)
    if not _leaf_frame_ok(forest, seq, types_ms):
        return (0, 0)
    # shallowest type first; its copies spread along same-depth candidates
    tau = min(types_ms, key=lambda t: (t[1], t[0]))
    r = sum(1 for t in types_ms if t == tau)
    rest = tuple(t for t in types_ms if t != tau)
    k1 = len(rest)
    count_total = _count_types_direct(forest, seq, types_ms)
    a_nodes = [t for t in _middle_candidates(forest, seq) if _node_type(forest, seq, t) == tau]
    if len(a_nodes) < 3 * k1 + 2 * r:
        return (0, count_total)
    lead_rest = _count_types(forest, seq, rest)[0] if rest else (1 if len(seq) >= 3 else 0)
    lead = p_poly(r, len(a_nodes) - 3 * k1) * lead_rest
    if lead > count_total:
        raise AssertionError("leading count exceeds the exact count; split bug")
    return (lead, count_total - lead)


# -- productions on architectures, sums, decomposition ------------------------


def prod_architecture(
    machine: NestedMachine,
    arch,
    left: IteratorCtx | None = None,
    right: IteratorCtx | None = None,
    representative: tuple[Forest, tuple] | None = None,
    search_words=(),
) -> int:
    """Production attached to an architecture, through a representative.

    For permutable machines the value does not depend on the representative
    (a tested property).  When no representative is supplied, the canonical
    forests of ``search_words`` are scanned for one.
    """
    if representative is None:
        k = arch_rank(arch)
        for w in search_words:
            forest = build_forest(machine.morphism, w)
            for t in enumerate_independent(forest, k):
                if architecture_of(forest, t) == arch:
                    representative = (forest, t)
                    break
            if representative is not None:
                break
        if representative is None:
            raise NoRepresentative(f"no forest realizing the architecture of rank {arch_rank(arch)}")
    forest, nodes = representative
    if architecture_of(forest, nodes) != arch:
        raise ValueError("representative does not realize the architecture")
    ctx = linearize(forest, frozenset(tuple(p) for p in nodes))
    mu = machine.morphism
    parts = []
    if left is not None:
        parts.append(left.context)
    parts.append(ctx)
    if right is not None:
        parts.append(right.context)
    full = concat_contexts(mu, *parts) if len(parts) > 1 else ctx
    if full.total_multiplicity != machine.level:
        raise ArityMismatch(
            f"rank {arch_rank(arch)} plus iterator arities must equal level {machine.level}"
        )
    return prod_multicontext(machine, full)


def _forest_admissible(machine: NestedMachine, forest: Forest) -> bool:
    if forest.morphism.monoid.table != machine.morphism.monoid.table:
        return False
    if any(
        forest.morphism.letter_image.get(a) != machine.morphism.letter_image[a]
        for a in forest.morphism.alphabet
    ):
        return False
    return validate_forest(forest) is None and forest.height() <= height_bound(forest.morphism)


def sum_dependent(machine: NestedMachine, forest: Forest) -> int:
    """Sum of productions over the dependent node multisets (0 when the
    forest is not a bounded-height forest for the machine's morphism).

    Runs as the position loop: owners of the chosen positions classify the
    multiset, and dependent ones contribute their production.
    """
    if not _forest_admissible(machine, forest):
        return 0
    if forest.root is None:
        return 0
    owners = partition_check(forest)
    k = machine.level
    w = forest.word
    cache: dict = {}
    total = 0
    for positions in combinations_with_replacement(range(1, len(w) + 1), k):
        nodes = [owners[i] for i in positions]
        if not is_independent(forest, nodes):
            total += prod_positions(machine, w, positions, cache=cache)
    return total


def sum_independent(machine: NestedMachine, forest: Forest) -> int:
    """Sum of productions over the independent node sets."""
    if not _forest_admissible(machine, forest) or forest.root is None:
        return 0
    return sum(
        prod_nodes(machine, forest, t)
        for t in enumerate_independent(forest, machine.level)
    )


def sum_independent_split(machine: NestedMachine, forest: Forest) -> tuple[int, int]:
    """The independent sum split along architectures: per architecture, its
    production times the count split.  Requires a permutable machine for the
    production on an architecture to be well defined."""
    if not _forest_admissible(machine, forest) or forest.root is None:
        return (0, 0)
    groups: dict = {}
    for t in enumerate_independent(forest, machine.level):
        groups.setdefault(architecture_of(forest, t), []).append(t)
    lead = rest = 0
    for arch, ts in sorted(groups.items()):
        value = prod_architecture(machine, arch, representative=(forest, ts[0]))
        c_lead, c_rest = count_split(forest, arch)
        if c_lead + c_rest != len(ts):
            raise AssertionError("count split disagrees with enumeration")
        lead += value * c_lead
        rest += value * c_rest
    return (lead, rest)


@dataclass(frozen=True)
class Decomposition:
    value: int
    blind_part: int   # f': the polyblind leading term
    lower_part: int   # f'': dependent sum plus the split remainder
    forest: Forest

    def __iter__(self):
        return iter((self.value, self.blind_part, self.lower_part))


def decompose(machine: NestedMachine, word, *, k_max_word: int = 2, check: bool = True, budget: int | None = None) -> Decomposition:
    """Split f(w) as f'(w) + f''(w) on the canonical forest of w.

    f' collects, per architecture, the production times the leading count;
    f'' keeps the dependent sum and the count remainders.  With ``check``
    the machine is first screened by the bounded permutability check.
    """
    if check:
        report = check_permutable(machine, k_max_word, budget=budget)
        if report.counterexample is not None:
            raise NotPermutable(report.counterexample)
    forest = build_forest(machine.morphism, word)
    value = eval_machine(machine, word)
    dep = sum_dependent(machine, forest)
    lead, rest = sum_independent_split(machine, forest)
    if value != lead + (dep + rest):
        raise NotPermutable(
            f"f = f' + f'' fails on {word!r} ({value} != {lead} + {dep + rest}); "
            "productions are not architecture-determined"
        )
    return Decomposition(value, lead, dep + rest, forest)


# -- permutability -----------------------------------------------------------


@dataclass(frozen=True)
class PermutabilityInstance:
    split: tuple[int, int, int]
    left: IteratorCtx
    mid: IteratorCtx
    right: IteratorCtx
    idempotent: int
    sigma: tuple[int, ...]
    lhs: int
    rhs: int

    def to_json(self, morphism: Morphism):
        name = morphism.monoid.name_of

        def ictx(it):
            return {
                "m0": name(it.m0),
                "parts": [["".join(u), name(m)] for u, m in it.parts],
            }

        return {
            "split": list(self.split),
            "left": ictx(self.left),
            "mid": ictx(self.mid),
            "right": ictx(self.right),
            "idempotent": name(self.idempotent),
            "sigma": [i + 1 for i in self.sigma],
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


@dataclass(frozen=True)
class PermutabilityReport:
    ok: bool
    instances: int
    counterexample: PermutabilityInstance | None = None


def _idempotent_words(morphism: Morphism, k_max_word: int):
    """Nonempty words of length <= K with idempotent image, in length-lex
    order.  Empty factors are skipped: a bracket over the empty factor
    zeroes both sides of every instance."""
    out = []
    frontier = [""]
    for _ in range(k_max_word):
        nxt = []
        for w in frontier:
            for a in morphism.alphabet:
                nxt.append(w + a)
        for w in nxt:
            if morphism.monoid.is_idempotent(morphism.eval(w)):
                out.append(w)
        frontier = nxt
    return out


def _iterators(morphism: Morphism, arity: int, words, k_max_word: int):
    elems = range(morphism.monoid.size)
    for m0 in elems:
        for parts in product(*(tuple(product(words, elems)) for _ in range(arity))):
            yield IteratorCtx(morphism, m0, tuple(parts), k_max_word)


def _instance_count(morphism: Morphism, level: int, n_words: int) -> int:
    n = morphism.monoid.size

    def iters(x):
        return n * (n_words * n) ** x

    total = 0
    for x in range(1, level + 1):
        for l in range(level - x + 1):
            r = level - x - l
            perms = 1
            for i in range(2, x + 1):
                perms *= i
            total += iters(l) * iters(x) * iters(r) * perms
    return total


def permutability_instances(machine: NestedMachine, k_max_word: int):
    """Deterministic stream of (split, L, mid, R, e, sigma) tuples.

    Mid iterators whose closing element is not idempotent are skipped, as
    are arity-0 middles (no factors to permute)."""
    mu = machine.morphism
    words = _idempotent_words(mu, k_max_word)
    k = machine.level
    mul = mu.monoid.mul
    for x in range(1, k + 1):
        for l in range(k - x + 1):
            r = k - x - l
            for mid in _iterators(mu, x, words, k_max_word):
                e = mid.m0
                for u, m in mid.parts:
                    e = mul(mul(e, mu.eval(u)), m)
                if not mu.monoid.is_idempotent(e):
                    continue
                for left in _iterators(mu, l, words, k_max_word):
                    for right in _iterators(mu, r, words, k_max_word):
                        for sigma in permutations(range(x)):
                            yield ((l, x, r), left, mid, right, e, sigma)


def _instance_values(machine: NestedMachine, inst):
    (l, x, r), left, mid, right, e, sigma = inst
    mu = machine.morphism
    mul = mu.monoid.mul
    images = [mu.eval(u) for u, _ in mid.parts]
    ms = [mid.m0] + [m for _, m in mid.parts]
    lefts, rights = [], []
    for j in range(1, x + 1):
        acc = e
        for i in range(1, j + 1):
            acc = mul(mul(acc, ms[i - 1]), images[i - 1])
        lefts.append(acc)
        acc = mu.monoid.identity
        for i in range(j, x + 1):
            acc = mul(acc, mul(images[i - 1], ms[i]))
        rights.append(mul(acc, e))
    sandwich = mid.context
    sandwich = Multicontext(
        (mul(e, sandwich.ms[0]),) + sandwich.ms[1:-1] + (mul(sandwich.ms[-1], e),),
        sandwich.us,
        sandwich.rs,
    )
    lhs = prod_multicontext(machine, concat_contexts(mu, left.context, sandwich, right.context))
    elems = [lefts[sigma[0]]]
    us = []
    for pos, j in enumerate(sigma):
        us.append(mid.parts[j][0])
        if pos + 1 < len(sigma):
            elems.append(mul(rights[j], lefts[sigma[pos + 1]]))
    elems.append(rights[sigma[-1]])
    chain = Multicontext(tuple(elems), tuple(us), (1,) * x)
    rhs = prod_multicontext(machine, concat_contexts(mu, left.context, chain, right.context))
    return lhs, rhs


def _check_chunk(args):
    machine, k_max_word, start, stop = args
    from itertools import islice

    for offset, inst in enumerate(
        islice(permutability_instances(machine, k_max_word), start, stop)
    ):
        lhs, rhs = _instance_values(machine, inst)
        if lhs != rhs:
            return (start + offset, inst, lhs, rhs)
    return None


def check_permutable(
    machine: NestedMachine,
    k_max_word: int,
    budget: int | None = None,
    jobs: int = 1,
) -> PermutabilityReport:
    """Exhaustive bounded permutability check.

    Ranges over every split l + x + r = level, all iterators with factor
    words of length <= ``k_max_word``, and all permutations of the middle
    factors; both productions of the defining equation are compared.  The
    first counterexample in enumeration order is reported.  If a budget is
    given and the enumeration is larger, BudgetExceeded is raised up front.
    """
    if machine.level > 1 and machine.kind != "marble":
        raise ValueError("permutability is defined for marble machines")
    mu = machine.morphism
    words = _idempotent_words(mu, k_max_word)
    size = _instance_count(mu, machine.level, len(words))
    if budget is not None and size > budget:
        raise BudgetExceeded(size, budget)
    checked = 0
    if jobs <= 1:
        for inst in permutability_instances(machine, k_max_word):
            lhs, rhs = _instance_values(machine, inst)
            checked += 1
            if lhs != rhs:
                (l_x_r, left, mid, right, e, sigma) = inst
                return PermutabilityReport(
                    False,
                    checked,
                    PermutabilityInstance(l_x_r, left, mid, right, e, sigma, lhs, rhs),
                )
        return PermutabilityReport(True, checked)

    from concurrent.futures import ProcessPoolExecutor

    total = sum(1 for _ in permutability_instances(machine, k_max_word))
    chunk = max(1, (total + jobs - 1) // jobs)
    tasks = [
        (machine, k_max_word, start, min(start + chunk, total))
        for start in range(0, total, chunk)
    ]
    hits = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for res in pool.map(_check_chunk, tasks):
            if res is not None:
                hits.append(res)
    if not hits:
        return PermutabilityReport(True, total)
    _, inst, lhs, rhs = min(hits, key=lambda h: h[0])
    (l_x_r, left, mid, right, e, sigma) = inst
    return PermutabilityReport(
        False, total, PermutabilityInstance(l_x_r, left, mid, right, e, sigma, lhs, rhs)
    )


# -- repetitiveness ----------------------------------------------------------


@dataclass(frozen=True)
class RepetitivenessProbe:
    """Pumping template: alpha_parts interleave with the pumped factors us,
    flanked by alpha and beta; omega scales every repetition."""

    alpha: str
    alpha_parts: tuple[str, ...]
    us: tuple[str, ...]
    beta: str
    omega: int
    lo: int = 3
    hi: int = 8

    def __post_init__(self):
        if len(self.alpha_parts) != len(self.us) + 1:
            raise ValueError("need one more separator than pumped factors")
        if self.omega < 1 or self.lo < 3 or self.hi < self.lo:
            raise ValueError("omega >= 1 and 3 <= lo <= hi required")

    @property
    def k(self) -> int:
        return len(self.us)

    def base_block(self, reps) -> str:
        parts = [self.alpha_parts[0]]
        for u, r, sep in zip(self.us, reps, self.alpha_parts[1:]):
            parts.append(u * (self.omega * r))
            parts.append(sep)
        return "".join(parts)

    def word(self, xs, ys) -> str:
        w = self.base_block((1,) * self.k)
        return (
            self.alpha
            + w * (2 * self.omega - 1)
            + self.base_block(xs)
            + w * (self.omega - 1)
            + self.base_block(ys)
            + w * self.omega
            + self.beta
        )


@dataclass(frozen=True)
class RepetitivenessWitness:
    probe: RepetitivenessProbe
    xs: tuple[int, ...]
    ys: tuple[int, ...]
    xs2: tuple[int, ...]
    ys2: tuple[int, ...]
    value1: int
    value2: int

    @property
    def sums(self) -> tuple[int, ...]:
        return tuple(x + y for x, y in zip(self.xs, self.ys))

    def words(self) -> tuple[str, str]:
        return (self.probe.word(self.xs, self.ys), self.probe.word(self.xs2, self.ys2))


@dataclass
class FalsifierReport:
    witness: RepetitivenessWitness | None
    evaluations: int

    @property
    def ok_at_budget(self) -> bool:
        return self.witness is None


def falsify_repetitive(
    fn,
    k: int,
    probe: RepetitivenessProbe | None = None,
    *,
    budget: int = 5000,
    seed: int = 0,
    random_probes: int = 20,
) -> FalsifierReport:
    """Search for a violation of k-repetitiveness (semi-decision).

    ``fn`` is a machine or a word -> value callable.  Pairs of pump vectors
    are traversed with the first lexicographically below the second; each
    comparison moves one repetition between the two pump blocks of one
    factor, keeping the coordinate sums fixed.  Absence of a witness within
    the budget proves nothing.
    """
    machine = fn if isinstance(fn, NestedMachine) else None
    evaluate = (lambda w: eval_machine(machine, w)) if machine is not None else fn
    if probe is not None:
        probes = [probe]
    else:
        if machine is None:
            raise ValueError("random probes need a machine to draw the alphabet from")
        import random

        rng = random.Random(seed)
        iota = machine.morphism.monoid.idempotence_index()
        letters = [a for a in machine.morphism.alphabet]
        probes = []
        for _ in range(random_probes):
            def rand_word(maxlen):
                return "".join(rng.choice(letters) for _ in range(rng.randint(0, maxlen)))

            probes.append(
                RepetitivenessProbe(
                    alpha=rand_word(2),
                    alpha_parts=tuple(rand_word(2) for _ in range(k + 1)),
                    us=tuple(
                        "".join(rng.choice(letters) for _ in range(rng.randint(1, 2)))
                        for _ in range(k)
                    ),
                    beta=rand_word(2),
                    omega=iota,
                    lo=3,
                    hi=5,
                )
            )
    if machine is not None:
        iota = machine.morphism.monoid.idempotence_index()
        for p in probes:
            if p.omega % iota != 0:
                raise ValueError(f"omega must be a multiple of the idempotence index {iota}")

    evaluations = 0
    cache: dict[str, int] = {}

    def value(p, xs, ys):
        nonlocal evaluations
        w = p.word(xs, ys)
        if w not in cache:
            evaluations += 1
            cache[w] = evaluate(w)
        return cache[w]

    for p in probes:
        if p.k != k:
            raise ValueError(f"probe has {p.k} pumped factors, expected {k}")
        grid = list(product(range(p.lo, p.hi + 1), repeat=k))
        for xs in grid:
            for ys in grid:
                if not xs < ys:
                    continue
                for i in range(k):
                    for delta in (-1, 1):
                        if evaluations >= budget:
                            return FalsifierReport(None, evaluations)
                        xs2 = xs[:i] + (xs[i] + delta,) + xs[i + 1 :]
                        ys2 = ys[:i] + (ys[i] - delta,) + ys[i + 1 :]
                        if xs2[i] < 2 or ys2[i] < 2:
                            continue
                        v1 = value(p, xs, ys)
                        v2 = value(p, xs2, ys2)
                        if v1 != v2:
                            return FalsifierReport(
                                RepetitivenessWitness(p, xs, ys, xs2, ys2, v1, v2),
                                evaluations,
                            )
    return FalsifierReport(None, evaluations)
