"""Factorization forests of bounded height.

A forest of a word is a bracketing in which every node with three or more
children has all children mapping to one idempotent monoid element.  The
builder always returns a forest of height at most three times the size of
the submonoid generated by the letter images: a greedy pass (collapse
idempotent runs, then cut at repeated prefix products) finds a shallow
forest in practice, and an exact achievability search over intervals serves
as fallback for the rare inputs where the greedy result is too tall.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import Morphism
from .errors import ForestViolation, NotIndependent, ParseError, PartitionViolation
from .products import Multicontext, concat_contexts

OPEN = "⟨"   # mathematical left angle bracket
CLOSE = "⟩"


@dataclass(frozen=True)
class Leaf:
    letter: str
    pos: int  # 1-based position in the factored word


@dataclass(frozen=True)
class Inner:
    children: tuple

    def __post_init__(self):
        if not self.children:
            raise ValueError("inner nodes need at least one child")


Node = Leaf | Inner


def node_height(node: Node) -> int:
    if isinstance(node, Leaf):
        return 1
    return 1 + max(node_height(c) for c in node.children)


@dataclass(frozen=True)
class Violation:
    path: tuple
    reason: str


@dataclass
class Forest:
    """A factorization forest with per-node caches.

    Nodes are addressed by their path of child indices from the root; the
    root is ``()``.  The empty word has the empty forest (``root is None``).
    """

    morphism: Morphism
    word: str
    root: Node | None
    _images: dict = field(default_factory=dict, repr=False)
    _frontiers: dict = field(default_factory=dict, repr=False)
    _children: dict = field(default_factory=dict, repr=False)
    _iterables: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if (self.root is None) != (len(self.word) == 0):
            raise ValueError("empty forest iff empty word")
        if self.root is not None:
            self._index()

    def _index(self):
        mul = self.morphism.monoid.mul
        img = self.morphism.letter_image

        def walk(node, path):
            if isinstance(node, Leaf):
                self._children[path] = 0
                self._images[path] = img[node.letter]
                return
            self._children[path] = len(node.children)
            acc = None
            for i, c in enumerate(node.children):
                walk(c, path + (i,))
                child_img = self._images[path + (i,)]
                acc = child_img if acc is None else mul(acc, child_img)
            self._images[path] = acc

        walk(self.root, ())

        def skeleton(node, path):
            if path in self._frontiers:
                return self._frontiers[path]
            if isinstance(node, Leaf):
                fr = (node.pos,)
            else:
                first = skeleton(node.children[0], path + (0,))
                last_i = len(node.children) - 1
                last = skeleton(node.children[last_i], path + (last_i,))
                fr = first if last_i == 0 else first + last
            self._frontiers[path] = fr
            return fr

        skeleton(self.root, ())
        # frontiers of non-skeleton nodes are filled lazily via frontier()
        iters = []

        def collect(node, path, has_left, has_right):
            if has_left and has_right:
                iters.append(path)
            if isinstance(node, Inner):
                n = len(node.children)
                for i, c in enumerate(node.children):
                    collect(c, path + (i,), i > 0, i < n - 1)

        collect(self.root, (), False, False)
        self._iterables = tuple(sorted(iters))

    # -- structure queries ------------------------------------------------

    def node_at(self, path) -> Node:
        node = self.root
        for i in path:
            node = node.children[i]
        return node

    def child_count(self, path) -> int:
        return self._children[path]

    def image(self, path=()) -> int:
        if self.root is None:
            return self.morphism.monoid.identity
        return self._images[tuple(path)]

    def height(self) -> int:
        return 0 if self.root is None else node_height(self.root)

    def depth(self, path) -> int:
        """Depth of the node, the root having depth 1."""
        return len(path) + 1

    def paths(self):
        return sorted(self._images)

    def frontier(self, path) -> tuple[int, ...]:
        path = tuple(path)
        fr = self._frontiers.get(path)
        if fr is None:
            node = self.node_at(path)
            if isinstance(node, Leaf):
                fr = (node.pos,)
            else:
                first = self.frontier(path + (0,))
                last_i = len(node.children) - 1
                fr = first if last_i == 0 else first + self.frontier(path + (last_i,))
            self._frontiers[path] = fr
        return fr

    def frontier_word(self, path) -> str:
        return "".join(self.word[i - 1] for i in self.frontier(path))

    def iterable_nodes(self) -> tuple:
        """Nodes with both a left and a right sibling."""
        return self._iterables

    def is_iterable(self, path) -> bool:
        if not path:
            return False
        parent = self.node_at(path[:-1])
        return 0 < path[-1] < len(parent.children) - 1


def iterable_nodes(forest: Forest):
    return forest.iterable_nodes()


def frontier(forest: Forest, path):
    return set(forest.frontier(path))


def validate_forest(forest: Forest) -> Violation | None:
    """Check the forest laws; returns the first violation or None.

    Verifies leaf coverage of the word, the idempotent law at wide nodes,
    and consistency of the cached images.
    """
    if forest.root is None:
        return None if forest.word == "" else Violation((), "empty forest of a nonempty word")
    mu = forest.morphism
    positions = []
    result = None

    def walk(node, path):
        nonlocal result
        if result is not None:
            return mu.monoid.identity
        if isinstance(node, Leaf):
            positions.append((node.pos, node.letter, path))
            return mu.letter_image.get(node.letter)
        imgs = [walk(c, path + (i,)) for i, c in enumerate(node.children)]
        if result is not None:
            return mu.monoid.identity
        if len(imgs) >= 3:
            if len(set(imgs)) != 1 or not mu.monoid.is_idempotent(imgs[0]):
                result = Violation(
                    path, "children of a node with >= 3 children must share one idempotent image"
                )
                return mu.monoid.identity
        acc = imgs[0]
        for v in imgs[1:]:
            acc = mu.monoid.mul(acc, v)
        if forest._images.get(path) not in (None, acc):
            result = Violation(path, "cached image disagrees with the recomputed one")
        return acc

    walk(forest.root, ())
    if result is not None:
        return result
    if [p for p, _, _ in positions] != list(range(1, len(forest.word) + 1)):
        return Violation((), "leaf positions must be 1..|w| in order")
    for pos, letter, path in positions:
        if pos > len(forest.word) or forest.word[pos - 1] != letter:
            return Violation(path, f"leaf letter {letter!r} does not match the word at {pos}")
    return None


def partition_check(forest: Forest) -> dict[int, tuple]:
    """Frontiers of the iterable nodes plus the root partition the positions.

    Returns the owner map position -> node path; raises PartitionViolation
    if the family fails to be a partition.
    """
    owners: dict[int, tuple] = {}
    if forest.root is None:
        return owners
    for path in forest.iterable_nodes() + ((),):
        for i in forest.frontier(path):
            if i in owners:
                raise PartitionViolation(
                    f"position {i} owned by both {owners[i]} and {path}"
                )
            owners[i] = path
    missing = set(range(1, len(forest.word) + 1)) - owners.keys()
    if missing:
        raise PartitionViolation(f"positions {sorted(missing)} not covered")
    return owners


# -- independence (pairwise ancestor / adjacent-sibling freedom) ------------


def _is_ancestor(p, q) -> bool:
    return len(p) <= len(q) and q[: len(p)] == p


def _blocks(p, q) -> bool:
    """p is an ancestor, or the immediate left/right sibling of an ancestor, of q."""
    if _is_ancestor(p, q):
        return True
    for cut in range(1, len(q) + 1):
        anc = q[:cut]
        last = anc[-1]
        if p == anc[:-1] + (last - 1,) or p == anc[:-1] + (last + 1,):
            return True
    return False


def is_independent(forest: Forest, paths) -> bool:
    """Whether the multiset of nodes is independent: all iterable, pairwise
    neither ancestors nor adjacent siblings of ancestors of one another."""
    ps = [tuple(p) for p in paths]
    iters = set(forest.iterable_nodes())
    if any(p not in iters for p in ps):
        return False
    for i in range(len(ps)):
        for j in range(len(ps)):
            if i != j and _blocks(ps[i], ps[j]):
                return False
    return True


def linearize(forest: Forest, targets) -> Multicontext:
    """The multicontext keeping the frontiers of the target nodes concrete
    and abstracting everything else by monoid images.

    ``targets`` is a node path or a set of node paths; a set must be
    independent (or the root alone).
    """
    if isinstance(targets, tuple) and (not targets or isinstance(targets[0], int)):
        tset = {tuple(targets)}
    else:
        tset = {tuple(p) for p in targets}
    mu = forest.morphism
    ident = mu.monoid.identity
    if not tset:
        return Multicontext((forest.image(()),) if forest.root is not None else (ident,), (), ())
    if tset != {()} and () in tset:
        raise NotIndependent("the whole forest cannot be mixed with other nodes")
    if len(tset) > 1 and not is_independent(forest, tset):
        raise NotIndependent(f"nodes {sorted(tset)} are not independent")

    def lin(path, targets_here) -> Multicontext:
        if not targets_here:
            return Multicontext((forest.image(path),), (), ())
        if targets_here == {path}:
            return Multicontext((ident, ident), (forest.frontier_word(path),), (1,))
        if path in targets_here:
            raise NotIndependent(f"{path} overlaps other target nodes")
        node = forest.node_at(path)
        if isinstance(node, Leaf):
            raise NotIndependent(f"targets below a leaf at {path}")
        parts = []
        for i in range(len(node.children)):
            child = path + (i,)
            sub = {t for t in targets_here if _is_ancestor(child, t)}
            parts.append(lin(child, sub))
        return concat_contexts(mu, *parts)

    return lin((), tset)


# -- serialization -----------------------------------------------------------


def serialize_forest(forest: Forest) -> str:
    if forest.root is None:
        return ""

    def render(node) -> str:
        if isinstance(node, Leaf):
            return node.letter
        return OPEN + "".join(render(c) for c in node.children) + CLOSE

    if isinstance(forest.root, Leaf):
        return forest.root.letter
    return "".join(render(c) for c in forest.root.children)


def parse_forest(text: str, morphism: Morphism, word: str | None = None) -> Forest:
    """Parse the bracketed form; brackets around single letters are optional.

    The top-level sequence becomes the children of the root (a single item
    is the root itself).
    """
    pos = 0
    next_leaf = [0]

    def parse_seq(depth):
        nonlocal pos
        items = []
        while pos < len(text):
            ch = text[pos]
            if ch in (OPEN, "<"):
                pos += 1
                inner = parse_seq(depth + 1)
                if pos >= len(text) or text[pos] not in (CLOSE, ">"):
                    raise ParseError("unbalanced brackets")
                pos += 1
                if not inner:
                    raise ParseError("empty node")
                items.append(Inner(tuple(inner)))
            elif ch in (CLOSE, ">"):
                if depth == 0:
                    raise ParseError("unbalanced brackets")
                return items
            elif ch.isspace():
                pos += 1
            else:
                next_leaf[0] += 1
                items.append(Leaf(ch, next_leaf[0]))
                pos += 1
        if depth != 0:
            raise ParseError("unbalanced brackets")
        return items

    items = parse_seq(0)
    if not items:
        root = None
    elif len(items) == 1:
        root = items[0]
    else:
        root = Inner(tuple(items))
    leaves = []

    def collect(node):
        if isinstance(node, Leaf):
            leaves.append(node.letter)
        else:
            for c in node.children:
                collect(c)

    if root is not None:
        collect(root)
    factored = "".join(leaves)
    if word is not None and factored != word:
        raise ParseError(f"forest factors {factored!r}, not {word!r}")
    return Forest(morphism, factored, root)


def forest_dot(forest: Forest) -> str:
    """GraphViz rendering for inspection."""
    lines = ["digraph forest {", "  node [shape=box];"]
    if forest.root is not None:
        for path in forest.paths():
            node = forest.node_at(path)
            name = "n_" + "_".join(map(str, path)) if path else "n_root"
            img = forest.morphism.monoid.name_of(forest.image(path))
            if isinstance(node, Leaf):
                label = f"{node.letter}@{node.pos} : {img}"
            else:
                label = f"{img}" + (" (idem)" if forest.child_count(path) >= 3 else "")
            lines.append(f'  {name} [label="{label}"];')
            if path:
                parent = "n_" + "_".join(map(str, path[:-1])) if path[:-1] else "n_root"
                lines.append(f"  {parent} -> {name};")
    lines.append("}")
    return "\n".join(lines)


# -- construction ------------------------------------------------------------


def height_bound(morphism: Morphism) -> int:
    """Three times the size of the submonoid generated by the letter images."""
    return 3 * len(morphism.preimages)


def build_forest(morphism: Morphism, word: str) -> Forest:
    """Deterministic forest of the word, height <= ``height_bound``.

    A greedy pass handles almost every input; the exact interval search
    covers the remainder (existence at the bound is a theorem, so the
    search cannot fail).
    """
    if word == "":
        return Forest(morphism, word, None)
    bound = height_bound(morphism)
    items = [
        (Leaf(a, i + 1), morphism.letter_image[a], 1) for i, a in enumerate(word)
    ]
    root, _, h = _greedy_build(morphism, items)
    if h > bound:
        root = _exact_build(morphism, word, bound)
    return Forest(morphism, word, root)


def _merge(group):
    node = Inner(tuple(t for t, _, _ in group))
    return node


def _greedy_build(mu: Morphism, items):
    """Reduce the item sequence to one tree; returns (node, image, height)."""
    mul = mu.monoid.mul
    idem = mu.monoid.is_idempotent

    def image_of(group):
        acc = group[0][1]
        for _, m, _ in group[1:]:
            acc = mul(acc, m)
        return acc

    def join(group):
        if len(group) == 1:
            return group[0]
        return (_merge(group), image_of(group), 1 + max(h for _, _, h in group))

    while len(items) > 1:
        n = len(items)
        if n == 2:
            return join(items)

        # collapse maximal runs of items sharing one idempotent image
        out, i, changed = [], 0, False
        while i < n:
            j = i + 1
            if idem(items[i][1]):
                while j < n and items[j][1] == items[i][1]:
                    j += 1
            if j - i >= 2:
                out.append(join(items[i:j]))
                changed = True
            else:
                out.append(items[i])
            i = j
        if changed:
            items = out
            continue

        # cut at the most frequent prefix product
        prefix = [mu.monoid.identity]
        for _, m, _ in items:
            prefix.append(mul(prefix[-1], m))
        occurrences: dict[int, list[int]] = {}
        for b, v in enumerate(prefix):
            occurrences.setdefault(v, []).append(b)
        best = max(
            (bs for bs in occurrences.values() if len(bs) >= 2),
            key=lambda bs: (len(bs), -bs[0]),
            default=None,
        )
        if best is not None and best != [0, n]:
            cuts = ([0] if best[0] != 0 else []) + best + ([n] if best[-1] != n else [])
            if len(cuts) - 1 < n:  # the cut must shrink the sequence
                segments = []
                for lo, hi in zip(cuts, cuts[1:]):
                    segments.append(_greedy_build(mu, items[lo:hi]))
                # group the stretches between repeats when they share an idempotent
                lo_mid = 1 if best[0] != 0 else 0
                hi_mid = lo_mid + len(best) - 1
                mids = segments[lo_mid:hi_mid]
                if len(mids) >= 2 and len({m for _, m, _ in mids}) == 1 and idem(mids[0][1]):
                    mids = [join(mids)]
                items = segments[:lo_mid] + mids + segments[hi_mid:]
                if len(items) == 1:
                    return items[0]
                continue

        # no useful repeat: halve by pairing neighbours
        out = []
        i = 0
        while i < n:
            if i + 1 < n:
                out.append(join(items[i : i + 2]))
                i += 2
            else:
                out.append(items[i])
                i += 1
        items = out

    return items[0]


def _exact_build(mu: Morphism, word: str, bound: int):
    """Exact search: achievable intervals per height, then reconstruction."""
    import numpy as np

    n = len(word)
    mul = mu.monoid.mul
    letters = [mu.letter_image[a] for a in word]
    img = np.zeros((n + 1, n + 1), dtype=np.int16)
    for i in range(n):
        acc = letters[i]
        img[i][i + 1] = acc
        for j in range(i + 2, n + 1):
            acc = mul(acc, letters[j - 1])
            img[i][j] = acc

    idems = [e for e in range(mu.monoid.size) if mu.monoid.is_idempotent(e)]
    levels = [None, np.eye(n + 1, k=1, dtype=bool)]

    def bmm(a, b):
        return (a.astype(np.uint8) @ b.astype(np.uint8)) > 0

    h = 1
    while not levels[h][0, n]:
        if h >= bound:
            raise AssertionError("no forest within the height bound; builder bug")
        prev = levels[h]
        nxt = prev | bmm(prev, prev)
        for e in idems:
            b = prev & (img == e)
            plus = b.copy()
            for _ in range(int(np.ceil(np.log2(max(n, 2))))):
                plus = plus | bmm(plus, plus)
            nxt = nxt | bmm(b, bmm(b, plus))
        levels.append(nxt)
        h += 1

    def rebuild(i, j, h):
        if j == i + 1:
            return Leaf(word[i], j)
        while h > 1 and levels[h - 1][i, j]:
            h -= 1
        prev = levels[h - 1]
        for k in range(i + 1, j):
            if prev[i, k] and prev[k, j]:
                return Inner((rebuild(i, k, h - 1), rebuild(k, j, h - 1)))
        for e in idems:
            b = prev & (img == e)
            if not b[i].any():
                continue
            # reach[v][c]: a path v -> j with >= c more edges exists
            reach = np.zeros((n + 1, 4), dtype=bool)
            reach[j][0] = True
            for v in range(j - 1, i - 1, -1):
                for c in range(4):
                    down = max(c - 1, 0)
                    reach[v][c] = bool((b[v, v + 1 : j + 1] & reach[v + 1 : j + 1, down]).any())
            if not reach[i][3]:
                continue
            cuts, v, need = [i], i, 3
            while v != j:
                for u in range(v + 1, j + 1):
                    if b[v, u] and reach[u][max(need - 1, 0)]:
                        cuts.append(u)
                        v = u
                        need = max(need - 1, 0)
                        break
                else:
                    raise AssertionError("reconstruction lost its path")
            return Inner(tuple(rebuild(a, b_, h - 1) for a, b_ in zip(cuts, cuts[1:])))
        raise AssertionError("achievable interval without a decomposition")

    return rebuild(0, n, h)
