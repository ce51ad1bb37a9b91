"""Shared fixtures: standard monoids, machines, and random generators.

The random generators draw monoids as closures of transformations of a
small point set, which yields a realistic mix of groups, semilattices, and
aperiodic monoids.
"""

import random

import pytest

from marbleworks.algebra import FiniteMonoid, Morphism
from marbleworks.machines import (
    Bimachine,
    level1,
    nested,
    table_from_fn,
    zero_machine,
)

# ({1, A, B}, join): A = nonempty all-a word, B = word containing b.
FLAG_TABLE = ((0, 1, 2), (1, 1, 2), (2, 2, 2))
SIGN_TABLE = ((0, 1, 2), (1, 0, 2), (2, 2, 2))


@pytest.fixture(scope="session")
def trivial_monoid():
    return FiniteMonoid(((0,),), 0, ("1",))


@pytest.fixture(scope="session")
def mu_trivial_ab(trivial_monoid):
    return Morphism(("a", "b"), trivial_monoid, {"a": 0, "b": 0})


@pytest.fixture(scope="session")
def flag_monoid():
    return FiniteMonoid.validate(FLAG_TABLE, 0, ("1", "A", "B"))


@pytest.fixture(scope="session")
def mu_flag(flag_monoid):
    return Morphism(("a", "b"), flag_monoid, {"a": 1, "b": 2})


@pytest.fixture(scope="session")
def sign_monoid():
    return FiniteMonoid.validate(SIGN_TABLE, 0, ("1", "-1", "0"))


@pytest.fixture(scope="session")
def mu_sign(sign_monoid):
    return Morphism(("a", "b", "c"), sign_monoid, {"a": 1, "b": 2, "c": 2})


def letter_counter(mu, letter, kind="marble"):
    return level1(
        kind, Bimachine(mu, table_from_fn(mu, lambda m, a, m2: 1 if a == letter else 0))
    )


@pytest.fixture(scope="session")
def count_a(mu_trivial_ab):
    return letter_counter(mu_trivial_ab, "a")


@pytest.fixture(scope="session")
def count_ab_marble(mu_trivial_ab):
    """2-marble machine for |w|_a * |w|_b: an a-position counts earlier b's,
    a b-position counts earlier a's (each unordered pair lands once)."""
    mu = mu_trivial_ab
    count_b1 = letter_counter(mu, "b")
    count_a1 = letter_counter(mu, "a")
    sel = table_from_fn(mu, lambda m, a, m2: 0 if a == "a" else 1)
    return nested("marble", mu, sel, (count_b1, count_a1))


@pytest.fixture(scope="session")
def block_square_sum(mu_flag):
    """2-marble machine for a^n1 b ... a^nm b -> sum of ni^2: the j-th letter
    of an a-run contributes 2j - 1."""
    mu = mu_flag
    run_weight = level1(
        "marble",
        Bimachine(
            mu,
            table_from_fn(
                mu,
                lambda m, a, m2: (1 if m2 == 0 else 2 if m2 == 1 else 0) if a == "a" else 0,
            ),
        ),
    )
    sel = table_from_fn(mu, lambda m, a, m2: 0 if a == "a" else 1)
    return nested("marble", mu, sel, (run_weight, zero_machine(mu, 1, "marble")))


def brute_block_square_sum(word):
    total = run = 0
    for ch in word:
        if ch == "a":
            run += 1
        else:
            total += run * run
            run = 0
    return total + run * run


def all_words(alphabet, max_len):
    yield ""
    frontier = [""]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for a in alphabet:
                nxt.append(w + a)
        yield from nxt
        frontier = nxt


# -- random generators ---------------------------------------------------------


def random_monoid(rng: random.Random, max_size=6, points=3) -> FiniteMonoid:
    while True:
        gens = [
            tuple(rng.randrange(points) for _ in range(points))
            for _ in range(rng.randint(1, 2))
        ]
        ident = tuple(range(points))
        elems, seen, frontier, ok = [ident], {ident}, [ident], True
        while frontier and ok:
            nxt = []
            for f in frontier:
                for g in gens:
                    h = tuple(f[g[i]] for i in range(points))
                    if h not in seen:
                        seen.add(h)
                        elems.append(h)
                        nxt.append(h)
                        if len(elems) > max_size:
                            ok = False
                            break
                if not ok:
                    break
            frontier = nxt
        if not ok:
            continue
        index = {f: i for i, f in enumerate(elems)}
        table = tuple(
            tuple(index[tuple(f[g[i]] for i in range(points))] for g in elems)
            for f in elems
        )
        return FiniteMonoid.validate(table, 0)


def random_morphism(rng: random.Random, alphabet=("a", "b"), max_size=4) -> Morphism:
    monoid = random_monoid(rng, max_size)
    images = {a: rng.randrange(monoid.size) for a in alphabet}
    return Morphism(tuple(alphabet), monoid, images).restrict_to_image()[0]


def random_machine(rng: random.Random, mu: Morphism, level: int, kind="marble", max_value=2, width=2):
    if level == 1:
        return level1(
            kind,
            Bimachine(mu, table_from_fn(mu, lambda m, a, m2: rng.randint(0, max_value))),
        )
    externals = tuple(
        random_machine(rng, mu, level - 1, kind, max_value, width) for _ in range(width)
    )
    sel = table_from_fn(mu, lambda m, a, m2: rng.randrange(width))
    return nested(kind, mu, sel, externals)


def random_word(rng: random.Random, alphabet, max_len, min_len=0) -> str:
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(min_len, max_len)))
