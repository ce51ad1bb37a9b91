import random
from itertools import combinations_with_replacement

import pytest

from marbleworks.errors import ArityMismatch, DegreeExceeded
from marbleworks.machines import eval_machine
from marbleworks.products import (
    Multicontext,
    SplitReport,
    compositions,
    concat_contexts,
    context_of_word,
    interpolate,
    prod_multicontext,
    prod_positions,
    prod_power_poly,
    prod_sets,
    realize_context,
    shape_count_poly,
    shape_of,
    shapes_enum,
    split_factors,
)

from conftest import all_words, random_machine, random_morphism, random_word


def test_prod_positions_level1(count_a):
    assert prod_positions(count_a, "ab", (1,)) == 1
    assert prod_positions(count_a, "ab", (2,)) == 0


def test_prod_positions_arity(count_ab_marble):
    with pytest.raises(ArityMismatch):
        prod_positions(count_ab_marble, "ab", (1,))


def test_prod_positions_vs_recursive_oracle():
    """k=2: the production equals the explicit two-level recursion."""
    rng = random.Random(3)
    for _ in range(25):
        mu = random_morphism(rng)
        machine = random_machine(rng, mu, 2)
        w = random_word(rng, mu.alphabet, 7, 2)
        for ms in combinations_with_replacement(range(1, len(w) + 1), 2):
            i1, i2 = ms
            h = machine.select(mu.eval(w[: i2 - 1]), w[i2 - 1], mu.eval(w[i2:]))
            sub = machine.externals[h]
            v = sub.base.value(mu.eval(w[: i1 - 1]), w[i1 - 1], mu.eval(w[i1:i2]))
            assert prod_positions(machine, w, ms) == v


def test_prod_sets_singletons_degenerate(count_ab_marble):
    w = "abab"
    assert prod_sets(count_ab_marble, w, [((1,), 1), ((2,), 1)]) == prod_positions(
        count_ab_marble, w, (1, 2)
    )


def test_prod_sets_full_set_is_f(count_ab_marble, block_square_sum):
    for machine in (count_ab_marble, block_square_sum):
        for w in all_words("ab", 6):
            if not w:
                continue
            full = tuple(range(1, len(w) + 1))
            assert prod_sets(machine, w, [(full, 2)]) == eval_machine(machine, w)


def test_prod_sets_split_identity(block_square_sum):
    """Splitting one set into two spreads the multiplicity over both parts."""
    w = "aabab"
    i_all = tuple(range(1, 6))
    j, j2 = (1, 2), (3, 4, 5)
    lhs = prod_sets(block_square_sum, w, [(i_all, 2)])
    rhs = sum(
        prod_sets(block_square_sum, w, [(j, r1), (j2, r2)])
        for r1, r2 in compositions(2, 2)
    )
    assert lhs == rhs


def test_prod_sets_rejects_overlap(count_ab_marble):
    with pytest.raises(ValueError):
        prod_sets(count_ab_marble, "abab", [((1, 2), 1), ((2, 3), 1)])


def test_prod_multicontext_level1_unfolds(count_a, mu_trivial_ab):
    ctx = Multicontext((0, 0), ("a",), (1,))
    assert prod_multicontext(count_a, ctx) == count_a.base.value(0, "a", 0)


def test_prod_multicontext_zero_arity(count_ab_marble):
    assert prod_multicontext(count_ab_marble, Multicontext((0,), (), ())) == 0
    with pytest.raises(ArityMismatch):
        prod_multicontext(count_ab_marble, Multicontext((0, 0), ("a",), (1,)))


def test_prod_multicontext_witness_independent(block_square_sum, mu_flag):
    """Different witness words for the abstract elements give one value."""
    ctx = Multicontext((2, 1, 2), ("a", "a"), (1, 1))
    base = prod_multicontext(block_square_sum, ctx)
    for v0, v1, v2 in [("b", "a", "b"), ("bb", "aaa", "abab"), ("ab", "aa", "ba")]:
        assert (mu_flag.eval(v0), mu_flag.eval(v1), mu_flag.eval(v2)) == (2, 1, 2)
        w = v0 + "a" + v1 + "a" + v2
        p1 = len(v0) + 1
        p2 = len(v0) + 1 + len(v1) + 1
        assert prod_sets(block_square_sum, w, [((p1,), 1), ((p2,), 1)]) == base


def test_realize_uses_canonical_preimages(mu_flag, block_square_sum):
    ctx = Multicontext((2, 0, 2), ("aa",), (2,))
    word, sets = realize_context(mu_flag, ctx)
    assert word == "baab"  # shortest witnesses: 2 -> "b", 0 -> ""
    assert sets == [(2, 3)]


def test_split_factors_trivial(count_ab_marble):
    left = Multicontext((0, 0), ("ab",), (2,))
    right = Multicontext((0,), (), ())
    rep = split_factors(count_ab_marble, left, ["a", "b"], 0, right)
    assert rep.equal and len(rep.terms) == 1

    rep = split_factors(count_ab_marble, Multicontext((0, 0), ("b",), (1,)), ["ab"], 1,
                        Multicontext((0,), (), ()))
    assert rep.equal and len(rep.terms) == 1


def test_split_factors_random():
    rng = random.Random(17)
    for _ in range(20):
        mu = random_morphism(rng)
        k = rng.randint(1, 3)
        machine = random_machine(rng, mu, k)
        parts = [random_word(rng, mu.alphabet, 2, 1) for _ in range(rng.randint(1, 3))]
        r = rng.randint(0, k)
        rest = k - r
        left = Multicontext(
            (rng.choice(sorted(mu.image_elements)),) * 2,
            (random_word(rng, mu.alphabet, 2, 1),),
            (rest,),
        )
        right = Multicontext((rng.choice(sorted(mu.image_elements)),), (), ())
        rep = split_factors(machine, left, parts, r, right)
        assert rep.equal, (parts, r, rep)


def test_shape_of_example():
    assert shape_of((0, 1, 0, 0, 0, 1, 2)) == (0, 1, 0, 1, 2)


def test_shapes_enum_small():
    assert shapes_enum(0) == ((0,),)
    assert set(shapes_enum(1)) == {(0, 1), (1, 0), (0, 1, 0)}


def test_shape_count_examples():
    assert all(shape_count_poly((0, 1), x) == 1 for x in range(3, 13))
    assert all(shape_count_poly((1, 0), x) == 1 for x in range(3, 13))
    assert all(shape_count_poly((0, 1, 0), x) == x - 2 for x in range(3, 13))


def test_shape_count_vs_enumeration():
    for r in range(0, 5):
        for x in range(1, 13):
            counts = {}
            for c in compositions(r, x):
                s = shape_of(c)
                counts[s] = counts.get(s, 0) + 1
            for s in shapes_enum(r):
                assert shape_count_poly(s, x) == counts.get(s, 0), (r, x, s)


def test_shapes_cover_all_long_tuples():
    """For x >= 2r+1 every tuple's shape is in the enumerated set."""
    for r in range(0, 4):
        shapes = set(shapes_enum(r))
        for x in range(2 * r + 1, 2 * r + 5):
            assert {shape_of(c) for c in compositions(r, x)} <= shapes


def test_interpolate_square():
    p = interpolate([(1, 1), (2, 4), (3, 9)])
    assert p.degree == 2 and p(12) == 144


def test_prod_power_poly_constant_when_r0(count_a, mu_trivial_ab):
    left = Multicontext((0,), (), ())
    right = Multicontext((0, 0), ("a",), (1,))
    poly = prod_power_poly(count_a, left, "ab", 0, right)
    assert poly.degree <= 0
    assert poly.coefficient(1) == 0


def test_prod_power_poly_slope_r1(count_a, mu_trivial_ab):
    left = Multicontext((0,), (), ())
    right = Multicontext((0,), (), ())
    poly = prod_power_poly(count_a, left, "ab", 1, right)
    e = mu_trivial_ab.eval("ab")
    sandwich = Multicontext((e, e), ("ab",), (1,))
    slope = prod_multicontext(count_a, sandwich)
    assert poly.coefficient(1) == slope == 1


def test_prod_power_poly_degree2(block_square_sum):
    left = Multicontext((2,), (), ())
    right = Multicontext((2,), (), ())
    poly = prod_power_poly(block_square_sum, left, "a", 2, right)
    assert poly.degree <= 2
    # agreement with direct evaluation at X = 5..10
    for x in range(5, 11):
        mid = context_of_word("a" * x, 2)
        direct = prod_multicontext(
            block_square_sum, concat_contexts(block_square_sum.morphism, left, mid, right)
        )
        assert poly(x) == direct


def test_prod_power_poly_random():
    rng = random.Random(23)
    done = 0
    while done < 15:
        mu = random_morphism(rng)
        k = rng.randint(1, 2)
        machine = random_machine(rng, mu, k)
        u = random_word(rng, mu.alphabet, 2, 1)
        if not mu.monoid.is_idempotent(mu.eval(u)):
            continue
        r = rng.randint(0, k)
        left = Multicontext((mu.monoid.identity, mu.monoid.identity),
                            (random_word(rng, mu.alphabet, 2, 1),), (k - r,))
        right = Multicontext((rng.choice(sorted(mu.image_elements)),), (), ())
        poly = prod_power_poly(machine, left, u, r, right)
        assert poly.degree <= r
        done += 1


def test_power_poly_shape_decomposition(block_square_sum, mu_flag):
    """The iterated-factor production decomposes along shapes with the
    shape-count weights."""
    left = Multicontext((2,), (), ())
    right = Multicontext((2,), (), ())
    mu = mu_flag
    for r in (0, 1, 2):
        for x in range(2 * r + 1, 2 * r + 6):
            whole = concat_contexts(mu, left, context_of_word("a" * x, r), right)
            lhs = prod_multicontext(block_square_sum, whole)
            rhs = 0
            for s in shapes_enum(r):
                mid = Multicontext((mu.monoid.identity,) * (len(s) + 1), ("a",) * len(s), s)
                rhs += shape_count_poly(s, x) * prod_multicontext(
                    block_square_sum, concat_contexts(mu, left, mid, right)
                )
            assert lhs == rhs, (r, x)
