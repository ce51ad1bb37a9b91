import random

import pytest

from marbleworks.algebra import mark_word
from marbleworks.errors import UnknownLetter
from marbleworks.machines import (
    Bimachine,
    blind_hadamard,
    blind_sum,
    eval_machine,
    level1,
    lift_machine,
    marble_from_blind,
    nested,
    scale_machine,
    table_from_fn,
    zero_machine,
)
from marbleworks.oracle import oracle_eval

from conftest import (
    all_words,
    brute_block_square_sum,
    letter_counter,
    random_machine,
    random_morphism,
    random_word,
)


def test_letter_count(count_a):
    assert eval_machine(count_a, "aba") == 2
    assert eval_machine(count_a, "") == 0


def test_block_square_sum(block_square_sum):
    assert eval_machine(block_square_sum, "aabaaab") == 13
    for w in all_words("ab", 8):
        assert eval_machine(block_square_sum, w) == brute_block_square_sum(w)


def test_pair_count(count_ab_marble):
    for w in all_words("ab", 7):
        assert eval_machine(count_ab_marble, w) == w.count("a") * w.count("b")


def test_empty_word_is_zero(count_ab_marble, block_square_sum):
    assert eval_machine(count_ab_marble, "") == 0
    assert eval_machine(block_square_sum, "") == 0


def test_unknown_letter(count_a):
    with pytest.raises(UnknownLetter):
        eval_machine(count_a, "ax")


def test_blind_machine_sees_whole_word(mu_trivial_ab):
    # at each a-position call |w|_b on the whole word: |w|_a * |w|_b
    mu = mu_trivial_ab
    machine = nested(
        "blind",
        mu,
        table_from_fn(mu, lambda m, a, m2: 0 if a == "a" else 1),
        (letter_counter(mu, "b", kind="blind"), zero_machine(mu, 1, "blind")),
    )
    for w in all_words("ab", 7):
        assert eval_machine(machine, w) == w.count("a") * w.count("b")


def test_pebble_machine_marked_word(mu_flag):
    # external sees the mark: score 3 at the marked position, 1 per plain a
    mu = mu_flag.extend_marked()
    ext = level1(
        "pebble",
        Bimachine(
            mu,
            table_from_fn(mu, lambda m, a, m2: 3 if a.startswith("^") else (1 if a == "a" else 0)),
        ),
    )
    top = nested("pebble", mu, table_from_fn(mu, lambda m, a, m2: 0), (ext,))
    # each of the |w| calls scores 3 for its own mark plus plain a's elsewhere
    for w in all_words("ab", 6):
        n_a = w.count("a")
        expect = sum(3 + (n_a - (1 if w[i] == "a" else 0)) for i in range(len(w)))
        assert eval_machine(top, w) == expect
    with pytest.raises(UnknownLetter):
        eval_machine(top, ("a", "^a"))


def test_pebble_vs_oracle_random():
    rng = random.Random(7)
    for _ in range(20):
        mu = random_morphism(rng).extend_marked()
        machine = random_machine(rng, mu, rng.randint(1, 2), kind="pebble")
        for _ in range(6):
            w = random_word(rng, tuple(a for a in mu.alphabet if not a.startswith("^")), 6)
            assert eval_machine(machine, w) == oracle_eval(machine, w)


def test_shared_morphism_enforced(mu_trivial_ab, mu_flag):
    inner = letter_counter(mu_flag, "a")
    with pytest.raises(ValueError):
        nested("marble", mu_trivial_ab, table_from_fn(mu_trivial_ab, lambda *_: 0), (inner,))


def test_selector_range_checked(mu_trivial_ab):
    inner = letter_counter(mu_trivial_ab, "a")
    with pytest.raises(ValueError):
        nested("marble", mu_trivial_ab, table_from_fn(mu_trivial_ab, lambda *_: 5), (inner,))


def test_scale_machine(block_square_sum):
    tripled = scale_machine(block_square_sum, 3)
    for w in all_words("ab", 6):
        assert eval_machine(tripled, w) == 3 * eval_machine(block_square_sum, w)


def test_blind_sum_and_hadamard(mu_trivial_ab):
    ca = letter_counter(mu_trivial_ab, "a", kind="blind")
    cb = letter_counter(mu_trivial_ab, "b", kind="blind")
    s = blind_sum(ca, cb)
    h = blind_hadamard(ca, cb)
    assert h.level == 2
    for w in all_words("ab", 7):
        assert eval_machine(s, w) == w.count("a") + w.count("b")
        assert eval_machine(h, w) == w.count("a") * w.count("b")


def test_lift_machine(mu_trivial_ab, mu_flag):
    from marbleworks.algebra import product_morphism

    paired = product_morphism(mu_trivial_ab, mu_flag)
    proj = [x // mu_flag.monoid.size for x in range(paired.monoid.size)]
    lifted = lift_machine(letter_counter(mu_trivial_ab, "a"), paired, proj)
    for w in all_words("ab", 6):
        assert eval_machine(lifted, w) == w.count("a")


def test_marble_from_blind_random():
    rng = random.Random(11)
    for _ in range(15):
        mu = random_morphism(rng, max_size=2)
        blind = random_machine(rng, mu, 2, kind="blind")
        converted = marble_from_blind(blind)
        assert converted.kind == "marble" and converted.level == 2
        for w in all_words(mu.alphabet, 6):
            assert eval_machine(converted, w) == eval_machine(blind, w), w
