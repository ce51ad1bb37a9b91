import random

import pytest
from hypothesis import given, strategies as st

from marbleworks.algebra import (
    FiniteMonoid,
    Morphism,
    NONEMPTY_FLAG_MONOID,
    monoid_validate,
    product_monoid,
    product_morphism,
)
from marbleworks.errors import BadIdentity, NotAssociative, NotInImage, UnknownLetter

from conftest import FLAG_TABLE, SIGN_TABLE, random_morphism, random_word


def test_trivial_monoid_valid():
    m = monoid_validate(((0,),), 0)
    assert m.size == 1 and m.identity == 0


def test_sign_monoid_valid(sign_monoid):
    assert sign_monoid.mul(1, 1) == 0  # (-1) * (-1) = 1
    assert sign_monoid.mul(2, 1) == 2  # 0 absorbs


def test_non_associative_rejected():
    # x.y = x except 1.1 = 0: (1.1).1 = 0.1 = 0 but 1.(1.1) = 1.0 = 1
    with pytest.raises(NotAssociative):
        monoid_validate(((0, 0), (1, 0)), 0)


def test_bad_identity_rejected():
    with pytest.raises(BadIdentity):
        monoid_validate(((0, 0), (0, 0)), 0)


def test_morphism_eval_examples(mu_sign):
    assert mu_sign.eval("") == 0
    assert mu_sign.eval("aa") == 0  # (-1)(-1) = 1
    assert mu_sign.eval("aacacbbcbbbc") == 2  # 0 absorbs


def test_unknown_letter(mu_sign):
    with pytest.raises(UnknownLetter):
        mu_sign.eval("axe")


def test_idempotence_index_examples(trivial_monoid, sign_monoid):
    assert trivial_monoid.idempotence_index() == 1
    assert sign_monoid.idempotence_index() == 2
    z3 = monoid_validate(tuple(tuple((i + j) % 3 for j in range(3)) for i in range(3)), 0)
    assert z3.idempotence_index() == 3


@pytest.mark.parametrize("table", [FLAG_TABLE, SIGN_TABLE])
def test_idempotence_index_minimal(table):
    m = monoid_validate(table, 0)
    iota = m.idempotence_index()
    assert all(m.is_idempotent(m.power(x, iota)) for x in range(m.size))
    for t in range(1, iota):
        assert any(not m.is_idempotent(m.power(x, t)) for x in range(m.size))


def test_preimage_words(mu_sign):
    assert mu_sign.preimage_word(0) == ()
    assert mu_sign.preimage_word(1) == ("a",)
    assert mu_sign.preimage_word(2) == ("b",)  # alphabet order a < b < c


def test_preimage_round_trip(mu_sign):
    for x in mu_sign.image_elements:
        assert mu_sign.eval(mu_sign.preimage_word(x)) == x


def test_not_in_image():
    m = monoid_validate(SIGN_TABLE, 0)
    mu = Morphism(("b",), m, {"b": 2})
    restricted, translation = mu.restrict_to_image()
    assert restricted.monoid.size == 2  # {1, 0}
    assert restricted.is_surjective
    assert translation[2] == restricted.letter_image["b"]
    with pytest.raises(NotInImage):
        mu.preimage_word(1)


@given(st.integers(0, 2**30), st.integers(0, 8), st.integers(0, 8))
def test_morphism_multiplicative(seed, n1, n2):
    rng = random.Random(seed)
    mu = random_morphism(rng)
    u = random_word(rng, mu.alphabet, n1, n1)
    v = random_word(rng, mu.alphabet, n2, n2)
    assert mu.eval(u + v) == mu.monoid.mul(mu.eval(u), mu.eval(v))


def test_prefix_suffix_images(mu_sign):
    w = "aacb"
    pre = mu_sign.prefix_images(w)
    suf = mu_sign.suffix_images(w)
    assert pre == [mu_sign.eval(w[:i]) for i in range(len(w) + 1)]
    assert suf == [mu_sign.eval(w[i:]) for i in range(len(w) + 1)]


def test_product_monoid(flag_monoid):
    prod = product_monoid(flag_monoid, NONEMPTY_FLAG_MONOID)
    assert prod.size == 6
    # componentwise multiplication
    x = 1 * 2 + 1  # (A, ne)
    y = 2 * 2 + 0  # (B, eps)
    assert prod.mul(x, y) == flag_monoid.mul(1, 2) * 2 + 1


def test_product_morphism(mu_flag):
    other = Morphism(("a", "b"), NONEMPTY_FLAG_MONOID, {"a": 1, "b": 1})
    paired = product_morphism(mu_flag, other)
    assert paired.eval("ab") == mu_flag.eval("ab") * 2 + 1
    assert paired.eval("") == paired.monoid.identity


def test_marked_extension(mu_flag):
    ext = mu_flag.extend_marked()
    assert ext.eval(("a", "^a")) == mu_flag.eval("aa")
    assert set(ext.alphabet) == {"a", "b", "^a", "^b"}
