import itertools
import random

import pytest

from wreathlab.conjugacy import Conjugate, NotConjugate, conjugates_within
from wreathlab.errors import ParseError
from wreathlab.magnus import (
    FreeWord,
    MetabelianElement,
    commutator,
    exponent_sums,
    generator,
    magnus_embed,
    magnus_group,
    metabelian_conjugate,
    metabelian_is_identity,
    parse_word,
)


def random_word(rng, m, length):
    return FreeWord(tuple((rng.randint(1, m), rng.choice((1, -1))) for _ in range(length)), m)


def test_parse_and_reduce():
    w = parse_word("x1 x2 X2 X1 x3")
    assert w.letters == ((3, 1),) and w.rank == 3
    assert str(parse_word("[x1,x2]")) == "x1 x2 X1 X2"
    assert parse_word("", 2) == FreeWord((), 2)
    assert parse_word("[[x1,x2],x1]", 2) == commutator(commutator(generator(1, 2), generator(2, 2)), generator(1, 2))
    for bad in ("x0", "x1 y2", "[x1 x2]", "[x1,x2", "x3"):
        with pytest.raises(ParseError):
            parse_word(bad, 2 if bad == "x3" else None)


def test_embedding_examples():
    W = magnus_group(2)
    assert magnus_embed(FreeWord((), 2)) == W.identity
    assert magnus_embed(generator(1, 2)) == W.element({(0, 0): (1, 0)}, (1, 0))
    assert magnus_embed(parse_word("[x1,x2]")) == W.element(
        {(0, 0): (1, -1), (1, 0): (0, 1), (0, 1): (-1, 0)}, (0, 0)
    )


def test_identity_examples():
    assert metabelian_is_identity(parse_word("x1 X1"))
    assert metabelian_is_identity(parse_word("[[x1,x2], x1[x1,x2]X1]"))
    assert not metabelian_is_identity(parse_word("[x1,x2]"))


def test_homomorphism(seed):
    rng = random.Random(seed)
    for _ in range(500):
        m = rng.randint(1, 3)
        u, v = random_word(rng, m, rng.randint(0, 8)), random_word(rng, m, rng.randint(0, 8))
        W = magnus_group(m)
        assert magnus_embed(u * v) == W.mul(magnus_embed(u), magnus_embed(v))
        assert magnus_embed(u.inverse()) == W.inv(magnus_embed(u))


def test_second_derived_subgroup_maps_to_identity(seed):
    rng = random.Random(seed)
    for _ in range(20):
        m = rng.randint(2, 3)
        w = FreeWord((), m)
        for _ in range(rng.randint(1, 3)):
            c1 = commutator(random_word(rng, m, 3), random_word(rng, m, 3))
            c2 = commutator(random_word(rng, m, 3), random_word(rng, m, 3))
            g = random_word(rng, m, 4)
            w = w * g * commutator(c1, c2) * g.inverse()
        assert metabelian_is_identity(w)


def test_basic_commutators_nontrivial():
    m = 5
    pairs = [(i, j) for i, j in itertools.permutations(range(1, m + 1), 2)]
    assert len(pairs) == 20
    for i, j in pairs:
        assert not metabelian_is_identity(commutator(generator(i, m), generator(j, m)))


def test_conjugation_equivariance(seed):
    rng = random.Random(seed)
    for _ in range(100):
        m = rng.randint(1, 3)
        w, u = random_word(rng, m, rng.randint(0, 6)), random_word(rng, m, rng.randint(0, 6))
        v = metabelian_conjugate(w, u * w * u.inverse())
        assert isinstance(v, Conjugate)
        W = magnus_group(m)
        assert W.conj(magnus_embed(w), v.witness) == magnus_embed(u * w * u.inverse())


def test_conjugacy_negatives():
    assert isinstance(metabelian_conjugate(parse_word("x1"), parse_word("x2")), NotConjugate)
    c = parse_word("[x1,x2]")
    v = metabelian_conjugate(c, c * c)
    assert isinstance(v, NotConjugate)
    # bounded brute force in the wreath image agrees
    W = magnus_group(2)
    assert magnus_embed(c * c) not in conjugates_within(W, magnus_embed(c), 3)


def test_abelianization(seed):
    rng = random.Random(seed)
    for _ in range(100):
        m = rng.randint(1, 3)
        w = random_word(rng, m, rng.randint(0, 10))
        top = magnus_embed(w).top
        assert (top if m > 1 else (top,)) == exponent_sums(w)


def test_metabelian_element_equality():
    a = MetabelianElement.of(parse_word("[[x1,x2],[x2,x1 x2]]"))
    b = MetabelianElement.of(FreeWord((), 2))
    assert a == b and hash(a) == hash(b)
