import random
from fractions import Fraction

import pytest

from kleinpair.cbh import (CBHAlgebra, commutativity_check, confluence, first_order_bracket, full_filtered_dims,
                           invariant_embedding, molien_filtered, random_word_check, reduce_words, spherical_basis)
from kleinpair.grp import build_group


def _class_coeffs(G, identity=0, minus_one=0):
    out = []
    for t in G.class_traces:
        out.append(identity if t == 2 else minus_one if t == -2 else 0)
    return out


def _minus_one(G):
    return next(i for i in range(G.order) if G.elements[i] == (-1, 0, 0, -1))


def test_single_rewrite():
    G = build_group("C2")
    A = CBHAlgebra.from_classes(G, _class_coeffs(G, identity=Fraction(5)))
    e = G.identity
    assert reduce_words(A, {("v", "u", e): 1}) == {(1, 1, e): 1, (0, 0, e): -5}


def test_center_anticommutes():
    G = build_group("C2")
    A = CBHAlgebra.from_classes(G, [0, 0])
    m = _minus_one(G)
    assert reduce_words(A, {(m, "u", G.identity): 1}) == {(1, 0, m): -1}


@pytest.mark.parametrize("name", ["C3", "BD2"])
def test_overlaps_resolve(name):
    G = build_group(name)
    rng = random.Random(3)
    A = CBHAlgebra.from_classes(G, [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in G.class_sizes])
    assert confluence(A, rng)
    assert random_word_check(A, 5, 20, rng)


def test_full_dims():
    G = build_group("C2")
    A = CBHAlgebra.from_classes(G, [1, 1])
    assert full_filtered_dims(A, 1)[1] == 6


def test_spherical_c2():
    G = build_group("C2")
    A = CBHAlgebra.from_classes(G, [Fraction(1, 2), Fraction(3)], spherical=True)
    B = spherical_basis(A, 2)
    assert B.dims == [1, 1, 4]
    assert B.flat


def test_spherical_2t():
    G = build_group("2T")
    A = CBHAlgebra.from_classes(G, [Fraction(k + 1, 3) for k in range(len(G.class_sizes))], spherical=True)
    B = spherical_basis(A, 6)
    assert B.flat and B.dims[6] - B.dims[5] == 1
    assert B.expected == molien_filtered(G, 6)


def test_commutativity():
    G = build_group("C2")
    ok, _ = commutativity_check(CBHAlgebra.from_classes(G, [0, 0], spherical=True), 6)
    assert ok
    ok, _ = commutativity_check(CBHAlgebra.from_classes(G, _class_coeffs(G, minus_one=1), spherical=True), 8)
    assert ok
    ok, witness = commutativity_check(CBHAlgebra.from_classes(G, _class_coeffs(G, identity=1), spherical=True), 4)
    assert not ok and witness is not None


@pytest.mark.parametrize("pair,coeffs", [(("C2", "C4"), [0, 1]), (("C2", "C4"), [0, 0]),
                                         (("C4", "BD2"), [Fraction(2, 3), Fraction(-1, 2), Fraction(5, 4)])])
def test_invariant_embedding(pair, coeffs):
    assert invariant_embedding(pair, coeffs, 8).ok


def test_bracket():
    r = first_order_bracket("C2", 4)
    assert r.consistent and r.extracted[0] == {"z": 1}
    assert first_order_bracket("C2", 4, scale=5).extracted[0] == {"z": 5}
