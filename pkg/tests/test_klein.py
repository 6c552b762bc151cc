from fractions import Fraction

import pytest

from kleinpair.klein import (ade_type, build_kleinian, chain_identity, derivation_space, lift_psi,
                             molien_vs_relation, socle_map)
from kleinpair.grp import GroupSpec


def test_c2_invariants():
    K = build_kleinian("C2")
    assert K.weights == (2, 2, 2)
    x, y, z = K.ring.gens()
    assert K.f == x ** 2 - y * z
    assert K.milnor_basis == [(0, 0, 0)]
    assert K.socle == K.ring.one()


def test_c4_socle():
    K = build_kleinian("C4")
    x, y, z = K.ring.gens()
    assert K.f == x ** 4 - y * z
    assert K.milnor_basis == [(0, 0, 0), (1, 0, 0), (2, 0, 0)]
    assert K.socle.lm() == (2, 0, 0)


def test_2t_degrees():
    K = build_kleinian("2T")
    assert sorted(K.weights) == [6, 8, 12]
    assert K.deg_f == 24
    assert K.milnor_dim == 6
    assert K.socle.wdeg() == 20


@pytest.mark.parametrize("name", ["C5", "BD2", "BD4", "2T", "2O", "2I"])
def test_relation_and_socle(name):
    K = build_kleinian(name)
    assert K.certificate.socle_dimension == 1 and K.certificate.pairing_nondegenerate
    assert K.milnor_dim == int(ade_type(K.group.spec)[1:])
    assert molien_vs_relation(K, 24)
    for g in K.gens:
        assert K.group.is_invariant(g)
    assert K.f.subs(list(K.gens)).is_zero()


def test_socle_map_cyclic():
    assert socle_map("C2", "C4").alpha == 2
    assert socle_map("C2", "C6").alpha == 3
    assert socle_map("C2", "BD2").alpha != 0


def test_psi_lift_and_chain():
    assert lift_psi("C2", "BD2").verify()
    assert chain_identity("C2", "C4", "BD2")


def test_derivations():
    assert derivation_space("C2", "BD2", -2).equivariant_dim == 0
    assert derivation_space("C3", "C3", 0).equivariant_dim == 2
    assert derivation_space("2I", "2I", 0).equivariant_dim == 1
