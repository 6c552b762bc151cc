import pytest

from kleinpair.deform import (DeformError, pair_universal_deformation, quotient_action, recover_parameters,
                              solve_tau, specialize, universal_deformation)
from kleinpair.grp import trivial_pair


def test_universal_deformation_an():
    U = universal_deformation("C4")
    x = U.ring.var("x")
    assert U.params == ["a0", "a1", "a2"]
    assert U.param_weights == [8, 6, 4]
    assert U.bigF == U.K.f.embed(U.ring) + sum((U.ring.var(f"a{i}") * x ** i for i in range(3)), U.ring.zero())


def test_recover_parameters():
    U = universal_deformation("BD3")
    K = U.K
    x, y, z = K.ring.gens()
    pert = K.f + 5 * K.ring.one() + 3 * y  # y is in the Milnor span
    vals = recover_parameters(U, pert)
    assert sorted(v for v in vals if v) == [3, 5]
    assert not any(recover_parameters(U, K.f + x * K.f.diff(0)))


@pytest.mark.parametrize("pair", [("C2", "C4"), ("C4", "BD2"), ("C3", "BD3"), ("BD2", "2T")])
def test_group_law_and_membership(pair):
    QA = quotient_action(pair)
    assert QA.check_group_law()
    assert QA.check_membership()


def test_cyclic_small_relation():
    P = pair_universal_deformation(("C2", "C4"))
    assert P.verify()
    xs, ys, zs, a0 = (P.small_ring.var(v) for v in ("xs", "ys", "zs", "a0"))
    assert P.smallF == (xs ** 2 + a0) ** 2 - ys * zs
    x, y, z = (P.big_ring.var(v) for v in "xyz")
    assert list(P.embedding) == [x, y ** 2, z ** 2]


def test_dihedral_small_relation():
    P = pair_universal_deformation(("C4", "BD2"))
    assert P.verify()
    analyzed = [str(g) for g in P.QA.zero_avg_params]
    assert analyzed == ["1 * a1^1"]
    xs, ys, zs = (P.small_ring.var(v) for v in ("xs", "ys", "zs"))
    a0, a2 = P.small_ring.var("a0"), P.small_ring.var("a2")
    assert P.smallF == xs * ys ** 2 - zs ** 2 - 4 * xs ** 3 - 4 * a2 * xs ** 2 - 4 * a0 * xs


def test_trivial_pair_identity():
    P = pair_universal_deformation(trivial_pair("BD2"))
    assert P.verify()
    assert P.QA.zero_avg_params == []


def test_at_zero_is_singular_pair():
    P = pair_universal_deformation(("C6", "BD3"))
    x, y, z = (P.big_ring.var(v) for v in "xyz")
    assert P.at_zero() == [x ** 2, y + z, x * y - x * z]


def test_specialization_flat():
    P = pair_universal_deformation(("C2", "C4"))
    S = specialize(P, {"a0": 3})
    assert S.flat


def test_degree_bound():
    with pytest.raises(DeformError):
        pair_universal_deformation(("C2", "BD2"), degree_bound=2)


def test_tau_rejects_non_automorphism():
    U = universal_deformation("C3")
    x, y, z = U.K.ring.gens()
    with pytest.raises(DeformError):
        solve_tau(U, [y, x, z])
