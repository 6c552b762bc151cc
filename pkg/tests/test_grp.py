import pytest

from kleinpair.exact import zeta
from kleinpair.grp import GroupSpec, NotNormal, build_group, certify_character_table, normal_pair
from kleinpair.poly import RingSpec

UV = RingSpec(("u", "v"), (1, 1))


def test_c2():
    G = build_group("C2")
    assert G.order == 2
    assert sorted(map(tuple, G.char_table)) == [(1, -1), (1, 1)]


@pytest.mark.parametrize("name,order,classes", [("BD2", 8, 5), ("2T", 24, 7), ("2O", 48, 8), ("2I", 120, 9)])
def test_orders_and_classes(name, order, classes):
    G = build_group(name)
    assert G.order == order
    assert len(G.class_sizes) == classes
    assert certify_character_table(G)


def test_c3_linear_characters():
    G = build_group("C3")
    assert G.degrees() == [1, 1, 1]
    vals = {v for row in G.char_table for v in row}
    assert vals == {1, zeta(3), zeta(3) ** 2}


def test_degrees():
    assert sorted(build_group("BD2").degrees()) == [1, 1, 1, 1, 2]
    assert sorted(build_group("2T").degrees()) == [1, 1, 1, 2, 2, 2, 3]


def test_reynolds():
    u, v = UV.gens()
    for n in (2, 3, 5):
        assert build_group(f"C{n}").reynolds(u * v) == u * v
    assert build_group("C2").reynolds(u * u) == u * u
    for name in ("C3", "BD2", "2T", "2I"):
        assert build_group(name).reynolds(u).is_zero()


def test_molien_matches_invariant_basis():
    G = build_group("BD3")
    m = G.molien(12)
    assert all(len(G.invariant_basis(d)) == m[d] for d in range(13))


def test_parse_aliases():
    assert GroupSpec.parse("D3") == GroupSpec("BD", 3)
    assert GroupSpec.parse("2o") == GroupSpec("O")
    with pytest.raises(ValueError):
        GroupSpec.parse("X7")


def test_cyclic_pair_abelian():
    p = normal_pair("C2", "C4")
    assert p.q_order == 2
    assert all(perm == list(range(len(perm))) for perm in p.class_action)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_dihedral_pair_swaps_inverse_classes(n):
    p = normal_pair(f"C{2 * n}", f"BD{n}")
    assert p.q_order == 2
    G1 = p.G1
    flip = p.class_action[1]
    assert flip == [G1.class_inverse[k] for k in range(len(flip))]


def test_c3_in_bd3_quotient_order_four():
    p = normal_pair("C3", "BD3")
    assert p.q_order == 4
    inv = [p.G1.class_inverse[k] for k in range(3)]
    assert any(perm == inv for perm in p.class_action)


def test_not_normal():
    with pytest.raises(ValueError):
        normal_pair("C4", "2T")
