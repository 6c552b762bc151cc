import random
from fractions import Fraction

import pytest

from kleinpair.catalog import normal_pairs
from kleinpair.fold import (FoldError, cartan_from_type, check_folded, check_root_system, diagram_automorphism,
                            dominant_representative, fold, fold_pair, group_order, h_orbit_equivalent,
                            mckay_cartan, orbit, root_system, simply_laced_type, synthetic_d4_s3,
                            synthetic_e6_c2)


def test_mckay_small():
    cd = mckay_cartan("C2")
    assert cd.cartan == [[2]] and cd.type == "A1"


@pytest.mark.parametrize("name,t", [("C5", "A4"), ("BD2", "D4"), ("BD5", "D7"), ("2T", "E6"), ("2O", "E7"), ("2I", "E8")])
def test_mckay_types(name, t):
    assert mckay_cartan(name).type == t


def test_not_ade():
    with pytest.raises(FoldError):
        simply_laced_type([[2, -2], [-2, 2]])


def test_root_counts():
    for t, n in [("A3", 12), ("D4", 24), ("E6", 72)]:
        R = root_system(t)
        assert len(R.roots) == n and check_root_system(R)


def test_automorphisms():
    assert all(p == sorted(p) for p in diagram_automorphism(("C2", "C4")))
    flip = diagram_automorphism(("C6", "BD3"))[1]
    assert flip == list(range(4, -1, -1))
    rot = [p for p in diagram_automorphism(("BD2", "2T")) if p != sorted(p)]
    assert len(rot) == 2


def test_a3_flip():
    F = fold(root_system("A3"), [[2, 1, 0]])
    assert F.type == "C2" and len(F.folded.roots) == 8
    assert group_order(F.h_gens_fixed) == 8
    assert check_folded(F)


def test_a2_flip_nonreduced():
    F = fold(root_system("A2"), [[1, 0]])
    assert F.type == "BC1" and len(F.folded.roots) == 4


def test_trivial_fold():
    R = root_system("D4")
    F = fold(R, [])
    assert len(F.folded.roots) == len(R.roots)
    assert group_order(F.h_gens_fixed) == group_order(R.weyl_gens)


@pytest.mark.parametrize("synth,t", [(synthetic_d4_s3, "G2"), (synthetic_e6_c2, "F4")])
def test_synthetic(synth, t):
    F = fold(*synth())
    assert F.type == t and check_folded(F)


@pytest.mark.parametrize("pair,t", [(("C4", "BD2"), "C2"), (("C6", "BD3"), "C3"), (("C3", "BD3"), "BC1"),
                                    (("BD2", "2T"), "G2"), (("2T", "2O"), "F4")])
def test_pair_folds(pair, t):
    F = fold_pair(pair)
    assert F.type == t and check_folded(F)


def test_catalog_folds():
    for a, b in normal_pairs():
        assert check_folded(fold_pair((a, b)))


def test_dominance():
    R = root_system("A3")
    x = ((Fraction(1), Fraction(1), Fraction(1)), (Fraction(0),) * 3)
    assert dominant_representative(R, x) == x
    rng = random.Random(7)
    y = (tuple(Fraction(rng.randint(-5, 5)) for _ in range(3)), tuple(Fraction(rng.randint(-5, 5)) for _ in range(3)))
    reps = {dominant_representative(R, w) for w in orbit(R.weyl_gens, y)}
    assert len(reps) == 1


def test_h_orbit():
    F = fold(root_system("A3"), [[2, 1, 0]])
    c = F.from_fixed_coords([Fraction(1), Fraction(3)])
    pt = (c, (Fraction(0),) * 3)
    assert h_orbit_equivalent(F, pt, pt)
    rep = dominant_representative(F.folded, pt)
    assert F.is_fixed(rep[0])
    for g in F.h_gens:
        from kleinpair.fold import mat_vec
        assert h_orbit_equivalent(F, pt, (mat_vec(g, c), pt[1]))
