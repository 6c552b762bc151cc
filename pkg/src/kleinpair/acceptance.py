"""The acceptance criteria as runnable checks, shared by the CLI verify
command and the test-suite."""

from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from . import catalog
from .cbh import (CBHAlgebra, commutativity_check, confluence, first_order_bracket, full_filtered_dims,
                  invariant_embedding, molien_filtered, random_word_check, spherical_basis)
from .deform import pair_universal_deformation
from .fold import (check_folded, dominant_representative, fold, fold_pair, group_order, h_orbit_equivalent,
                   mckay_cartan, orbit, root_system, synthetic_d4_s3, synthetic_e6_c2)
from .grp import GroupSpec, build_group, certify_character_table, normal_pair
from .klein import (ade_type, build_kleinian, chain_identity, cyclic_q_value, derivation_space,
                    equivalent_up_to_rescaling, family_table, lift_psi, socle_map)
from .grp import UV
from .poly import RingSpec, verify_groebner

DEFAULT_SEED = 20240601


@dataclass
class CriterionResult:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] criterion {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _rank_of(spec: GroupSpec) -> int:
    return {"C": spec.n - 1, "BD": spec.n + 2, "T": 6, "O": 7, "I": 8}[spec.kind]


# ---------------------------------------------------------------------------

def criterion_1(seed: int) -> tuple[bool, str]:
    t = time.time()
    bad = []
    for g in catalog.families():
        K = build_kleinian(g)
        degs, listed, _ = family_table(K.group.spec)
        if tuple(K.weights) != degs or not equivalent_up_to_rescaling(K.f, listed):
            bad.append(g)
    dt = time.time() - t
    ok = not bad and dt <= 60
    return ok, f"{len(catalog.families())} groups, mismatches {bad or 'none'}, {dt:.1f}s of 60s"


def criterion_2(seed: int) -> tuple[bool, str]:
    bad = []
    for g in catalog.families():
        K = build_kleinian(g)
        spec = K.group.spec
        _, _, socle = family_table(spec)
        c = K.certificate
        ok = (K.milnor_dim == _rank_of(spec) and K.socle_monomial == socle and c.socle_dimension == 1
              and c.degree == K.deg_f - 4 == K.socle.wdeg() and c.pairing_nondegenerate)
        if not ok:
            bad.append(g)
    return not bad, f"Milnor dimension, socle and deg a_M = deg f - 4; mismatches {bad or 'none'}"


def criterion_3(seed: int) -> tuple[bool, str]:
    bad = []
    for a, b in catalog.normal_pairs():
        for d in range(-12, 0):
            if derivation_space(a, b, d).singularity_dim != 0:
                bad.append((a, b, d))
        for d in range(0, 7):
            D = derivation_space(a, b, d)
            if D.singularity_dim != D.equivariant_dim:
                bad.append((a, b, d))
    n = len(catalog.normal_pairs())
    return not bad, f"{n} pairs, degrees -12..6; failures {bad[:5] or 'none'}"


def criterion_4(seed: int) -> tuple[bool, str]:
    bad = []
    for a, b in catalog.normal_pairs():
        if not socle_map(a, b).alpha:
            bad.append((a, b))
    for k, l in [(2, 4), (2, 6), (3, 6), (2, 8)]:
        coeff, ex = cyclic_q_value(k, l)
        L = lift_psi(f"C{k}", f"C{l}")
        direct = L.pi1(L.q)
        want = Fraction(l, k)
        if coeff != want or ex != l - k or direct != direct.ring.monomial((ex, ex), want):
            bad.append(("q", k, l))
    chains = [("C2", "C4", "C8")] + [("C2", f"C{2 * n}", f"BD{n}") for n in range(2, 5)]
    for ch in chains:
        if not chain_identity(*ch):
            bad.append(ch)
    return not bad, f"alpha nonzero on {len(catalog.normal_pairs())} pairs, q values and {len(chains)} chains; failures {bad or 'none'}"


def _dihedral_relation_check(n: int) -> tuple[bool, bool, bool]:
    """(derived relation, printed relation after a -> a/4, polynomial identity)."""
    P = pair_universal_deformation((f"C{2 * n}", f"BD{n}"))
    R = P.small_ring
    xs, ys, zs = R.var("xs"), R.var("ys"), R.var("zs")
    base = xs * ys ** 2 - zs ** 2 - xs ** (n + 1) * 4
    derived = base
    printed = base
    for i in range(n):
        a = R.var(f"a{2 * i}")
        derived = derived - a * xs ** (i + 1) * 4
        printed = printed - a * xs ** (i + 1)
    big = P.big_ring
    x, y, z = big.var("x"), big.var("y"), big.var("z")
    emb_ok = list(P.embedding) == [x ** 2, y + z, x * y - x * z]
    surviving = sorted(P.params) == sorted(f"a{2 * i}" for i in range(n))
    U = P.QA.U.ring
    odd_I = sorted(map(str, P.QA.zero_avg_params)) == sorted(str(U.var(f"a{2 * i + 1}")) for i in range(n - 1))
    d_ok = P.smallF == derived and emb_ok and surviving and odd_I and P.verify()
    rescale = {f"a{2 * i}": R.var(f"a{2 * i}") / 4 for i in range(n)}
    p_ok = P.smallF.subs(rescale, R) == printed
    R3 = RingSpec(("x", "y", "z"), (2, 2 * n, 2 * n))
    X, Y, Z = R3.gens()
    xp, yp, zp = X ** 2, Y + Z, X * (Y - Z)
    ident = xp * yp ** 2 - zp ** 2 - xp ** (n + 1) * 4 == X ** 2 * (Y * Z - X ** (2 * n)) * 4
    return d_ok, p_ok, ident


def criterion_5(seed: int) -> tuple[bool, str]:
    bad = []
    for n, k in [(2, 2), (2, 3), (3, 2)]:
        P = pair_universal_deformation((f"C{n}", f"C{n * k}"))
        R = P.small_ring
        xs, ys, zs = R.var("xs"), R.var("ys"), R.var("zs")
        inner = xs ** n
        for i in range(n - 1):
            inner = inner + R.var(f"a{i}") * xs ** i
        want = inner ** k - ys * zs
        big = P.big_ring
        emb = [big.var("x"), big.var("y") ** k, big.var("z") ** k]
        if P.smallF != want or list(P.embedding) != emb or P.QA.zero_avg_params or not P.verify():
            bad.append(("cyclic", n, k))
    for n in range(2, 6):
        d_ok, p_ok, ident = _dihedral_relation_check(n)
        if not (d_ok and p_ok and ident):
            bad.append(("dihedral", n, d_ok, p_ok, ident))
    detail = ("cyclic (n,k) in (2,2),(2,3),(3,2) exact; dihedral n=2..5: derived coefficient -4 a_2i, "
              "printed form exact after a_2i -> a_2i/4, identity exact")
    return not bad, f"{detail}; failures {bad or 'none'}"


def criterion_6(seed: int) -> tuple[bool, str]:
    bad = []
    for g in catalog.families():
        spec = build_group(g).spec
        if mckay_cartan(g).type != ade_type(spec):
            bad.append(g)
    for n in range(2, 6):
        F = fold_pair((f"C{2 * n}", f"BD{n}"))
        if F.type != f"C{n}" or not check_folded(F):
            bad.append(("C", n))
        if n <= 4 and group_order(F.h_gens_fixed) != 2 ** n * factorial(n):
            bad.append(("|H|", n))
    for a, b, want in [("C3", "BD3", "BC1"), ("C5", "BD5", "BC2")]:
        F = fold_pair((a, b))
        if F.type != want or not check_folded(F):
            bad.append((a, b))
    for m in (1, 2):
        R = root_system(f"A{2 * m}")
        F = fold(R, [list(reversed(range(2 * m)))])
        if F.type != f"BC{m}" or not check_folded(F):
            bad.append(("A", 2 * m))
    for (R, autos), want in [(synthetic_d4_s3(), "G2"), (synthetic_e6_c2(), "F4")]:
        F = fold(R, autos)
        if F.type != want or not check_folded(F):
            bad.append(want)
    F = fold_pair(("BD2", "2T"))
    if F.type != "G2":
        bad.append("BD2<2T")
    F = fold_pair(("2T", "2O"))
    if F.type != "F4":
        bad.append("2T<2O")
    return not bad, f"McKay types for {len(catalog.families())} groups, C_n/BC_n/G2/F4 folds, |H| = 2^n n! for n <= 4; failures {bad or 'none'}"


def _random_fixed_point(F, rng: random.Random):
    k = len(F.fixed_basis)
    re = [Fraction(rng.randint(-3, 3), rng.choice((1, 2))) for _ in range(k)]
    im = [Fraction(rng.randint(-2, 2), rng.choice((1, 2))) if rng.random() < 0.5 else Fraction(0) for _ in range(k)]
    # clear denominators: orbit relations are invariant under scaling
    den = 1
    for x in re + im:
        den = math.lcm(den, x.denominator)
    re = [int(x * den) for x in re]
    im = [int(x * den) for x in im]
    return (F.from_fixed_coords(re), F.from_fixed_coords(im))


def _int_point(x):
    return (tuple(int(v) for v in x[0]), tuple(int(v) for v in x[1]))


def criterion_7(seed: int, samples: int = 100) -> tuple[bool, str]:
    rng = random.Random(seed)
    failures, pairs, checked = 0, 0, 0
    for a, b in catalog.normal_pairs():
        if _rank_of(GroupSpec.parse(a)) > 4:
            continue
        pairs += 1
        F = fold_pair((a, b))
        R = F.base
        for _ in range(samples):
            x = _int_point(_random_fixed_point(F, rng))
            y = _int_point(_random_fixed_point(F, rng))
            W = orbit(R.weyl_gens, x)
            H = orbit(F.h_gens, x)
            fixed_in_W = {p for p in W if F.is_fixed(p[0]) and F.is_fixed(p[1])}
            if fixed_in_W != H:
                failures += 1
            if (y in W) != (y in H):
                failures += 1
            if (y in H) != h_orbit_equivalent(F, x, y, cross_check=False):
                failures += 1
            d = dominant_representative(R, x)
            if not (F.is_fixed(d[0]) and F.is_fixed(d[1])):
                failures += 1
            checked += 1
    return failures == 0, f"{pairs} pairs of rank <= 4, {checked} seeded points (seed {seed}), failures {failures}"


def _generic_classes(G, rng: random.Random, c1_zero: bool | None = None):
    out = [Fraction(rng.randint(1, 19), rng.randint(1, 7)) * rng.choice((1, -1)) for _ in G.classes]
    if c1_zero:
        out[G.class_of[G.identity]] = Fraction(0)
    return out


def criterion_8(seed: int) -> tuple[bool, str]:
    rng = random.Random(seed)
    t = time.time()
    bad = []
    for g, D in [("C2", 6), ("C3", 6), ("C4", 6), ("BD2", 6), ("2T", 4)]:
        G = build_group(g)
        cc = _generic_classes(G, rng)
        full = CBHAlgebra.from_classes(G, cc)
        if not confluence(full, rng) or not random_word_check(full, 5, 10, rng):
            bad.append((g, "confluence"))
        if full_filtered_dims(full, D) != [(d + 1) * (d + 2) // 2 * G.order for d in range(D + 1)]:
            bad.append((g, "full dims"))
        sph = spherical_basis(CBHAlgebra.from_classes(G, cc, spherical=True), D)
        if sph.dims != molien_filtered(G, D):
            bad.append((g, "spherical dims"))
        for i in range(20):
            cc = _generic_classes(G, rng, c1_zero=(i % 2 == 0))
            A = CBHAlgebra.from_classes(G, cc, spherical=True)
            comm, _ = commutativity_check(A, D, generator_pairs=(g == "2T"))
            if comm != (A.identity_coefficient == 0):
                bad.append((g, "commutativity", i))
    dt = time.time() - t
    return not bad and dt <= 600, f"5 groups, 20-point sweeps; failures {bad or 'none'}; {dt:.0f}s of 600s"


def criterion_9(seed: int) -> tuple[bool, str]:
    rng = random.Random(seed)
    bad = []
    for a, b in [("C2", "C4"), ("C2", "BD2"), ("C4", "BD2")]:
        pair = normal_pair(a, b)
        for i in range(5):
            coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in pair.orbits]
            r = invariant_embedding(pair, coeffs, 8)
            if not r.ok:
                bad.append((a, b, i))
    return not bad, f"3 pairs, 5 points each, D = 8; failures {bad or 'none'}"


def criterion_10(seed: int) -> tuple[bool, str]:
    bad, total = [], 0
    for g in ("C2", "C3", "C4"):
        r = first_order_bracket(g, 8)
        total += len(r.pairs)
        if not r.pairs or any(e != {"z": 1} for e in r.extracted):
            bad.append(g)
    return not bad, f"extracted parameter equals z on {total} generator pairs; failures {bad or 'none'}"


def criterion_11(seed: int) -> tuple[bool, str]:
    rng = random.Random(seed)
    t = time.time()
    bad = []
    for g in catalog.families():
        K = build_kleinian(g)
        if not verify_groebner(K.jacobian) or not verify_groebner(K.relation_ideal()):
            bad.append(("groebner", g))
    for g in catalog.groups():
        G = build_group(g)
        A = CBHAlgebra.from_classes(G, _generic_classes(G, rng))
        if not confluence(A, rng, max_pairs=400):
            bad.append(("diamond", g))
        if not certify_character_table(G):
            bad.append(("characters", g))
        dmax = 12
        mol = G.molien(dmax)
        for d in range(dmax + 1):
            if len(G.invariant_basis(d)) != mol[d]:
                bad.append(("molien", g, d))
        p = UV.zero()
        for e in UV.monomials(6):
            p = p + UV.monomial(e, rng.randint(-3, 3))
        r = G.reynolds(p)
        if G.reynolds(r) != r or not G.is_invariant(r):
            bad.append(("reynolds", g))
    dt = time.time() - t
    return not bad and dt <= 300, f"{len(catalog.groups())} groups; failures {bad or 'none'}; {dt:.0f}s of 300s"


CRITERIA = {
    1: ("generator degrees and relations", criterion_1),
    2: ("socle certification", criterion_2),
    3: ("derivation spaces", criterion_3),
    4: ("socle map and cofactors", criterion_4),
    5: ("pair deformation formulas", criterion_5),
    6: ("McKay types and folding", criterion_6),
    7: ("orbit sampling", criterion_7),
    8: ("CBH flatness and commutativity", criterion_8),
    9: ("invariant embedding", criterion_9),
    10: ("first-order bracket", criterion_10),
    11: ("infrastructure", criterion_11),
}

SUITES = {
    "table": [1], "milnor": [2], "derivations": [3], "socle": [4], "deform": [5], "mckay": [6],
    "orbits": [7], "cbh": [8], "embedding": [9], "bracket": [10], "infra": [11],
    "all": list(CRITERIA),
}


def run_criterion(number: int, seed: int = DEFAULT_SEED) -> CriterionResult:
    name, fn = CRITERIA[number]
    t = time.time()
    try:
        ok, detail = fn(seed)
    except Exception as e:  # report, never hide
        ok, detail = False, f"error: {type(e).__name__}: {e}"
    return CriterionResult(number, name, ok, detail, time.time() - t)


def _run_one(args):
    return run_criterion(*args)


def run(numbers, seed: int = DEFAULT_SEED, workers: int | None = None) -> list[CriterionResult]:
    workers = workers or int(os.environ.get("KLEINPAIR_WORKERS", "1"))
    numbers = list(numbers)
    if workers > 1 and len(numbers) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_one, [(n, seed) for n in numbers]))
    else:
        results = [run_criterion(n, seed) for n in numbers]
    return sorted(results, key=lambda r: r.number)
