"""Kleinian invariant rings: generators, ADE relations, Milnor algebras with
socle certificates, lifts psi and cofactors q between nested groups, the socle
map, and derivation spaces."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .exact import Scalar, canonicalize, format_scalar, nullspace, rank, rref, solve_linear, InconsistentSystem
from .grp import UV, FinSL2Group, GroupSpec, build_group
from .poly import (GroebnerBasis, RingSpec, WPoly, buchberger, exact_divide, format_poly,
                   normal_form, quotient_basis, standard_monomials)


class KleinError(ValueError):
    pass


# family -> degrees (x, y, z), listed relation {exponent: coeff}, socle monomial
def family_table(spec: GroupSpec):
    n = spec.n
    if spec.kind == "C":
        return (2, n, n), {(n, 0, 0): 1, (0, 1, 1): 1}, (n - 2, 0, 0)
    if spec.kind == "BD":
        return (4, 2 * n, 2 * n + 2), {(1, 2, 0): 1, (0, 0, 2): 1, (n + 1, 0, 0): 1}, (n, 0, 0)
    if spec.kind == "T":
        return (6, 8, 12), {(4, 0, 0): 1, (0, 3, 0): 1, (0, 0, 2): 1}, (2, 1, 0)
    if spec.kind == "O":
        return (8, 12, 18), {(3, 1, 0): 1, (0, 3, 0): 1, (0, 0, 2): 1}, (4, 0, 0)
    return (12, 20, 30), {(5, 0, 0): 1, (0, 3, 0): 1, (0, 0, 2): 1}, (3, 1, 0)


def ade_type(spec: GroupSpec) -> str:
    return {"C": f"A{spec.n - 1}", "BD": f"D{spec.n + 2}", "T": "E6", "O": "E7", "I": "E8"}[spec.kind]


def rename(p: WPoly, ring: RingSpec) -> WPoly:
    """Same exponents, different variable names."""
    return WPoly(ring, p.terms, True)


def uv_vector(p: WPoly, d: int) -> list[Scalar]:
    return [p.coeff((d - r, r)) for r in range(d + 1)]


class Substituter:
    """Evaluates polynomials in (x, y, z) at fixed (u, v)-polynomials, caching powers."""

    def __init__(self, images: Sequence[WPoly]):
        self.images = list(images)
        self._pow: list[dict[int, WPoly]] = [{0: UV.one(), 1: g} for g in self.images]
        self._mono: dict[tuple, WPoly] = {}

    def power(self, i: int, k: int) -> WPoly:
        c = self._pow[i]
        if k not in c:
            c[k] = self.power(i, k - 1) * self.images[i]
        return c[k]

    def monomial(self, e: tuple) -> WPoly:
        if e not in self._mono:
            acc = UV.one()
            for i, k in enumerate(e):
                if k:
                    acc = acc * self.power(i, k)
            self._mono[e] = acc
        return self._mono[e]

    def __call__(self, p: WPoly) -> WPoly:
        acc = UV.zero()
        for e, c in p.terms.items():
            acc = acc + self.monomial(e).scale(c)
        return acc


@dataclass
class SocleCertificate:
    socle_dimension: int
    degree: int
    witnesses: dict  # milnor basis exponent -> (multiplier exponent, lambda)
    pairing_nondegenerate: bool


@dataclass
class KleinianData:
    group: FinSL2Group
    gens: tuple[WPoly, WPoly, WPoly]
    ring: RingSpec
    f: WPoly
    jacobian: GroebnerBasis
    milnor_basis: list[tuple]
    socle: WPoly
    socle_monomial: tuple
    certificate: SocleCertificate
    listed_f: dict

    @property
    def weights(self) -> tuple[int, ...]:
        return self.ring.weights

    @property
    def deg_f(self) -> int:
        return self.f.wdeg()

    @property
    def milnor_dim(self) -> int:
        return len(self.milnor_basis)

    @property
    def pi(self) -> Substituter:
        if not hasattr(self, "_pi"):
            self._pi = Substituter(self.gens)
        return self._pi

    def partials(self) -> list[WPoly]:
        return [self.f.diff(i) for i in range(3)]

    def relation_ideal(self) -> GroebnerBasis:
        if not hasattr(self, "_fgb"):
            self._fgb = buchberger([self.f])
        return self._fgb

    def ring_with(self, suffix: str) -> RingSpec:
        return RingSpec(tuple(v + suffix for v in self.ring.vars), self.ring.weights)

    def to_json(self) -> dict:
        return {
            "group": self.group.name,
            "ade": ade_type(self.group.spec),
            "generators": [format_poly(g) for g in self.gens],
            "weights": list(self.weights),
            "relation": format_poly(self.f),
            "deg_f": self.deg_f,
            "milnor_basis": [list(e) for e in self.milnor_basis],
            "socle": format_poly(self.socle),
            "socle_degree": self.socle.wdeg(),
        }


def _span_reduce(vectors: list[list], basis_rows: list[list], pivots: list[int]) -> list[list]:
    out = []
    for v in vectors:
        v = list(v)
        for r, p in zip(basis_rows, pivots):
            if v[p]:
                c = v[p]
                v = [canonicalize(a - c * b) for a, b in zip(v, r)]
        out.append(v)
    return out


def _select_generators(G: FinSL2Group, degrees: tuple[int, ...]) -> list[WPoly]:
    chosen: list[tuple[int, WPoly]] = []
    for d in sorted(set(degrees)):
        want = degrees.count(d)
        V = [uv_vector(p, d) for p in G.invariant_basis(d)]
        dec = []
        if chosen:
            wts = tuple(w for w, _ in chosen)
            sub = Substituter([p for _, p in chosen])
            for e in RingSpec(tuple(f"g{i}" for i in range(len(wts))), wts).monomials(d):
                dec.append(uv_vector(sub.monomial(e), d))
        drows, dpiv = rref(dec, d + 1) if dec else ([], [])
        reduced = [v for v in _span_reduce(V, drows, dpiv) if any(v)]
        new_rows = rref(reduced, d + 1)[0] if reduced else []
        if len(new_rows) != want or len(V) != len(drows) + len(new_rows):
            raise KleinError("generator degrees mismatch")
        for r in new_rows:
            chosen.append((d, WPoly(UV, {(d - i, i): c for i, c in enumerate(r)})))
    return [p for _, p in chosen]


def find_relation(gens: Sequence[WPoly], ring: RingSpec, deg: int) -> WPoly:
    """Unique-up-to-scalar polynomial of weighted degree deg vanishing on gens."""
    sub = Substituter(gens)
    mons = ring.monomials(deg)
    cols = [uv_vector(sub.monomial(e), deg) for e in mons]
    rows = [[c[r] for c in cols] for r in range(deg + 1)]
    ker = nullspace(rows, len(mons))
    if len(ker) != 1:
        raise KleinError(f"relation space has dimension {len(ker)}")
    return WPoly(ring, dict(zip(mons, ker[0])))


def _complete_square(rel: WPoly, gens: list[WPoly], ring: RingSpec) -> tuple[WPoly, list[WPoly]]:
    """Remove z-linear terms when the relation contains z^2."""
    a = rel.coeff((0, 0, 2))
    lin = {(e[0], e[1], 0): c for e, c in rel.terms.items() if e[2] == 1}
    if not a or not lin:
        return rel, gens
    L = WPoly(ring, lin)
    shift = Substituter(gens[:2] + [UV.zero()])(L) / (2 * a)
    new = gens[:2] + [gens[2] + shift]
    return find_relation(new, ring, rel.wdeg()), new


def equivalent_up_to_rescaling(rel: WPoly, listed: dict) -> bool:
    """Same support, and the diagonal rescaling x -> l_x x etc. together with an
    overall scalar can match coefficients (augmented exponent matrix of full row rank)."""
    if set(rel.terms) != set(listed):
        return False
    rows = [list(e) + [1] for e in listed]
    return rank(rows) == len(rows)


def build_kleinian(G: FinSL2Group | GroupSpec | str) -> KleinianData:
    if not isinstance(G, FinSL2Group):
        G = build_group(G)
    return _build_kleinian_cached(G.spec)


@lru_cache(maxsize=None)
def _build_kleinian_cached(spec: GroupSpec) -> KleinianData:
    G = build_group(spec)
    if G.order < 2:
        raise KleinError("group must be nontrivial")
    degrees, listed, socle_mono = family_table(G.spec)
    ring = RingSpec(("x", "y", "z"), degrees)
    gens = _select_generators(G, degrees)
    # assign selected generators (sorted by degree) to the slots x, y, z
    slots_sorted = sorted(range(3), key=lambda i: (degrees[i], i))
    deg_f = sum(degrees) - 2
    first = next(iter(listed))
    found = None
    for perm in itertools.permutations(range(3)):
        if any(gens[perm[i]].wdeg() != degrees[slots_sorted[i]] for i in range(3)):
            continue
        slot = [None] * 3
        for i in range(3):
            slot[slots_sorted[i]] = gens[perm[i]]
        rel = find_relation(slot, ring, deg_f)
        rel, slot = _complete_square(rel, slot, ring)
        if rel.coeff(first) and equivalent_up_to_rescaling(rel, listed):
            found = (rel / rel.coeff(first), slot)
            break
    if found is None:
        raise KleinError("relation does not match the ADE form")
    f, slot = found
    sub = Substituter(slot)
    assert sub(f).is_zero()
    J = buchberger([f.diff(i) for i in range(3)])
    milnor = quotient_basis(J)
    if milnor == "infinite":
        raise KleinError("Milnor algebra is infinite dimensional")
    socle = normal_form(ring.monomial(socle_mono), J)
    cert = certify_socle(J, milnor, socle, deg_f - 4)
    return KleinianData(G, tuple(slot), ring, f, J, milnor, socle, socle_mono, cert, listed)


def certify_socle(J: GroebnerBasis, milnor: list[tuple], socle: WPoly, top: int) -> SocleCertificate:
    ring = J.ring
    if socle.is_zero() or socle.wdeg() != top:
        raise KleinError("listed socle monomial is zero or has the wrong degree")
    by_deg: dict[int, list[tuple]] = {}
    for e in milnor:
        by_deg.setdefault(ring.wdeg(e), []).append(e)
    # socle space: kernel of multiplication by x, y, z on the quotient
    soc_dim = 0
    for d, mons in by_deg.items():
        rows = []
        for i in range(3):
            tgt = by_deg.get(d + ring.weights[i], [])
            if not tgt:
                continue
            col = {e: k for k, e in enumerate(tgt)}
            imgs = []
            for e in mons:
                img = normal_form(ring.monomial(e) * ring.gens()[i], J)
                vec = [Fraction(0)] * len(tgt)
                for m, c in img.terms.items():
                    vec[col[m]] = c
                imgs.append(vec)
            rows.extend([[imgs[j][r] for j in range(len(mons))] for r in range(len(tgt))])
        soc_dim += len(mons) - (rank(rows) if rows else 0)
    top_mons = by_deg.get(top, [])
    if soc_dim != 1 or len(top_mons) != 1:
        raise KleinError("socle is not simple")
    top_e = top_mons[0]
    scale = socle.coeff(top_e)
    witnesses = {}
    for e in milnor:
        for t in standard_monomials(J, top - ring.wdeg(e)) or ring.monomials(top - ring.wdeg(e)):
            prod = normal_form(ring.monomial(tuple(a + b for a, b in zip(e, t))), J)
            if prod:
                witnesses[e] = (t, canonicalize(prod.coeff(top_e) / scale))
                break
        else:
            raise KleinError("socle not essential")
    # Gorenstein pairing between complementary degrees
    ok = True
    for d, mons in by_deg.items():
        comp = by_deg.get(top - d, [])
        if len(comp) != len(mons):
            ok = False
            break
        mat = [[normal_form(ring.monomial(tuple(a + b for a, b in zip(e, t))), J).coeff(top_e)
                for t in comp] for e in mons]
        if rank(mat) != len(mons):
            ok = False
            break
    return SocleCertificate(soc_dim, top, witnesses, ok)


def molien_vs_relation(K: KleinianData, dmax: int = 24) -> bool:
    """Invariant dimensions per degree against the span of relation normal forms."""
    mol = K.group.molien(dmax)
    fgb = K.relation_ideal()
    for d in range(dmax + 1):
        std = standard_monomials(fgb, d)
        if len(std) != mol[d]:
            return False
        if std:
            vecs = [uv_vector(K.pi.monomial(e), d) for e in std]
            if rank(vecs) != mol[d]:
                return False
    return True


# ---------------------------------------------------------------------------
# lifts psi and cofactors q
# ---------------------------------------------------------------------------

@dataclass
class PsiLift:
    K1: KleinianData  # smaller group G1 (bigger ring)
    K2: KleinianData
    ring1: RingSpec
    ring2: RingSpec
    images: tuple[WPoly, WPoly, WPoly]  # psi(x2), psi(y2), psi(z2) in ring1
    q: WPoly

    def apply(self, p: WPoly) -> WPoly:
        """psi on a polynomial of ring2."""
        return p.subs(list(self.images), self.ring1)

    def f1(self) -> WPoly:
        return rename(self.K1.f, self.ring1)

    def f2(self) -> WPoly:
        return rename(self.K2.f, self.ring2)

    def pi1(self, p: WPoly) -> WPoly:
        return self.K1.pi(rename(p, self.K1.ring))

    def pi2(self, p: WPoly) -> WPoly:
        return self.K2.pi(rename(p, self.K2.ring))

    def verify(self) -> bool:
        ok = all(self.pi1(img) == g for img, g in zip(self.images, self.K2.gens))
        return ok and self.apply(self.f2()) == self.q * self.f1()

    def to_json(self) -> dict:
        return {"G1": self.K1.group.name, "G2": self.K2.group.name,
                "images": [format_poly(p) for p in self.images], "q": format_poly(self.q)}


def express_in(K: KleinianData, target: WPoly, ring: RingSpec | None = None) -> WPoly:
    """A polynomial P in K's (x, y, z) with pi(P) = target, reduced modulo f."""
    d = target.wdeg() if target else 0
    if not target.is_homogeneous():
        raise KleinError("expression not found")
    mons = K.ring.monomials(d)
    cols = [uv_vector(K.pi.monomial(e), d) for e in mons]
    rows = [[c[r] for c in cols] for r in range(d + 1)]
    try:
        sol = solve_linear(rows, uv_vector(target, d))
    except InconsistentSystem:
        raise KleinError("expression not found") from None
    P = WPoly(K.ring, dict(zip(mons, sol.particular)))
    P = normal_form(P, K.relation_ideal())
    return rename(P, ring) if ring is not None else P


def lift_psi(spec1: GroupSpec | str, spec2: GroupSpec | str, images: Sequence[WPoly] | None = None) -> PsiLift:
    K1, K2 = build_kleinian(spec1), build_kleinian(spec2)
    ring1, ring2 = K1.ring_with("1"), K2.ring_with("2")
    if images is None:
        images = tuple(express_in(K1, g, ring1) for g in K2.gens)
    psi_f2 = rename(K2.f, ring2).subs(list(images), ring1)
    try:
        q = exact_divide(psi_f2, rename(K1.f, ring1))
    except ValueError:
        raise KleinError("psi(f2) not divisible by f1") from None
    lift = PsiLift(K1, K2, ring1, ring2, tuple(images), q)
    return lift


def randomized_lift(lift: PsiLift, seed: int = 0) -> PsiLift:
    """Another lift psi + f1 * T with random homogeneous T."""
    rng = random.Random(seed)
    f1 = lift.f1()
    new = []
    for img, w in zip(lift.images, lift.K2.weights):
        d = w - f1.wdeg()
        if d >= 0:
            T = WPoly(lift.ring1, {e: Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for e in lift.ring1.monomials(d)})
            img = img + f1 * T
        new.append(img)
    return lift_psi(lift.K1.group.spec, lift.K2.group.spec, new)


def compose_lifts(l21: PsiLift, l32: PsiLift) -> PsiLift:
    """psi31 = psi21 o psi32."""
    imgs = tuple(rename(img, l21.ring2).subs(list(l21.images), l21.ring1) for img in l32.images)
    return lift_psi(l21.K1.group.spec, l32.K2.group.spec, imgs)


def chain_identity(spec1, spec2, spec3) -> bool:
    l21, l32 = lift_psi(spec1, spec2), lift_psi(spec2, spec3)
    l31 = compose_lifts(l21, l32)
    return l31.pi1(l31.q) == l32.pi1(l32.q) * l21.pi1(l21.q)


# ---------------------------------------------------------------------------
# the socle map
# ---------------------------------------------------------------------------

@dataclass
class SocleMapResult:
    alpha: Scalar
    image: WPoly  # pi1(q) * pi1(a_M1) in C[u,v]
    degree: int

    def to_json(self):
        return {"alpha": format_scalar(self.alpha), "degree": self.degree}


def socle_map(spec1, spec2, lift: PsiLift | None = None, representative: WPoly | None = None) -> SocleMapResult:
    """alpha with m21(a_M1) = alpha * a_M2 in C[u,v]^G1 / (pi2(df2))."""
    lift = lift or lift_psi(spec1, spec2)
    K1, K2, G1 = lift.K1, lift.K2, lift.K1.group
    b = representative if representative is not None else K1.socle
    image = lift.pi1(lift.q) * K1.pi(b)
    D = K2.deg_f - 4
    if image.wdeg() not in (-1, D):
        raise KleinError("degree mismatch in socle map")
    cols = [uv_vector(K2.pi(K2.socle), D)]
    for w, part in zip(K2.weights, K2.partials()):
        dp = K2.pi(part)
        rest = D - (K2.deg_f - w)
        if rest < 0:
            continue
        for inv in G1.invariant_basis(rest):
            cols.append(uv_vector(dp * inv, D))
    rows = [[c[r] for c in cols] for r in range(D + 1)]
    try:
        sol = solve_linear(rows, uv_vector(image, D))
    except InconsistentSystem:
        raise KleinError("image not proportional to socle") from None
    if any(k[0] for k in sol.kernel):
        raise KleinError("socle of G2 vanishes in the G1 quotient")
    alpha = sol.particular[0]
    if not alpha:
        raise KleinError("alpha vanishes")
    return SocleMapResult(alpha, image, D)


def cyclic_q_value(k: int, l: int) -> tuple[Fraction, int]:
    """(coefficient, exponent) with pi1(q) = coefficient * (uv)^exponent for C_k in C_l,
    via direct division of x^l - (yz)^(l/k) by x^k - yz."""
    R = RingSpec(("x", "y", "z"), (2, k, k))
    x, y, z = R.gens()
    q = exact_divide(x ** l - (y * z) ** (l // k), x ** k - y * z)
    uv = UV.monomial((1, 1))
    val = q.subs([uv, UV.monomial((k, 0)), UV.monomial((0, k))], UV)
    (e, c), = val.terms.items()
    assert e[0] == e[1]
    return c, e[0]


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------

@dataclass
class DerivationSpace:
    degree: int
    singularity_dim: int
    equivariant_dim: int
    basis: list  # triples (a, b, c) of (u, v)-polynomials


def derivation_space(spec1, spec2, d: int) -> DerivationSpace:
    """Homogeneous derivations of degree d from C[u,v]^G2 into C[u,v]^G1."""
    G1 = build_group(spec1)
    K2 = build_kleinian(spec2)
    blocks = []  # (slot, invariant basis)
    for w in K2.weights:
        blocks.append(G1.invariant_basis(w + d) if w + d >= 0 else [])
    target = K2.deg_f + d
    cols, labels = [], []
    partials = [K2.pi(p) for p in K2.partials()]
    for i, basis in enumerate(blocks):
        for b in basis:
            cols.append(uv_vector(partials[i] * b, target) if target >= 0 else [])
            labels.append((i, b))
    if cols and target >= 0:
        rows = [[c[r] for c in cols] for r in range(target + 1)]
        ker = nullspace(rows, len(cols))
    else:
        ker = [[Fraction(int(i == j)) for j in range(len(cols))] for i in range(len(cols))]
    basis = []
    for vec in ker:
        trip = [UV.zero(), UV.zero(), UV.zero()]
        for c, (i, b) in zip(vec, labels):
            if c:
                trip[i] = trip[i] + b * c
        basis.append(tuple(trip))
    if d + 1 < 0:
        eq = 0
    else:
        eq = int(G1.inner(G1.taut_character, G1.symmetric_power_character(d + 1)))
    return DerivationSpace(d, len(ker), eq, basis)
