"""Universal deformations of Kleinian singularities, the quotient-group action
on them, the invariant ideal I and universal deformations of normal pairs.

Sign convention: F = f + sum_j a_j u_j (matching the worked examples, where
the cyclic case reads x^n + sum a_i x^i - yz).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import Scalar, canonicalize, format_scalar, nullspace, rref, solve_linear, InconsistentSystem
from .grp import NormalPair, build_group, normal_pair
from .klein import KleinianData, build_kleinian, express_in, rename
from .poly import RingSpec, WPoly, buchberger, format_poly, normal_form, standard_monomials


class DeformError(ValueError):
    pass


def _param_names(K: KleinianData) -> list[str]:
    if K.group.spec.kind == "C":
        return [f"a{e[0]}" for e in K.milnor_basis]
    return [f"a{j}" for j in range(K.milnor_dim)]


@dataclass
class UniversalDeformation:
    K: KleinianData
    ring: RingSpec  # x, y, z, parameters
    params: list[str]
    bigF: WPoly

    @property
    def param_weights(self) -> list[int]:
        return list(self.ring.weights[3:])

    @property
    def nparams(self) -> int:
        return len(self.params)

    def param_index(self, name: str) -> int:
        return self.ring.index(name)

    def lift(self, p: WPoly) -> WPoly:
        """A polynomial in K's (x, y, z) viewed in the total ring."""
        return p.embed(self.ring) if p.ring.vars == ("x", "y", "z") else p

    def at_zero(self, p: WPoly) -> WPoly:
        zero = {n: self.ring.zero() for n in self.params}
        return p.subs(zero, self.ring)

    def to_json(self) -> dict:
        return {"group": self.K.group.name, "F": format_poly(self.bigF),
                "params": self.params, "param_weights": self.param_weights}


def universal_deformation(K: KleinianData | str) -> UniversalDeformation:
    if not isinstance(K, KleinianData):
        K = build_kleinian(K)
    names = _param_names(K)
    weights = [K.deg_f - K.ring.wdeg(e) for e in K.milnor_basis]
    if any(w <= 0 for w in weights):
        raise DeformError("non-positive parameter weight")
    ring = K.ring.extend(names, weights)
    F = K.f.embed(ring)
    for name, e in zip(names, K.milnor_basis):
        F = F + ring.var(name) * ring.monomial(tuple(e) + (0,) * len(names))
    assert F.is_homogeneous()
    return UniversalDeformation(K, ring, names, F)


def recover_parameters(U: UniversalDeformation, perturbed: WPoly) -> list[Scalar]:
    """Values b_j with perturbed = f + sum b_j u_j modulo the Jacobian ideal
    (first-order reduction of a presentation with constant coefficients)."""
    K = U.K
    delta = normal_form(perturbed - K.f, K.jacobian)
    out = []
    for e in K.milnor_basis:
        out.append(delta.coeff(e))
    rest = delta - WPoly(K.ring, {e: c for e, c in zip(K.milnor_basis, out)})
    if rest:
        raise DeformError("perturbation outside the Milnor span")
    return out


# ---------------------------------------------------------------------------
# the quotient action
# ---------------------------------------------------------------------------

def _param_degree(U: UniversalDeformation, e: tuple) -> int:
    return sum(e[3:])


def _split_param_degree(U: UniversalDeformation, p: WPoly) -> dict[int, WPoly]:
    out: dict[int, dict] = {}
    for e, c in p.terms.items():
        out.setdefault(sum(e[3:]), {})[e] = c
    return {k: WPoly(p.ring, v, True) for k, v in out.items()}


@dataclass
class Tau:
    """One automorphism of the total ring: images of x, y, z and the parameters."""
    images: dict[str, WPoly]
    scale: Scalar  # tau(F) = scale * F

    def apply(self, p: WPoly) -> WPoly:
        return p.subs(self.images, p.ring)

    def compose(self, other: "Tau") -> "Tau":
        """self o other."""
        return Tau({k: self.apply(v) for k, v in other.images.items()}, canonicalize(self.scale * other.scale))


def _monomials_with_params(U: UniversalDeformation, weight: int, pdeg: int, params_only=False) -> list[tuple]:
    out = []
    for e in U.ring.monomials(weight):
        if sum(e[3:]) == pdeg and (not params_only or not any(e[:3])):
            out.append(e)
    return out


def solve_tau(U: UniversalDeformation, level0: Sequence[WPoly]) -> Tau:
    """Extend a graded automorphism of C[x,y,z] preserving (f) to an automorphism
    tau of the total ring with tau(F) = lambda F, order by order in the
    parameter degree."""
    ring, K = U.ring, U.K
    imgs = {v: U.lift(p) for v, p in zip(("x", "y", "z"), level0)}
    f_img = K.f.subs(list(level0), K.ring)
    lam = None
    for e, c in K.f.terms.items():
        lam = canonicalize(f_img.coeff(e) / c)
        break
    if f_img != K.f * lam:
        raise DeformError("level-0 map does not preserve the relation")
    for n in U.params:
        imgs[n] = ring.zero()
    F = U.bigF
    max_order = max(1, K.deg_f // min(U.param_weights)) if U.params else 0
    partials = [U.lift(K.f.diff(i)).subs(imgs, ring) for i in range(3)]
    u_imgs = [U.lift(K.ring.monomial(e)).subs(imgs, ring) for e in K.milnor_basis]
    for k in range(1, max_order + 1):
        resid = (F.subs(imgs, ring) - F * lam)
        part = _split_param_degree(U, resid).get(k)
        if part is None or part.is_zero():
            continue
        # unknowns: X_i of weight w_i, parameter degree k; A_j of parameter degree k
        unknowns = []
        for i, w in enumerate(K.weights):
            for e in _monomials_with_params(U, w, k):
                unknowns.append(("xyz"[i], e, partials[i]))
        for j, n in enumerate(U.params):
            for e in _monomials_with_params(U, U.param_weights[j], k, params_only=True):
                unknowns.append((n, e, u_imgs[j]))
        targets = sorted({t for _, e, coef in unknowns for t in coef.mul_term(e, 1).terms} | set(part.terms),
                         key=ring.key)
        col = {t: i for i, t in enumerate(targets)}
        cols = []
        for _, e, coef in unknowns:
            vec = [Fraction(0)] * len(targets)
            for t, c in coef.mul_term(e, 1).terms.items():
                vec[col[t]] = c
            cols.append(vec)
        rows = [[c[r] for c in cols] for r in range(len(targets))]
        rhs = [canonicalize(-part.coeff(t)) for t in targets]
        try:
            sol = solve_linear(rows, rhs)
        except InconsistentSystem:
            raise DeformError("ansatz unsolvable") from None
        for (name, e, _), c in zip(unknowns, sol.particular):
            if c:
                imgs[name] = imgs[name] + ring.monomial(e, c)
    if F.subs(imgs, ring) != F * lam:
        raise DeformError("ansatz unsolvable")
    return Tau(imgs, lam)


@dataclass
class QuotientAction:
    pair: NormalPair
    U: UniversalDeformation
    taus: list[Tau]  # indexed by coset
    invariant_params: list[WPoly]  # z_1..z_{s-1}, polynomials in the parameters
    zero_avg_params: list[WPoly]  # generators of I
    invariant_names: list[str]

    def tau(self, q: int) -> Tau:
        return self.taus[q]

    def ideal_I(self) -> list[WPoly]:
        return self.zero_avg_params

    def check_group_law(self) -> bool:
        """tau_g o tau_h = tau_gh on parameters exactly and on x, y, z modulo (F)."""
        gb = buchberger([self.U.bigF])
        Q = self.pair.q_table
        for g in range(len(Q)):
            for h in range(len(Q)):
                comp = self.taus[g].compose(self.taus[h])
                target = self.taus[Q[g][h]]
                for name in self.U.params:
                    if comp.images[name] != target.images[name]:
                        return False
                for v in "xyz":
                    if not normal_form(comp.images[v] - target.images[v], gb).is_zero():
                        return False
        return True

    def check_membership(self) -> bool:
        gb = buchberger([self.U.bigF])
        return all(normal_form(t.apply(self.U.bigF), gb).is_zero() for t in self.taus)

    def parameter_action(self, q: int) -> dict[str, str]:
        return {n: format_poly(self.taus[q].images[n]) for n in self.U.params}

    def to_json(self) -> dict:
        return {
            "pair": self.pair.name,
            "action": [{v: format_poly(t.images[v]) for v in ["x", "y", "z"] + self.U.params} for t in self.taus],
            "invariant_params": [format_poly(p) for p in self.invariant_params],
            "I": [format_poly(p) for p in self.zero_avg_params],
        }


def _level0_action(pair: NormalPair, K1: KleinianData, q: int) -> list[WPoly]:
    g = pair.coset_rep(q)
    G2 = pair.G2
    return [express_in(K1, G2.act(g, X)) for X in K1.gens]


def _average(taus: Sequence[Tau], p: WPoly) -> WPoly:
    acc = p.ring.zero()
    for t in taus:
        acc = acc + t.apply(p)
    return acc / len(taus)


def quotient_action(pair: NormalPair | tuple, U: UniversalDeformation | None = None) -> QuotientAction:
    if not isinstance(pair, NormalPair):
        pair = normal_pair(*pair)
    K1 = build_kleinian(pair.G1.spec)
    U = U or universal_deformation(K1)
    taus = [solve_tau(U, _level0_action(pair, K1, q)) for q in range(pair.q_order)]
    inv, zero = [], []
    ring = U.ring
    for w in sorted(set(U.param_weights)):
        names = [n for n, pw in zip(U.params, U.param_weights) if pw == w]
        m = len(names)
        # averaged linear part on the weight-w parameter space
        P = [[Fraction(0)] * m for _ in range(m)]
        for t in taus:
            for j, n in enumerate(names):
                img = t.images[n]
                for i, n2 in enumerate(names):
                    P[i][j] = canonicalize(P[i][j] + img.coeff(ring.var(n2).lm()) / len(taus))
        img_basis = rref([[P[i][j] for i in range(m)] for j in range(m)], m)[0]
        ker = nullspace([row[:] for row in P], m)
        for vec in img_basis:
            lin = sum((ring.var(n) * c for n, c in zip(names, vec) if c), ring.zero())
            inv.append(_average(taus, lin))
        for vec in (rref(ker, m)[0] if ker else []):
            lin = sum((ring.var(n) * c for n, c in zip(names, vec) if c), ring.zero())
            zero.append(lin - _average(taus, lin))
    inv_names = []
    for z in inv:
        if len(z.terms) == 1 and list(z.terms.values())[0] == 1 and sum(z.lm()) == 1:
            inv_names.append(ring.vars[z.lm().index(1)])
        else:
            inv_names.append(f"b{len(inv_names)}")
    return QuotientAction(pair, U, taus, inv, zero, inv_names)


# ---------------------------------------------------------------------------
# pair deformations
# ---------------------------------------------------------------------------

def _invert_parameters(QA: QuotientAction) -> tuple[RingSpec, dict[str, WPoly]]:
    """Express every parameter a_j in the coordinates z (invariant ones named,
    zero-average ones set to 0), over the ring x, y, z, invariant z's."""
    U = QA.U
    zs = QA.invariant_params + QA.zero_avg_params
    if len(zs) != U.nparams:
        raise DeformError("parameter split has the wrong size")
    inv_w = [z.wdeg() for z in QA.invariant_params]
    small = RingSpec(("x", "y", "z") + tuple(QA.invariant_names), U.ring.weights[:3] + tuple(inv_w))
    # z = L a + N(a); solve a = L^-1 (z - N(a)) iteratively with z_I = 0
    m = U.nparams
    L = [[z.coeff(U.ring.var(n).lm()) for n in U.params] for z in zs]
    zvals = [small.var(n) for n in QA.invariant_names] + [small.zero()] * len(QA.zero_avg_params)
    ident = [[int(i == j) for j in range(m)] for i in range(m)]
    Linv_cols = []
    for j in range(m):
        Linv_cols.append(solve_linear(L, ident[j]).particular)
    Linv = [[Linv_cols[j][i] for j in range(m)] for i in range(m)]
    nonlin = []
    for z in zs:
        nonlin.append(WPoly(U.ring, {e: c for e, c in z.terms.items() if sum(e[3:]) > 1}, True))
    a = [small.zero()] * m
    for _ in range(64):
        sub = {"x": small.var("x"), "y": small.var("y"), "z": small.var("z")}
        sub.update({n: a[i] for i, n in enumerate(U.params)})
        rhs = [zvals[i] - (nonlin[i].subs(sub, small) if nonlin[i] else small.zero()) for i in range(m)]
        new = [sum((rhs[j] * Linv[i][j] for j in range(m) if Linv[i][j]), small.zero()) for i in range(m)]
        if new == a:
            break
        a = new
    else:
        raise DeformError("parameter inversion did not converge")
    return small, {n: a[i] for i, n in enumerate(U.params)}


@dataclass
class PairDeformation:
    QA: QuotientAction
    big_ring: RingSpec  # x, y, z, surviving parameters
    bigF: WPoly  # F modulo I
    small_ring: RingSpec  # x', y', z' (named xs, ys, zs), surviving parameters
    smallF: WPoly
    embedding: tuple[WPoly, WPoly, WPoly]  # x', y', z' in the big ring
    K2: KleinianData
    taus: list[Tau]  # the quotient action modulo I

    @property
    def params(self) -> list[str]:
        return list(self.big_ring.vars[3:])

    def verify(self) -> bool:
        gb = buchberger([self.bigF])
        sub = dict(zip(self.small_ring.vars[:3], self.embedding))
        sub.update({n: self.big_ring.var(n) for n in self.params})
        img = self.smallF.subs(sub, self.big_ring)
        ok = normal_form(img, gb).is_zero()
        for e in self.embedding:
            for t in self.taus:
                ok = ok and normal_form(t.apply(e) - e, gb).is_zero()
        return ok

    def at_zero(self):
        """Generator images with all parameters set to zero."""
        zero = {n: self.big_ring.zero() for n in self.params}
        return [e.subs(zero, self.big_ring) for e in self.embedding]

    def to_json(self) -> dict:
        return {
            "pair": self.QA.pair.name,
            "F": format_poly(self.bigF),
            "I": [format_poly(p) for p in self.QA.zero_avg_params],
            "embedding": {v: format_poly(e) for v, e in zip(self.small_ring.vars[:3], self.embedding)},
            "F_small": format_poly(self.smallF),
        }


def pair_universal_deformation(pair: NormalPair | tuple, degree_bound: int | None = None) -> PairDeformation:
    if not isinstance(pair, NormalPair):
        pair = normal_pair(*pair)
    QA = quotient_action(pair)
    U, K1 = QA.U, QA.U.K
    K2 = build_kleinian(pair.G2.spec)
    bound = degree_bound if degree_bound is not None else 2 * K2.deg_f
    if max(K2.weights) > bound:
        raise DeformError("generators not found below degree bound")
    big, amap = _invert_parameters(QA)
    sub = {"x": big.var("x"), "y": big.var("y"), "z": big.var("z")}
    sub.update(amap)
    FI = U.bigF.subs(sub, big)
    gb = buchberger([FI])
    taus = []
    for t in QA.taus:
        imgs = {v: t.images[v].subs(sub, big) for v in "xyz"}
        for n in big.vars[3:]:
            imgs[n] = big.var(n)
        taus.append(Tau(imgs, t.scale))
    # invariant generators: averaged classical lifts
    gens = []
    for X2 in K2.gens:
        p = express_in(K1, X2).embed(big)
        p = _average(taus, p)
        gens.append(normal_form(p, gb))
    small = RingSpec(("xs", "ys", "zs") + big.vars[3:], K2.weights + big.weights[3:])
    f2 = rename(K2.f, RingSpec(("xs", "ys", "zs"), K2.weights)).embed(small)
    gsub = {"xs": gens[0], "ys": gens[1], "zs": gens[2]}
    gsub.update({n: big.var(n) for n in big.vars[3:]})
    base = normal_form(f2.subs(gsub, big), gb)
    mons = [e for e in small.monomials(K2.deg_f) if sum(e[3:]) > 0]
    cols, targets = [], set(base.terms)
    nfs = []
    for e in mons:
        nf = normal_form(small.monomial(e).subs(gsub, big), gb)
        nfs.append(nf)
        targets |= set(nf.terms)
    targets = sorted(targets, key=big.key)
    rows = [[nf.coeff(t) for nf in nfs] for t in targets]
    rhs = [canonicalize(-base.coeff(t)) for t in targets]
    try:
        sol = solve_linear(rows, rhs) if mons else None
    except InconsistentSystem:
        raise DeformError("relation among invariant generators not found") from None
    if sol is None and base:
        raise DeformError("relation among invariant generators not found")
    F2 = f2
    if sol is not None:
        if sol.kernel:
            raise DeformError("relation among invariant generators not unique")
        for e, c in zip(mons, sol.particular):
            if c:
                F2 = F2 + small.monomial(e, c)
    return PairDeformation(QA, big, FI, small, F2, tuple(gens), K2, taus)


# ---------------------------------------------------------------------------
# specialization
# ---------------------------------------------------------------------------

@dataclass
class Specialization:
    big_gb: object
    small_gb: object
    embedding: list[WPoly]
    big_dims: list[int]
    small_dims: list[int]
    big_expected: list[int]
    small_expected: list[int]
    embedding_ok: bool

    @property
    def flat(self) -> bool:
        return self.big_dims == self.big_expected and self.small_dims == self.small_expected and self.embedding_ok


def _filtered_dims(gb, ring: RingSpec, dmax: int) -> list[int]:
    return [len(standard_monomials(gb, d)) for d in range(dmax + 1)]


def specialize(P: PairDeformation, values: dict[str, object], dmax: int = 12) -> Specialization:
    R1 = RingSpec(("x", "y", "z"), P.big_ring.weights[:3])
    R2 = RingSpec(("xs", "ys", "zs"), P.small_ring.weights[:3])
    vals = {n: canonicalize(values.get(n, 0)) for n in P.params}
    s1 = {v: R1.var(v) for v in "xyz"}
    s1.update({n: R1.const(c) for n, c in vals.items()})
    s2 = {v: R2.var(v) for v in ("xs", "ys", "zs")}
    s2.update({n: R2.const(c) for n, c in vals.items()})
    F1 = P.bigF.subs(s1, R1)
    F2 = P.smallF.subs(s2, R2)
    gb1, gb2 = buchberger([F1]), buchberger([F2])
    emb = [e.subs(s1, R1) for e in P.embedding]
    ok = normal_form(F2.subs(dict(zip(("xs", "ys", "zs"), emb)), R1), gb1).is_zero()
    G1, G2 = P.QA.pair.G1, P.QA.pair.G2
    return Specialization(gb1, gb2, emb, _filtered_dims(gb1, R1, dmax), _filtered_dims(gb2, R2, dmax),
                          G1.molien(dmax), G2.molien(dmax), ok)
