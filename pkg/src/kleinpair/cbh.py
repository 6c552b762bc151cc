"""CBH algebras e (C<u,v> # G / (uv - vu - c)) e with c central in C[G].

Elements of the full algebra are dicts {(a, b, g): coeff} standing for
sum coeff * u^a v^b g (PBW order).  Spherical work happens in A e, where the
group part is absorbed: keys (a, b, 0) stand for u^a v^b e.  Group elements
act on u, v tautologically, g u = (g.u) g with the left convention of grp.
Coefficients may be scalars, FirstOrder elements or anything with + and *.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .exact import Scalar, canonicalize, rref, rank as exact_rank
from .grp import FinSL2Group, NormalPair, build_group, normal_pair
from .klein import build_kleinian
from .poly import RingSpec, WPoly

UV = RingSpec(("u", "v"), (1, 1))


class CBHError(ValueError):
    pass


# ---------------------------------------------------------------------------
# base ring elements modulo B^{>2}
# ---------------------------------------------------------------------------

class FirstOrder:
    """c0 + sum_p c_p * p with all products of parameters set to zero."""

    __slots__ = ("c0", "lin")

    def __init__(self, c0=0, lin: dict | None = None):
        self.c0 = canonicalize(c0)
        self.lin = {k: canonicalize(v) for k, v in (lin or {}).items() if v}

    @staticmethod
    def param(name: str) -> "FirstOrder":
        return FirstOrder(0, {name: 1})

    def _co(self, o):
        return o if isinstance(o, FirstOrder) else FirstOrder(o)

    def __add__(self, o):
        o = self._co(o)
        lin = dict(self.lin)
        for k, v in o.lin.items():
            lin[k] = lin.get(k, 0) + v
        return FirstOrder(self.c0 + o.c0, lin)

    __radd__ = __add__

    def __neg__(self):
        return FirstOrder(-self.c0, {k: -v for k, v in self.lin.items()})

    def __sub__(self, o):
        return self + (-self._co(o))

    def __rsub__(self, o):
        return self._co(o) - self

    def __mul__(self, o):
        if not isinstance(o, FirstOrder):
            o = canonicalize(o)
            return FirstOrder(self.c0 * o, {k: v * o for k, v in self.lin.items()})
        lin = {k: v * o.c0 for k, v in self.lin.items()}
        for k, v in o.lin.items():
            lin[k] = lin.get(k, 0) + v * self.c0
        return FirstOrder(self.c0 * o.c0, lin)

    __rmul__ = __mul__

    def __truediv__(self, o):
        return self * (1 / canonicalize(o))

    def __bool__(self):
        return bool(self.c0) or bool(self.lin)

    def __eq__(self, o):
        o = self._co(o)
        return self.c0 == o.c0 and self.lin == o.lin

    def __repr__(self):
        return f"FirstOrder({self.c0}, {self.lin})"


# ---------------------------------------------------------------------------
# the algebra
# ---------------------------------------------------------------------------

def _add_into(acc: dict, d: dict, s=1) -> None:
    for k, v in d.items():
        w = v * s
        if k in acc:
            w = acc[k] + w
            if w:
                acc[k] = w
            else:
                del acc[k]
        elif w:
            acc[k] = w


class CBHAlgebra:
    """C<u,v> # G / (uv - vu - c).  ``c`` maps group-element indices to
    coefficients and must be constant on conjugacy classes."""

    def __init__(self, G: FinSL2Group | str, c: dict | Sequence, spherical: bool = False):
        self.G = G if isinstance(G, FinSL2Group) else build_group(G)
        if isinstance(c, dict):
            self.c = [c.get(i, 0) for i in range(self.G.order)]
        else:
            self.c = list(c)
        for cl in self.G.classes:
            if any(self.c[i] != self.c[cl[0]] for i in cl):
                raise CBHError("parameter not central")
        self.support = [i for i, x in enumerate(self.c) if x]
        self.spherical = spherical  # right factor e: group part collapses
        self.mats = [(g[0], g[2], g[1], g[3]) for g in self.G.elements]  # images (u -> a u + b v, v -> c u + d v)
        self._lv: dict = {}
        self._lg: dict = {}

    @classmethod
    def from_classes(cls, G, class_coeffs: Sequence, spherical=False) -> "CBHAlgebra":
        G = G if isinstance(G, FinSL2Group) else build_group(G)
        c = {}
        for cl, x in zip(G.classes, class_coeffs):
            for i in cl:
                c[i] = x
        return cls(G, c, spherical)

    def register_matrix(self, g) -> int:
        self.mats.append((g[0], g[2], g[1], g[3]))
        return len(self.mats) - 1

    @property
    def identity_coefficient(self):
        return self.c[self.G.identity]

    def _gright(self, h: int, g: int) -> int:
        if self.spherical:
            return g
        if h >= self.G.order:
            raise CBHError("extra matrices need the A e representation")
        return self.G.mult[h][g]

    # -- left multiplication by generators -------------------------------------
    def lu(self, x: dict, k: int = 1) -> dict:
        return {(a + k, b, g): v for (a, b, g), v in x.items()} if k else x

    def _lv_mono(self, a: int, b: int, g: int) -> dict:
        key = (a, b, g)
        r = self._lv.get(key)
        if r is None:
            r = {(a, b + 1, g): 1}
            for k in range(a):
                m = a - 1 - k
                cm = {}
                for h in self.support:
                    _add_into(cm, self._lg_mono(h, m, b, g), self.c[h])
                _add_into(r, self.lu(cm, k), -1)
            self._lv[key] = r
        return r

    def lv(self, x: dict) -> dict:
        out: dict = {}
        for (a, b, g), v in x.items():
            _add_into(out, self._lv_mono(a, b, g), v)
        return out

    def llin(self, alpha, beta, x: dict) -> dict:
        out: dict = {}
        if alpha:
            _add_into(out, self.lu(x), alpha)
        if beta:
            _add_into(out, self.lv(x), beta)
        return out

    def _lg_mono(self, h: int, a: int, b: int, g: int) -> dict:
        """h(u)^a h(v)^b (h g), for h an element index or a registered matrix."""
        key = (h, a, b, g)
        r = self._lg.get(key)
        if r is None:
            m = self.mats[h]
            if a:
                r = self.llin(m[0], m[1], self._lg_mono(h, a - 1, b, g))
            elif b:
                r = self.llin(m[2], m[3], self._lg_mono(h, 0, b - 1, g))
            else:
                r = {(0, 0, self._gright(h, g)): 1}
            self._lg[key] = r
        return r

    def lg(self, h: int, x: dict) -> dict:
        out: dict = {}
        for (a, b, g), v in x.items():
            _add_into(out, self._lg_mono(h, a, b, g), v)
        return out

    def lmono(self, a: int, b: int, x: dict) -> dict:
        for _ in range(b):
            x = self.lv(x)
        return self.lu(x, a)

    def mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for (a, b, g), v in x.items():
            gy = y if (self.spherical or g == self.G.identity) else self.lg(g, y)
            _add_into(out, self.lmono(a, b, gy), v)
        return out

    # -- spherical elements ---------------------------------------------------
    def e_left(self, x: dict) -> dict:
        out: dict = {}
        n = self.G.order
        for h in range(n):
            _add_into(out, self.lg(h, x), Fraction(1, n))
        return out

    def sph(self, a: int, b: int) -> dict:
        """e u^a v^b e in A e form."""
        return self.e_left({(a, b, 0): 1})

    def sph_poly(self, p: WPoly) -> dict:
        x = {(e[0], e[1], 0): c for e, c in p.terms.items()}
        return self.e_left(x)

    def commutator(self, x: dict, y: dict) -> dict:
        out = self.mul(x, y)
        _add_into(out, self.mul(y, x), -1)
        return out


def degree(x: dict) -> int:
    return max((a + b for a, b, _ in x), default=-1)


# ---------------------------------------------------------------------------
# word rewriting (independent oracle for the normal form)
# ---------------------------------------------------------------------------

def _redexes(word: tuple) -> list[int]:
    out = []
    for i in range(len(word) - 1):
        p, q = word[i], word[i + 1]
        if (p, q) == ("v", "u") or (isinstance(p, int) and (q in ("u", "v") or isinstance(q, int))):
            out.append(i)
    return out


def _rewrite_at(A: CBHAlgebra, word: tuple, i: int) -> dict:
    p, q = word[i], word[i + 1]
    pre, post = word[:i], word[i + 2:]
    out: dict = {}
    if (p, q) == ("v", "u"):
        out[pre + ("u", "v") + post] = 1
        for h in A.support:
            _add_into(out, {pre + (h,) + post: 1}, -A.c[h])
    elif isinstance(q, int):
        out[pre + (A.G.mult[p][q],) + post] = 1
    else:
        m = A.mats[p]
        al, be = (m[0], m[1]) if q == "u" else (m[2], m[3])
        if al:
            out[pre + ("u", p) + post] = al
        if be:
            _add_into(out, {pre + ("v", p) + post: 1}, be)
    return out


def reduce_words(A: CBHAlgebra, x: dict, strategy: str = "left", first: int | None = None) -> dict:
    """Rewrite a combination of words to PBW normal form.  Words are tuples of
    'u', 'v' and group indices.  ``first`` forces the first step at a position."""
    todo = dict(x)
    done: dict = {}
    forced = first
    while todo:
        w, c = todo.popitem()
        red = _redexes(w)
        if not red:
            _add_into(done, {w: c})
            continue
        i = forced if forced is not None else (red[0] if strategy == "left" else red[-1])
        forced = None
        for w2, c2 in _rewrite_at(A, w, i).items():
            _add_into(todo, {w2: c2}, c)
    out: dict = {}
    for w, c in done.items():
        a = w.count("u")
        b = w.count("v")
        g = w[-1] if w and isinstance(w[-1], int) else A.G.identity
        _add_into(out, {(a, b, g): c})
    return out


def overlap_check(A: CBHAlgebra, g: int, pattern: tuple) -> bool:
    """Resolve the ambiguity g.p.q two ways (rewrite g p first, or p q first)."""
    w = (g,) + pattern + (A.G.identity,)
    r1 = reduce_words(A, {w: 1}, first=0)
    r2 = reduce_words(A, {w: 1}, first=1)
    return r1 == r2


def confluence(A: CBHAlgebra, rng: random.Random | None = None, max_pairs: int = 2000) -> bool:
    n = A.G.order
    for g in range(n):
        if not overlap_check(A, g, ("v", "u")):
            return False
    pairs = [(g, h) for g in range(n) for h in range(n)]
    if len(pairs) > max_pairs:
        rng = rng or random.Random(0)
        pairs = rng.sample(pairs, max_pairs)
    for g, h in pairs:
        for q in ("u", "v"):
            if not overlap_check(A, g, (h, q)):
                return False
    return True


def random_word_check(A: CBHAlgebra, length: int, trials: int, rng: random.Random) -> bool:
    """Left-most and right-most rewriting agree with the memoized product."""
    n = A.G.order
    for _ in range(trials):
        w = tuple(rng.choice(("u", "v", rng.randrange(n))) for _ in range(length)) + (A.G.identity,)
        r1 = reduce_words(A, {w: 1}, "left")
        r2 = reduce_words(A, {w: 1}, "right")
        x = {(0, 0, w[-1]): 1}
        for letter in reversed(w[:-1]):
            if letter == "u":
                x = A.lu(x)
            elif letter == "v":
                x = A.lv(x)
            else:
                x = A.lg(letter, x)
        if not (r1 == r2 == x):
            return False
    return True


def full_filtered_dims(A: CBHAlgebra, D: int) -> list[int]:
    """Number of PBW monomials u^a v^b g with a + b <= d; these form a basis
    once the overlap ambiguities resolve (see confluence)."""
    return [(d + 1) * (d + 2) // 2 * A.G.order for d in range(D + 1)]


# ---------------------------------------------------------------------------
# spherical bases and flatness
# ---------------------------------------------------------------------------

def _vectorize(elems: Sequence[dict], keys: Sequence) -> list[list]:
    idx = {k: i for i, k in enumerate(keys)}
    rows = []
    for x in elems:
        r = [0] * len(keys)
        for k, v in x.items():
            r[idx[k]] = v
        rows.append(r)
    return rows


def filtered_ranks(elems_by_degree: dict[int, list[dict]], D: int) -> list[int]:
    keys = [(a, d - a, 0) for d in range(D + 1) for a in range(d + 1)]
    acc, out = [], []
    for d in range(D + 1):
        acc = acc + elems_by_degree.get(d, [])
        out.append(exact_rank(_vectorize(acc, keys)) if acc else 0)
    return out


@dataclass
class SphericalBasis:
    elements: list[dict]
    degrees: list[int]
    dims: list[int]  # filtered: dimension of the span in degree <= d
    expected: list[int]

    @property
    def flat(self) -> bool:
        return self.dims == self.expected


def molien_filtered(G: FinSL2Group, D: int) -> list[int]:
    m = G.molien(D)
    return [sum(m[: d + 1]) for d in range(D + 1)]


def spherical_basis(A: CBHAlgebra | tuple, D: int) -> SphericalBasis:
    if not isinstance(A, CBHAlgebra):
        A = CBHAlgebra(*A, spherical=True)
    if not A.spherical:
        raise CBHError("spherical work needs the A e representation")
    keys = [(a, d - a, 0) for d in range(D + 1) for a in range(d + 1)]
    chosen, degs, dims = [], [], []
    rows: list[list] = []
    r = 0
    for d in range(D + 1):
        for a in range(d + 1):
            x = A.sph(a, d - a)
            cand = rows + _vectorize([x], keys)
            rk = exact_rank(cand)
            if rk > r:
                rows, r = cand, rk
                chosen.append(x)
                degs.append(d)
        dims.append(r)
    return SphericalBasis(chosen, degs, dims, molien_filtered(A.G, D))


def commutativity_check(A: CBHAlgebra, D: int, generator_pairs: bool = False) -> tuple[bool, tuple | None]:
    """True iff all tested commutators vanish; otherwise a witness pair.
    Tested: pairs of spherical basis elements of degree <= D, and with
    ``generator_pairs`` the spherical lifts of the invariant generators."""
    elems = []
    if generator_pairs:
        K = build_kleinian(A.G.spec)
        elems += [(f"gen{i}", A.sph_poly(p)) for i, p in enumerate(K.gens)]
    else:
        B = spherical_basis(A, D)
        elems += [(f"b{i}", x) for i, x in enumerate(B.elements) if degree(x) > 0]
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            cm = A.commutator(elems[i][1], elems[j][1])
            if cm:
                return False, (elems[i][0], elems[j][0])
    return True, None


# ---------------------------------------------------------------------------
# the invariant embedding
# ---------------------------------------------------------------------------

@dataclass
class EmbeddingReport:
    invariant_dims: list[int]
    target_dims: list[int]
    structure_ok: bool

    @property
    def ok(self) -> bool:
        return self.invariant_dims == self.target_dims and self.structure_ok


def pair_algebras(pair: NormalPair, orbit_coeffs: Sequence) -> tuple[CBHAlgebra, CBHAlgebra]:
    """c = sum over G2-orbits of G1-classes (orbit 0 is the identity) of
    coefficient times the orbit sum, as a central element of both group rings."""
    if len(orbit_coeffs) != len(pair.orbits):
        raise CBHError("one coefficient per orbit expected")
    c1, c2 = {}, {}
    for orb, t in zip(pair.orbits, orbit_coeffs):
        for cl in orb:
            for i in pair.G1.classes[cl]:
                c1[i] = t
                c2[pair.embed[i]] = t
    A1 = CBHAlgebra(pair.G1, c1, spherical=True)
    A2 = CBHAlgebra(pair.G2, c2, spherical=True)
    return A1, A2


def invariant_embedding(pair: NormalPair | tuple, orbit_coeffs: Sequence, D: int) -> EmbeddingReport:
    if not isinstance(pair, NormalPair):
        pair = normal_pair(*pair)
    A1, A2 = pair_algebras(pair, orbit_coeffs)
    reps = [A1.register_matrix(pair.G2.elements[pair.coset_rep(q)]) for q in range(pair.q_order)]

    def average(x):
        out: dict = {}
        for r in reps:
            _add_into(out, A1.lg(r, x), Fraction(1, len(reps)))
        return out

    by_deg: dict[int, list] = {}
    for d in range(D + 1):
        by_deg[d] = [average(A1.sph(a, d - a)) for a in range(d + 1)]
    inv_dims = filtered_ranks(by_deg, D)
    target = spherical_basis(A2, D).dims
    # x -> x e_2 is the identity on PBW coordinates; check it is multiplicative
    # and lands in e_2 A_2 e_2 on low-degree invariants
    low = [x for d in range(1, D + 1) for x in by_deg[d] if x][:4]
    ok = True
    for x in low:
        ok = ok and A2.e_left(x) == x
        for y in low:
            if degree(x) + degree(y) <= D + 2:
                ok = ok and A1.mul(x, y) == A2.mul(x, y)
    return EmbeddingReport(inv_dims, target, ok)


# ---------------------------------------------------------------------------
# first-order bracket
# ---------------------------------------------------------------------------

def poisson(p: WPoly, q: WPoly) -> WPoly:
    """{p, q} with {u, v} = 1."""
    return p.diff("u") * q.diff("v") - p.diff("v") * q.diff("u")


def f_inv_coefficients(G: FinSL2Group) -> list[Fraction]:
    """The invariant central element with coefficient 1 on the identity: the
    functional c -> coefficient of 1 is the regular character (up to |G|), the
    only invariant one, so the element is the sum of all group elements."""
    return [Fraction(1)] * len(G.classes)


@dataclass
class BracketReport:
    pairs: list[tuple]
    extracted: list[dict]  # per pair: parameter -> proportionality constant

    @property
    def consistent(self) -> bool:
        return all(e == self.extracted[0] for e in self.extracted) if self.extracted else False


def _image(x: dict) -> WPoly:
    """Reduction modulo the parameters, as a polynomial in u, v."""
    t = {}
    for (a, b, _), v in x.items():
        c0 = v.c0 if isinstance(v, FirstOrder) else v
        if c0:
            t[(a, b)] = c0
    return WPoly(UV, t)


def _linear_part(x: dict, name: str) -> WPoly:
    t = {}
    for (a, b, _), v in x.items():
        c = v.lin.get(name, 0) if isinstance(v, FirstOrder) else 0
        if c:
            t[(a, b)] = c
    return WPoly(UV, t)


def first_order_bracket(G: FinSL2Group | str, D: int, scale=1) -> BracketReport:
    """c = scale * (sum t_i h_i + z f_inv) over C[t, z] modulo base degree > 2."""
    G = G if isinstance(G, FinSL2Group) else build_group(G)
    names = [f"t{i}" for i in range(1, len(G.classes))] + ["z"]
    finv = f_inv_coefficients(G)
    coeffs = []
    for i in range(len(G.classes)):
        x = FirstOrder.param("z") * finv[i]
        if i:
            x = x + FirstOrder.param(f"t{i}")
        coeffs.append(x * scale)
    cls0 = G.class_of[G.identity]
    if cls0 != 0:
        raise CBHError("identity class expected first")
    A = CBHAlgebra.from_classes(G, coeffs, spherical=True)
    A0 = CBHAlgebra(G, {}, spherical=True)
    B = spherical_basis(A0, D)
    lifts = [(i, A.e_left({k: FirstOrder(v) for k, v in x.items()})) for i, x in enumerate(B.elements) if degree(x) > 0]
    pairs, extracted = [], []
    for i in range(len(lifts)):
        for j in range(i + 1, len(lifts)):
            (ia, xa), (ib, xb) = lifts[i], lifts[j]
            if degree(xa) + degree(xb) > D:
                continue
            pb = poisson(_image(xa), _image(xb))
            cm = A.commutator(xa, xb)
            if _image(cm):
                raise CBHError("commutator nonzero at the undeformed point")
            if pb.is_zero():
                if any(not _linear_part(cm, n).is_zero() for n in names):
                    raise CBHError("bracket not proportional to Poisson")
                continue
            e, c = pb.lead()
            ratios = {}
            for n in names:
                lp = _linear_part(cm, n)
                lam = canonicalize(lp.coeff(e) / c)
                if lp != pb * lam:
                    raise CBHError("bracket not proportional to Poisson")
                if lam:
                    ratios[n] = lam
            pairs.append((ia, ib))
            extracted.append(ratios)
    return BracketReport(pairs, extracted)
