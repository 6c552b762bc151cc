"""Finite subgroups of SL(2, C) as exact matrix groups.

Action convention: a matrix g = ((g11, g12), (g21, g22)) sends
u -> g11*u + g21*v and v -> g12*u + g22*v, i.e. (g.u, g.v) = (u, v).g.
On polynomials (g.p)(u, v) = p(g.u, g.v); this is a left action.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .exact import (CycloNum, ExactMatrix, Scalar, canonicalize, conj, format_scalar,
                    nullspace, rref, to_complex, zeta, _normal_conductor)
from .poly import RingSpec, WPoly

UV = RingSpec(("u", "v"), (1, 1))

Mat = tuple  # (a, b, c, d) row-major


@dataclass(frozen=True)
class GroupSpec:
    kind: str  # "C", "BD", "T", "O", "I"
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("C", "BD", "T", "O", "I"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind in ("C", "BD") and self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def name(self) -> str:
        return {"C": f"C{self.n}", "BD": f"BD{self.n}", "T": "2T", "O": "2O", "I": "2I"}[self.kind]

    @property
    def order(self) -> int:
        return {"C": self.n, "BD": 4 * self.n, "T": 24, "O": 48, "I": 120}[self.kind]

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        t = text.strip().upper()
        for alias, kind in (("2T", "T"), ("2O", "O"), ("2I", "I"), ("T", "T"), ("O", "O"), ("I", "I")):
            if t == alias:
                return cls(kind)
        if t.startswith("BD"):
            return cls("BD", int(t[2:]))
        if t.startswith("D") and t[1:].isdigit():
            return cls("BD", int(t[1:]))
        if t.startswith("C"):
            return cls("C", int(t[1:]))
        raise ValueError(f"cannot parse group name {text!r}")


def Cyclic(n: int) -> GroupSpec:
    return GroupSpec("C", n)


def BinaryDihedral(n: int) -> GroupSpec:
    return GroupSpec("BD", n)


BinaryTetrahedral = GroupSpec("T")
BinaryOctahedral = GroupSpec("O")
BinaryIcosahedral = GroupSpec("I")


# ---------------------------------------------------------------------------
# 2x2 helpers
# ---------------------------------------------------------------------------

def mat_mul(a: Mat, b: Mat) -> Mat:
    return (canonicalize(a[0] * b[0] + a[1] * b[2]), canonicalize(a[0] * b[1] + a[1] * b[3]),
            canonicalize(a[2] * b[0] + a[3] * b[2]), canonicalize(a[2] * b[1] + a[3] * b[3]))


def mat_det(a: Mat) -> Scalar:
    return canonicalize(a[0] * a[3] - a[1] * a[2])


def mat_inv_sl2(a: Mat) -> Mat:
    return (a[3], canonicalize(-a[1]), canonicalize(-a[2]), a[0])


def mat_trace(a: Mat) -> Scalar:
    return canonicalize(a[0] + a[3])


IDENTITY: Mat = (Fraction(1), Fraction(0), Fraction(0), Fraction(1))


def scalar_key(x: Scalar, n: int) -> tuple:
    """Canonical hashable form of x inside Q(zeta_n)."""
    if isinstance(x, CycloNum):
        nums, den = x.embed(n)
        return tuple(Fraction(c, den) for c in nums)
    from .exact import euler_phi
    return (Fraction(x),) + (Fraction(0),) * (euler_phi(_normal_conductor(n)) - 1)


def mat_key(a: Mat, n: int) -> tuple:
    return tuple(scalar_key(x, n) for x in a)


def _quat(a, b, c, d) -> Mat:
    i = zeta(4)
    return (canonicalize(a + b * i), canonicalize(c + d * i),
            canonicalize(-c + d * i), canonicalize(a - b * i))


def _generators(spec: GroupSpec) -> tuple[list[Mat], int]:
    k = spec.kind
    if k == "C":
        z = zeta(spec.n)
        return [(z, Fraction(0), Fraction(0), zeta(spec.n, -1))], spec.n
    if k == "BD":
        z = zeta(2 * spec.n)
        return [(z, Fraction(0), Fraction(0), zeta(2 * spec.n, -1)),
                (Fraction(0), Fraction(1), Fraction(-1), Fraction(0))], 2 * spec.n
    h = Fraction(1, 2)
    if k == "T":
        return [_quat(0, 1, 0, 0), _quat(0, 0, 1, 0), _quat(h, h, h, h)], 4
    if k == "O":
        r = zeta(8) + zeta(8, -1)  # sqrt 2
        s = 1 / r
        g = tuple(canonicalize(x * s) for x in _quat(1, 1, 0, 0))
        return [_quat(0, 0, 1, 0), _quat(h, h, h, h), g], 8
    # icosahedral: Klein's generators over Q(zeta_5)
    e = [zeta(5, j) for j in range(5)]
    sqrt5 = canonicalize(e[1] - e[2] - e[3] + e[4])
    inv = 1 / sqrt5
    S = (e[3], Fraction(0), Fraction(0), e[2])
    T = (canonicalize(-(e[1] - e[4]) * inv), canonicalize((e[2] - e[3]) * inv),
         canonicalize((e[2] - e[3]) * inv), canonicalize((e[1] - e[4]) * inv))
    return [S, T], 5


# ---------------------------------------------------------------------------
# the group
# ---------------------------------------------------------------------------

class FinSL2Group:
    """Immutable finite subgroup of SL(2) with classes and character table."""

    def __init__(self, spec: GroupSpec, generators: Sequence[Mat] | None = None,
                 conductor: int | None = None):
        if generators is None:
            generators, conductor = _generators(spec)
        self.spec = spec
        self.conductor = _normal_conductor(conductor or 1)
        self.generators = [tuple(canonicalize(x) for x in g) for g in generators]
        self._closure()
        if len(self.elements) != spec.order:
            raise ValueError(f"{spec.name}: closure has order {len(self.elements)}, expected {spec.order}")
        self._classes()

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def order(self) -> int:
        return len(self.elements)

    def key(self, m: Mat) -> tuple:
        return mat_key(m, self.conductor)

    def _closure(self):
        elems = [IDENTITY]
        index = {self.key(IDENTITY): 0}
        frontier = [IDENTITY]
        while frontier:
            nxt = []
            for a in frontier:
                for g in self.generators:
                    b = mat_mul(a, g)
                    k = self.key(b)
                    if k not in index:
                        index[k] = len(elems)
                        elems.append(b)
                        nxt.append(b)
            frontier = nxt
        self.elements: list[Mat] = elems
        self.index = index
        n = len(elems)
        # right multiplication by generators, then full table by words
        gen_idx = [index[self.key(g)] for g in self.generators]
        right = {gi: [index[self.key(mat_mul(a, self.elements[gi]))] for a in elems] for gi in gen_idx}
        # express every element as a word in generators (BFS tree)
        word: list[list[int]] = [[] for _ in range(n)]
        seen = {0}
        frontier_i = [0]
        while frontier_i:
            nxt = []
            for a in frontier_i:
                for gi in gen_idx:
                    b = right[gi][a]
                    if b not in seen:
                        seen.add(b)
                        word[b] = word[a] + [gi]
                        nxt.append(b)
            frontier_i = nxt
        table = []
        for a in range(n):
            row = []
            for b in range(n):
                c = a
                for gi in word[b]:
                    c = right[gi][c]
                row.append(c)
            table.append(row)
        self.mult = table
        self.inv = [row.index(0) for row in table]
        self.identity = 0
        self.neg_identity = index.get(self.key(tuple(canonicalize(-x) for x in IDENTITY)))

    def mul(self, a: int, b: int) -> int:
        return self.mult[a][b]

    def _classes(self):
        n = self.order
        cls_of = [-1] * n
        classes = []
        for a in range(n):
            if cls_of[a] >= 0:
                continue
            orb = sorted({self.mult[self.mult[g][a]][self.inv[g]] for g in range(n)})
            for x in orb:
                cls_of[x] = len(classes)
            classes.append(orb)
        self.classes: list[list[int]] = classes
        self.class_of = cls_of

    # -- basic data --------------------------------------------------------------
    def matrix(self, i: int) -> ExactMatrix:
        a = self.elements[i]
        return ExactMatrix.from_rows([[a[0], a[1]], [a[2], a[3]]])

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != 0:
            x = self.mult[x][i]
            k += 1
        return k

    @cached_property
    def class_sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    @cached_property
    def class_traces(self) -> list[Scalar]:
        return [mat_trace(self.elements[c[0]]) for c in self.classes]

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*(self.element_order(c[0]) for c in self.classes))

    @cached_property
    def class_inverse(self) -> list[int]:
        return [self.class_of[self.inv[c[0]]] for c in self.classes]

    def class_power(self, k: int, e: int) -> int:
        x = self.classes[k][0]
        y = 0
        for _ in range(e % self.element_order(x)):
            y = self.mult[y][x]
        return self.class_of[y]

    def check_invariants(self) -> bool:
        for a in self.elements:
            if mat_det(a) != 1:
                return False
        for i in range(self.order):
            if self.mult[i][self.inv[i]] != 0:
                return False
        return True

    def class_structure_constants(self) -> np.ndarray:
        """a[j, k, l] with C_j C_k = sum_l a[j,k,l] C_l."""
        h = len(self.classes)
        a = np.zeros((h, h, h), dtype=np.int64)
        for l, cl in enumerate(self.classes):
            z = cl[0]
            for j, cj in enumerate(self.classes):
                for x in cj:
                    y = self.mult[self.inv[x]][z]
                    a[j, self.class_of[y], l] += 1
        return a

    # -- characters -------------------------------------------------------------
    @cached_property
    def char_table(self) -> list[list[Scalar]]:
        return _character_table(self)

    @cached_property
    def taut_index(self) -> int | None:
        """Row of the tautological character; None when it is reducible
        (cyclic groups)."""
        tr = self.class_traces
        for i, row in enumerate(self.char_table):
            if all(x == t for x, t in zip(row, tr)):
                return i
        if self.spec.kind != "C":
            raise AssertionError("tautological character not found")
        return None

    @property
    def taut_character(self) -> list[Scalar]:
        return list(self.class_traces)

    def degrees(self) -> list[int]:
        return [int(r[0]) for r in self.char_table]

    def inner(self, chi: Sequence[Scalar], psi: Sequence[Scalar]) -> Scalar:
        acc: Scalar = Fraction(0)
        for s, a, b in zip(self.class_sizes, chi, psi):
            acc = acc + s * a * conj(b)
        return canonicalize(acc / self.order)

    def tensor(self, chi, psi) -> list[Scalar]:
        return [canonicalize(a * b) for a, b in zip(chi, psi)]

    def symmetric_power_character(self, d: int) -> list[Scalar]:
        """Character of C[u,v]_d (Chebyshev recurrence in the trace)."""
        out = []
        for t in self.class_traces:
            s0, s1 = Fraction(1), t
            if d == 0:
                out.append(s0)
                continue
            for _ in range(d - 1):
                s0, s1 = s1, canonicalize(t * s1 - s0)
            out.append(s1)
        return out

    def molien(self, dmax: int) -> list[int]:
        """dim C[u,v]^G_d for d = 0..dmax from the Molien series."""
        out = []
        for d in range(dmax + 1):
            ch = self.symmetric_power_character(d)
            v = canonicalize(sum((s * c for s, c in zip(self.class_sizes, ch)), Fraction(0)) / self.order)
            if not isinstance(v, Fraction) or v.denominator != 1:
                raise AssertionError("Molien coefficient not an integer")
            out.append(int(v))
        return out

    # -- polynomial action ----------------------------------------------------
    def act(self, i: int, p: WPoly) -> WPoly:
        a = self.elements[i] if isinstance(i, int) else i
        u, v = p.ring.var("u"), p.ring.var("v")
        images = {"u": u * a[0] + v * a[2], "v": u * a[1] + v * a[3]}
        return p.subs(images, p.ring)

    def reynolds(self, p: WPoly) -> WPoly:
        acc = p.ring.zero()
        for i in range(self.order):
            acc = acc + self.act(i, p)
        return acc / self.order

    def degree_matrix(self, m: Mat, d: int) -> list[list[Scalar]]:
        """Matrix of p -> m.p on C[u,v]_d in the basis u^d, u^(d-1) v, ..., v^d
        (column j is the image of the j-th basis monomial)."""
        a = self.elements[m] if isinstance(m, int) else m
        u, v = UV.var("u"), UV.var("v")
        lu, lv = u * a[0] + v * a[2], u * a[1] + v * a[3]
        pu, pv = [UV.one()], [UV.one()]
        for _ in range(d):
            pu.append(pu[-1] * lu)
            pv.append(pv[-1] * lv)
        cols = []
        for j in range(d + 1):
            img = pu[d - j] * pv[j]
            cols.append([img.coeff((d - r, r)) for r in range(d + 1)])
        return [[cols[j][r] for j in range(d + 1)] for r in range(d + 1)]

    def invariant_basis(self, d: int) -> list[WPoly]:
        """Basis of C[u,v]^G_d (rref, hence canonical) as the common fixed space
        of the generators."""
        key = d
        cache = self.__dict__.setdefault("_inv_cache", {})
        if key in cache:
            return cache[key]
        rows = []
        for g in self.generators:
            m = self.degree_matrix(g, d)
            for r in range(d + 1):
                rows.append([canonicalize(m[r][c] - (1 if r == c else 0)) for c in range(d + 1)])
        ker = nullspace(rows, d + 1)
        ker = rref(ker, d + 1)[0] if ker else []
        basis = [WPoly(UV, {(d - r, r): c for r, c in enumerate(vec)}) for vec in ker]
        cache[key] = basis
        return basis

    def is_invariant(self, p: WPoly) -> bool:
        return all(self.act(g, p) == p for g in self.generators)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "order": self.order,
            "classes": [{"size": len(c), "representative": [format_scalar(x) for x in self.elements[c[0]]],
                         "element_order": self.element_order(c[0])} for c in self.classes],
            "char_table": [[format_scalar(x) for x in row] for row in self.char_table],
            "tautological": self.taut_index,
        }


# ---------------------------------------------------------------------------
# character table (numeric class-algebra proposal, exact certification)
# ---------------------------------------------------------------------------

def _recognize(value: complex, degree: int, order: int, n: int) -> Scalar:
    """Exact sum of ``degree`` order-th roots of unity closest to value."""
    roots = [cmath.exp(2j * math.pi * k / order) for k in range(order)]
    best, best_err = None, None
    for combo in itertools.combinations_with_replacement(range(order), degree):
        s = sum(roots[k] for k in combo)
        err = abs(s - value)
        if best_err is None or err < best_err - 1e-9:
            best, best_err = combo, err
    if best_err > 1e-6:
        raise AssertionError("character value not recognised")
    acc: Scalar = Fraction(0)
    for k in best:
        acc = acc + zeta(order, k)
    return canonicalize(acc)


def _character_table(G: FinSL2Group) -> list[list[Scalar]]:
    h = len(G.classes)
    a = G.class_structure_constants().astype(float)
    rng = np.random.default_rng(12345)
    sizes = np.array(G.class_sizes, dtype=float)
    for _attempt in range(10):
        coeffs = rng.integers(1, 97, size=h).astype(float)
        M = np.tensordot(coeffs, a, axes=(0, 0))  # M[k, l]
        vals, vecs = np.linalg.eig(M)
        if min(abs(vals[i] - vals[j]) for i in range(h) for j in range(i)) > 1e-6 if h > 1 else True:
            break
    rows = []
    for i in range(h):
        w = vecs[:, i] / vecs[0, i]  # central character, identity class first
        norm = np.sum(np.abs(w) ** 2 / sizes)
        deg = int(round(math.sqrt(G.order / norm)))
        chi = deg * w / sizes
        rows.append((deg, chi))
    table = []
    for deg, chi in rows:
        exact_row = []
        for k in range(h):
            o = G.element_order(G.classes[k][0])
            exact_row.append(_recognize(complex(chi[k]), deg, o, G.conductor))
        table.append(exact_row)

    def sort_key(row):
        return (int(row[0]) if row[0] != 1 or not all(x == 1 for x in row) else -1,
                tuple((round(to_complex(x).real, 6), round(to_complex(x).imag, 6)) for x in row))

    table.sort(key=sort_key)
    _certify(G, table)
    return table


def _certify(G: FinSL2Group, table):
    h = len(G.classes)
    if len(table) != h:
        raise AssertionError("wrong number of characters")
    if not all(x == 1 for x in table[0]):
        raise AssertionError("row 0 is not the trivial character")
    for i in range(h):
        for j in range(h):
            v = G.inner(table[i], table[j])
            if v != (1 if i == j else 0):
                raise AssertionError("row orthogonality fails")
    for k in range(h):
        for l in range(h):
            s = canonicalize(sum((row[k] * conj(row[l]) for row in table), Fraction(0)))
            expect = Fraction(G.order, G.class_sizes[k]) if k == l else 0
            if s != expect:
                raise AssertionError("column orthogonality fails")


def certify_character_table(G: FinSL2Group) -> bool:
    """Exact row and column orthogonality of the stored table."""
    try:
        _certify(G, G.char_table)
    except AssertionError:
        return False
    return True


# ---------------------------------------------------------------------------
# building groups, catalog inclusions, normal pairs
# ---------------------------------------------------------------------------

_CACHE: dict[GroupSpec, FinSL2Group] = {}


def build_group(spec: GroupSpec | str) -> FinSL2Group:
    if isinstance(spec, str):
        spec = GroupSpec.parse(spec)
    if spec not in _CACHE:
        G = FinSL2Group(spec)
        if not G.check_invariants():
            raise AssertionError("group invariants fail")
        _CACHE[spec] = G
    return _CACHE[spec]


class NotSubgroup(ValueError):
    pass


class NotNormal(ValueError):
    pass


@dataclass
class NormalPair:
    G1: FinSL2Group
    G2: FinSL2Group
    embed: list[int]  # G1 index -> G2 index
    cosets: list[list[int]]  # G2 indices per coset, coset 0 = G1
    coset_of: list[int]
    q_table: list[list[int]]
    class_action: list[list[int]]  # per coset: permutation of G1 classes
    orbits: list[list[int]]  # G2-orbits on G1 classes, orbit 0 = {identity}
    restrict: dict[int, int] = field(default_factory=dict)  # G2 index -> G1 index

    @property
    def name(self) -> str:
        return f"{self.G1.name}<{self.G2.name}"

    @property
    def q_order(self) -> int:
        return len(self.cosets)

    def coset_rep(self, q: int) -> int:
        return self.cosets[q][0]

    def conj_g1(self, g2: int, h1: int) -> int:
        """Index in G1 of g2 * h1 * g2^-1."""
        G2 = self.G2
        x = G2.mult[G2.mult[g2][self.embed[h1]]][G2.inv[g2]]
        return self.restrict[x]

    def is_abelian_action(self) -> bool:
        return all(p == list(range(len(p))) for p in self.class_action)

    def character_action(self, q: int) -> list[int]:
        """Permutation of G1's irreducible characters: chi -> chi(g^-1 . g)."""
        perm_cls = self.class_action[q]
        table = self.G1.char_table
        out = []
        for row in table:
            # (g.chi)(C) = chi(g^-1 C g) = chi(perm^-1(C))
            inv = [0] * len(perm_cls)
            for c, d in enumerate(perm_cls):
                inv[d] = c
            new = [row[inv[c]] for c in range(len(row))]
            out.append(next(i for i, r in enumerate(table) if all(x == y for x, y in zip(r, new))))
        return out


def normal_pair(spec1: GroupSpec | str, spec2: GroupSpec | str) -> NormalPair:
    G1, G2 = build_group(spec1), build_group(spec2)
    n = math.lcm(G1.conductor, G2.conductor)
    keys2 = {mat_key(g, n): i for i, g in enumerate(G2.elements)}
    embed = []
    for g in G1.elements:
        k = mat_key(g, n)
        if k not in keys2:
            raise NotSubgroup("not a subgroup")
        embed.append(keys2[k])
    restrict = {j: i for i, j in enumerate(embed)}
    sub = set(embed)
    for x in range(G2.order):
        for h in embed[:1] + [embed[G1.index[G1.key(g)]] for g in G1.generators]:
            c = G2.mult[G2.mult[x][h]][G2.inv[x]]
            if c not in sub:
                raise NotNormal("not normal")
    cosets, coset_of = [], [-1] * G2.order
    for x in range(G2.order):
        if coset_of[x] < 0:
            cs = sorted(G2.mult[x][h] for h in embed)
            for y in cs:
                coset_of[y] = len(cosets)
            cosets.append(cs)
    q_table = [[coset_of[G2.mult[a[0]][b[0]]] for b in cosets] for a in cosets]
    pair = NormalPair(G1, G2, embed, cosets, coset_of, q_table, [], [], restrict)
    actions = []
    for cs in cosets:
        g = cs[0]
        perm = [G1.class_of[pair.conj_g1(g, cl[0])] for cl in G1.classes]
        actions.append(perm)
    pair.class_action = actions
    seen, orbits = set(), []
    for c in range(len(G1.classes)):
        if c in seen:
            continue
        orb = sorted({p[c] for p in actions})
        seen |= set(orb)
        orbits.append(orb)
    pair.orbits = orbits
    return pair


def trivial_pair(spec: GroupSpec | str) -> NormalPair:
    return normal_pair(spec, spec)


def class_permutation_matrix(pair: NormalPair, q: int) -> list[list[int]]:
    perm = pair.class_action[q]
    h = len(perm)
    return [[1 if perm[j] == i else 0 for j in range(h)] for i in range(h)]
