"""McKay graphs, root systems, diagram automorphisms and folding.

Vectors live in the root-lattice basis of the simple roots; the bilinear form
is (v, w) = v^T C w for the (symmetric) Cartan matrix C of the unfolded system.
A complex parameter point is a pair (re, im) of rational vectors.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import canonicalize
from .grp import FinSL2Group, NormalPair, build_group, normal_pair

Vec = tuple


class FoldError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Cartan data
# ---------------------------------------------------------------------------

def _det(M: Sequence[Sequence]) -> Fraction:
    A = [[Fraction(x) for x in row] for row in M]
    n, d = len(A), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return d


def _adjacency(C) -> list[list[int]]:
    n = len(C)
    return [[j for j in range(n) if j != i and C[i][j]] for i in range(n)]


def _arms(C) -> list[int] | None:
    """Arm lengths at the unique branch node of a tree, or None for a path."""
    adj = _adjacency(C)
    branch = [i for i, a in enumerate(adj) if len(a) >= 3]
    if not branch:
        return None
    if len(branch) > 1 or len(adj[branch[0]]) > 3:
        return []
    b = branch[0]
    arms = []
    for start in adj[b]:
        prev, cur, k = b, start, 1
        while True:
            nxt = [j for j in adj[cur] if j != prev]
            if not nxt:
                break
            prev, cur, k = cur, nxt[0], k + 1
        arms.append(k)
    return sorted(arms)


def simply_laced_type(C) -> str:
    n = len(C)
    if any(C[i][i] != 2 for i in range(n)) or any(C[i][j] not in (0, -1) for i in range(n) for j in range(n) if i != j):
        raise FoldError("not ADE")
    if any(C[i][j] != C[j][i] for i in range(n) for j in range(n)):
        raise FoldError("not ADE")
    edges = sum(1 for i in range(n) for j in range(i + 1, n) if C[i][j])
    if edges != n - 1 or not _connected(C):
        raise FoldError("not ADE")
    arms = _arms(C)
    det = _det(C)
    if arms is None:
        label, want = f"A{n}", n + 1
    elif arms[:2] == [1, 1]:
        label, want = f"D{n}", 4
    elif arms == [1, 2, 2]:
        label, want = "E6", 3
    elif arms == [1, 2, 3]:
        label, want = "E7", 2
    elif arms == [1, 2, 4]:
        label, want = "E8", 1
    else:
        raise FoldError("not ADE")
    if det != want:
        raise FoldError("not ADE")
    return label


def _connected(C) -> bool:
    n = len(C)
    if n == 0:
        return False
    adj = _adjacency(C)
    seen, todo = {0}, [0]
    while todo:
        for j in adj[todo.pop()]:
            if j not in seen:
                seen.add(j)
                todo.append(j)
    return len(seen) == n


def canonical_order(C) -> list[int]:
    """Breadth-first order from a leaf; among leaves (and neighbour orders) the
    one giving the lexicographically smallest relabelled matrix wins, earlier
    original indices breaking remaining ties."""
    n = len(C)
    if n == 1:
        return [0]
    adj = _adjacency(C)
    best, best_key = None, None
    for s in range(n):
        if len(adj[s]) != 1:
            continue
        order, seen, dq = [], {s}, deque([s])
        while dq:
            i = dq.popleft()
            order.append(i)
            nbrs = sorted((j for j in adj[i] if j not in seen), key=lambda j: (len(adj[j]), j))
            for j in nbrs:
                seen.add(j)
                dq.append(j)
        key = tuple(C[a][b] for a in order for b in order)
        if best_key is None or key < best_key:
            best, best_key = order, key
    return best


@dataclass
class CartanData:
    rank: int
    cartan: list[list[int]]
    type: str
    chars: list[int] = field(default_factory=list)  # node -> character-table row

    def to_json(self) -> dict:
        return {"rank": self.rank, "cartan": self.cartan, "type": self.type, "chars": self.chars}


def cartan_from_type(label: str) -> CartanData:
    kind, n = label[0], int(label[1:])
    C = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j):
        C[i][j] = C[j][i] = -1
    if kind == "A":
        for i in range(n - 1):
            link(i, i + 1)
    elif kind == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif kind == "E":
        for i in range(n - 2):
            link(i, i + 1)
        link(2, n - 1)
    else:
        raise FoldError("not ADE")
    if simply_laced_type(C) != label:
        raise FoldError("not ADE")
    return CartanData(n, C, label, list(range(n)))


def mckay_cartan(G: FinSL2Group | str) -> CartanData:
    if not isinstance(G, FinSL2Group):
        G = build_group(G)
    table = G.char_table
    taut = G.taut_character
    nodes = list(range(1, len(table)))
    M = [[G.inner(table[i], G.tensor(taut, table[j])) for j in nodes] for i in nodes]
    C = []
    for a in range(len(nodes)):
        row = []
        for b in range(len(nodes)):
            v = canonicalize(2 * (a == b) - M[a][b])
            if not isinstance(v, Fraction) or v.denominator != 1:
                raise FoldError("not ADE")
            row.append(int(v))
        C.append(row)
    label = simply_laced_type(C)
    order = canonical_order(C)
    C = [[C[a][b] for b in order] for a in order]
    return CartanData(len(C), C, label, [nodes[i] for i in order])


def diagram_automorphism(pair: NormalPair | tuple, cd: CartanData | None = None) -> list[list[int]]:
    """Node permutations, one per coset, induced by the conjugation action on
    G1's irreducible characters."""
    if not isinstance(pair, NormalPair):
        pair = normal_pair(*pair)
    cd = cd or mckay_cartan(pair.G1)
    node_of = {c: i for i, c in enumerate(cd.chars)}
    out = []
    for q in range(pair.q_order):
        chi = pair.character_action(q)
        if chi[0] != 0:
            raise FoldError("not an automorphism")
        perm = [node_of[chi[c]] for c in cd.chars]
        if any(cd.cartan[perm[i]][perm[j]] != cd.cartan[i][j] for i in range(cd.rank) for j in range(cd.rank)):
            raise FoldError("not an automorphism")
        out.append(perm)
    return out


# ---------------------------------------------------------------------------
# root systems
# ---------------------------------------------------------------------------

def _form(C, v, w) -> Fraction:
    return sum(Fraction(v[i]) * C[i][j] * w[j] for i in range(len(v)) for j in range(len(w)) if v[i] and w[j])


def _reflect(C, alpha: Vec, v: Vec) -> Vec:
    aa = _form(C, alpha, alpha)
    k = 2 * _form(C, v, alpha) / aa
    return tuple(canonicalize(x - k * a) for x, a in zip(v, alpha))


def _reflection_matrix(C, alpha: Vec) -> tuple:
    n = len(alpha)
    cols = [_reflect(C, alpha, tuple(int(i == j) for i in range(n))) for j in range(n)]
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def mat_vec(M, v) -> Vec:
    return tuple(canonicalize(sum(M[i][j] * v[j] for j in range(len(v)) if v[j])) for i in range(len(M)))


def mat_mul(A, B) -> tuple:
    n = len(A)
    return tuple(tuple(canonicalize(sum(A[i][k] * B[k][j] for k in range(n))) for j in range(len(B[0]))) for i in range(n))


CLASSICAL_COUNTS = {"A": lambda n: n * (n + 1), "D": lambda n: 2 * n * (n - 1), "E": lambda n: {6: 72, 7: 126, 8: 240}[n]}


@dataclass
class RootSystemData:
    cartan: list[list[int]]  # form of the ambient (unfolded) system
    simple: list[Vec]
    roots: list[Vec]
    weyl_gens: list[tuple]
    type: str
    nonreduced: bool = False

    @property
    def dim(self) -> int:
        return len(self.cartan)

    @property
    def rank(self) -> int:
        return len(self.simple)

    def positive(self) -> list[Vec]:
        return [r for r in self.roots if _is_positive(r)]

    def form(self, v, w) -> Fraction:
        return _form(self.cartan, v, w)

    def to_json(self) -> dict:
        return {"type": self.type, "simple": [list(map(str, r)) for r in self.simple],
                "roots": [list(map(str, r)) for r in self.roots], "nonreduced": self.nonreduced}


def _is_positive(r: Vec) -> bool:
    nz = [x for x in r if x]
    return bool(nz) and all(x > 0 for x in nz)


def root_system(cd: CartanData | str) -> RootSystemData:
    if isinstance(cd, str):
        cd = cartan_from_type(cd)
    C, n = cd.cartan, cd.rank
    simple = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    seen, todo = set(simple), list(simple)
    while todo:
        r = todo.pop()
        for a in simple:
            s = _reflect(C, a, r)
            if s not in seen:
                seen.add(s)
                todo.append(s)
    roots = sorted(seen, key=lambda r: (sum(r), r))
    R = RootSystemData(C, simple, roots, [_reflection_matrix(C, a) for a in simple], cd.type)
    want = CLASSICAL_COUNTS[cd.type[0]](int(cd.type[1:]))
    if len(roots) != want:
        raise FoldError("root count mismatch")
    return R


def check_root_system(R: RootSystemData) -> bool:
    rs = set(R.roots)
    if any(tuple(-x for x in r) not in rs for r in rs):
        return False
    for a in R.roots:
        for b in R.roots:
            k = 2 * R.form(b, a) / R.form(a, a)
            if k.denominator != 1:
                return False
        if any(_reflect(R.cartan, a, b) not in rs for b in R.roots):
            return False
    return True


# ---------------------------------------------------------------------------
# folding
# ---------------------------------------------------------------------------

def _perm_group(gens: Sequence[Sequence[int]], n: int) -> list[tuple]:
    ident = tuple(range(n))
    seen, todo = {ident}, [ident]
    while todo:
        p = todo.pop()
        for g in gens:
            q = tuple(g[p[i]] for i in range(n))
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return sorted(seen)


def _permute(p: Sequence[int], v: Vec) -> Vec:
    out = [0] * len(v)
    for i, x in enumerate(v):
        out[p[i]] = x
    return tuple(out)


def _classify_folded(C, simple: list[Vec], nonreduced: bool) -> str:
    n = len(simple)
    if nonreduced:
        return f"BC{n}"
    A = [[2 * _form(C, a, b) / _form(C, b, b) for b in simple] for a in simple]
    bonds = {}
    for i in range(n):
        for j in range(i + 1, n):
            m = A[i][j] * A[j][i]
            if m:
                bonds[(i, j)] = int(m)
    if all(m == 1 for m in bonds.values()):
        return simply_laced_type([[int(x) for x in row] for row in A])
    if n == 2 and list(bonds.values()) == [3]:
        return "G2"
    if n == 4 and sorted(bonds.values()) == [1, 1, 2]:
        i, j = next(k for k, m in bonds.items() if m == 2)
        deg = [sum(1 for k in bonds if v in k) for v in range(n)]
        if deg[i] == 2 and deg[j] == 2:
            return "F4"
    if sorted(bonds.values()) == [1] * (n - 2) + [2]:
        lengths = [_form(C, a, a) for a in simple]
        short = min(lengths)
        nshort = sum(1 for x in lengths if x == short)
        return f"C{n}" if nshort == n - 1 or n == 2 else f"B{n}"
    raise FoldError("unrecognized folded type")


@dataclass
class FoldResult:
    base: RootSystemData
    autos: list[tuple]  # the full permutation group generated by the input
    fixed_basis: list[Vec]  # orbit indicator vectors
    folded: RootSystemData  # roots in ambient coordinates
    h_gens: list[tuple]  # ambient matrices preserving V^Q
    h_gens_fixed: list[tuple]  # restrictions in the fixed basis

    @property
    def type(self) -> str:
        return self.folded.type

    def is_fixed(self, v: Vec) -> bool:
        return all(_permute(p, v) == tuple(v) for p in self.autos)

    def to_fixed_coords(self, v: Vec) -> Vec:
        return tuple(v[next(i for i, x in enumerate(b) if x)] for b in self.fixed_basis)

    def from_fixed_coords(self, c: Sequence) -> Vec:
        n = self.base.dim
        return tuple(canonicalize(sum(Fraction(ci) * b[i] for ci, b in zip(c, self.fixed_basis))) for i in range(n))

    def to_json(self) -> dict:
        return {"type": self.type, "base_type": self.base.type, "autos": [list(p) for p in self.autos],
                "folded_roots": [list(map(str, r)) for r in self.folded.roots],
                "h_generators": [[list(map(str, row)) for row in g] for g in self.h_gens_fixed]}


def fold(R: RootSystemData, autos: Sequence[Sequence[int]]) -> FoldResult:
    n = R.dim
    C = R.cartan
    group = _perm_group(autos, n)
    for p in group:
        if any(C[p[i]][p[j]] != C[i][j] for i in range(n) for j in range(n)):
            raise FoldError("not an automorphism")
    orbits, seen = [], set()
    for i in range(n):
        if i not in seen:
            o = sorted({p[i] for p in group})
            seen |= set(o)
            orbits.append(o)
    fixed_basis = [tuple(int(i in o) for i in range(n)) for o in orbits]
    if len(group) == 1:
        return FoldResult(R, group, fixed_basis, R, list(R.weyl_gens), list(R.weyl_gens))
    folded = set()
    for r in R.roots:
        s = [0] * n
        for p in group:
            for i, x in enumerate(_permute(p, r)):
                s[i] += x
        if any(s):
            folded.add(tuple(s))
    roots = sorted(folded, key=lambda r: (sum(r), r))
    pos = [r for r in roots if _is_positive(r)]
    posset = set(pos)
    simple = [r for r in pos if not any(tuple(a - b for a, b in zip(r, s)) in posset for s in pos)]
    nonreduced = any(tuple(2 * x for x in r) in folded for r in roots)
    label = _classify_folded(C, simple, nonreduced)
    h_gens = []
    for a in simple:
        # the unfolded simple roots in the orbit whose sum is proportional to a
        o = next(o for o in orbits if all((a[i] != 0) == (i in o) for i in range(n)))
        beta = [tuple(int(i == j) for i in range(n)) for j in o]
        orth = all(_form(C, b1, b2) == 0 for b1 in beta for b2 in beta if b1 != b2)
        if orth:
            M = None
            for b in beta:
                S = _reflection_matrix(C, b)
                M = S if M is None else mat_mul(M, S)
        else:
            M = _reflection_matrix(C, tuple(sum(b[i] for b in beta) for i in range(n)))
        for v in fixed_basis:
            if mat_vec(M, v) != _reflect(C, a, v):
                raise FoldError("H generator does not restrict to the folded reflection")
        h_gens.append(M)
    folded_R = RootSystemData(C, simple, roots, h_gens, label, nonreduced)
    res = FoldResult(R, group, fixed_basis, folded_R, h_gens, [])
    res.h_gens_fixed = [tuple(zip(*[res.to_fixed_coords(mat_vec(M, v)) for v in fixed_basis])) for M in h_gens]
    return res


def check_folded(F: FoldResult) -> bool:
    """Reflections in folded roots preserve the folded set, integrality holds and
    every H generator preserves both V^Q and the folded roots."""
    Rf, C = F.folded, F.base.cartan
    rs = set(Rf.roots)
    for a in Rf.roots:
        aa = _form(C, a, a)
        for b in Rf.roots:
            if (2 * _form(C, b, a) / aa).denominator != 1:
                return False
            if _reflect(C, a, b) not in rs:
                return False
    for M in F.h_gens:
        if any(not F.is_fixed(mat_vec(M, v)) for v in F.fixed_basis):
            return False
        if any(mat_vec(M, r) not in rs for r in Rf.roots):
            return False
    return True


def group_order(gens: Sequence[tuple], limit: int = 10 ** 5) -> int:
    n = len(gens[0])
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    seen, todo = {ident}, [ident]
    while todo:
        M = todo.pop()
        for g in gens:
            P = mat_mul(g, M)
            if P not in seen:
                seen.add(P)
                if len(seen) > limit:
                    raise FoldError("group too large to enumerate")
                todo.append(P)
    return len(seen)


def fold_pair(pair: NormalPair | tuple) -> FoldResult:
    if not isinstance(pair, NormalPair):
        pair = normal_pair(*pair)
    cd = mckay_cartan(pair.G1)
    autos = diagram_automorphism(pair, cd)
    return fold(root_system(cd), autos)


# ---------------------------------------------------------------------------
# dominance and orbits
# ---------------------------------------------------------------------------

def _mv(M, v):
    return tuple(sum(m * x for m, x in zip(row, v) if m and x) for row in M)


def _act(M, x):
    return (_mv(M, x[0]), _mv(M, x[1]))


def dominant_representative(R: RootSystemData, x, max_steps: int = 100000):
    """Two-stage descent: real part into the dominant chamber, then the
    imaginary part within the stabilizer of the real part."""
    re, im = tuple(map(Fraction, x[0])), tuple(map(Fraction, x[1]))
    C = R.cartan
    gens = list(zip(R.simple, R.weyl_gens))
    for _ in range(max_steps):
        bad = next(((a, M) for a, M in gens if _form(C, re, a) < 0), None)
        if bad is None:
            break
        re, im = mat_vec(bad[1], re), mat_vec(bad[1], im)
    else:
        raise FoldError("descent did not terminate")
    stab = [(a, M) for a, M in gens if _form(C, re, a) == 0]
    for _ in range(max_steps):
        bad = next(((a, M) for a, M in stab if _form(C, im, a) < 0), None)
        if bad is None:
            break
        im = mat_vec(bad[1], im)
    else:
        raise FoldError("descent did not terminate")
    return (re, im)


def orbit(gens: Sequence[tuple], x, limit: int = 10 ** 6) -> set:
    x = (tuple(map(canonicalize, x[0])), tuple(map(canonicalize, x[1])))
    seen, todo = {x}, [x]
    while todo:
        y = todo.pop()
        for M in gens:
            z = _act(M, y)
            if z not in seen:
                seen.add(z)
                if len(seen) > limit:
                    raise FoldError("orbit too large to enumerate")
                todo.append(z)
    return seen


def _norm_point(x):
    return (tuple(map(canonicalize, x[0])), tuple(map(canonicalize, x[1])))


def h_orbit_equivalent(F: FoldResult, c, c2, cross_check: bool = True) -> bool:
    """c, c2 are points of V^Q in ambient coordinates, as (re, im)."""
    d1 = dominant_representative(F.folded, c)
    d2 = dominant_representative(F.folded, c2)
    ans = _norm_point(d1) == _norm_point(d2)
    if cross_check:
        try:
            if group_order(F.h_gens) <= 10 ** 5:
                enum = _norm_point(c2) in orbit(F.h_gens, c)
                if enum != ans:
                    raise FoldError("dominance and enumeration disagree")
        except FoldError as e:
            if "disagree" in str(e):
                raise
    return ans


def w_orbit_equivalent(R: RootSystemData, c, c2) -> bool:
    return _norm_point(dominant_representative(R, c)) == _norm_point(dominant_representative(R, c2))


def synthetic_d4_s3() -> tuple[RootSystemData, list[list[int]]]:
    R = root_system("D4")
    # outer nodes of the standard labeling are 0, 2, 3 around the centre 1
    return R, [[2, 1, 3, 0], [2, 1, 0, 3]]


def synthetic_e6_c2() -> tuple[RootSystemData, list[list[int]]]:
    R = root_system("E6")
    # chain 0-1-2-3-4 with node 5 attached to 2
    return R, [[4, 3, 2, 1, 0, 5]]
