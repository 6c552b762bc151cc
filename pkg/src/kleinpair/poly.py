"""Weighted-graded commutative polynomials with exact coefficients, a small
Buchberger engine and quotient-ring monomial bases.

Monomial order: weighted degree first, then reverse lexicographic in the
ring's variable order (the monomial with the smaller exponent in the last
differing variable is larger).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .exact import CycloNum, Scalar, canonicalize, format_scalar, parse_scalar, rref

Exp = tuple[int, ...]


@dataclass(frozen=True)
class RingSpec:
    vars: tuple[str, ...]
    weights: tuple[int, ...]
    order: str = "wdeg-revlex"

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.vars) != len(self.weights):
            raise ValueError("one weight per variable")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("variable names must be unique")

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def wdeg(self, e: Exp) -> int:
        return sum(w * x for w, x in zip(self.weights, e))

    def key(self, e: Exp):
        return (self.wdeg(e), tuple(-x for x in reversed(e)))

    def index(self, name: str) -> int:
        return self.vars.index(name)

    def var(self, name: str) -> "WPoly":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return WPoly(self, {tuple(e): Fraction(1)})

    def gens(self) -> list["WPoly"]:
        return [self.var(v) for v in self.vars]

    def one(self) -> "WPoly":
        return WPoly(self, {(0,) * self.nvars: Fraction(1)})

    def zero(self) -> "WPoly":
        return WPoly(self, {})

    def const(self, c) -> "WPoly":
        return WPoly(self, {(0,) * self.nvars: c})

    def monomial(self, e: Sequence[int], c=1) -> "WPoly":
        return WPoly(self, {tuple(e): c})

    def monomials(self, d: int) -> list[Exp]:
        """All exponent vectors of weighted degree d, in increasing order."""
        return list(_monomials(self.weights, d))

    def to_json(self) -> dict:
        return {"vars": list(self.vars), "weights": list(self.weights)}

    def extend(self, names: Sequence[str], weights: Sequence[int]) -> "RingSpec":
        return RingSpec(self.vars + tuple(names), self.weights + tuple(weights))


@lru_cache(maxsize=None)
def _monomials(weights: tuple[int, ...], d: int) -> tuple[Exp, ...]:
    out: list[Exp] = []

    def rec(i: int, rem: int, acc: list[int]):
        if i == len(weights) - 1:
            if rem % weights[i] == 0:
                out.append(tuple(acc + [rem // weights[i]]))
            return
        for k in range(rem // weights[i] + 1):
            rec(i + 1, rem - k * weights[i], acc + [k])

    if d >= 0 and weights:
        rec(0, d, [])
    elif d == 0:
        out.append(())
    r = RingSpec(tuple(f"_{i}" for i in range(len(weights))), weights) if weights else None
    if r:
        out.sort(key=r.key)
    return tuple(out)


def _add_exp(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


def _divides(a: Exp, b: Exp) -> bool:
    return all(x <= y for x, y in zip(a, b))


class WPoly:
    """Sparse polynomial: exponent tuple -> nonzero exact scalar."""

    __slots__ = ("ring", "terms", "_lead")

    def __init__(self, ring: RingSpec, terms: Mapping[Exp, object] | None = None, _clean=False):
        self.ring = ring
        if _clean:
            self.terms = dict(terms)
        else:
            t = {}
            for e, c in (terms or {}).items():
                c = canonicalize(c)
                if c:
                    t[tuple(e)] = c
            self.terms = t
        self._lead = None

    # -- basic queries ---------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def wdeg(self) -> int:
        if not self.terms:
            return -1
        return max(self.ring.wdeg(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({self.ring.wdeg(e) for e in self.terms}) <= 1

    def homogeneous_part(self, d: int) -> "WPoly":
        return WPoly(self.ring, {e: c for e, c in self.terms.items() if self.ring.wdeg(e) == d}, True)

    def lead(self) -> tuple[Exp, Scalar]:
        if self._lead is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading term")
            e = max(self.terms, key=self.ring.key)
            self._lead = (e, self.terms[e])
        return self._lead

    def lm(self) -> Exp:
        return self.lead()[0]

    def lc(self) -> Scalar:
        return self.lead()[1]

    def coeff(self, e: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(e), Fraction(0))

    def is_rational(self) -> bool:
        return all(not isinstance(c, CycloNum) for c in self.terms.values())

    # -- arithmetic --------------------------------------------------------------
    def _coerce(self, other) -> "WPoly":
        if isinstance(other, WPoly):
            if other.ring != self.ring:
                raise ValueError("ring mismatch")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e)
            if s is None:
                t[e] = c
            else:
                s = s + c
                if s:
                    t[e] = s
                else:
                    del t[e]
        return WPoly(self.ring, t, True)

    __radd__ = __add__

    def __neg__(self):
        return WPoly(self.ring, {e: -c for e, c in self.terms.items()}, True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "WPoly":
        c = canonicalize(c)
        if not c:
            return self.ring.zero()
        return WPoly(self.ring, {e: x * c for e, x in self.terms.items()}, True)

    def mul_term(self, e: Exp, c) -> "WPoly":
        return WPoly(self.ring, {_add_exp(e, f): x * c for f, x in self.terms.items()}, True)

    def __mul__(self, other):
        if not isinstance(other, WPoly):
            return self.scale(other)
        other = self._coerce(other)
        t: dict[Exp, Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exp(e1, e2)
                v = t.get(e)
                t[e] = c1 * c2 if v is None else v + c1 * c2
        return WPoly(self.ring, {e: c for e, c in t.items() if c}, True)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        return self.scale(1 / canonicalize(c))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        res = self.ring.one()
        base = self
        while k:
            if k & 1:
                res = res * base
            base = base * base
            k >>= 1
        return res

    def __eq__(self, other):
        if isinstance(other, WPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction, CycloNum)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def monic(self) -> "WPoly":
        return self.scale(1 / self.lc()) if self.terms else self

    # -- calculus and substitution ---------------------------------------------
    def diff(self, var: str | int) -> "WPoly":
        i = var if isinstance(var, int) else self.ring.index(var)
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                t[tuple(f)] = c * e[i]
        return WPoly(self.ring, t, True)

    def subs(self, images: Mapping[str, "WPoly"] | Sequence["WPoly"], target: RingSpec | None = None) -> "WPoly":
        """Substitute a polynomial for each variable.  ``images`` is either a
        sequence (one per variable) or a mapping by name; unnamed variables are
        mapped to themselves, which requires the target ring to contain them."""
        if isinstance(images, Mapping):
            tgt = target or next(iter(images.values())).ring
            seq = []
            for v in self.ring.vars:
                if v in images:
                    seq.append(images[v])
                else:
                    seq.append(tgt.var(v))
        else:
            seq = list(images)
            tgt = target or seq[0].ring
        powers: list[dict[int, WPoly]] = [{0: tgt.one(), 1: p} for p in seq]

        def pw(i, k):
            cache = powers[i]
            if k not in cache:
                h = k // 2
                cache[k] = pw(i, h) * pw(i, k - h)
            return cache[k]

        acc: dict[Exp, Scalar] = {}
        for e, c in self.terms.items():
            term = None
            for i, k in enumerate(e):
                if k:
                    term = pw(i, k) if term is None else term * pw(i, k)
            if term is None:
                term = tgt.one()
            for f, x in term.terms.items():
                v = acc.get(f)
                acc[f] = x * c if v is None else v + x * c
        return WPoly(tgt, {e: c for e, c in acc.items() if c}, True)

    def map_coeffs(self, fn: Callable[[Scalar], object]) -> "WPoly":
        return WPoly(self.ring, {e: fn(c) for e, c in self.terms.items()})

    def embed(self, target: RingSpec) -> "WPoly":
        """Reinterpret in a ring whose variables include this ring's."""
        idx = [target.index(v) for v in self.ring.vars]
        t = {}
        for e, c in self.terms.items():
            f = [0] * target.nvars
            for i, k in zip(idx, e):
                f[i] = k
            t[tuple(f)] = c
        return WPoly(target, t, True)

    def restrict(self, target: RingSpec) -> "WPoly":
        """Inverse of embed; fails if a dropped variable occurs."""
        keep = [self.ring.index(v) for v in target.vars]
        drop = [i for i in range(self.ring.nvars) if i not in keep]
        t = {}
        for e, c in self.terms.items():
            if any(e[i] for i in drop):
                raise ValueError("polynomial involves variables outside the target ring")
            t[tuple(e[i] for i in keep)] = c
        return WPoly(target, t, True)

    def split_by(self, names: Sequence[str]) -> dict[Exp, "WPoly"]:
        """Group terms by the exponents of ``names``; values keep the full ring."""
        idx = [self.ring.index(n) for n in names]
        out: dict[Exp, dict] = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in idx)
            f = list(e)
            for i in idx:
                f[i] = 0
            out.setdefault(key, {})[tuple(f)] = c
        return {k: WPoly(self.ring, v, True) for k, v in out.items()}

    # -- text ------------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Exp, Scalar]]:
        return sorted(self.terms.items(), key=lambda t: self.ring.key(t[0]), reverse=True)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"WPoly({format_poly(self)!r})"


def format_monomial(ring: RingSpec, e: Exp) -> str:
    parts = [f"{v}^{k}" for v, k in zip(ring.vars, e) if k]
    return "*".join(parts) if parts else "1"


def format_poly(p: WPoly) -> str:
    if not p.terms:
        return "0"
    out = []
    for e, c in p.sorted_terms():
        cs = format_scalar(c)
        if isinstance(c, CycloNum):
            cs = f"({cs})"
        out.append(f"{cs} * {format_monomial(p.ring, e)}")
    return " + ".join(out)


def parse_poly(ring: RingSpec, text: str) -> WPoly:
    text = text.strip()
    if text == "0":
        return ring.zero()
    acc = ring.zero()
    depth, start, pieces = 0, 0, []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(" + ", i):
            pieces.append(text[start:i])
            start = i + 3
            i += 2
        i += 1
    pieces.append(text[start:])
    for piece in pieces:
        cs, ms = piece.rsplit(" * ", 1)
        cs = cs.strip()
        if cs.startswith("(") and cs.endswith(")"):
            cs = cs[1:-1]
        e = [0] * ring.nvars
        if ms != "1":
            for f in ms.split("*"):
                v, k = f.split("^")
                e[ring.index(v)] += int(k)
        acc = acc + ring.monomial(e, parse_scalar(cs))
    return acc


# ---------------------------------------------------------------------------
# division, Groebner bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroebnerBasis:
    ring: RingSpec
    generators: tuple[WPoly, ...]

    def leading_monomials(self) -> list[Exp]:
        return [g.lm() for g in self.generators]

    def reduce(self, p: WPoly) -> WPoly:
        return normal_form(p, self)

    def contains(self, p: WPoly) -> bool:
        return normal_form(p, self).is_zero()


def _reduce_full(p: WPoly, divisors: Sequence[WPoly]) -> tuple[WPoly, list[WPoly]]:
    """Multivariate division: returns (remainder, quotients)."""
    ring = p.ring
    leads = [(d.lm(), d.lc()) for d in divisors]
    quots: list[dict] = [{} for _ in divisors]
    work = dict(p.terms)
    rem: dict[Exp, Scalar] = {}
    key = ring.key
    while work:
        e = max(work, key=key)
        c = work[e]
        for i, (le, lc) in enumerate(leads):
            if _divides(le, e):
                m = tuple(x - y for x, y in zip(e, le))
                f = c / lc
                quots[i][m] = quots[i].get(m, 0) + f
                for de, dc in divisors[i].terms.items():
                    t = _add_exp(de, m)
                    v = work.get(t, 0) - f * dc
                    if v:
                        work[t] = v
                    else:
                        work.pop(t, None)
                break
        else:
            rem[e] = c
            del work[e]
    return WPoly(ring, rem, True), [WPoly(ring, q) for q in quots]


def normal_form(p: WPoly, G: GroebnerBasis | Sequence[WPoly]) -> WPoly:
    gens = G.generators if isinstance(G, GroebnerBasis) else tuple(G)
    if not gens:
        return p
    return _reduce_full(p, gens)[0]


def _lcm(a: Exp, b: Exp) -> Exp:
    return tuple(max(x, y) for x, y in zip(a, b))


def spoly(f: WPoly, g: WPoly) -> WPoly:
    (ef, cf), (eg, cg) = f.lead(), g.lead()
    l = _lcm(ef, eg)
    mf = tuple(x - y for x, y in zip(l, ef))
    mg = tuple(x - y for x, y in zip(l, eg))
    return f.mul_term(mf, 1 / cf) - g.mul_term(mg, 1 / cg)


def buchberger(gens: Iterable[WPoly]) -> GroebnerBasis:
    """Reduced Groebner basis (normal selection, product and chain criteria)."""
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise ValueError("need at least one generator (or use an empty basis)")
    ring = gens[0].ring
    basis: list[WPoly] = []
    pairs: set[tuple[int, int]] = set()
    for g in gens:
        g = normal_form(g, basis) if basis else g
        if g.is_zero():
            continue
        basis.append(g.monic())
        k = len(basis) - 1
        pairs |= {(i, k) for i in range(k)}
    while pairs:
        i, j = min(pairs, key=lambda ij: (ring.key(_lcm(basis[ij[0]].lm(), basis[ij[1]].lm())), ij))
        pairs.discard((i, j))
        li, lj = basis[i].lm(), basis[j].lm()
        l = _lcm(li, lj)
        if all(not (x and y) for x, y in zip(li, lj)):
            continue  # product criterion
        if any(k not in (i, j) and _divides(basis[k].lm(), l)
               and (min(i, k), max(i, k)) not in pairs and (min(j, k), max(j, k)) not in pairs
               for k in range(len(basis))):
            continue  # chain criterion
        h = normal_form(spoly(basis[i], basis[j]), basis)
        if not h.is_zero():
            basis.append(h.monic())
            k = len(basis) - 1
            pairs |= {(m, k) for m in range(k)}
    return _interreduce(ring, basis)


def _interreduce(ring: RingSpec, basis: list[WPoly]) -> GroebnerBasis:
    basis = sorted(basis, key=lambda g: ring.key(g.lm()))
    minimal: list[WPoly] = []
    for g in basis:
        if not any(_divides(h.lm(), g.lm()) for h in minimal):
            minimal.append(g)
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        r = normal_form(g, others).monic()
        reduced.append(r)
    reduced.sort(key=lambda g: ring.key(g.lm()))
    return GroebnerBasis(ring, tuple(reduced))


def verify_groebner(G: GroebnerBasis) -> bool:
    """Re-check that every S-polynomial reduces to zero."""
    gens = G.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if not normal_form(spoly(gens[i], gens[j]), G).is_zero():
                return False
    return True


class NotDivisible(ValueError):
    pass


def exact_divide(p: WPoly, d: WPoly) -> WPoly:
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return p.ring.zero()
    rem, (q,) = _reduce_full(p, [d])
    if not rem.is_zero():
        raise NotDivisible("not divisible")
    return q


def quotient_basis(G: GroebnerBasis):
    """Standard monomials sorted by weighted degree, or the string "infinite"."""
    ring = G.ring
    leads = G.leading_monomials()
    bounds = []
    for i in range(ring.nvars):
        pure = [e[i] for e in leads if all(e[j] == 0 for j in range(ring.nvars) if j != i) and e[i] > 0]
        if not pure:
            return "infinite"
        bounds.append(min(pure))
    out = [e for e in itertools.product(*(range(b) for b in bounds))
           if not any(_divides(l, e) for l in leads)]
    out.sort(key=ring.key)
    return out


def standard_monomials(G: GroebnerBasis | Sequence[Exp], d: int, ring: RingSpec | None = None) -> list[Exp]:
    """Standard monomials of one weighted degree (works for infinite quotients)."""
    if isinstance(G, GroebnerBasis):
        leads, ring = G.leading_monomials(), G.ring
    else:
        leads = list(G)
    return [e for e in ring.monomials(d) if not any(_divides(l, e) for l in leads)]


# ---------------------------------------------------------------------------
# independent dense oracle
# ---------------------------------------------------------------------------

def ideal_dimension_oracle(gens: Sequence[WPoly], d: int) -> int:
    """dim of (gens) in weighted degree d for homogeneous gens, by spanning all
    monomial multiples and taking the rank."""
    ring = gens[0].ring
    mons = ring.monomials(d)
    col = {e: i for i, e in enumerate(mons)}
    rows = []
    for g in gens:
        dg = g.wdeg()
        if dg > d:
            continue
        for m in ring.monomials(d - dg):
            prod = g.mul_term(m, 1)
            row = [Fraction(0)] * len(mons)
            for e, c in prod.terms.items():
                row[col[e]] = c
            rows.append(row)
    if not rows or not mons:
        return 0
    return len(rref(rows, len(mons))[1])


def quotient_dimension_oracle(gens: Sequence[WPoly], d: int) -> int:
    return len(gens[0].ring.monomials(d)) - ideal_dimension_oracle(gens, d)


def euler_check(g: WPoly) -> bool:
    """Weighted Euler identity for a homogeneous polynomial."""
    d = g.wdeg()
    ring = g.ring
    acc = ring.zero()
    for i, w in enumerate(ring.weights):
        acc = acc + ring.gens()[i] * g.diff(i) * w
    return acc == g * d


def coefficient_vector(p: WPoly, basis: Sequence[Exp]) -> list[Scalar]:
    return [p.coeff(e) for e in basis]


def poly_from_vector(ring: RingSpec, basis: Sequence[Exp], vec: Sequence) -> WPoly:
    return WPoly(ring, {e: c for e, c in zip(basis, vec)})
