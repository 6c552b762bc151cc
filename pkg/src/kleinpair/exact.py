"""Exact scalars: rationals and elements of cyclotomic fields, plus dense
exact linear algebra.

Rational values are always represented by :class:`fractions.Fraction`; an
arithmetic result that happens to be rational collapses to a ``Fraction``.
Non-rational values are :class:`CycloNum` instances.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

Scalar = Union[Fraction, "CycloNum"]


# ---------------------------------------------------------------------------
# cyclotomic polynomials and embeddings
# ---------------------------------------------------------------------------

def _mobius(n: int) -> int:
    res, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            res = -res
        p += 1
    if n > 1:
        res = -res
    return res


def euler_phi(n: int) -> int:
    res, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            res -= res // p
        p += 1
    if m > 1:
        res -= res // m
    return res


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, low degree first; den monic up to sign
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        q = num[i + len(den) - 1] // lead
        out[i] = q
        if q:
            for j, d in enumerate(den):
                num[i + j] -= q * d
    assert not any(num), "cyclotomic division not exact"
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, low degree first."""
    # Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d
    res = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            res = _poly_divexact(res, list(cyclotomic_poly(d)))
    return tuple(res)


def _normal_conductor(n: int) -> int:
    return n // 2 if n % 4 == 2 else n


@lru_cache(maxsize=None)
def _power_vector(n: int, k: int) -> tuple[int, ...]:
    """zeta_n^k in the power basis of Q(zeta_n), n not 2 mod 4."""
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    k %= n
    vec = [0] * max(k + 1, deg)
    vec[k] = 1
    return tuple(_reduce(vec, n))


def _reduce(vec: list[int], n: int) -> list[int]:
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    vec = list(vec)
    for i in range(len(vec) - 1, deg - 1, -1):
        c = vec[i]
        if c:
            vec[i] = 0
            for j in range(deg):
                vec[i - deg + j] -= c * phi[j]
    vec = vec[:deg]
    if len(vec) < deg:
        vec += [0] * (deg - len(vec))
    return vec


@lru_cache(maxsize=None)
def _root_vector(n: int, k: int, target: int) -> tuple[int, ...]:
    """Power-basis vector of zeta_n^k inside Q(zeta_target), n | target (up to
    the 2 mod 4 normalisation)."""
    k %= n
    if n % 4 == 2:
        m = n // 2
        # zeta_n = -zeta_m^((m+1)/2)
        v = _root_vector(m, k * ((m + 1) // 2), target)
        return tuple(-c for c in v) if k % 2 else v
    assert target % n == 0, (n, target)
    return _power_vector(target, k * (target // n))


@lru_cache(maxsize=None)
def _embed_matrix(n: int, target: int) -> tuple[tuple[int, ...], ...]:
    deg = euler_phi(n)
    return tuple(_root_vector(n, k, target) for k in range(deg))


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


# ---------------------------------------------------------------------------
# CycloNum
# ---------------------------------------------------------------------------

class CycloNum:
    """An element of Q(zeta_n) stored as integer power-basis numerators over a
    positive common denominator.  Immutable."""

    __slots__ = ("conductor", "_nums", "_den")

    def __init__(self, conductor: int, coeffs: Mapping[int, object] | None = None):
        n = _normal_conductor(int(conductor))
        if n < 1:
            raise ValueError("conductor must be positive")
        deg = euler_phi(n)
        acc = [Fraction(0)] * deg
        for k, c in (coeffs or {}).items():
            c = Fraction(c)
            if c:
                for i, e in enumerate(_root_vector(conductor, k, n)):
                    if e:
                        acc[i] += c * e
        den = 1
        for c in acc:
            den = den * c.denominator // math.gcd(den, c.denominator)
        self.conductor = n
        self._set(tuple(int(c * den) for c in acc), den)

    def _set(self, nums: tuple[int, ...], den: int) -> None:
        g = den
        for x in nums:
            if x:
                g = math.gcd(g, x)
        if g != 1:
            nums = tuple(x // g for x in nums)
            den //= g
        self._nums = nums
        self._den = den

    @classmethod
    def _raw(cls, n: int, nums: tuple[int, ...], den: int) -> "CycloNum":
        obj = cls.__new__(cls)
        obj.conductor = n
        obj._set(nums, den)
        return obj

    # -- views ---------------------------------------------------------------
    @property
    def coeffs(self) -> dict[int, Fraction]:
        """Canonical form: exponent -> nonzero rational coefficient."""
        return {k: Fraction(x, self._den) for k, x in enumerate(self._nums) if x}

    def is_rational(self) -> bool:
        return not any(self._nums[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not rational")
        return Fraction(self._nums[0], self._den)

    def __complex__(self) -> complex:
        z = cmath.exp(2j * math.pi / self.conductor)
        return sum(x * z ** k for k, x in enumerate(self._nums)) / self._den

    def embed(self, target: int) -> tuple[tuple[int, ...], int]:
        target = _normal_conductor(target)
        if target == self.conductor:
            return self._nums, self._den
        mat = _embed_matrix(self.conductor, target)
        out = [0] * euler_phi(target)
        for x, row in zip(self._nums, mat):
            if x:
                for i, e in enumerate(row):
                    if e:
                        out[i] += x * e
        return tuple(out), self._den

    # -- arithmetic ------------------------------------------------------------
    def _common(self, other: "CycloNum"):
        n = _normal_conductor(_lcm(self.conductor, other.conductor))
        a, da = self.embed(n)
        b, db = other.embed(n)
        return n, a, da, b, db

    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        n, a, da, b, db = self._common(other)
        g = math.gcd(da, db)
        ma, mb = db // g, da // g
        return _collapse(n, tuple(x * ma + y * mb for x, y in zip(a, b)), da * ma)

    __radd__ = __add__

    def __neg__(self):
        return CycloNum._raw(self.conductor, tuple(-x for x in self._nums), self._den)

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return Fraction(0)
            return _collapse(self.conductor,
                             tuple(x * other.numerator for x in self._nums),
                             self._den * other.denominator)
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        n, a, da, b, db = self._common(other)
        prod = [0] * (2 * len(a) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return _collapse(n, tuple(_reduce(prod, n)), da * db)

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        """Multiplicative inverse via the product of the other Galois conjugates."""
        if not any(self._nums):
            raise ZeroDivisionError("CycloNum division by zero")
        n = self.conductor
        acc: Scalar = Fraction(1)
        for k in range(2, n):
            if math.gcd(k, n) == 1:
                acc = acc * self.galois(k)
        norm = acc * self
        if isinstance(norm, CycloNum):
            norm = norm.rational_value()
        return acc * (1 / norm)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result: Scalar = Fraction(1)
        base: Scalar = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def galois(self, k: int) -> Scalar:
        """Image under zeta -> zeta^k (k coprime to the conductor)."""
        n = self.conductor
        acc = [0] * euler_phi(n)
        for i, x in enumerate(self._nums):
            if x:
                for j, e in enumerate(_power_vector(n, i * k)):
                    acc[j] += x * e
        return _collapse(n, tuple(acc), self._den)

    def conjugate(self) -> Scalar:
        return self.galois(-1 % self.conductor if self.conductor > 1 else 1)

    def __bool__(self) -> bool:
        return any(self._nums)

    def __eq__(self, other) -> bool:
        if isinstance(other, CycloNum):
            if other.conductor == self.conductor:
                return self._den == other._den and self._nums == other._nums
            return not (self - other)
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self._nums[0], self._den) == other
        return NotImplemented

    def normalized_trace(self) -> Fraction:
        """Trace to Q divided by the field degree; independent of the conductor."""
        n = self.conductor
        tot = Fraction(0)
        for k, x in enumerate(self._nums):
            if x:
                m = n // math.gcd(k, n)
                tot += Fraction(x * _mobius(m), euler_phi(m))
        return tot / self._den

    def __hash__(self) -> int:
        return hash(self.normalized_trace())

    def __repr__(self) -> str:
        return f"CycloNum({self.conductor}, {self.coeffs!r})"

    def __str__(self) -> str:
        return format_scalar(self)


def _collapse(n: int, nums: tuple[int, ...], den: int) -> Scalar:
    if not any(nums[1:]):
        return Fraction(nums[0], den)
    return CycloNum._raw(n, nums, den)


def _lift(x) -> CycloNum:
    if isinstance(x, CycloNum):
        return x
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return CycloNum._raw(1, (x.numerator,), x.denominator)
    return NotImplemented


def zeta(n: int, k: int = 1) -> Scalar:
    """The root of unity exp(2 pi i k / n) as an exact scalar."""
    return canonicalize(CycloNum(n, {k % n: 1}))


def canonicalize(x) -> Scalar:
    """Reduce x modulo the cyclotomic polynomial of its conductor.  Rational
    results come back as Fraction."""
    if isinstance(x, CycloNum):
        return _collapse(x.conductor, x._nums, x._den)
    return Fraction(x)


def conj(x: Scalar) -> Scalar:
    return x.conjugate() if isinstance(x, CycloNum) else x


def to_complex(x: Scalar) -> complex:
    return complex(x) if isinstance(x, CycloNum) else complex(float(x))


def is_rational(x: Scalar) -> bool:
    return not isinstance(x, CycloNum)


def conductor_of(x: Scalar) -> int:
    return x.conductor if isinstance(x, CycloNum) else 1


def real_sign(x: Scalar) -> int:
    """Sign of a real scalar (exact zero test, numeric sign otherwise)."""
    if isinstance(x, CycloNum):
        if not x:
            return 0
        z = complex(x)
        if abs(z.imag) > 1e-9 * max(1.0, abs(z)):
            raise ValueError("scalar is not real")
        if abs(z.real) < 1e-12:
            import mpmath
            mpmath.mp.dps = 60
            w = mpmath.exp(2j * mpmath.pi / x.conductor)
            val = sum(c * w ** k for k, c in x.coeffs.items())
            return 1 if mpmath.re(val) > 0 else -1
        return 1 if z.real > 0 else -1
    return (x > 0) - (x < 0)


def format_scalar(x: Scalar) -> str:
    """Text form "c0 + c1*z(n)^1 + ..." with rationals as "p/q"."""
    if not isinstance(x, CycloNum):
        return str(Fraction(x))
    parts = []
    for k, c in sorted(x.coeffs.items()):
        parts.append(str(c) if k == 0 else f"{c}*z({x.conductor})^{k}")
    return " + ".join(parts)


def parse_scalar(text: str) -> Scalar:
    text = text.strip()
    if "z(" not in text:
        return Fraction(text)
    acc: Scalar = Fraction(0)
    for part in text.split(" + "):
        part = part.strip()
        if "*z(" in part:
            c, rest = part.split("*z(")
            n, k = rest.split(")^")
            acc = acc + Fraction(c) * zeta(int(n), int(k))
        else:
            acc = acc + Fraction(part)
    return acc


# ---------------------------------------------------------------------------
# linear algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, tuple(canonicalize(x) for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def to_rows(self) -> list[list]:
        return [self.row(i) for i in range(self.rows)]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc = Fraction(0)
                for k in range(self.cols):
                    a = self.entries[i * self.cols + k]
                    if a:
                        b = other.entries[k * other.cols + j]
                        if b:
                            acc = acc + a * b
                out.append(acc)
        return ExactMatrix(self.rows, other.cols, tuple(out))

    def apply(self, vec: Sequence) -> list:
        return [sum((self[i, k] * vec[k] for k in range(self.cols) if self[i, k] and vec[k]),
                    Fraction(0)) for i in range(self.rows)]

    def det(self) -> Scalar:
        if self.rows != self.cols:
            raise ValueError("square matrix required")
        rows = self.to_rows()
        n = self.rows
        sign, det = 1, Fraction(1)
        for c in range(n):
            p = next((r for r in range(c, n) if rows[r][c]), None)
            if p is None:
                return Fraction(0)
            if p != c:
                rows[c], rows[p] = rows[p], rows[c]
                sign = -sign
            piv = rows[c][c]
            det = det * piv
            inv = 1 / piv
            for r in range(c + 1, n):
                f = rows[r][c]
                if f:
                    f = f * inv
                    rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
        return det * sign

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix.from_rows([[self[i, j] for i in range(self.rows)] for j in range(self.cols)])


class InconsistentSystem(ValueError):
    """Raised by solve_linear when A x = b has no solution."""


@dataclass(frozen=True)
class LinearSolution:
    particular: tuple
    kernel: tuple  # tuple of basis vectors


def _all_rational(rows) -> bool:
    return all(not isinstance(x, CycloNum) for r in rows for x in r)


def _bareiss_rref(rows: list[list[Fraction]], ncols: int):
    # clear denominators row by row, then fraction-free elimination on ints
    irows = []
    for r in rows:
        den = 1
        for x in r:
            if x:
                den = den * x.denominator // math.gcd(den, x.denominator)
        irows.append([int(x * den) for x in r])
    m = len(irows)
    pivots = []
    prev = 1
    rank = 0
    for c in range(ncols):
        p = next((i for i in range(rank, m) if irows[i][c]), None)
        if p is None:
            continue
        irows[rank], irows[p] = irows[p], irows[rank]
        piv_row = irows[rank]
        pv = piv_row[c]
        for i in range(rank + 1, m):
            row = irows[i]
            f = row[c]
            if f:
                irows[i] = [(pv * x - f * y) // prev for x, y in zip(row, piv_row)]
            elif pv != prev:
                irows[i] = [(pv * x) // prev for x in row]
        prev = pv
        pivots.append(c)
        rank += 1
    # back substitution over Q
    out = [[Fraction(x) for x in irows[i]] for i in range(rank)]
    for i in range(rank - 1, -1, -1):
        c = pivots[i]
        inv = 1 / out[i][c]
        out[i] = [x * inv for x in out[i]]
        for k in range(i):
            f = out[k][c]
            if f:
                out[k] = [x - f * y for x, y in zip(out[k], out[i])]
    return out, pivots


def _gauss_rref(rows: list[list], ncols: int):
    rows = [list(r) for r in rows]
    m = len(rows)
    pivots = []
    rank = 0
    for c in range(ncols):
        p = next((i for i in range(rank, m) if rows[i][c]), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        inv = 1 / rows[rank][c]
        rows[rank] = [x * inv if x else x for x in rows[rank]]
        pr = rows[rank]
        for i in range(m):
            if i != rank:
                f = rows[i][c]
                if f:
                    rows[i] = [x - f * y if y else x for x, y in zip(rows[i], pr)]
        pivots.append(c)
        rank += 1
    return rows[:rank], pivots


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    rows = [[canonicalize(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [], []
    if _all_rational(rows):
        return _bareiss_rref(rows, ncols)
    return _gauss_rref(rows, ncols)


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def kernel_from_rref(red, pivots, ncols) -> list[list]:
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in zip(red, pivots):
            if r[f]:
                v[p] = -r[f]
        basis.append(v)
    return basis


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list]:
    red, piv = rref(rows, ncols)
    return kernel_from_rref(red, piv, ncols)


def solve_linear(A: ExactMatrix | Sequence[Sequence], b: Sequence) -> LinearSolution:
    """Solve A x = b exactly; returns a particular solution (free variables at
    zero) and a basis of the kernel.  Raises InconsistentSystem."""
    rows = A.to_rows() if isinstance(A, ExactMatrix) else [list(r) for r in A]
    ncols = A.cols if isinstance(A, ExactMatrix) else (len(rows[0]) if rows else 0)
    if len(b) != len(rows):
        raise ValueError("b length must equal the number of rows")
    aug = [r + [canonicalize(x)] for r, x in zip(rows, b)]
    red, piv = rref(aug, ncols + 1)
    if ncols in piv:
        raise InconsistentSystem("inconsistent")
    part = [Fraction(0)] * ncols
    for r, p in zip(red, piv):
        part[p] = r[ncols]
    ker = kernel_from_rref([r[:ncols] for r in red], piv, ncols)
    return LinearSolution(tuple(part), tuple(tuple(k) for k in ker))


def dot(a: Iterable, b: Iterable) -> Scalar:
    acc: Scalar = Fraction(0)
    for x, y in zip(a, b):
        if x and y:
            acc = acc + x * y
    return acc
