"""Algebraic Mukai lattice of a K3 surface with Picard group ZH.

Vectors are triples (a, y, b) standing for a + yH + b (rank, H-multiple,
degree part). The pairing is

    <(a, y, b), (a', y', b')> = h2*y*y' - a*b' - b*a'

where h2 = H.H. Everything is exact integer arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterator, Optional, Tuple

from .errors import InvalidDegree, NonPositiveSquare, NotPrimitive, OddDegree


@dataclass(frozen=True)
class SurfaceParams:
    """Degree data of a Picard-rank-1 K3 surface (H.H = h2 = 2d = 2g - 2)."""

    h2: int

    def __post_init__(self):
        if not isinstance(self.h2, int) or isinstance(self.h2, bool):
            raise TypeError("h2 must be an int")
        if self.h2 % 2:
            raise OddDegree(f"H.H must be even, got {self.h2}")
        if self.h2 < 2:
            raise InvalidDegree(f"H.H must be positive, got {self.h2}")

    @property
    def d(self) -> int:
        return self.h2 // 2

    @property
    def genus(self) -> int:
        return self.h2 // 2 + 1


@dataclass(frozen=True)
class MukaiVector:
    a: int
    y: int
    b: int

    def __iter__(self) -> Iterator[int]:
        yield self.a
        yield self.y
        yield self.b

    def __add__(self, other: "MukaiVector") -> "MukaiVector":
        return MukaiVector(self.a + other.a, self.y + other.y, self.b + other.b)

    def __sub__(self, other: "MukaiVector") -> "MukaiVector":
        return MukaiVector(self.a - other.a, self.y - other.y, self.b - other.b)

    def __neg__(self) -> "MukaiVector":
        return MukaiVector(-self.a, -self.y, -self.b)

    def __mul__(self, k: int) -> "MukaiVector":
        return MukaiVector(k * self.a, k * self.y, k * self.b)

    __rmul__ = __mul__

    def content(self) -> int:
        return gcd(gcd(self.a, self.y), self.b)

    def primitive(self) -> "MukaiVector":
        g = self.content()
        if g == 0:
            return self
        return MukaiVector(self.a // g, self.y // g, self.b // g)

    def is_zero(self) -> bool:
        return self.a == 0 and self.y == 0 and self.b == 0

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.a, self.y, self.b)

    def __str__(self):
        return f"({self.a},{self.y},{self.b})"

    @classmethod
    def parse(cls, text: str) -> "MukaiVector":
        parts = [p.strip() for p in text.strip().strip("()").split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated integers, got {text!r}")
        return cls(*(int(p) for p in parts))


def _as_params(s) -> SurfaceParams:
    return s if isinstance(s, SurfaceParams) else SurfaceParams(s)


def pair(u: MukaiVector, w: MukaiVector, s) -> int:
    h2 = _as_params(s).h2
    return h2 * u.y * w.y - u.a * w.b - u.b * w.a


def square(u: MukaiVector, s) -> int:
    return pair(u, u, s)


def is_spherical(u: MukaiVector, s) -> bool:
    return square(u, s) == -2


def is_isotropic(u: MukaiVector, s) -> bool:
    return square(u, s) == 0


def is_primitive(u: MukaiVector) -> bool:
    return u.content() == 1


@dataclass(frozen=True)
class OrthoBasis:
    """Saturated basis (f1, f2) of the orthogonal complement of v.

    ``gram[i][j]`` is the pairing of the i-th and j-th basis vectors.
    """

    v: MukaiVector
    f1: MukaiVector
    f2: MukaiVector
    gram: Tuple[Tuple[int, int], Tuple[int, int]]
    surface: SurfaceParams

    @property
    def det(self) -> int:
        (g11, g12), (_, g22) = self.gram
        return g11 * g22 - g12 * g12

    def form(self, m: int, n: int) -> int:
        """Gram quadratic form evaluated at coordinates (m, n)."""
        (g11, g12), (_, g22) = self.gram
        return g11 * m * m + 2 * g12 * m * n + g22 * n * n

    def bilinear(self, p: Tuple[int, int], q: Tuple[int, int]) -> int:
        (g11, g12), (_, g22) = self.gram
        return g11 * p[0] * q[0] + g12 * (p[0] * q[1] + p[1] * q[0]) + g22 * p[1] * q[1]

    def ambient(self, m: int, n: int) -> MukaiVector:
        return self.f1 * m + self.f2 * n

    def coords(self, x: MukaiVector) -> Optional[Tuple[int, int]]:
        return in_basis(x, self)


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def hnf_rows(rows):
    """Row Hermite normal form of an integer matrix (list of rows).

    Zero rows are dropped; pivots are positive and entries above a pivot
    are reduced into [0, pivot).
    """
    rows = [list(r) for r in rows]
    ncol = len(rows[0])
    r = 0
    for col in range(ncol):
        if r == len(rows):
            break
        for i in range(r + 1, len(rows)):
            if rows[i][col] == 0:
                continue
            g, p, q = _xgcd(rows[r][col], rows[i][col])
            a, b = rows[r][col] // g, rows[i][col] // g
            top, low = rows[r], rows[i]
            rows[r] = [p * x + q * y for x, y in zip(top, low)]
            rows[i] = [-b * x + a * y for x, y in zip(top, low)]
        if rows[r][col] == 0:
            continue
        if rows[r][col] < 0:
            rows[r] = [-x for x in rows[r]]
        for i in range(r):
            q = rows[i][col] // rows[r][col]
            rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return [row for row in rows if any(row)]


def kernel_basis(c):
    """Saturated basis of {x in Z^n : c . x = 0} for a nonzero integer row c."""
    n = len(c)
    # column operations on c, mirrored on an identity matrix
    cols = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    row = list(c)
    piv = next(j for j in range(n) if row[j] != 0)
    for j in range(n):
        if j == piv or row[j] == 0:
            continue
        g, p, q = _xgcd(row[piv], row[j])
        a, b = row[piv] // g, row[j] // g
        cp, cj = cols[piv], cols[j]
        cols[piv] = [p * x + q * y for x, y in zip(cp, cj)]
        cols[j] = [-b * x + a * y for x, y in zip(cp, cj)]
        row[piv], row[j] = g, 0
    return [cols[j] for j in range(n) if j != piv]


def orth_basis(v: MukaiVector, s) -> OrthoBasis:
    """Saturated HNF basis of v-perp, together with its Gram matrix."""
    s = _as_params(s)
    if not is_primitive(v):
        raise NotPrimitive(f"{v} is not primitive")
    if square(v, s) < 2:
        raise NonPositiveSquare(f"square of {v} is {square(v, s)} < 2")
    # <x, v> = c . x
    c = [-v.b, s.h2 * v.y, -v.a]
    f1, f2 = (MukaiVector(*r) for r in hnf_rows(kernel_basis(c)))
    gram = ((square(f1, s), pair(f1, f2, s)), (pair(f1, f2, s), square(f2, s)))
    return OrthoBasis(v, f1, f2, gram, s)


def in_basis(x: MukaiVector, basis: OrthoBasis) -> Optional[Tuple[int, int]]:
    """Integer coordinates of x in (f1, f2), or None if x is not in v-perp."""
    f1, f2 = basis.f1, basis.f2
    # pick two coordinates with nonzero 2x2 minor
    cols = list(zip(f1, f2, x))
    for i in range(3):
        for j in range(i + 1, 3):
            det = cols[i][0] * cols[j][1] - cols[i][1] * cols[j][0]
            if det == 0:
                continue
            mn = cols[i][2] * cols[j][1] - cols[i][1] * cols[j][2]
            nn = cols[i][0] * cols[j][2] - cols[i][2] * cols[j][0]
            if mn % det or nn % det:
                return None
            m, n = mn // det, nn // det
            if basis.ambient(m, n) != x:
                return None
            return (m, n)
    raise AssertionError("degenerate basis")
