"""Walls, chambers and the Eff/Mov/Nef cones of M_H(v).

Pic(M_H(v)) is identified with v-perp, a rank-2 lattice of signature (1, 1).
Rays are primitive vectors of v-perp oriented into the component of the
positive cone that contains the reference class U (the unique primitive
class of v-perp with vanishing rank component and positive H-coefficient).

Positions along the positive arc are measured by the exact projective
coordinate

    t(y) = -y.a / <y, U>

which is monotone along the arc, vanishes at U and is positive on the
ample side (where the Gieseker chamber sits).

A class a with a^2 = sq >= -2 and 0 <= <a, v> = pv <= pairing bound gives
the wall a-perp in v-perp. Writing x = v^2 a - pv v, the normal x lies in
v-perp with x^2 = -v^2 (pv^2 - v^2 sq); walls therefore come from finitely
many binary quadratic equations Q(x) = -N, whose solution sets are finite
unions of orbits under the automorphism M of the Gram form. Walls near U
are located exactly by walking those orbits.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Dict, List, Optional, Tuple

from .diophantine import (
    IDENTITY,
    bqf_automorphism,
    bqf_representatives,
    bqf_scan,
    canonical_in_orbit,
    is_square,
    mat_apply,
    mat_inv,
    mat_mul,
)
from .errors import (
    DualityMismatch,
    EmptyPullbackLine,
    IrrationalBoundary,
    NoWitness,
    UnstableEnumeration,
)
from .lattice import (
    MukaiVector,
    OrthoBasis,
    SurfaceParams,
    _as_params,
    in_basis,
    orth_basis,
    pair,
    square,
)

LAGRANGIAN = "Lagrangian"
HC = "HC"
LGU = "LGU"
BN = "BN"
FLOP = "Flop"
DIVISORIAL = (HC, LGU, BN)

DEFAULT_BOUND = 64
DEFAULT_MAX_DOUBLINGS = 8
PAIRING_BOUNDS = ("half-square", "literal")


@dataclass(frozen=True)
class Ray:
    coords: Tuple[int, int]
    ambient: MukaiVector
    square: int

    def __str__(self):
        return str(self.ambient)


@dataclass(frozen=True)
class Witness:
    cls: MukaiVector
    sq: int
    pv: int


@dataclass(frozen=True)
class Wall:
    ray: Ray
    witnesses: Tuple[Witness, ...]
    wall_type: Optional[str] = None
    contracted: Optional[MukaiVector] = None
    position: Optional[Fraction] = None

    @property
    def is_divisorial(self) -> bool:
        return self.wall_type in DIVISORIAL

    @property
    def vector(self) -> MukaiVector:
        """The witness that determines the wall type."""
        return _type_witness(self).cls


@dataclass(frozen=True)
class ConeDescription:
    kind: str
    lo: Ray
    hi: Ray
    generators: Tuple[str, str] = ("", "")

    @property
    def rays(self) -> Tuple[Ray, Ray]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class PositiveArc:
    """The positive-cone component containing the reference class.

    The boundary directions are the roots of the Gram form (A, B, C) in
    (m, n); they are rational exactly when the discriminant is a square.
    """

    basis: OrthoBasis
    reference: Tuple[int, int]
    form: Tuple[int, int, int]
    isotropic_rays: Tuple[Tuple[int, int], ...]

    @property
    def rational_boundary(self) -> bool:
        return bool(self.isotropic_rays)

    def contains(self, coords: Tuple[int, int], closed: bool = False) -> bool:
        q = self.basis.form(*coords)
        if q < 0 or (q == 0 and not closed):
            return False
        if coords == (0, 0):
            return False
        return self.basis.bilinear(coords, self.reference) > 0


@dataclass(frozen=True)
class FlopReport:
    has_flop: bool
    flop_walls: Tuple[Wall, ...]
    side_of_B: Tuple[int, ...]


# --------------------------------------------------------------------------
# small helpers


def _prim2(p: Tuple[int, int]) -> Tuple[int, int]:
    g = gcd(p[0], p[1])
    return (p[0] // g, p[1] // g) if g else p


def _det(p, q) -> int:
    return p[0] * q[1] - p[1] * q[0]


def _perp(basis: OrthoBasis, x: Tuple[int, int]) -> Tuple[int, int]:
    """A vector of v-perp orthogonal to x (coordinates)."""
    (g11, g12), (_, g22) = basis.gram
    gx = (g11 * x[0] + g12 * x[1], g12 * x[0] + g22 * x[1])
    return _prim2((-gx[1], gx[0]))


def _make_ray(basis: OrthoBasis, coords: Tuple[int, int]) -> Ray:
    c = _prim2(coords)
    return Ray(c, basis.ambient(*c), basis.form(*c))


def _pairing_bound(v: MukaiVector, s: SurfaceParams, mode: str) -> int:
    if mode == "half-square":
        return square(v, s) // 2
    if mode == "literal":
        return 2
    raise ValueError(f"unknown pairing bound {mode!r}")


# --------------------------------------------------------------------------
# reference class and positive arc


def orient_reference(v: MukaiVector, s) -> Ray:
    """Primitive class of v-perp with zero rank component and positive H part."""
    s = _as_params(s)
    basis = orth_basis(v, s)
    f1, f2 = basis.f1, basis.f2
    # solve m f1.a + n f2.a = 0
    c = _prim2((f2.a, -f1.a))
    if c == (0, 0):
        raise EmptyPullbackLine(f"rank component vanishes on all of {v}-perp")
    x = basis.ambient(*c)
    if x.y == 0:
        raise EmptyPullbackLine(f"pullback line of {v} has no H-component")
    if x.y < 0:
        c = (-c[0], -c[1])
    return _make_ray(basis, c)


def _isotropic_rays(basis: OrthoBasis) -> List[Tuple[int, int]]:
    (g11, g12), (_, g22) = basis.gram
    disc = 4 * (g12 * g12 - g11 * g22)
    if not is_square(disc):
        return []
    r = isqrt(disc)
    if g11 == 0:
        cands = [(1, 0), (g22, -2 * g12)]
    else:
        # Q = g11 m^2 + 2 g12 m n + g22 n^2 = 0
        cands = [(-2 * g12 + r, 2 * g11), (-2 * g12 - r, 2 * g11)]
    out = []
    for c in cands:
        c = _prim2(c)
        if c != (0, 0) and c not in out and (-c[0], -c[1]) not in out:
            out.append(c)
    return out


def positive_arc(basis: OrthoBasis) -> PositiveArc:
    """Exact description of the positive arc through the reference class."""
    if basis.det >= 0:
        raise ValueError("Gram form is not hyperbolic")
    u = orient_reference(basis.v, basis.surface).coords
    (g11, g12), (_, g22) = basis.gram
    rays = []
    for c in _isotropic_rays(basis):
        if basis.bilinear(c, u) < 0:
            c = (-c[0], -c[1])
        rays.append(c)
    return PositiveArc(basis, u, (g11, 2 * g12, g22), tuple(sorted(rays)))


# --------------------------------------------------------------------------
# witnesses and classification


def _witness_classes(v2: int, pb: int) -> List[Tuple[int, int, int]]:
    """(pv, sq, N) with N = v^2 (pv^2 - v^2 sq) > 0."""
    out = []
    for pv in range(0, pb + 1):
        sq = -2
        while pv * pv > sq * v2:
            out.append((pv, sq, v2 * (pv * pv - v2 * sq)))
            sq += 1
    return out


def _witnesses_of_ray(
    basis: OrthoBasis, ray: Tuple[int, int], classes
) -> List[Witness]:
    """Every primitive witness class of a positive-square ray."""
    v, s = basis.v, basis.surface
    v2 = square(v, s)
    x0 = _perp(basis, ray)
    q0 = basis.form(*x0)
    out = []
    if q0 >= 0:
        return out
    for pv, sq, N in classes:
        if N % (-q0):
            continue
        c2 = N // (-q0)
        if not is_square(c2):
            continue
        c = isqrt(c2)
        for sgn in (c, -c):
            x = basis.ambient(sgn * x0[0], sgn * x0[1]) + v * pv
            if x.a % v2 or x.y % v2 or x.b % v2:
                continue
            a = MukaiVector(x.a // v2, x.y // v2, x.b // v2)
            if a.content() != 1:
                continue
            out.append(Witness(a, sq, pv))
    return sorted(set(out), key=_witness_key)


def _witness_key(w: Witness):
    c = w.cls
    # display preference: nonzero H-part, small norm, then lexicographically large
    return (w.pv, w.sq, c.y == 0, abs(c.a) + abs(c.y) + abs(c.b), tuple(-k for k in c.as_tuple()))


def _type_witness(wall: Wall) -> Witness:
    ws = wall.witnesses
    t = wall.wall_type
    if t in (HC, LGU):
        # w and v - w can both qualify; show the smaller one
        pv = 1 if t == HC else 2
        return min(
            (w for w in ws if w.sq == 0 and w.pv == pv),
            key=lambda w: _witness_key(w)[3:],
        )
    if t == BN:
        return next(w for w in ws if w.sq == -2 and w.pv == 0)
    if t == LAGRANGIAN:
        return next((w for w in ws if w.cls == wall.ray.ambient), ws[0])
    # flops: spherical witness of least pairing, else the first in display order
    sph = [w for w in ws if w.sq == -2 and w.pv > 0]
    if sph:
        return sph[0]
    return min(ws, key=lambda w: _witness_key(w)[2:])


def _position(basis: OrthoBasis, u: Tuple[int, int], y: Tuple[int, int]) -> Fraction:
    return Fraction(-basis.ambient(*y).a, basis.bilinear(y, u))


def _ample_probe(basis: OrthoBasis) -> MukaiVector:
    """Some class of v-perp with negative rank component."""
    for c in ((1, 0), (0, 1), (1, 1), (1, -1)):
        x = basis.ambient(*c)
        if x.a != 0:
            return x if x.a < 0 else -x
    raise AssertionError("rank component vanishes on v-perp")


def classify_wall(wall: Wall, v: MukaiVector, s) -> Wall:
    """Fill in the type and contracted divisor of a witnessed wall.

    Priority: Lagrangian > HC > LGU > BN > Flop. The contracted divisor is
    oriented to pair positively with the side of the wall facing the
    reference class (the ample side for the wall through U itself).
    """
    s = _as_params(s)
    if not wall.witnesses:
        raise NoWitness(f"wall {wall.ray} has no witness")
    basis = orth_basis(v, s)
    v2 = square(v, s)
    ws = wall.witnesses
    if wall.ray.square == 0:
        kind = LAGRANGIAN
    elif any(w.sq == 0 and w.pv == 1 for w in ws):
        kind = HC
    elif any(w.sq == 0 and w.pv == 2 for w in ws):
        kind = LGU
    elif any(w.sq == -2 and w.pv == 0 for w in ws):
        kind = BN
    else:
        kind = FLOP
    contracted = None
    if kind in DIVISORIAL:
        if kind == BN:
            d = next(w for w in ws if w.sq == -2 and w.pv == 0).cls
        else:
            w = next(w for w in ws if w.sq == 0 and w.pv == (1 if kind == HC else 2))
            d = (w.cls * v2 - v * w.pv).primitive()
        u = orient_reference(v, s)
        pos = _position(basis, u.coords, wall.ray.coords)
        probe = u.ambient if pos != 0 else _ample_probe(basis)
        if pair(d, probe, s) < 0:
            d = -d
        contracted = d
    pos = wall.position
    if pos is None:
        pos = _position(basis, orient_reference(v, s).coords, wall.ray.coords)
    return Wall(wall.ray, ws, kind, contracted, pos)


# --------------------------------------------------------------------------
# the engine


class _Orbit:
    """One orbit of normals x (coordinates) under the form automorphism."""

    def __init__(self, engine: "_Engine", cls, rep):
        self.e = engine
        self.pv, self.sq, self.N = cls
        self.rep = rep
        e = engine
        if e.M == IDENTITY:
            self.period = 1
            self.congruent_any = self._congruent(rep)
        else:
            self.period = e.period
            cur, any_ok = rep, False
            for _ in range(e.period):
                if self._congruent(cur):
                    any_ok = True
                    break
                cur = mat_apply(e.M, cur)
            self.congruent_any = any_ok

    def _congruent(self, x) -> bool:
        e = self.e
        amb = e.basis.ambient(*x) + e.v * self.pv
        return amb.a % e.v2 == 0 and amb.y % e.v2 == 0 and amb.b % e.v2 == 0

    def _ray(self, x):
        e = self.e
        y = _perp(e.basis, x)
        if e.basis.bilinear(y, e.u) < 0:
            y = (-y[0], -y[1])
        return y

    def t(self, x) -> Fraction:
        return _position(self.e.basis, self.e.u, self._ray(x))

    def members(self, lo: Fraction, hi: Fraction, lo_open=False, hi_open=False):
        """Congruent members with position in the interval [lo, hi]."""
        e = self.e
        if not self.congruent_any:
            return []

        def inside(t):
            return (t > lo if lo_open else t >= lo) and (t < hi if hi_open else t <= hi)

        if e.M == IDENTITY:
            x = self.rep
            return [x] if inside(self.t(x)) and self._congruent(x) else []
        up, down = e.up, e.down
        cur = self.rep
        while self.t(cur) >= lo:
            cur = mat_apply(down, cur)
        while not self.t(cur) >= lo:
            cur = mat_apply(up, cur)
        out = []
        while True:
            t = self.t(cur)
            if t > hi:
                break
            if inside(t) and self._congruent(cur):
                out.append(cur)
            cur = mat_apply(up, cur)
        return out

    def nearest(self, side: int):
        """Congruent member nearest to U with t > 0 (side=1) or t <= 0 (side=-1)."""
        e = self.e
        if not self.congruent_any:
            return None
        if e.M == IDENTITY:
            x = self.rep
            if not self._congruent(x):
                return None
            t = self.t(x)
            return x if (t > 0 if side > 0 else t <= 0) else None
        up, down = e.up, e.down
        cur = self.rep
        if side > 0:
            while self.t(cur) > 0:
                cur = mat_apply(down, cur)
            while not self.t(cur) > 0:
                cur = mat_apply(up, cur)
            step = up
        else:
            while self.t(cur) <= 0:
                cur = mat_apply(up, cur)
            while self.t(cur) > 0:
                cur = mat_apply(down, cur)
            step = down
        for _ in range(self.period):
            if self._congruent(cur):
                return cur
            cur = mat_apply(step, cur)
        raise AssertionError("congruence period exceeded")


def _matrix_order_mod(M, n: int) -> int:
    red = lambda P: tuple(tuple(c % n for c in row) for row in P)
    ident = red(IDENTITY)
    Mn = red(M)
    cur, k = Mn, 1
    while cur != ident:
        cur = red(mat_mul(cur, Mn))
        k += 1
    return k


class _Engine:
    def __init__(self, v: MukaiVector, s: SurfaceParams, bound: int, max_doublings: int, mode: str):
        self.v, self.s = v, s
        self.basis = basis = orth_basis(v, s)
        self.v2 = square(v, s)
        self.pb = _pairing_bound(v, s, mode)
        self.mode = mode
        self.arc = positive_arc(basis)
        self.u = self.arc.reference
        self.U = _make_ray(basis, self.u)
        A, B, C = self.arc.form
        self.M = bqf_automorphism(A, B, C)
        if self.M != IDENTITY:
            self.period = _matrix_order_mod(self.M, self.v2)
            Mi = mat_inv(self.M)
            tU = _position(basis, self.u, _prim2(mat_apply(self.M, self.u)))
            self.up, self.down = (self.M, Mi) if tU > 0 else (Mi, self.M)
        self.classes = _witness_classes(self.v2, self.pb)
        self.warnings: List[str] = []
        self.bound = self._certify_bound(bound, max_doublings)
        self.orbits = [
            _Orbit(self, cls, rep)
            for cls, reps in self.reps.items()
            for rep in reps
        ]
        self._compute()

    # -- enumeration certificate: scanned seeds must meet every exact orbit
    def _certify_bound(self, bound: int, max_doublings: int) -> int:
        A, B, C = self.arc.form
        self.reps: Dict[Tuple[int, int, int], List[Tuple[int, int]]] = {}
        for cls in self.classes:
            self.reps[cls] = bqf_representatives(A, B, C, -cls[2])
        b = bound
        for _ in range(max_doublings + 1):
            if self._covered(b):
                return b
            b *= 2
        raise UnstableEnumeration(
            f"coefficient scan up to {b // 2} misses wall orbits of {self.v}"
        )

    def _covered(self, b: int) -> bool:
        A, B, C = self.arc.form
        if self.M == IDENTITY:
            # square discriminant: the solution sets are finite and exact
            return True
        for cls, reps in self.reps.items():
            seen = set()
            for x in bqf_scan(A, B, C, -cls[2], b):
                seen.add(canonical_in_orbit(x, self.M))
            want = {canonical_in_orbit(r, self.M) for r in reps}
            if not want <= seen:
                return False
        return True

    def _wall_at(self, y: Tuple[int, int]) -> Wall:
        ray = _make_ray(self.basis, y)
        if ray.square == 0:
            ws = [Witness(ray.ambient, 0, 0)]
        else:
            ws = _witnesses_of_ray(self.basis, y, self.classes)
        pos = _position(self.basis, self.u, y)
        return classify_wall(Wall(ray, tuple(ws), position=pos), self.v, self.s)

    def _boundary(self, side: int):
        """Nearest divisorial wall, or the isotropic ray, on one side of U."""
        best = None
        for o in self.orbits:
            if (o.pv, o.sq) not in ((1, 0), (2, 0), (0, -2)):
                continue
            x = o.nearest(side)
            if x is None:
                continue
            y = o._ray(x)
            t = _position(self.basis, self.u, y)
            if best is None or (t < best[0] if side > 0 else t > best[0]):
                best = (t, y)
        iso = [
            (_position(self.basis, self.u, c), c)
            for c in self.arc.isotropic_rays
            if (_position(self.basis, self.u, c) > 0) == (side > 0)
        ]
        if best is not None:
            return best
        if iso:
            return iso[0]
        raise IrrationalBoundary(
            f"movable cone of {self.v} has an irrational boundary on the "
            f"{'ample' if side > 0 else 'far'} side"
        )

    def _compute(self):
        t_hi, y_hi = self._boundary(1)
        t_lo, y_lo = self._boundary(-1)
        rays = {y_hi, y_lo}
        for o in self.orbits:
            for x in o.members(t_lo, t_hi):
                rays.add(o._ray(x))
        walls = [self._wall_at(y) for y in rays]
        walls.sort(key=lambda w: w.position, reverse=True)
        self.walls_in_mov = walls
        self.mov_hi = next(w for w in walls if w.ray.coords == y_hi)
        self.mov_lo = next(w for w in walls if w.ray.coords == y_lo)
        self.nef_hi = min((w for w in walls if w.position > 0), key=lambda w: w.position)
        self.nef_lo = max((w for w in walls if w.position <= 0), key=lambda w: w.position)

    def scanned_walls(self) -> List[Wall]:
        """Walls with a normal of coefficients <= bound, plus the arc's isotropic rays."""
        A, B, C = self.arc.form
        rays = set(self.arc.isotropic_rays)
        for pv, sq, N in self.classes:
            o = _Orbit.__new__(_Orbit)
            o.e, o.pv, o.sq, o.N = self, pv, sq, N
            for x in bqf_scan(A, B, C, -N, self.bound):
                if o._congruent(x):
                    rays.add(o._ray(x))
        return [self._wall_at(y) for y in rays]


@lru_cache(maxsize=512)
def _engine_cached(v, h2, bound, max_doublings, mode):
    return _Engine(v, SurfaceParams(h2), bound, max_doublings, mode)


def _engine(v, s, bound=None, max_doublings=None, pairing_bound="half-square") -> _Engine:
    s = _as_params(s)
    return _engine_cached(
        v,
        s.h2,
        DEFAULT_BOUND if bound is None else bound,
        DEFAULT_MAX_DOUBLINGS if max_doublings is None else max_doublings,
        pairing_bound,
    )


# --------------------------------------------------------------------------
# public operations


def enumerate_walls(v: MukaiVector, s, bound=None, max_doublings=None, pairing_bound="half-square") -> List[Wall]:
    """Walls meeting the closed movable cone together with all walls whose
    normal has coordinates within ``bound``, ordered by position (ample side
    first)."""
    e = _engine(v, s, bound, max_doublings, pairing_bound)
    by_ray = {w.ray.coords: w for w in e.scanned_walls()}
    for w in e.walls_in_mov:
        by_ray[w.ray.coords] = w
    return sorted(by_ray.values(), key=lambda w: w.position, reverse=True)


def movable_walls(v: MukaiVector, s, **kw) -> List[Wall]:
    """Walls of the closed movable cone, from the ample-side boundary to the far one."""
    return list(_engine(v, s, **kw).walls_in_mov)


def _wall_note(w: Wall) -> str:
    return f"{w.wall_type} wall, witness {w.vector}"


def movable_cone(v: MukaiVector, s, **kw) -> ConeDescription:
    e = _engine(v, s, **kw)
    return ConeDescription(
        "Mov", e.mov_lo.ray, e.mov_hi.ray, (_wall_note(e.mov_lo), _wall_note(e.mov_hi))
    )


def nef_cone(v: MukaiVector, s, **kw) -> ConeDescription:
    e = _engine(v, s, **kw)
    return ConeDescription(
        "Nef", e.nef_lo.ray, e.nef_hi.ray, (_wall_note(e.nef_lo), _wall_note(e.nef_hi))
    )


def _eff_generator(e: _Engine, w: Wall) -> Tuple[Ray, str]:
    if w.wall_type == LAGRANGIAN:
        return w.ray, f"isotropic ray {w.ray.ambient}"
    return _make_ray(e.basis, in_basis(w.contracted, e.basis)), f"{w.wall_type} contracted divisor"


def _dual_ray(e: _Engine, m: Ray, other: Ray) -> Ray:
    y = _perp(e.basis, m.coords)
    if e.basis.bilinear(y, other.coords) < 0 or (
        e.basis.bilinear(y, other.coords) == 0 and e.basis.bilinear(y, e.u) < 0
    ):
        y = (-y[0], -y[1])
    return _make_ray(e.basis, y)


def effective_cone(v: MukaiVector, s, **kw) -> ConeDescription:
    """Eff as the dual of Mov, checked against the generator description."""
    e = _engine(v, s, **kw)
    lo, lo_note = _eff_generator(e, e.mov_lo)
    hi, hi_note = _eff_generator(e, e.mov_hi)
    d_lo = _dual_ray(e, e.mov_lo.ray, e.mov_hi.ray)
    d_hi = _dual_ray(e, e.mov_hi.ray, e.mov_lo.ray)
    if (d_lo, d_hi) != (lo, hi):
        raise DualityMismatch(
            f"Eff of {v}: generators {lo}, {hi} but Mov-dual {d_lo}, {d_hi}"
        )
    return ConeDescription("Eff", lo, hi, (lo_note, hi_note))


def flop_report(v: MukaiVector, s, B: Optional[MukaiVector] = None, **kw) -> FlopReport:
    """Flop walls strictly inside Mov, with the sign of each against B.

    B defaults to the class pairing to -v^2 * x.a with every x in v-perp,
    which is positive exactly on the ample side.
    """
    s = _as_params(s)
    e = _engine(v, s, **kw)
    if B is None:
        B = ample_side_class(v, s)
    flops = tuple(
        w for w in e.walls_in_mov if w.wall_type == FLOP and w is not e.mov_lo and w is not e.mov_hi
    )
    signs = []
    for w in flops:
        p = pair(w.ray.ambient, B, s)
        signs.append((p > 0) - (p < 0))
    return FlopReport(bool(flops), flops, tuple(signs))


def ample_side_class(v: MukaiVector, s) -> MukaiVector:
    """Primitive class of v-perp orthogonal to U, positive on the ample side."""
    s = _as_params(s)
    v2 = square(v, s)
    return (MukaiVector(0, 0, v2) + v * v.a).primitive()


def enumeration_bound(v: MukaiVector, s, **kw) -> int:
    """The certified coefficient bound actually used for v."""
    return _engine(v, s, **kw).bound
