"""Projectivized bundles P(F) inside moduli spaces, and their thresholds.

Two scenarios are modelled:

* ``HilbertScheme``: X = S^[2] = M(1, 0, -1) and P(F) = P(Omega_S) is the
  Hilbert-Chow exceptional divisor. Classes (a, y, a) of v-perp restrict to
  -a L + 2y H~.
* ``MukaiKernel``: F is a rigid bundle with Mukai vector vF (vF^2 = -2) and
  P(F) sits in X = M(vF - (0, 0, 1)). Classes (a, y, b) restrict to
  -a L + y H~.

Restricted classes are pairs (l, h) meaning l L + h H~. A threshold
alpha = h / l is read off the primitive pair with l > 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .cones import (
    FLOP,
    Wall,
    _engine,
    ample_side_class,
    effective_cone,
    flop_report,
    orient_reference,
)
from .errors import BadModuliVector, InvalidDegree, NoRigidVector, NotInComplement, NotRigid
from .lattice import MukaiVector, SurfaceParams, _as_params, is_primitive, pair, square

HILBERT = "HilbertScheme"
KERNEL = "MukaiKernel"

# status codes
NO_FLOP = "NoFlopTheoremApplies"
FLOP_OBSTRUCTS = "FlopObstructsEff"
LAGRANGIAN_EQ = "LagrangianBoundaryEffEqualsNef"
NEF_FROM_FLOP = "NefFromFlopWall"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class BundleSetup:
    surface: SurfaceParams
    vF: Optional[MukaiVector]
    vX: MukaiVector
    kind: str
    B: MukaiVector
    warnings: Tuple[str, ...] = ()

    def restrict(self, x: MukaiVector) -> Tuple[int, int]:
        return restrict_ray(self, x)


@dataclass(frozen=True)
class Threshold:
    alpha_e: Optional[Fraction]
    alpha_n: Optional[Fraction]
    eff_ray: Optional[Tuple[int, int]]
    nef_ray: Optional[Tuple[int, int]]
    status_e: str
    status_n: str
    # every reason code that applied, including why a value is absent
    reasons: Tuple[str, ...] = ()

    @property
    def status(self) -> Tuple[str, str]:
        return (self.status_e, self.status_n)


@dataclass(frozen=True)
class Hypotheses:
    no_flop: bool
    no_flop_B_side: bool
    nef_eq_mov_B_side: bool


def rho(r: int, g: int, d: int) -> int:
    """Brill-Noether number g - (r+1)(g-d+r)."""
    return g - (r + 1) * (g - d + r)


def hilbert_setup(s) -> BundleSetup:
    s = _as_params(s)
    vX = MukaiVector(1, 0, -1)
    return BundleSetup(s, None, vX, HILBERT, ample_side_class(vX, s))


def kernel_setup(vF: MukaiVector, s, warnings: Tuple[str, ...] = ()) -> BundleSetup:
    s = _as_params(s)
    if square(vF, s) != -2:
        raise NotRigid(f"{vF} has square {square(vF, s)}, not -2")
    if vF.a < 2:
        raise BadModuliVector(f"{vF} must have rank at least 2")
    vX = vF - MukaiVector(0, 0, 1)
    if not is_primitive(vX) or square(vX, s) < 2:
        raise BadModuliVector(f"{vX} is not a primitive vector of square >= 2")
    B = ample_side_class(vX, s)
    u = orient_reference(vX, s).ambient
    assert pair(B, vX, s) == 0 and pair(B, u, s) == 0
    return BundleSetup(s, vF, vX, KERNEL, B, tuple(warnings))


def lm_from_rgd(r: int, g: int, d: int) -> BundleSetup:
    """Setup for the rigid bundle with Lazarsfeld-Mukai numerics (r, g, d).

    The vector (r+1, H, r-d+g) is tried first. If it is not rigid, the
    degree part is replaced by the one forced by rigidity,
    (H.H + 2) / (2(r+1)), and a warning is recorded.
    """
    if g < 2:
        raise InvalidDegree(f"genus must be at least 2, got {g}")
    s = SurfaceParams(2 * g - 2)
    vF = MukaiVector(r + 1, 1, r - d + g)
    if square(vF, s) == -2:
        return kernel_setup(vF, s)
    num, den = s.h2 + 2, 2 * (r + 1)
    if num % den:
        raise NoRigidVector(f"no rigid vector of rank {r + 1} for (r,g,d)=({r},{g},{d})")
    alt = MukaiVector(r + 1, 1, num // den)
    msg = (
        f"(r,g,d)=({r},{g},{d}): {vF} is not rigid (rho={rho(r, g, d)}); "
        f"using the rigid vector {alt}"
    )
    return kernel_setup(alt, s, (msg,))


def kernel_of_polarization(s) -> BundleSetup:
    """Kernel of the evaluation map of H: v = (d+1, -H, 1), taken up to y -> -y."""
    s = _as_params(s)
    return kernel_setup(MukaiVector(s.d + 1, 1, 1), s)


def restrict_ray(setup: BundleSetup, x: MukaiVector) -> Tuple[int, int]:
    s = setup.surface
    if pair(x, setup.vX, s) != 0:
        raise NotInComplement(f"{x} is not orthogonal to {setup.vX}")
    if setup.kind == HILBERT:
        return (-x.a, 2 * x.y)
    return (-x.a, x.y)


def _canonical(p: Tuple[int, int]) -> Tuple[int, int]:
    from math import gcd

    g = gcd(*p)
    l, h = (p[0] // g, p[1] // g) if g else p
    if l < 0 or (l == 0 and h < 0):
        l, h = -l, -h
    return (l, h)


def slope(p: Tuple[int, int]) -> Optional[Fraction]:
    l, h = _canonical(p)
    return Fraction(h, l) if l else None


def _flops_on_B_side(setup: BundleSetup, **kw):
    rep = flop_report(setup.vX, setup.surface, setup.B, **kw)
    return rep, [w for w, sg in zip(rep.flop_walls, rep.side_of_B) if sg > 0]


def theorem_hypotheses(setup: BundleSetup, **kw) -> Hypotheses:
    e = _engine(setup.vX, setup.surface, **kw)
    rep, b_side = _flops_on_B_side(setup, **kw)
    return Hypotheses(
        no_flop=not rep.has_flop,
        no_flop_B_side=not b_side,
        nef_eq_mov_B_side=e.nef_hi is e.mov_hi,
    )


def b_positive_eff_ray(setup: BundleSetup, **kw):
    eff = effective_cone(setup.vX, setup.surface, **kw)
    rays = [r for r in eff.rays if pair(r.ambient, setup.B, setup.surface) > 0]
    assert len(rays) == 1, "exactly one Eff ray must pair positively with B"
    return rays[0]


def thresholds(setup: BundleSetup, **kw) -> Threshold:
    s = setup.surface
    e = _engine(setup.vX, s, **kw)
    R = b_positive_eff_ray(setup, **kw)
    rep, b_side = _flops_on_B_side(setup, **kw)
    fourfold = square(setup.vX, s) == 2
    eff_ray = _canonical(restrict_ray(setup, R.ambient))
    nef_wall: Wall = e.nef_hi
    nef_ray = _canonical(restrict_ray(setup, nef_wall.ray.ambient))

    applies = not (rep.has_flop if fourfold else b_side)
    isotropic = R.square == 0
    reasons = []
    if applies:
        alpha_e = slope(eff_ray)
        status_e = LAGRANGIAN_EQ if isotropic else NO_FLOP
    else:
        alpha_e, status_e = None, UNKNOWN
        reasons.append(FLOP_OBSTRUCTS)

    if nef_wall.wall_type == FLOP:
        alpha_n, status_n = slope(nef_ray), NEF_FROM_FLOP
    elif isotropic and not b_side:
        alpha_n, status_n = slope(nef_ray), LAGRANGIAN_EQ
    else:
        alpha_n, status_n = None, UNKNOWN
    reasons = [status_e] + reasons + ([status_n] if status_n != status_e else [])
    return Threshold(alpha_e, alpha_n, eff_ray, nef_ray, status_e, status_n, tuple(reasons))
