from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from k3cones.bundles import (
    FLOP_OBSTRUCTS,
    HILBERT,
    KERNEL,
    LAGRANGIAN_EQ,
    NEF_FROM_FLOP,
    NO_FLOP,
    UNKNOWN,
    b_positive_eff_ray,
    hilbert_setup,
    kernel_of_polarization,
    kernel_setup,
    lm_from_rgd,
    restrict_ray,
    rho,
    theorem_hypotheses,
    thresholds,
)
from k3cones.catalog import cotangent_closed_form
from k3cones.diophantine import is_square
from k3cones.errors import InvalidDegree, IrrationalBoundary, NotInComplement, NotRigid
from k3cones.lattice import MukaiVector as V, orth_basis, pair, square
from oracles import oracle_chambers


def test_hilbert_restrictions():
    st_ = hilbert_setup(10)
    assert st_.kind == HILBERT and st_.vX == V(1, 0, -1)
    assert restrict_ray(st_, V(0, 1, 0)) == (0, 2)
    assert restrict_ray(st_, V(2, 0, 2)) == (-2, 0)
    assert pair(st_.B, V(0, 1, 0), 10) == 0
    assert restrict_ray(hilbert_setup(2), V(-2, 3, -2)) == (2, 6)


def test_kernel_setup():
    k = kernel_setup(V(2, 1, 3), 10)
    assert k.kind == KERNEL and k.vX == V(2, 1, 2)
    assert k.B == V(2, 1, 3)
    with pytest.raises(NotRigid):
        kernel_setup(V(2, 1, 1), 10)


def test_restrict_ray_examples():
    k = kernel_setup(V(3, 1, 2), 10)
    assert k.vX == V(3, 1, 1)
    assert restrict_ray(k, V(-7, -1, -1)) == (7, -1)
    with pytest.raises(NotInComplement):
        restrict_ray(k, V(1, 0, 0))


def test_lm_from_rgd():
    s = lm_from_rgd(2, 3, 4)
    assert (s.vF, s.vX, s.warnings) == (V(3, 1, 1), V(3, 1, 0), ())
    s = lm_from_rgd(10, 11, 20)
    assert s.vX == V(11, 1, 0) and s.surface.h2 == 20
    s = lm_from_rgd(2, 6, 5)
    assert s.vF == V(3, 1, 2)
    assert len(s.warnings) == 1 and "(3,1,3)" in s.warnings[0]
    with pytest.raises(InvalidDegree):
        lm_from_rgd(1, 1, 1)


def test_rho():
    assert rho(2, 3, 4) == 0
    assert rho(10, 11, 20) == 0
    assert rho(2, 6, 5) == -3
    assert rho(1, 5, 5) == 3


@pytest.mark.parametrize("h2,vx", [(2, V(2, 1, 0)), (4, V(3, 1, 0)), (6, V(4, 1, 0))])
def test_kernel_of_polarization(h2, vx):
    k = kernel_of_polarization(h2)
    assert k.vX == vx
    assert square(k.vF, h2) == -2


def test_threshold_values():
    t = thresholds(hilbert_setup(26))
    assert (t.alpha_e, t.status_e) == (Fraction(360, 649), NO_FLOP)
    t = thresholds(kernel_setup(V(2, 1, 3), 10))
    assert t.alpha_e == Fraction(-1, 3)
    t = thresholds(lm_from_rgd(10, 11, 20))
    assert t.alpha_e == t.alpha_n == 0
    assert t.status == (LAGRANGIAN_EQ, LAGRANGIAN_EQ)
    t = thresholds(hilbert_setup(2))
    assert t.status_e == UNKNOWN and t.alpha_e is None
    assert (t.alpha_n, t.status_n) == (3, NEF_FROM_FLOP)
    assert t.reasons == (UNKNOWN, FLOP_OBSTRUCTS, NEF_FROM_FLOP)


def test_theorem_hypotheses():
    h = theorem_hypotheses(hilbert_setup(2))
    assert not h.no_flop and not h.no_flop_B_side
    h = theorem_hypotheses(kernel_setup(V(2, 1, 3), 10))
    assert h.no_flop and h.no_flop_B_side and h.nef_eq_mov_B_side
    h = theorem_hypotheses(lm_from_rgd(2, 6, 5))
    assert not h.no_flop and h.no_flop_B_side


def kernel_setups():
    """Rigid (r, 1, b) with r >= 2, one per degree where one exists."""
    out = []
    for h2 in range(2, 101, 2):
        n = h2 // 2 + 1
        r = next((r for r in range(2, n + 1) if n % r == 0), None)
        if r:
            out.append(kernel_setup(V(r, 1, n // r), h2))
    return out


SETUPS = [hilbert_setup(h2) for h2 in range(2, 40, 2)] + kernel_setups()


@pytest.mark.parametrize("setup", SETUPS, ids=lambda s: f"{s.kind}-{s.surface.h2}-{s.vX}")
def test_structural_properties(setup):
    s = setup.surface
    assert square(setup.B, s) < 0
    assert pair(setup.B, setup.vX, s) == 0
    try:
        R = b_positive_eff_ray(setup)
    except IrrationalBoundary:
        # only possible without rational isotropic classes
        assert not is_square(-orth_basis(setup.vX, s).det)
        return
    assert pair(R.ambient, setup.B, s) > 0
    t = thresholds(setup)
    assert t.eff_ray[0] > 0 and t.nef_ray[0] > 0
    if R.square == 0 and t.status_e == LAGRANGIAN_EQ and t.status_n == LAGRANGIAN_EQ:
        assert t.alpha_e == t.alpha_n


@pytest.mark.parametrize("h2", range(2, 40, 2))
def test_cotangent_closed_form_agrees(h2):
    branch, ae, an, _ = cotangent_closed_form(h2, 5)
    t = thresholds(hilbert_setup(h2))
    if branch == "flop":
        assert t.status_e == UNKNOWN and FLOP_OBSTRUCTS in t.reasons
        assert t.alpha_n == an
    else:
        assert t.alpha_e == ae
        if an is not None:
            assert t.alpha_n == an


KSETUPS = kernel_setups()


def test_irrational_boundary_has_no_divisorial_wall():
    k = kernel_setup(V(5, 1, 7), 68)
    with pytest.raises(IrrationalBoundary):
        thresholds(k)
    o = oracle_chambers(k.vX.as_tuple(), 68, box=15)
    assert o["isotropic"] == []
    assert all(kinds == {None} for _, _, kinds in o["walls"])


@settings(max_examples=1000, derandomize=True, deadline=None)
@given(
    st.sampled_from(SETUPS + KSETUPS),
    st.tuples(*[st.integers(-40, 40)] * 4),
    st.integers(-7, 7),
)
def test_restrict_ray_linear(setup, coeffs, c):
    b = orth_basis(setup.vX, setup.surface)
    m1, n1, m2, n2 = coeffs
    x, z = b.ambient(m1, n1), b.ambient(m2, n2)
    rx, rz = restrict_ray(setup, x), restrict_ray(setup, z)
    got = restrict_ray(setup, x * c + z)
    assert got == (c * rx[0] + rz[0], c * rx[1] + rz[1])
