import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from k3cones.diophantine import (
    PellSolution,
    bqf_automorphism,
    bqf_representatives,
    bqf_scan,
    bqf_solve,
    bqf_value,
    brute_oracle,
    canonical_in_orbit,
    cf_convergents,
    cf_sqrt,
    is_square,
    mat_apply,
    pell_fundamental,
    pell_general,
    pell_step,
)
from k3cones.errors import DegenerateForm, PerfectSquare
from oracles import bqf_brute, cf_expansion, pell_min


def test_cf_sqrt_examples():
    assert cf_sqrt(13) == (3, (1, 1, 1, 1, 6))
    assert cf_sqrt(2) == (1, (2,))
    with pytest.raises(PerfectSquare):
        cf_sqrt(9)


@pytest.mark.parametrize("D", [d for d in range(2, 120) if not is_square(d)])
def test_cf_sqrt_matches_exact_iteration(D):
    a0, period = cf_sqrt(D)
    terms = cf_expansion(D, 1 + 2 * len(period))
    assert terms == [a0] + list(period) * 2


@pytest.mark.parametrize("D", [d for d in range(2, 80) if not is_square(d)])
def test_convergent_error_bound(D):
    # |N| < 2 sqrt(D) + 1, squared exactly
    for p, q in cf_convergents(D, 12):
        n = abs(p * p - D * q * q)
        assert (n - 1) ** 2 < 4 * D


def test_pell_fundamental_examples():
    assert pell_fundamental(13) == PellSolution(649, 180)
    assert pell_fundamental(3) == PellSolution(2, 1)
    assert pell_fundamental(2) == PellSolution(3, 2)
    with pytest.raises(PerfectSquare):
        pell_fundamental(16)


def test_pell_general_examples():
    assert PellSolution(3, 1) in pell_general(4, 5)
    assert pell_general(8, 5) == []
    assert PellSolution(9, 1) in pell_general(76, 5)
    assert pell_general(13, -1) == [PellSolution(18, 5)]


@pytest.mark.parametrize("D", [d for d in range(2, 100) if not is_square(d)])
@pytest.mark.parametrize("N", [-20, -5, -4, -1, 4, 5, 9, 12])
def test_pell_general_generates_all(D, N):
    reps = pell_general(D, N)
    unit = pell_fundamental(D)
    inv = PellSolution(unit.x, -unit.y)
    gen = set()
    for r in reps:
        for start in (r, PellSolution(-r.x, -r.y)):
            for u in (unit, inv):
                cur = start
                for _ in range(8):
                    gen.add((cur.x, cur.y))
                    cur = pell_step(cur, D, u)
    brute = bqf_brute(1, 0, -D, N, 40)
    assert set(brute) <= gen
    for x, y in gen:
        assert x * x - D * y * y == N


def test_pell_step_is_automorphism():
    for D in (2, 7, 13, 61):
        u = pell_fundamental(D)
        s = pell_step(u, D)
        assert s.x ** 2 - D * s.y ** 2 == 1


def test_bqf_solve_examples():
    res = bqf_solve(2, -10, 10, -2, 20)
    for p in [(2, 1), (3, 1), (3, 2), (7, 5), (18, 5)]:
        assert p in res.solutions
    assert list(res.solutions) == brute_oracle(2, -10, 10, -2, 20)
    assert bqf_solve(1, 0, -1, -1, 5).solutions == ((0, -1), (0, 1))
    assert bqf_solve(2, 0, -2, -2, 5).solutions == ((0, -1), (0, 1))
    with pytest.raises(DegenerateForm):
        bqf_solve(1, 2, 1, 1, 3)
    with pytest.raises(DegenerateForm):
        bqf_solve(1, 0, 1, 1, 3)


def test_brute_oracle_trivial():
    assert brute_oracle(-1, 0, -1, 1, 5) == []
    assert brute_oracle(1, 0, 0, 4, 3) == sorted((m, n) for m in (-2, 2) for n in range(-3, 4))


@st.composite
def indefinite_forms(draw):
    A, B, C = (draw(st.integers(-20, 20)) for _ in range(3))
    assume(B * B - 4 * A * C > 0)
    t = draw(st.integers(-30, 30).filter(lambda x: x != 0))
    return A, B, C, t


@settings(max_examples=200, derandomize=True, deadline=None)
@given(indefinite_forms())
def test_representatives_cover_orbits(form):
    A, B, C, t = form
    reps = bqf_representatives(A, B, C, t)
    for m, n in reps:
        assert bqf_value(A, B, C, m, n) == t
    brute = bqf_brute(A, B, C, t, 25)
    M = bqf_automorphism(A, B, C)
    disc = B * B - 4 * A * C
    if is_square(disc):
        assert set(brute) <= set(reps)
        return
    assert bqf_value(A, B, C, *mat_apply(M, (1, 0))) == A
    canon = {canonical_in_orbit(r, M) for r in reps}
    assert len(canon) == len(reps)
    for x in brute:
        assert canonical_in_orbit(x, M) in canon


def test_fifty_random_forms_against_oracle():
    rng = random.Random(20240611)
    done = 0
    while done < 50:
        A, B, C = (rng.randint(-20, 20) for _ in range(3))
        if B * B - 4 * A * C <= 0:
            continue
        t = rng.choice([x for x in range(-25, 26) if x])
        res = bqf_solve(A, B, C, t, 15)
        assert list(res.solutions) == brute_oracle(A, B, C, t, 15) == bqf_brute(A, B, C, t, 15)
        done += 1


def test_scan_and_orbit():
    res = bqf_solve(2, -10, 10, -2, 20)
    assert res.automorphism == ((4, -5), (1, -1))
    orb = res.orbit((2, 1), 2)
    assert len(orb) == 5 and orb[2] == (2, 1)
    for p in orb:
        assert bqf_value(2, -10, 10, *p) == -2
    assert bqf_scan(2, -10, 10, -2, 3) == [p for p in brute_oracle(2, -10, 10, -2, 3)]


@pytest.mark.parametrize("D", [d for d in range(2, 61) if not is_square(d)])
def test_pell_fundamental_oracle(D):
    assert tuple(pell_fundamental(D)) == pell_min(D)
