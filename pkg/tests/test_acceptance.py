"""Acceptance criteria, one PASS/FAIL line each (see the terminal summary).

Expected values are written out literally here; nothing is read back from
the package's own reference tables except where a criterion asks for whole
printed columns.
"""
import random
import time
from fractions import Fraction as F
from math import isqrt

import pytest

from acceptance_log import report
from k3cones.bundles import hilbert_setup, lm_from_rgd, thresholds
from k3cones.catalog import (
    KNOWN_TYPO,
    MATCH,
    PRINTED_WALLS_EXTRA,
    PRINTED_WALLS_MAIN,
    WALLS_EXTRA,
    align_walls,
    fmt_q,
    rank2_vector,
    run_corollary_audit,
    run_cotangent_table,
    run_rank2_tables,
    run_wall_table,
)
from k3cones.cones import (
    _engine_cached,
    effective_cone,
    enumeration_bound,
    movable_cone,
    movable_walls,
    nef_cone,
)
from k3cones.diophantine import bqf_solve, brute_oracle, is_square, pell_fundamental
from k3cones.lattice import MukaiVector as V
from oracles import cross, pairing, perp_vector, prim

COT_E = {4: F(4, 3), 6: F(1), 8: F(1), 12: F(4, 5), 14: F(3, 4), 16: F(2, 3), 18: F(2, 3),
         20: F(12, 19), 24: F(4, 7), 26: F(360, 649), 28: F(8, 15), 30: F(1, 2), 32: F(1, 2),
         34: F(16, 33), 36: F(8, 17)}
COT_N = {2: F(3), 8: F(1), 10: F(1), 18: F(2, 3), 22: F(7, 11), 32: F(1, 2), 38: F(9, 19)}

P2_E = {2: F(0), 10: F(-1, 3), 18: F(-1, 3), 26: F(-4, 11), 34: F(-25, 66), 42: F(-2, 5),
        50: F(-2, 5), 58: F(-11, 27), 66: F(-19, 46), 74: F(-61, 146)}
P2_N = {2: F(0), 18: F(-1, 3), 50: F(-2, 5)}
P6_E = {6: F(-1, 4), 14: F(-5, 16), 30: F(-3, 8), 46: F(-19, 48), 54: F(-21, 52),
        70: F(-5, 12), 78: F(-21, 50)}
P6_N = {22: F(-7, 5), 38: F(-161, 418), 62: F(-25, 62)}
UNATTAINED_RANK2 = {("8k+6", "alpha_n", 22)}

WALL_ALPHA = {(2, 3, 4): F(0), (2, 6, 5): F(1, 7), (3, 4, 6): F(0), (10, 11, 20): F(0),
              (2, 27, 20): F(7, 29), (3, 16, 15): None}
WALL_CONTRACTED = {(2, 3, 4): [(5, 3, 4)], (2, 6, 5): [(-7, -1, -1), (13, 7, 19)],
                   (3, 4, 6): [(5, 2, 3)], (10, 11, 20): [(61, 11, 20)]}
# blocks whose Type column is not reproduced as printed
UNATTAINED_TYPES = {(3, 8, 9)}


def fresh():
    _engine_cached.cache_clear()
    return time.perf_counter()


def cell_misses(table, expected, which):
    out = []
    for h2, q in expected.items():
        got = getattr(table.get(h2), which)
        if got != q:
            out.append((h2, which, q, got))
    return out


def fmt_misses(ms):
    return ", ".join(f"H.H={h} {w} printed {fmt_q(p)} computed {fmt_q(c)}" for h, w, p, c in ms)


# -- criterion 1


def test_criterion_1_cotangent_table():
    t0 = fresh()
    t = run_cotangent_table(38)
    dt = time.perf_counter() - t0
    misses = cell_misses(t, COT_E, "alpha_e") + cell_misses(t, COT_N, "alpha_n")
    unknown_ok = all(
        (r.alpha_e is None) == (r.status_e == "Unknown") and (r.alpha_n is None) == (r.status_n == "Unknown")
        for r in t.rows
    )
    blanks_ok = all(
        (r.alpha_e is None) == (r.h2 not in COT_E) and (r.alpha_n is None) == (r.h2 not in COT_N)
        for r in t.rows
    )
    ok = not misses and unknown_ok and blanks_ok and dt < 5
    report(1, ok, f"{len(COT_E) + len(COT_N)} cells, '?' cells Unknown={unknown_ok and blanks_ok}, "
                  f"{dt:.2f}s" + (f"; {fmt_misses(misses)}" if misses else ""))
    assert ok


# -- criterion 2


def rank2_all_misses(p2, p6):
    ms = []
    for tag, table, exp, which in (
        ("8k+2", p2, P2_E, "alpha_e"), ("8k+2", p2, P2_N, "alpha_n"),
        ("8k+6", p6, P6_E, "alpha_e"), ("8k+6", p6, P6_N, "alpha_n"),
    ):
        ms += [(tag,) + m for m in cell_misses(table, exp, which)]
    return ms


def test_criterion_2_rank2_tables():
    t0 = fresh()
    p2, p6 = run_rank2_tables(78)
    dt = time.perf_counter() - t0
    ms = rank2_all_misses(p2, p6)
    known = [m for m in ms if (m[0], m[2], m[1]) in UNATTAINED_RANK2]
    other = [m for m in ms if m not in known]
    total = len(P2_E) + len(P2_N) + len(P6_E) + len(P6_N)
    detail = f"{total - len(ms)} of {total} cells, {dt:.2f}s"
    if ms:
        detail += "; " + ", ".join(
            f"{tag} H.H={h} {w} printed {fmt_q(p)} computed {fmt_q(c)}" for tag, h, w, p, c in ms
        )
    if known:
        detail += " (tracked by strict xfail)"
    report(2, not ms and dt < 30, detail)
    # only the cells not covered by the xfail below gate this test
    assert not other and dt < 30


@pytest.mark.xfail(
    strict=True,
    reason="8k+6 H.H=22 alpha_n: the flop wall bounding Nef restricts to slope -7/22, not the printed -7/5",
)
def test_criterion_2_cell_22_alpha_n():
    _, p6 = run_rank2_tables(78)
    assert p6.get(22).alpha_n == F(-7, 5)


# -- criterion 3


def wall_tables():
    main = run_wall_table(list(PRINTED_WALLS_MAIN))
    extra = run_wall_table(list(PRINTED_WALLS_EXTRA), WALLS_EXTRA)
    blocks = {b.rgd: b for b in main.rows + extra.rows}
    printed = dict(PRINTED_WALLS_MAIN)
    printed.update(PRINTED_WALLS_EXTRA)
    return blocks, printed


def wall_problems(blocks, printed):
    """Every deviation from the printed wall tables, by kind."""
    probs = {"type": [], "vector": [], "contracted": [], "alpha": [], "movable": []}
    for rgd, (alpha, rows) in printed.items():
        b = blocks[rgd]
        comp = [r.wall for r in b.rows]
        if [p[0] for p in rows] != [c.type_label for c in comp]:
            probs["type"].append(rgd)
        pairs, _ = align_walls(rows, comp)
        for n, (p, c) in enumerate(pairs, 1):
            if c is None:
                probs["vector"].append((rgd, n))
                continue
            if p[3] is not None and p[3] != c.contracted:
                probs["contracted"].append((rgd, n))
            if p[2] != c.movable_ray:
                probs["movable"].append((rgd, n, p[2], c.movable_ray))
        if b.alpha_e != alpha:
            probs["alpha"].append(rgd)
    return probs


def test_criterion_3_wall_tables():
    t0 = fresh()
    blocks, printed = wall_tables()
    dt = time.perf_counter() - t0
    probs = wall_problems(blocks, printed)
    specific = []
    for rgd, a in WALL_ALPHA.items():
        b = blocks[rgd]
        if b.alpha_e != a or (a is None and b.status_e != "Unknown"):
            specific.append(f"{rgd} alpha_e {fmt_q(b.alpha_e)}")
    for rgd, cs in WALL_CONTRACTED.items():
        got = [r.wall.contracted for r in blocks[rgd].rows if r.wall.contracted]
        if got != cs:
            specific.append(f"{rgd} contracted {got}")
    if not any(r.wall.type_label == "Flop" and r.wall.vector == (11, 1, 1) for r in blocks[(10, 11, 20)].rows):
        specific.append("(10,11,20) flop witness (11,1,1) missing")
    # Movable: the (2,3,4) HC cell is the only deviation, pinned to (4,3,4)
    movable_ok = probs["movable"] == [((2, 3, 4), 3, (4, 3, 3), (4, 3, 4))]
    rec = run_corollary_audit().find("wall table (2,3,4) row 3 HC Movable")
    typo_ok = (rec.printed, rec.computed, rec.verdict) == ("(4,3,3)", "(4,3,4)", KNOWN_TYPO)
    type_other = [r for r in probs["type"] if r not in UNATTAINED_TYPES]
    gating = (not type_other and not probs["vector"] and not probs["contracted"] and not probs["alpha"]
              and not specific and movable_ok and typo_ok and dt < 60)
    detail = f"{len(printed)} blocks, {dt:.2f}s"
    if probs["type"]:
        detail += "; Type column differs for " + ", ".join(map(str, probs["type"]))
        detail += " (tracked by strict xfail)"
    if not gating:
        detail += f"; problems {probs} {specific} movable_ok={movable_ok} typo_ok={typo_ok}"
    report(3, gating and not probs["type"], detail)
    assert gating


@pytest.mark.xfail(
    strict=True,
    reason="(3,8,9): a spherical class (8,3,8) with <s,v>=2 cuts out a flop wall inside Mov "
           "that the printed block does not list",
)
def test_criterion_3_type_column_389():
    blocks, printed = wall_tables()
    assert [p[0] for p in printed[(3, 8, 9)][1]] == [r.wall.type_label for r in blocks[(3, 8, 9)].rows]


# -- shared vector list for criteria 4 and 6


def exercised():
    out = [(V(1, 0, -1), h2) for h2 in range(2, 39, 2)]
    out += [(rank2_vector(h2) - V(0, 0, 1), h2) for h2 in sorted({*P2_E, *P2_N, *P6_E, *P6_N})]
    for rgd in list(PRINTED_WALLS_MAIN) + list(PRINTED_WALLS_EXTRA):
        s = lm_from_rgd(*rgd)
        out.append((s.vX, s.surface.h2))
    return out


def dual_generators(v, h2, mov_rays):
    """Mov-dual rays, computed from scratch: x in v-perp with <x, m> = 0 for
    one Mov ray m and <x, m'> > 0 for the other."""
    cv = perp_vector(v.as_tuple(), h2)
    out = []
    for m, other in ((mov_rays[0], mov_rays[1]), (mov_rays[1], mov_rays[0])):
        x = prim(cross(cv, perp_vector(m, h2)))
        if pairing(x, other, h2) < 0:
            x = tuple(-c for c in x)
        out.append(x)
    return tuple(out)


def generator_rays(v, h2):
    """Contracted divisors or isotropic rays of the two boundary walls of Mov."""
    ws = movable_walls(v, h2)
    gens = []
    for w in (ws[-1], ws[0]):
        if w.contracted is not None:
            gens.append(w.contracted.as_tuple())
        else:
            gens.append(w.ray.ambient.as_tuple())
    return tuple(gens)


def test_criterion_4_duality():
    bad = []
    cases = exercised()
    for v, h2 in cases:
        mov = tuple(r.ambient.as_tuple() for r in movable_cone(v, h2).rays)
        walls = movable_walls(v, h2)
        assert {walls[0].ray.ambient.as_tuple(), walls[-1].ray.ambient.as_tuple()} == set(mov)
        dual = set(dual_generators(v, h2, mov))
        gens = set(generator_rays(v, h2))
        eff = {r.ambient.as_tuple() for r in effective_cone(v, h2).rays}
        if not (dual == gens == eff):
            bad.append((v, h2, dual, gens, eff))
    report(4, not bad, f"{len(cases)} moduli vectors" + (f"; {bad}" if bad else ""))
    assert not bad


# -- criterion 5


def test_criterion_5_diophantine_oracles():
    bad = []
    box_checked = yscan_checked = 0
    for D in range(2, 61):
        if is_square(D):
            continue
        x0, y0 = pell_fundamental(D)
        assert x0 * x0 - D * y0 * y0 == 1
        box = min(x0, 200)
        found = [(x, y) for x, y in brute_oracle(1, 0, -D, 1, box) if x > 0 and y > 0]
        if x0 <= box:
            # the box covers the fundamental solution: it is the least one found
            box_checked += 1
            if min(found, key=lambda p: p[1], default=None) != (x0, y0):
                bad.append(D)
        else:
            # no smaller solution inside the box, and the exhaustive scan over
            # y (x is then forced to be isqrt(1 + D y^2)) finds nothing below y0
            yscan_checked += 1
            if found:
                bad.append(D)
            for y in range(1, y0 + 1):
                x = isqrt(1 + D * y * y)
                if x * x == 1 + D * y * y:
                    if (x, y) != (x0, y0):
                        bad.append(D)
                    break
    rng = random.Random(5)
    forms = 0
    while forms < 50:
        A, B, C = (rng.randint(-20, 20) for _ in range(3))
        if B * B - 4 * A * C <= 0:
            continue
        t = rng.choice([x for x in range(-30, 31) if x])
        if list(bqf_solve(A, B, C, t, 18).solutions) != brute_oracle(A, B, C, t, 18):
            bad.append((A, B, C, t))
        forms += 1
    ok = not bad and tuple(pell_fundamental(13)) == (649, 180)
    report(5, ok, f"{box_checked} D by box scan, {yscan_checked} D by box and y scan, {forms} forms, "
                  f"pell_fundamental(13)={tuple(pell_fundamental(13))}" + (f"; bad {bad}" if bad else ""))
    assert ok


# -- criterion 6


def snapshot(v, h2, **kw):
    ws = movable_walls(v, h2, **kw)
    return (
        [(w.ray.ambient, w.wall_type, w.contracted) for w in ws],
        movable_cone(v, h2, **kw).rays,
        nef_cone(v, h2, **kw).rays,
        effective_cone(v, h2, **kw).rays,
    )


def test_criterion_6_stability():
    bad = []
    cases = exercised()
    for v, h2 in cases:
        B = enumeration_bound(v, h2)
        if snapshot(v, h2, bound=B) != snapshot(v, h2, bound=2 * B):
            bad.append((v, h2))
    for setup in [hilbert_setup(h2) for h2 in range(2, 39, 2)]:
        B = enumeration_bound(setup.vX, setup.surface)
        if thresholds(setup, bound=B) != thresholds(setup, bound=2 * B):
            bad.append(("thresholds", setup.surface.h2))
    report(6, not bad, f"{len(cases)} moduli vectors, bound doubled once" + (f"; {bad}" if bad else ""))
    assert not bad


# -- criterion 7


def test_criterion_7_audit():
    rep = run_corollary_audit()
    problems = []
    lit = rep.find("cotangent closed form x^2-4dy^2=1 (literal)")
    quad = rep.find("rank-2 8k+2 quadratic branch")
    for r in (lit, quad):
        if r.verdict not in (KNOWN_TYPO, "Mismatch"):
            problems.append(f"{r.location} is {r.verdict}")
        if not r.evidence or not all("H.H=" in e for e in r.evidence):
            problems.append(f"{r.location} lists no evidence cells")
    match_groups = {
        "cotangent perfect-square branch, ": 3,
        "rank-2 8k+2 perfect-square branch, ": 3,
        "cotangent x^2-dy^2=1 branch, ": 12,
    }
    for prefix, n in match_groups.items():
        recs = rep.select(prefix)
        if len(recs) != n or any(r.verdict != MATCH for r in recs):
            problems.append(f"{prefix}: {[(r.location, r.verdict) for r in recs]}")
    report(7, not problems,
           f"literal '=1' {lit.verdict} ({len(lit.evidence)} cells), 8k+2 quadratic {quad.verdict} "
           f"({len(quad.evidence)} cells), perfect-square and x^2-dy^2=1 branches Match"
           + (f"; {problems}" if problems else ""))
    assert not problems


# -- criterion 8


def test_criterion_8_property_suites():
    from test_bundles import test_restrict_ray_linear
    from test_lattice import test_saturation_and_gram

    n = 0
    for fn in (test_saturation_and_gram, test_restrict_ray_linear):
        assert fn._hypothesis_internal_use_settings.max_examples == 1000
        n += 1
    failures = []
    for fn in (test_saturation_and_gram, test_restrict_ray_linear):
        try:
            fn()
        except Exception as exc:  # report, then fail below
            failures.append(f"{fn.__name__}: {exc!r}")
    report(8, not failures, f"{n} suites x 1000 instances, h2 <= 100" + (f"; {failures}" if failures else ""))
    assert not failures
