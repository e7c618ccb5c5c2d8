"""Pell equations and indefinite binary quadratic forms, solved exactly.

Forms are written Q(m, n) = A*m^2 + B*m*n + C*n^2 with discriminant
B^2 - 4AC.  Solutions of Q = t fall into finitely many orbits under the
proper automorphism group of Q; :func:`bqf_representatives` returns one
member of each orbit, and :func:`bqf_automorphism` a generator of the group
(modulo -1).  All bounds are computed with integer square roots, so nothing
here touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt
from typing import List, Optional, Tuple

from .errors import DegenerateForm, PerfectSquare

Matrix2 = Tuple[Tuple[int, int], Tuple[int, int]]
IDENTITY: Matrix2 = ((1, 0), (0, 1))


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def icbrt(n: int) -> int:
    """Floor of the real cube root of n >= 0."""
    if n < 0:
        raise ValueError("negative argument")
    x = 1 << ((n.bit_length() + 2) // 3)
    while True:
        y = (2 * x + n // (x * x)) // 3
        if y >= x:
            break
        x = y
    while x ** 3 > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


def divisors(n: int) -> List[int]:
    """Positive divisors of |n| (n != 0), ascending."""
    n = abs(n)
    if n == 0:
        raise ValueError("zero has infinitely many divisors")
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def mat_mul(p: Matrix2, q: Matrix2) -> Matrix2:
    return (
        (p[0][0] * q[0][0] + p[0][1] * q[1][0], p[0][0] * q[0][1] + p[0][1] * q[1][1]),
        (p[1][0] * q[0][0] + p[1][1] * q[1][0], p[1][0] * q[0][1] + p[1][1] * q[1][1]),
    )


def mat_pow(p: Matrix2, k: int) -> Matrix2:
    if k < 0:
        p, k = mat_inv(p), -k
    out = IDENTITY
    while k:
        if k & 1:
            out = mat_mul(out, p)
        p = mat_mul(p, p)
        k >>= 1
    return out


def mat_inv(p: Matrix2) -> Matrix2:
    """Inverse of a determinant-one integer matrix."""
    (a, b), (c, d) = p
    if a * d - b * c != 1:
        raise ValueError("only unimodular proper matrices are inverted here")
    return ((d, -b), (-c, a))


def mat_apply(p: Matrix2, x: Tuple[int, int]) -> Tuple[int, int]:
    return (p[0][0] * x[0] + p[0][1] * x[1], p[1][0] * x[0] + p[1][1] * x[1])


# --------------------------------------------------------------------------
# Pell equations


@dataclass(frozen=True)
class PellSolution:
    x: int
    y: int

    def __iter__(self):
        yield self.x
        yield self.y


def cf_sqrt(D: int) -> Tuple[int, Tuple[int, ...]]:
    """Continued fraction of sqrt(D) as (a0, period)."""
    if D <= 0:
        raise ValueError("D must be positive")
    if is_square(D):
        raise PerfectSquare(f"{D} is a perfect square")
    a0 = isqrt(D)
    m, q, a = 0, 1, a0
    period = []
    while a != 2 * a0:
        m = q * a - m
        q = (D - m * m) // q
        a = (a0 + m) // q
        period.append(a)
    return a0, tuple(period)


def cf_convergents(D: int, count: int):
    """First ``count`` convergents p/q of sqrt(D)."""
    a0, period = cf_sqrt(D)
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    out = [(p, q)]
    i = 0
    while len(out) < count:
        a = period[i % len(period)]
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
        i += 1
    return out


def pell_fundamental(D: int) -> PellSolution:
    """Least solution with x, y > 0 of x^2 - D y^2 = 1."""
    a0, period = cf_sqrt(D)
    L = len(period)
    idx = L - 1 if L % 2 == 0 else 2 * L - 1
    p, q = cf_convergents(D, idx + 1)[idx]
    assert p * p - D * q * q == 1
    return PellSolution(p, q)


def pell_class_equivalent(s: PellSolution, t: PellSolution, D: int, N: int) -> bool:
    """True if s and t lie in the same class of x^2 - D y^2 = N."""
    return (s.x * t.x - D * s.y * t.y) % N == 0 and (s.x * t.y - s.y * t.x) % N == 0


def pell_general(D: int, N: int) -> List[PellSolution]:
    """Class representatives of x^2 - D y^2 = N, normalized to x >= 0.

    For non-square D every solution is +-(x0 + y0 sqrt D) * eps^j with
    (x0, y0) among the returned values and eps the fundamental unit from
    :func:`pell_fundamental`; each class is represented by its member of
    least |y|. For a perfect square D the solution set is finite and
    returned in full.
    """
    if D <= 0:
        raise ValueError("D must be positive")
    if N == 0:
        raise ValueError("N must be nonzero")
    if is_square(D):
        return _pell_square(isqrt(D), N)
    M = bqf_automorphism(1, 0, -D)
    cands = set()
    for rep in bqf_representatives(1, 0, -D, N):
        x, y = _orbit_min(rep, M, lambda p: (abs(p[1]), abs(p[0]), p))
        if x < 0:
            x, y = -x, -y
        cands.add(PellSolution(x, y))
    found: List[PellSolution] = []
    for c in sorted(cands, key=lambda s: (abs(s.y), s.x, -s.y)):
        neg = PellSolution(-c.x, -c.y)
        if not any(
            pell_class_equivalent(c, f, D, N) or pell_class_equivalent(neg, f, D, N)
            for f in found
        ):
            found.append(c)
    return sorted(found, key=lambda s: (abs(s.y), s.x, s.y))


def _pell_square(r: int, N: int) -> List[PellSolution]:
    # (x - r y)(x + r y) = N
    out = set()
    for e in divisors(N):
        for e_s in (e, -e):
            f = N // e_s
            if (e_s + f) % 2:
                continue
            x = (e_s + f) // 2
            if r == 0:
                continue
            if (f - e_s) % (2 * r):
                continue
            y = (f - e_s) // (2 * r)
            if x >= 0:
                out.add(PellSolution(x, y))
    return sorted(out, key=lambda s: (abs(s.y), s.x, s.y))


def pell_step(sol: PellSolution, D: int, unit: Optional[PellSolution] = None) -> PellSolution:
    """Image of a solution under multiplication by the fundamental unit."""
    x0, y0 = unit if unit is not None else pell_fundamental(D)
    return PellSolution(sol.x * x0 + D * sol.y * y0, sol.x * y0 + sol.y * x0)


# --------------------------------------------------------------------------
# binary quadratic forms


def discriminant(A: int, B: int, C: int) -> int:
    return B * B - 4 * A * C


def bqf_value(A: int, B: int, C: int, m: int, n: int) -> int:
    return A * m * m + B * m * n + C * n * n


def bqf_unit(disc: int) -> Tuple[int, int]:
    """Least (T, U), U > 0, with T^2 - disc*U^2 = 4 (disc > 0 non-square)."""
    if disc <= 0 or is_square(disc):
        raise DegenerateForm(f"discriminant {disc} is not a positive non-square")
    if disc % 4 == 0:
        t, u = pell_fundamental(disc // 4)
        return 2 * t, u
    # eta = (T + U sqrt(disc))/2 has eta^k = x1 + y1 sqrt(disc) for some k <= 3;
    # trace(eta^2) = T^2 - 2 and trace(eta^3) = T^3 - 3T.
    x1, y1 = pell_fundamental(disc)
    trace = 2 * x1
    candidates = []
    base = icbrt(trace)
    candidates += [T for T in range(max(base - 1, 1), base + 3) if T ** 3 - 3 * T == trace]
    candidates += [T for T in (isqrt(trace + 2),) if T * T - 2 == trace]
    candidates.append(trace)
    for T in candidates:
        rem = T * T - 4
        if rem > 0 and rem % disc == 0 and is_square(rem // disc):
            return T, isqrt(rem // disc)
    raise AssertionError("unreachable: eps itself is a unit")


def _unit_matrix(A: int, B: int, C: int, disc: int) -> Matrix2:
    T, U = bqf_unit(disc)
    return (((T - B * U) // 2, -C * U), (A * U, (T + B * U) // 2))


def bqf_automorphism(A: int, B: int, C: int) -> Matrix2:
    """Generator (positive trace) of the proper automorphisms of Q, modulo -1.

    Computed on the primitive part of the form. Returns the identity when the
    discriminant is a perfect square, where the proper automorphism group is
    finite.
    """
    disc = discriminant(A, B, C)
    if disc <= 0:
        raise DegenerateForm(f"discriminant {disc} <= 0")
    if is_square(disc):
        return IDENTITY
    g = gcd(gcd(A, B), C)
    return _unit_matrix(A // g, B // g, C // g, disc // (g * g))


def brute_oracle(A: int, B: int, C: int, t: int, bound: int) -> List[Tuple[int, int]]:
    """Exhaustive scan of |m|, |n| <= bound."""
    return [
        (m, n)
        for m in range(-bound, bound + 1)
        for n in range(-bound, bound + 1)
        if A * m * m + B * m * n + C * n * n == t
    ]


def bqf_scan(A: int, B: int, C: int, t: int, bound: int) -> List[Tuple[int, int]]:
    """All solutions with |m|, |n| <= bound, one root extraction per m."""
    out = set()
    if C == 0 and A != 0:
        return sorted((m, n) for n, m in bqf_scan(C, B, A, t, bound))
    for m in range(-bound, bound + 1):
        if C == 0:
            # A == 0 here as well: Q = B m n
            lhs = t - A * m * m
            if B * m == 0:
                if lhs == 0:
                    out.update((m, n) for n in range(-bound, bound + 1))
                continue
            if lhs % (B * m) == 0 and abs(lhs // (B * m)) <= bound:
                out.add((m, lhs // (B * m)))
            continue
        # C n^2 + B m n + (A m^2 - t) = 0
        dn = B * B * m * m - 4 * C * (A * m * m - t)
        if dn < 0 or not is_square(dn):
            continue
        r = isqrt(dn)
        for num in {-B * m + r, -B * m - r}:
            if num % (2 * C) == 0:
                n = num // (2 * C)
                if abs(n) <= bound:
                    out.add((m, n))
    return sorted(out)


def _orbit_min(x: Tuple[int, int], M: Matrix2, key) -> Tuple[int, int]:
    """Orbit member minimizing ``key``, found by descent in both directions."""
    best = x
    for step in (M, mat_inv(M)):
        cur = x
        while True:
            nxt = mat_apply(step, cur)
            if key(nxt) > key(cur) or nxt == x:
                break
            cur = nxt
            if key(cur) < key(best):
                best = cur
    return best


def canonical_in_orbit(x: Tuple[int, int], M: Matrix2) -> Tuple[int, int]:
    """Orbit member of least Euclidean norm (ties broken lexicographically)."""
    return _orbit_min(x, M, lambda p: (p[0] * p[0] + p[1] * p[1], p))


# Gauss reduction of indefinite forms.  A form is a triple (a, b, c); the
# transformation G acts by Q -> Q o G.  sqrt(D) comparisons are exact.


def _lt_sqrt(x: int, D: int) -> bool:
    return x <= 0 or x * x < D


def _gt_sqrt(x: int, D: int) -> bool:
    return x > 0 and x * x > D


def _is_reduced(f, D: int) -> bool:
    # |sqrt(D) - 2|a|| < b < sqrt(D)
    a, b, _ = f
    return (
        b > 0
        and _lt_sqrt(b, D)
        and _gt_sqrt(b + 2 * abs(a), D)
        and _lt_sqrt(2 * abs(a) - b, D)
    )


def _rho(f, D: int):
    """One reduction step; returns the new form and the shift s used.

    The step is G = [[0, -1], [1, s]].
    """
    a, b, c = f
    ac = abs(c)
    # b' = -b + 2 c s, chosen in the normalizing interval
    if _gt_sqrt(ac, D):
        # -|c| < b' <= |c|
        lo = -ac + 1
    else:
        # sqrt(D) - 2|c| < b' < sqrt(D)
        lo = isqrt(D) - 2 * ac + 1
    # least b' >= lo with b' = -b (mod 2|c|)
    bp = lo + ((-b - lo) % (2 * ac))
    s = (bp + b) // (2 * c)
    return (c, bp, a - b * s + c * s * s), s


def _step_matrix(s: int) -> Matrix2:
    return ((0, -1), (1, s))


def _reduce(f, D: int):
    """Reduced form R and G with f o G = R."""
    G = IDENTITY
    while not _is_reduced(f, D):
        f, s = _rho(f, D)
        G = mat_mul(G, _step_matrix(s))
    return f, G


def _equivalence(f, g, D: int) -> Optional[Matrix2]:
    """G in SL2(Z) with f o G = g, or None when not properly equivalent."""
    rf, Gf = _reduce(f, D)
    rg, Gg = _reduce(g, D)
    cur, C = rf, IDENTITY
    while True:
        if cur == rg:
            return mat_mul(mat_mul(Gf, C), mat_inv(Gg))
        cur, s = _rho(cur, D)
        C = mat_mul(C, _step_matrix(s))
        if cur == rf:
            return None


def _primitive_reps(A: int, B: int, C: int, t: int, D: int) -> List[Tuple[int, int]]:
    """Coprime solutions of Q = t, one per orbit of +-<M>."""
    out = []
    T = abs(t)
    for b in range(2 * T):
        if (b * b - D) % (4 * T):
            continue
        G = _equivalence((A, B, C), (t, b, (b * b - D) // (4 * t)), D)
        if G is not None:
            out.append((G[0][0], G[1][0]))
    return out


def bqf_representatives(A: int, B: int, C: int, t: int) -> List[Tuple[int, int]]:
    """One solution of Q(m, n) = t (t != 0) per orbit of <M>.

    M is :func:`bqf_automorphism`, so x and -x sit in different orbits.
    Coprime solutions come from the classes b mod 2|t| with
    b^2 = disc (mod 4|t|) whose form (t, b, *) is equivalent to Q; the rest
    are multiples of coprime solutions of t/g^2. For square discriminants
    every solution is returned.
    """
    disc = discriminant(A, B, C)
    if disc <= 0:
        raise DegenerateForm(f"discriminant {disc} <= 0")
    if t == 0:
        raise ValueError("t must be nonzero")
    if is_square(disc):
        return _solve_square_disc(A, B, C, t)
    M = bqf_automorphism(A, B, C)
    reps = set()
    g = 1
    while g * g <= abs(t):
        if t % (g * g) == 0:
            for m, n in _primitive_reps(A, B, C, t // (g * g), disc):
                for sgn in (1, -1):
                    reps.add(canonical_in_orbit((sgn * g * m, sgn * g * n), M))
        g += 1
    return sorted(reps)


def _solve_square_disc(A: int, B: int, C: int, t: int) -> List[Tuple[int, int]]:
    r = isqrt(discriminant(A, B, C))
    out = set()
    if A == 0 and C == 0:
        # Q = B m n
        for e in divisors(t):
            for m in (e, -e):
                if (t // m) % B == 0:
                    out.add((m, t // m // B))
        return sorted(out)
    if A == 0:
        return sorted((m, n) for n, m in _solve_square_disc(C, B, A, t))
    # 4A Q = P R with P = 2Am + (B - r)n, R = 2Am + (B + r)n
    T = 4 * A * t
    for e in divisors(T):
        for P in (e, -e):
            R = T // P
            if (R - P) % (2 * r):
                continue
            n = (R - P) // (2 * r)
            num = P - (B - r) * n
            if num % (2 * A) == 0:
                out.add((num // (2 * A), n))
    return sorted(out)


@dataclass(frozen=True)
class BQFSolutionSet:
    A: int
    B: int
    C: int
    t: int
    bound: int
    solutions: Tuple[Tuple[int, int], ...]
    representatives: Tuple[Tuple[int, int], ...]
    automorphism: Matrix2

    @property
    def discriminant(self) -> int:
        return discriminant(self.A, self.B, self.C)

    def orbit(self, x: Tuple[int, int], steps: int):
        """``x`` moved by automorphism powers -steps..steps, in order."""
        M = self.automorphism
        if M == IDENTITY:
            return [x]
        back, fwd = [], []
        cur = x
        for _ in range(steps):
            cur = mat_apply(mat_inv(M), cur)
            back.append(cur)
        cur = x
        for _ in range(steps):
            cur = mat_apply(M, cur)
            fwd.append(cur)
        return back[::-1] + [x] + fwd


def bqf_solve(A: int, B: int, C: int, t: int, search_bound: int = 10_000) -> BQFSolutionSet:
    """Solutions of Q(m, n) = t within ``search_bound`` plus orbit data.

    ``representatives`` is empty when t == 0 (isotropic vectors form lines,
    not orbits).
    """
    disc = discriminant(A, B, C)
    if disc <= 0:
        raise DegenerateForm(f"discriminant {disc} <= 0")
    sols = bqf_scan(A, B, C, t, search_bound)
    reps = bqf_representatives(A, B, C, t) if t != 0 else []
    return BQFSolutionSet(
        A, B, C, t, search_bound, tuple(sols), tuple(reps), bqf_automorphism(A, B, C)
    )
