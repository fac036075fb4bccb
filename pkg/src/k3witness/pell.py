"""Pell-type equations u^2 - d*w^2 = N with linear residue constraints.

Everything is exact integer arithmetic.  The three layers are:

1. Fundamental unit.  The continued fraction of sqrt(d) (PQa recurrences on
   the quadratic surd (P + sqrt(d))/Q) yields the minimal (u0, w0) with
   u0^2 - d*w0^2 = 1.  The unit acts on solutions by

       (u, w) -> (u*u0 + d*w*w0, u*w0 + w*u0),

   i.e. multiplication by u0 + w0*sqrt(d) in Z[sqrt(d)].

2. Solution classes.  Every solution of u^2 - d*w^2 = N is (+-)(unit^k)
   applied to finitely many representatives.  Primitive representatives for
   the right-hand side m come from the PQa expansion started at
   P0 = z, Q0 = |m| for each square root z of d mod |m|; a candidate is read
   off whenever the expansion reaches Q = +-1 inside the first cycle of its
   (P, Q) states, with the norm-(-1) unit converting a wrong-sign value when
   that unit exists.  Scaling by the square divisors of N covers imprimitive
   solutions.  ``solve_bounded`` exposes the classical window: all solutions
   with 0 <= w and 2*d*w^2 <= N*(u0-1) (N > 0) or 2*d*w^2 <= -N*(u0+1)
   (N < 0), which contains a representative of every class.

3. Decidable constrained search.  A ``PellProblem`` adds congruences
   a*u + b*w = c (mod m).  The unit action on (u, w) mod M (M = lcm of the
   moduli) is invertible of finite order T, so constraint satisfaction along
   an orbit is T-periodic: scanning one full period of every class
   representative decides emptiness outright, and walking in steps of T
   ("blocks") moves along a constrained orbit.  On each block-orbit the value
   u is A*q^j + B*q^(-j) with q = unit^T and A*B = N, so u (hence the decoded
   x) is convex, concave, or monotone in the block index j depending only on
   the signs of N and u; ``push_negative`` uses this to either reach the
   requested threshold or certify that the orbit's x values are bounded
   below.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from .errors import SquareInput, ThresholdUnreachable
from .lattice import is_perfect_square

_PQA_STEP_CAP = 200_000
_ORDER_CAP = 2_000_000


@dataclass(frozen=True)
class FundamentalUnit:
    """Minimal (u0, w0) with u0^2 - d*w0^2 = 1, w0 >= 1."""

    d: int
    u0: int
    w0: int


@dataclass(frozen=True)
class PellSolution:
    u: int
    w: int


@dataclass(frozen=True)
class LinearCongruence:
    """a*u + b*w = c (mod modulus)."""

    a: int
    b: int
    c: int
    modulus: int

    def holds(self, u: int, w: int) -> bool:
        return (self.a * u + self.b * w - self.c) % self.modulus == 0


@dataclass(frozen=True)
class PellProblem:
    """u^2 - d*w^2 = rhs subject to residue constraints.

    ``u_shift`` and ``scale`` record an affine substitution u = scale*x +
    u_shift, w = scale*y used by callers to decode solutions back to their
    own coordinates.
    """

    d: int
    rhs: int
    constraints: tuple[LinearCongruence, ...] = ()
    u_shift: int = 0
    scale: int = 1

    def __post_init__(self):
        if self.d < 2 or is_perfect_square(self.d):
            raise SquareInput(f"d={self.d} must be a non-square >= 2")
        if self.rhs == 0:
            raise ValueError("right-hand side must be nonzero")
        if self.scale < 1:
            raise ValueError("scale must be >= 1")
        if any(c.modulus < 1 for c in self.constraints):
            raise ValueError("constraint moduli must be >= 1")

    def residual(self, u: int, w: int) -> int:
        return u * u - self.d * w * w - self.rhs

    def meets_constraints(self, u: int, w: int) -> bool:
        return all(c.holds(u, w) for c in self.constraints)

    def solution(self, u: int, w: int) -> PellSolution:
        if self.residual(u, w) != 0:
            raise ValueError(f"({u}, {w}) does not solve u^2 - {self.d}w^2 = {self.rhs}")
        return PellSolution(u, w)

    def decode_x(self, u: int) -> int:
        q, r = divmod(u - self.u_shift, self.scale)
        assert r == 0, "u does not decode to an integer x"
        return q

    def decode(self, sol: PellSolution) -> tuple[int, int]:
        """Map (u, w) back to (x, y) through the affine substitution."""
        y, r = divmod(sol.w, self.scale)
        assert r == 0, "w does not decode to an integer y"
        return self.decode_x(sol.u), y


@lru_cache(maxsize=None)
def fundamental_unit(d: int) -> FundamentalUnit:
    """Minimal positive solution of u^2 - d*w^2 = 1 via the sqrt(d) expansion."""
    s = isqrt(d)
    if d < 2 or s * s == d:
        raise SquareInput(f"d={d} must be a non-square >= 2")
    p_prev, p = 1, s
    q_prev, q = 0, 1
    P, Q = s, d - s * s
    while p * p - d * q * q != 1:
        a = (P + s) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        P = a * Q - P
        Q = (d - P * P) // Q
    return FundamentalUnit(d, p, q)


@lru_cache(maxsize=None)
def negative_unit(d: int) -> FundamentalUnit | None:
    """Minimal (t, u) with t^2 - d*u^2 = -1, or None (period even)."""
    s = isqrt(d)
    if d < 2 or s * s == d:
        raise SquareInput(f"d={d} must be a non-square >= 2")
    p_prev, p = 1, s
    q_prev, q = 0, 1
    P, Q = s, d - s * s
    while True:
        val = p * p - d * q * q
        if val == -1:
            return FundamentalUnit(d, p, q)
        if val == 1:
            return None
        a = (P + s) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        P = a * Q - P
        Q = (d - P * P) // Q


def orbit_step(sol: PellSolution, unit: FundamentalUnit, direction: int = 1) -> PellSolution:
    """Multiply by the unit (direction +1) or its inverse (direction -1)."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    u, w = sol.u, sol.w
    u0, w0, d = unit.u0, unit.w0, unit.d
    if direction == 1:
        return PellSolution(u * u0 + d * w * w0, u * w0 + w * u0)
    return PellSolution(u * u0 - d * w * w0, w * u0 - u * w0)


def unit_power(unit: FundamentalUnit, k: int) -> FundamentalUnit:
    """(u0 + w0*sqrt(d))^k for k >= 0, as another norm-1 pair."""
    if k < 0:
        raise ValueError("k must be >= 0")
    d = unit.d
    ra, rb = 1, 0
    ba, bb = unit.u0, unit.w0
    while k:
        if k & 1:
            ra, rb = ra * ba + rb * bb * d, ra * bb + rb * ba
        ba, bb = ba * ba + bb * bb * d, 2 * ba * bb
        k >>= 1
    return FundamentalUnit(d, ra, rb)


def _cf_floor(P: int, Q: int, s: int) -> int:
    # floor((P + sqrt(d)) / Q) with s = isqrt(d), d non-square; exact for Q of
    # either sign because (P + sqrt(d))/Q is irrational.
    num = P + s if Q > 0 else P + s + 1
    return num // Q


@lru_cache(maxsize=None)
def _sqrts_mod(a: int, m: int) -> tuple[int, ...]:
    # all z in (-m/2, m/2] with z^2 = a (mod m); brute scan, desk scale
    if m == 1:
        return (0,)
    roots = [z for z in range(m) if (z * z - a) % m == 0]
    return tuple(z if 2 * z <= m else z - m for z in roots)


@lru_cache(maxsize=None)
def _primitive_class_reps(d: int, m: int) -> tuple[tuple[int, int], ...]:
    """One representative per class of primitive solutions of u^2 - d*w^2 = m.

    PQa expansion of (z + sqrt(d))/|m| for each square root z of d mod |m|;
    by G_{i-1}^2 - d*B_{i-1}^2 = (-1)^i * Q_i * |m|, every index with
    Q = +-1 produces a value +-m, and the norm-(-1) unit fixes the sign
    when needed.
    """
    am = abs(m)
    s = isqrt(d)
    neg = negative_unit(d)
    out: list[tuple[int, int]] = []
    for z in _sqrts_mod(d % am, am):
        P, Q = z, am
        g_pp, g_p = -z, am  # G_{-2}, G_{-1}
        b_pp, b_p = 1, 0  # B_{-2}, B_{-1}
        seen: set[tuple[int, int]] = set()
        for _ in range(_PQA_STEP_CAP):
            a = _cf_floor(P, Q, s)
            g_cur = a * g_p + g_pp
            b_cur = a * b_p + b_pp
            P = a * Q - P
            Q = (d - P * P) // Q
            if (P, Q) in seen:
                break
            seen.add((P, Q))
            if Q in (1, -1):
                val = g_cur * g_cur - d * b_cur * b_cur
                if val == m:
                    out.append((g_cur, b_cur))
                elif val == -m and neg is not None:
                    t, v = neg.u0, neg.w0
                    out.append((g_cur * t + b_cur * v * d, g_cur * v + b_cur * t))
            g_pp, g_p = g_p, g_cur
            b_pp, b_p = b_p, b_cur
        else:  # pragma: no cover - defensive
            raise RuntimeError(f"PQa expansion for d={d}, m={m} did not cycle")
    return tuple(dict.fromkeys(out))


@lru_cache(maxsize=None)
def class_representatives(d: int, rhs: int) -> tuple[PellSolution, ...]:
    """Representatives covering every solution class of u^2 - d*w^2 = rhs.

    Imprimitive classes are reached by scaling the primitive representatives
    of rhs/f^2 by f, over all square divisors f^2 of rhs.  Together with the
    sign images (+-u, +-w) and the unit action these generate all solutions.
    """
    if rhs == 0:
        raise ValueError("right-hand side must be nonzero")
    if d < 2 or is_perfect_square(d):
        raise SquareInput(f"d={d} must be a non-square >= 2")
    found: dict[tuple[int, int], None] = {}
    for f in range(1, isqrt(abs(rhs)) + 1):
        if rhs % (f * f) == 0:
            for a, b in _primitive_class_reps(d, rhs // (f * f)):
                found[(f * a, f * b)] = None
    reps = [PellSolution(u, w) for (u, w) in found]
    reps.sort(key=lambda p: (abs(p.w), p.u, p.w))
    return tuple(reps)


def solve_bounded(d: int, rhs: int) -> tuple[PellSolution, ...]:
    """All solutions (u, w) inside the classical representative window.

    The window is 0 <= w with 2*d*w^2 <= rhs*(u0 - 1) for rhs > 0, or
    2*d*w^2 <= -rhs*(u0 + 1) for rhs < 0; it contains at least one element
    of every solution class, and with the sign images (+-u, +-w) the output
    generates every solution under the unit action.
    """
    unit = fundamental_unit(d)
    cap = rhs * (unit.u0 - 1) if rhs > 0 else -rhs * (unit.u0 + 1)
    w_guard = isqrt(max(cap, 0) // (2 * d)) + 2
    found: set[tuple[int, int]] = set()

    def consider(u: int, w: int) -> None:
        if w >= 0 and 2 * d * w * w <= cap:
            assert u * u - d * w * w == rhs
            found.add((u, w))

    for rep in class_representatives(d, rhs):
        for sgn in (1, -1):
            seed = PellSolution(sgn * rep.u, sgn * rep.w)
            consider(seed.u, seed.w)
            for direction in (1, -1):
                cur = seed
                prev_abs = abs(cur.w)
                grace = 3
                while grace:
                    cur = orbit_step(cur, unit, direction)
                    consider(cur.u, cur.w)
                    aw = abs(cur.w)
                    if aw > w_guard and aw >= prev_abs:
                        grace -= 1
                    prev_abs = aw
    return tuple(
        PellSolution(u, w) for (u, w) in sorted(found, key=lambda t: (t[1], t[0]))
    )


def _residue_modulus(problem: PellProblem) -> int:
    M = 1
    for c in problem.constraints:
        M = M * c.modulus // gcd(M, c.modulus)
    return M


@lru_cache(maxsize=None)
def _unit_order_mod(d: int, u0_mod: int, w0_mod: int, M: int) -> int:
    # multiplicative order of u0 + w0*sqrt(d) in Z[sqrt(d)]/M
    if M == 1:
        return 1
    a, b = u0_mod, w0_mod
    cur = (a, b)
    order = 1
    while cur != (1, 0):
        cur = ((cur[0] * a + cur[1] * b * d) % M, (cur[0] * b + cur[1] * a) % M)
        order += 1
        if order > _ORDER_CAP:  # pragma: no cover - defensive
            raise RuntimeError(f"unit order mod {M} exceeded cap")
    return order


def residue_period(problem: PellProblem) -> int:
    """Order of the unit action on (u, w) mod lcm(constraint moduli)."""
    unit = fundamental_unit(problem.d)
    M = _residue_modulus(problem)
    return _unit_order_mod(problem.d, unit.u0 % M, unit.w0 % M, M)


def block_unit(problem: PellProblem) -> tuple[FundamentalUnit, int]:
    """unit^T together with T, where T is the residue period.

    Stepping by unit^T preserves every constraint of the problem, so it
    moves along constrained sub-orbits.
    """
    T = residue_period(problem)
    return unit_power(fundamental_unit(problem.d), T), T


def _seeds(problem: PellProblem) -> list[PellSolution]:
    seeds: dict[tuple[int, int], None] = {}
    for rep in class_representatives(problem.d, problem.rhs):
        seeds[(rep.u, rep.w)] = None
        seeds[(-rep.u, -rep.w)] = None
    return [PellSolution(u, w) for (u, w) in seeds]


def constrained_orbit_hits(problem: PellProblem) -> tuple[PellSolution, ...]:
    """One exact solution for every constrained block-orbit.

    Scans a full residue period of each class representative (and its
    negation); each phase k where the constraints hold mod M is realized
    exactly as unit^k applied to the seed.  The result is empty iff the
    constrained solution set is empty.
    """
    unit = fundamental_unit(problem.d)
    M = _residue_modulus(problem)
    T = _unit_order_mod(problem.d, unit.u0 % M, unit.w0 % M, M)
    u0m, w0m, dm = unit.u0 % M, unit.w0 % M, problem.d % M
    hits: list[PellSolution] = []
    for seed in _seeds(problem):
        a, b = seed.u % M, seed.w % M
        for k in range(T):
            if problem.meets_constraints(a, b):
                power = unit_power(unit, k)
                hits.append(orbit_step(seed, power, 1) if k else seed)
            a, b = (a * u0m + b * w0m * dm) % M, (a * w0m + b * u0m) % M
    unique = dict.fromkeys((h.u, h.w) for h in hits)
    out = [problem.solution(u, w) for (u, w) in unique]
    out.sort(key=lambda p: (abs(p.w), p.u, p.w))
    return tuple(out)


@dataclass(frozen=True)
class ConstrainedSolutions:
    """Result of a constrained search.

    ``empty`` is a decision, not a timeout: it is only True after a full
    residue period of every class representative produced no hit.
    """

    solutions: tuple[PellSolution, ...]
    empty: bool
    residue_period: int
    classes_scanned: int


def solve_constrained(problem: PellProblem, search_depth: int = 64) -> ConstrainedSolutions:
    """Constrained solutions within search_depth unit steps of the class reps.

    If the bounded walk finds nothing, a full-period residue scan either
    certifies emptiness or materializes the first hit of each constrained
    orbit, so a nonempty constrained set always yields at least one
    solution.
    """
    unit = fundamental_unit(problem.d)
    seeds = _seeds(problem)
    T = residue_period(problem)
    found: set[tuple[int, int]] = set()
    for seed in seeds:
        cur = seed
        for _ in range(search_depth + 1):
            if problem.meets_constraints(cur.u, cur.w):
                found.add((cur.u, cur.w))
            cur = orbit_step(cur, unit, 1)
        cur = seed
        for _ in range(search_depth):
            cur = orbit_step(cur, unit, -1)
            if problem.meets_constraints(cur.u, cur.w):
                found.add((cur.u, cur.w))
    if not found:
        for hit in constrained_orbit_hits(problem):
            found.add((hit.u, hit.w))
    sols = [problem.solution(u, w) for (u, w) in found]
    sols.sort(key=lambda p: (abs(p.w), p.u, p.w))
    return ConstrainedSolutions(tuple(sols), not sols, T, len(seeds))


def default_x_threshold(h_square: int, rank: int) -> int:
    """Largest integer x with x < -h_square/max(rank-1, 1) - 1.

    Reading of "very negative" that keeps (H + (rank-1)D).H strictly
    negative for a divisor D with D.H = x.
    """
    m = max(rank - 1, 1)
    return -((h_square + m - 1) // m) - 1


def push_negative(
    sol: PellSolution,
    problem: PellProblem,
    x_threshold: int,
    *,
    max_blocks: int = 64,
) -> PellSolution:
    """Walk the constrained orbit of ``sol`` until decoded x <= x_threshold.

    Steps are whole residue periods, so every constraint is preserved.  On
    the block-orbit, u = A*q^j + B*q^(-j) with A*B = rhs; for rhs > 0 and
    u > 0 both coefficients are positive, u is convex in j with a positive
    minimum, and the walk either finds the orbit minimum above the threshold
    (raising ``ThresholdUnreachable`` with ``certified=True``) or returns the
    first block below it.  In every other sign configuration x is unbounded
    below along some direction and the walk succeeds.
    """
    if problem.residual(sol.u, sol.w) != 0:
        raise ValueError("not a solution of the problem")
    if not problem.meets_constraints(sol.u, sol.w):
        raise ValueError("solution does not satisfy the problem constraints")
    if problem.decode_x(sol.u) <= x_threshold:
        return sol
    step, _ = block_unit(problem)

    def x_of(p: PellSolution) -> int:
        return problem.decode_x(p.u)

    fwd = orbit_step(sol, step, 1)
    bwd = orbit_step(sol, step, -1)
    if problem.rhs > 0 and sol.u > 0:
        # convex case: descend to the orbit minimum
        cur, direction = (fwd, 1) if x_of(fwd) < x_of(bwd) else (bwd, -1)
        best = sol
        if x_of(cur) < x_of(best):
            for _ in range(max_blocks):
                best = cur
                if x_of(best) <= x_threshold:
                    return best
                cur = orbit_step(cur, step, direction)
                if x_of(cur) >= x_of(best):
                    break
            else:  # pragma: no cover - defensive
                raise ThresholdUnreachable(
                    "block walk exhausted before the orbit minimum",
                    best=best,
                    certified=False,
                )
        raise ThresholdUnreachable(
            f"orbit x values are bounded below by {x_of(best)} > {x_threshold}",
            best=best,
            certified=True,
        )
    cur, direction = (fwd, 1) if x_of(fwd) <= x_of(bwd) else (bwd, -1)
    for _ in range(max_blocks):
        if x_of(cur) <= x_threshold:
            assert problem.meets_constraints(cur.u, cur.w)
            return cur
        cur = orbit_step(cur, step, direction)
    raise ThresholdUnreachable(
        f"no x <= {x_threshold} within {max_blocks} blocks",
        best=cur,
        certified=False,
    )
