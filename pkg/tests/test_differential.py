"""Differential tests against an independent solver, skipped without sympy.

The membership decision is re-derived from scratch: sympy's generalized
Pell solver supplies class representatives, the unit orbit is scanned over
one full residue period, and the congruence x = mu*y (mod 2g-2) plus the
divisibility by the rank are checked directly.  Any disagreement with
``membership`` would expose a defect in either the class machinery or the
period-based emptiness decision.
"""

import random
from math import isqrt

import pytest

sympy = pytest.importorskip("sympy")
from sympy.solvers.diophantine.diophantine import diop_DN  # noqa: E402

from k3witness import FamilyQuery, fundamental_unit, membership  # noqa: E402
from k3witness.errors import NoValidMu, SquareDiscriminant  # noqa: E402
from k3witness.families import rhs_value  # noqa: E402
from k3witness.lattice import is_perfect_square, unit_square_roots  # noqa: E402
from k3witness.pell import _unit_order_mod  # noqa: E402


def independent_membership(g, rr, mu, d, rhs):
    """Decide membership with sympy representatives and a residue-period scan."""
    if rhs == 0:
        return False
    h2 = 2 * g - 2
    reps = [(int(a), int(b)) for (a, b) in diop_DN(d, rhs)]
    unit = fundamental_unit(d)
    M = rr * h2
    T = _unit_order_mod(d, unit.u0 % M, unit.w0 % M, M)
    u0m, w0m, dm = unit.u0 % M, unit.w0 % M, d % M

    def constrained(u, w):
        if (u - h2) % rr or w % rr:
            return False
        return (u - h2 - mu * w) % M == 0

    for a, b in reps:
        for sgn in (1, -1):
            u, w = (sgn * a) % M, (sgn * b) % M
            for _ in range(T):
                if constrained(u, w):
                    return True
                u, w = (u * u0m + w * w0m * dm) % M, (u * w0m + w * u0m) % M
    return False


def test_membership_agrees_with_independent_decision():
    rng = random.Random(90210)
    agreements = 0
    positives = 0
    while agreements < 250:
        g = rng.randint(3, 10)
        r = rng.randint(1, 4)
        s = rng.randint(1, 4)
        if g <= r * s:
            continue
        sign = rng.choice([1, -1])
        d = rng.randint(2, 600)
        q = FamilyQuery(g, r, s, sign)
        try:
            outcomes = membership(q, d)
        except (SquareDiscriminant, NoValidMu):
            if not is_perfect_square(d):
                assert not unit_square_roots(g, d)
            continue
        rhs = rhs_value(q)
        for oc in outcomes:
            expected = independent_membership(g, q.twist_rank, oc.mu, d, rhs)
            # y = 0 only weakens membership when rhs is a perfect square;
            # the independent scan counts such orbits, ours requires y != 0
            # on some orbit element, which the same orbit always contains
            assert oc.found == expected, (g, r, s, sign, d, oc.mu)
            agreements += 1
            positives += int(oc.found)
    assert positives > 20, "differential test exercised too few members"
