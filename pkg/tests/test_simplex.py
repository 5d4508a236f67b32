"""Solver soundness on randomized systems.

Every verdict is checked by independent arithmetic: feasible answers by
substituting the point into every row, infeasible answers by recombining
the returned multipliers from scratch, and a sample of systems against a
from-scratch Fourier-Motzkin eliminator and (for integer problems on boxed
systems) exhaustive enumeration.
"""

import itertools
import random
from fractions import Fraction

from fnef import simplex

ZERO = Fraction(0)


def rand_system(rng, nvars=None, nrows=None, boxed=False, coef=4):
    nvars = nvars or rng.randint(1, 5)
    nrows = nrows or rng.randint(1, 7)
    rows = []
    for _ in range(nrows):
        coeffs = {}
        for v in range(nvars):
            if rng.random() < 0.7:
                c = Fraction(rng.randint(-coef, coef))
                if c:
                    coeffs[v] = c
        if not coeffs:
            continue
        rel = "eq" if rng.random() < 0.3 else "ge"
        rows.append((coeffs, rel, Fraction(rng.randint(-6, 6))))
    nonneg = {v for v in range(nvars) if rng.random() < 0.6}
    if boxed:
        nonneg = set(range(nvars))
        for v in range(nvars):
            rows.append(({v: Fraction(-1)}, "ge", Fraction(-4)))
    return nvars, rows, nonneg


def check_point(nvars, rows, nonneg, point):
    for v in nonneg:
        assert point[v] >= 0
    for coeffs, rel, rhs in rows:
        val = sum(point[v] * c for v, c in coeffs.items())
        assert val == rhs if rel == "eq" else val >= rhs


def check_multipliers(nvars, rows, nonneg, mults):
    assert len(mults) == len(rows)
    combo = [ZERO] * nvars
    rhs = ZERO
    for y, (coeffs, rel, r) in zip(mults, rows):
        y = Fraction(y)
        if rel == "ge":
            assert y >= 0
        for v, c in coeffs.items():
            combo[v] += y * c
        rhs += y * r
    for v in range(nvars):
        if v in nonneg:
            assert combo[v] <= 0
        else:
            assert combo[v] == 0
    assert rhs > 0


def test_phase1_random_soundness():
    rng = random.Random(42)
    feas = infeas = 0
    for _ in range(600):
        nvars, rows, nonneg = rand_system(rng)
        status, data = simplex.solve_phase1(nvars, rows, nonneg)
        if status == "feasible":
            feas += 1
            check_point(nvars, rows, nonneg, data)
        else:
            infeas += 1
            check_multipliers(nvars, rows, nonneg, data)
    assert feas > 50 and infeas > 50  # both branches genuinely exercised


# --- Fourier-Motzkin cross-check -------------------------------------------


def fm_feasible(nvars, rows, nonneg):
    """Feasibility by variable elimination, exact and self-contained."""
    ineqs = []  # (coeffs list, rhs) meaning coeffs . x >= rhs
    for coeffs, rel, rhs in rows:
        vec = [coeffs.get(v, ZERO) for v in range(nvars)]
        ineqs.append((vec, rhs))
        if rel == "eq":
            ineqs.append(([-c for c in vec], -rhs))
    for v in nonneg:
        vec = [ZERO] * nvars
        vec[v] = Fraction(1)
        ineqs.append((vec, ZERO))
    for v in range(nvars):
        pos = [r for r in ineqs if r[0][v] > 0]
        neg = [r for r in ineqs if r[0][v] < 0]
        rest = [r for r in ineqs if r[0][v] == 0]
        for (cp, bp), (cn, bn) in itertools.product(pos, neg):
            # scale to cancel v: cp[v] > 0 > cn[v]
            lam = -cn[v] / cp[v]
            vec = [lam * a + b for a, b in zip(cp, cn)]
            rhs = lam * bp + bn
            rest.append((vec, rhs))
        ineqs = rest
    return all(rhs <= 0 for vec, rhs in ineqs)


def test_agreement_with_fourier_motzkin():
    rng = random.Random(99)
    for _ in range(120):
        nvars, rows, nonneg = rand_system(rng, nvars=rng.randint(1, 6),
                                          nrows=rng.randint(1, 6))
        status, _ = simplex.solve_phase1(nvars, rows, nonneg)
        assert (status == "feasible") == fm_feasible(nvars, rows, nonneg)


# --- integer problems against exhaustive enumeration ------------------------


def brute_ilp(nvars, rows, box=4):
    for point in itertools.product(range(box + 1), repeat=nvars):
        ok = True
        for coeffs, rel, rhs in rows:
            val = sum(coeffs[v] * point[v] for v in coeffs)
            if (rel == "eq" and val != rhs) or (rel == "ge" and val < rhs):
                ok = False
                break
        if ok:
            return True
    return False


def test_integer_feasibility_against_enumeration():
    from fnef.feasibility import LinearSystemSpec, Row, ilp_feasible

    rng = random.Random(7)
    agree_feas = agree_infeas = 0
    for k in range(300):
        nvars, rows, _ = rand_system(rng, nvars=rng.randint(1, 4),
                                     nrows=rng.randint(1, 5), boxed=True)
        names = tuple(f"x{v}" for v in range(nvars))
        spec_rows = []
        for i, (coeffs, rel, rhs) in enumerate(rows):
            spec_rows.append(Row({names[v]: c for v, c in coeffs.items()},
                                 rel, rhs, f"r:{k}:{i}"))
        for v in range(nvars):
            spec_rows.append(Row({names[v]: Fraction(1)}, "ge", ZERO, f"nn:{k}:{v}"))
        dedup = {}
        for r in spec_rows:
            dedup.setdefault(r.key(), r)
        sys = LinearSystemSpec(names, tuple(dedup.values()))
        verdict = ilp_feasible(sys)
        expected = brute_ilp(nvars, rows)
        assert verdict.feasible == expected
        if expected:
            agree_feas += 1
            for coeffs, rel, rhs in rows:
                val = sum(verdict.point[names[v]] * c for v, c in coeffs.items())
                assert verdict.point[names[v]].denominator == 1
                assert val == rhs if rel == "eq" else val >= rhs
        else:
            agree_infeas += 1
    assert agree_feas > 30 and agree_infeas > 30


# --- floating-point screen stays advisory -----------------------------------


def test_certified_recombination_rejects_corruption():
    rng = random.Random(21)
    tested = 0
    while tested < 40:
        nvars, rows, nonneg = rand_system(rng)
        status, data = simplex.solve_phase1(nvars, rows, nonneg)
        if status != "infeasible":
            continue
        tested += 1
        assert simplex.certify_infeasible(nvars, rows, nonneg, data)
        bad = list(data)
        bad[rng.randrange(len(bad))] += Fraction(1, 3)
        # either the corruption still recombines to a valid witness, or the
        # checker must reject it; what it may never do is crash or accept an
        # invalid one, so re-check its acceptance by hand
        if simplex.certify_infeasible(nvars, rows, nonneg, bad):
            check_multipliers(nvars, rows, nonneg, bad)


def test_rationalized_screen_multipliers_are_certified():
    if not simplex.float_lp_available():
        return
    rng = random.Random(33)
    hits = 0
    for _ in range(200):
        nvars, rows, nonneg = rand_system(rng)
        status, data = simplex.solve_phase1_float(nvars, rows, nonneg)
        if status != "infeasible":
            continue
        got = simplex.rationalize_multipliers(nvars, rows, nonneg, data)
        if got is not None:
            hits += 1
            check_multipliers(nvars, rows, nonneg, got)
    assert hits > 10  # the screen does real work on this family
