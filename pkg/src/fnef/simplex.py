"""Exact phase-1 simplex over the rationals, with integer pivoting.

The tableau holds integers equal to d times the true rational entries, where
d is the previous pivot element (Edmonds / fraction-free pivoting). Every
pivot keeps entries integral via the identity
    new = (pivot * old - col * row) / d
with the division exact, so no rational normalization or gcd work happens in
the inner loop. d stays positive because simplex pivots are positive, hence
all sign tests read directly off the integer entries.

Interface: solve_phase1(nvars, rows, nonneg) with rows of the form
(coeffs: dict col->Fraction, rel: "eq"|"ge", rhs: Fraction). Returns
("feasible", values) with one Fraction per variable, or ("infeasible",
multipliers) with one Fraction per input row: nonnegative on "ge" rows and
recombining the rows into an inconsistency 0 >= q > 0.

Bland's smallest-index rule guards against cycling; artificial columns sit at
the tail and never re-enter once left. Free variables are split into positive
and negative parts.

A floating-point screen (solve_phase1_float) over the same row format can
propose answers much faster, but nothing it returns is a verdict: candidate
multipliers must pass certify_infeasible -- an exact rational recombination
check -- and candidate points must be re-verified by the caller. The screen
degrades to "unknown" when its backend is unavailable.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

try:
    from scipy.optimize import linprog as _linprog
except ImportError:  # the exact solver stands alone
    _linprog = None

ZERO = Fraction(0)
ONE = Fraction(1)


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def solve_phase1(nvars: int, rows: list, nonneg, tableau_out=None) -> tuple:
    """Decide feasibility; optionally expose the final tableau.

    When tableau_out is a dict and the system is feasible, it receives the
    integer tableau (tab, obj, d, basis, rhs_col, scales) plus a cols list
    describing each column: ("x", v) positive part, ("xn", v) negative part
    of a split free variable, ("s", k) slack of row k, ("a", k) artificial.
    """
    if not rows:
        return ("feasible", [ZERO] * nvars)
    nonneg = set(nonneg)

    # column registry: x-columns first (free variables split +/-)
    col_of_pos = {}
    col_of_neg = {}
    ncols = 0
    for v in range(nvars):
        col_of_pos[v] = ncols
        ncols += 1
        if v not in nonneg:
            col_of_neg[v] = ncols
            ncols += 1

    # per-row bookkeeping: sign flip, integer scaling, slack and artificial
    # columns. Each constraint is scaled by a positive integer so its
    # coefficients and right side are integers; slack and artificial columns
    # belong to the scaled constraint, so their entries are exactly +-1 and
    # the starting basis is an identity.
    sigma = []
    scales = []
    slack_col = [None] * len(rows)
    art_col = [None] * len(rows)
    for k, (coeffs, rel, rhs) in enumerate(rows):
        if rel == "ge":
            sigma.append(1 if rhs > 0 else -1)
            slack_col[k] = ncols
            ncols += 1
        elif rel == "eq":
            sigma.append(1 if rhs >= 0 else -1)
        else:
            raise ValueError(f"unknown relation {rel!r}")
    first_art = ncols
    for k, (coeffs, rel, rhs) in enumerate(rows):
        if rel == "eq" or rhs > 0:
            art_col[k] = ncols
            ncols += 1
    rhs_col = ncols  # stored at the end of each row list

    tab = []
    basis = []
    for k, (coeffs, rel, rhs) in enumerate(rows):
        sg = sigma[k]
        scale = Fraction(rhs).denominator
        for c in coeffs.values():
            scale = _lcm(scale, Fraction(c).denominator)
        scales.append(scale)
        row = [0] * (ncols + 1)
        for v, c in coeffs.items():
            cc = Fraction(c) * sg * scale
            row[col_of_pos[v]] = cc.numerator
            if v in col_of_neg:
                row[col_of_neg[v]] = -cc.numerator
        if slack_col[k] is not None:
            # ge kept as-is: a.x - s = b; negated: -a.x + s = -b
            row[slack_col[k]] = -1 if sg == 1 else 1
        if art_col[k] is not None:
            row[art_col[k]] = 1
        row[rhs_col] = (Fraction(rhs) * sg * scale).numerator
        tab.append(row)
        basis.append(art_col[k] if art_col[k] is not None else slack_col[k])

    # phase-1 objective: reduced costs for min(sum of artificials), priced
    # out against the artificial-basic rows
    obj = [0] * (ncols + 1)
    for c in range(first_art, ncols):
        obj[c] = 1
    for k, row in enumerate(tab):
        if art_col[k] is not None:
            for c in range(ncols + 1):
                obj[c] -= row[c]

    d = 1  # previous pivot (all entries are d * true value)
    nrows = len(tab)

    while True:
        # Bland: smallest-index column with negative reduced cost, artificial
        # columns barred from entering
        enter = -1
        for j in range(first_art):
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        # ratio test among rows with positive entry; ties by smallest basis
        # column to keep Bland's guarantee
        leave = -1
        for r in range(nrows):
            a = tab[r][enter]
            if a <= 0:
                continue
            if leave < 0:
                leave = r
                continue
            lhs = tab[r][rhs_col] * tab[leave][enter]
            rhs_ = tab[leave][rhs_col] * a
            if lhs < rhs_ or (lhs == rhs_ and basis[r] < basis[leave]):
                leave = r
        if leave < 0:
            raise AssertionError("phase-1 objective unbounded below")
        p = tab[leave][enter]
        prow = tab[leave]
        for r in range(nrows):
            if r == leave:
                continue
            row = tab[r]
            c = row[enter]
            if c:
                tab[r] = [(p * a - c * b) // d for a, b in zip(row, prow)]
            elif p != d:
                tab[r] = [(p * a) // d for a in row]
        c = obj[enter]
        if c:
            obj = [(p * a - c * b) // d for a, b in zip(obj, prow)]
        elif p != d:
            obj = [(p * a) // d for a in obj]
        basis[leave] = enter
        d = p

    if obj[rhs_col] != 0:
        # infeasible: recover row multipliers from the final reduced costs;
        # fold back the per-row sign and integer scaling
        mult = [ZERO] * len(rows)
        for k in range(len(rows)):
            if art_col[k] is not None:
                y = ONE - Fraction(obj[art_col[k]], d)
            else:
                y = -Fraction(obj[slack_col[k]], d)
            mult[k] = sigma[k] * scales[k] * y
        return ("infeasible", mult)

    values = [ZERO] * nvars
    val_by_col = {}
    for r in range(nrows):
        val_by_col[basis[r]] = Fraction(tab[r][rhs_col], d)
    for v in range(nvars):
        x = val_by_col.get(col_of_pos[v], ZERO)
        if v in col_of_neg:
            x -= val_by_col.get(col_of_neg[v], ZERO)
        values[v] = x
    if tableau_out is not None:
        cols = [None] * ncols
        for v, c in col_of_pos.items():
            cols[c] = ("x", v)
        for v, c in col_of_neg.items():
            cols[c] = ("xn", v)
        for k in range(len(rows)):
            if slack_col[k] is not None:
                cols[slack_col[k]] = ("s", k)
            if art_col[k] is not None:
                cols[art_col[k]] = ("a", k)
        tableau_out.update(tab=tab, obj=obj, d=d, basis=basis,
                           rhs_col=rhs_col, cols=cols, scales=scales,
                           sigma=sigma)
    return ("feasible", values)


# --- floating-point screen --------------------------------------------------


_SCREEN_TOL = 1e-7


def float_lp_available() -> bool:
    """Whether the floating-point screen has a backend to run on."""
    return _linprog is not None


def solve_phase1_float(nvars: int, rows: list, nonneg) -> tuple:
    """Fast uncertified feasibility screen over the solve_phase1 row format.

    Returns ("feasible", values) with machine floats, ("infeasible", mults)
    with floating multiplier candidates found by a second solve on the
    multiplier side, or ("unknown", None) when no backend is present or the
    solve is inconclusive. Callers own all conclusions: points must be
    re-verified exactly and multipliers must pass certify_infeasible.
    """
    if _linprog is None or not rows:
        return ("unknown", None)
    nonneg = set(nonneg)
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for coeffs, rel, rhs in rows:
        dense = [0.0] * nvars
        for v, c in coeffs.items():
            dense[v] = float(c)
        if rel == "eq":
            a_eq.append(dense)
            b_eq.append(float(rhs))
        else:  # a.x >= rhs  becomes  -a.x <= -rhs
            a_ub.append([-x for x in dense])
            b_ub.append(-float(rhs))
    bounds = [(0.0, None) if v in nonneg else (None, None) for v in range(nvars)]
    res = _linprog(c=[0.0] * nvars, A_ub=a_ub or None, b_ub=b_ub or None,
                   A_eq=a_eq or None, b_eq=b_eq or None, bounds=bounds,
                   method="highs")
    if res.status == 0:
        return ("feasible", [float(x) for x in res.x])
    if res.status == 2:
        mults = _multiplier_candidate(nvars, rows, nonneg)
        if mults is not None:
            return ("infeasible", mults)
    return ("unknown", None)


def _multiplier_candidate(nvars: int, rows: list, nonneg):
    """Search for multipliers recombining the rows into 0 >= q > 0.

    Posed as a bounded linear program on the multipliers: maximize the
    recombined right side subject to the recombined left side vanishing on
    free variables and staying nonpositive on nonnegative ones. A positive
    optimum is a candidate inconsistency proof (to be certified exactly).
    """
    m = len(rows)
    by_var: dict = {}
    for k, (coeffs, _, _) in enumerate(rows):
        for v, c in coeffs.items():
            by_var.setdefault(v, []).append((k, float(c)))
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for v in range(nvars):
        entries = by_var.get(v)
        if not entries:
            continue
        dense = [0.0] * m
        for k, c in entries:
            dense[k] = c
        if v in nonneg:
            a_ub.append(dense)
            b_ub.append(0.0)
        else:
            a_eq.append(dense)
            b_eq.append(0.0)
    bounds = [(0.0, 1.0) if rel == "ge" else (-1.0, 1.0) for _, rel, _ in rows]
    obj = [-float(rhs) for _, _, rhs in rows]
    res = _linprog(c=obj, A_ub=a_ub or None, b_ub=b_ub or None,
                   A_eq=a_eq or None, b_eq=b_eq or None, bounds=bounds,
                   method="highs")
    if res.status == 0 and -res.fun > _SCREEN_TOL:
        return [float(y) for y in res.x]
    return None


def certify_infeasible(nvars: int, rows: list, nonneg, mults) -> bool:
    """Exact check that multipliers recombine the rows into an impossibility.

    Requires nonnegative weight on every "ge" row, a recombined left side
    that vanishes on free variables and is nonpositive on nonnegative ones,
    and a strictly positive recombined right side. Any x satisfying the rows
    would then give 0 >= combo.x >= q > 0, so none exists. All arithmetic
    is exact.
    """
    if len(mults) != len(rows):
        return False
    nonneg = set(nonneg)
    combo: dict = {}
    q = ZERO
    for y, (coeffs, rel, rhs) in zip(mults, rows):
        y = Fraction(y)
        if y == 0:
            continue
        if rel == "ge" and y < 0:
            return False
        for v, c in coeffs.items():
            combo[v] = combo.get(v, ZERO) + y * Fraction(c)
        q += y * Fraction(rhs)
    if q <= 0:
        return False
    return all(c == 0 or (v in nonneg and c < 0) for v, c in combo.items())


def rationalize_multipliers(nvars: int, rows: list, nonneg, mults):
    """Snap floating multiplier candidates to rationals that certify.

    Clears entries too small to matter and any sign violations, then rounds
    to nearby fractions of growing precision, returning the first list that
    passes certify_infeasible; None when none does (callers then fall back
    to the exact solver).
    """
    cleaned = []
    for y, (_, rel, _) in zip(mults, rows):
        if abs(y) < 1e-11 or (rel == "ge" and y < 0):
            y = 0.0
        cleaned.append(y)
    for den in (10**6, 10**9, 10**12):
        cand = [Fraction(y).limit_denominator(den) for y in cleaned]
        if certify_infeasible(nvars, rows, nonneg, cand):
            return cand
    return None
