"""Feasibility polytopes for symmetric divisors along boundary strata.

A nonnegative pair weighting w on {1..n} (a multigraph with rational edge
multiplicities) certifies that a symmetric divisor stays effective along a
stratum when

  * every point has weighted degree m * c * (n-1),
  * every subset I with 3 <= |I| <= n/2 carries weight w_I >= m * a_{|I|},
  * every member J of the stratum family meets its bound exactly,

where w_I sums the pairs inside I. Rational solutions witness semi-ampleness
of some multiple; integral solutions witness base-point-freeness at the given
multiple m. Infeasibility of the rational system is certified by an exact
Farkas recombination; infeasibility of the integral system is decided by
exhaustive branch-and-bound and recorded as such.

All arithmetic is Fraction; verdicts are exact yes/no with zero tolerance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, lcm

from . import simplex
from .divisors import (SymDivisorCA, as_b, as_ca, divisor_from_json_dict,
                       divisor_to_json_dict, is_f_nef, is_integral)
from .rational import format_q, parse_q
from .trees import Stratum, set_stabilizer_generators

ZERO = Fraction(0)
ONE = Fraction(1)


class BudgetExceeded(RuntimeError):
    """A solver hit its configured search budget."""


def pair_var(i: int, j: int) -> str:
    i, j = min(i, j), max(i, j)
    return f"w({i},{j})"


def _floor_q(q: Fraction) -> int:
    return q.numerator // q.denominator


def _ceil_q(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


@dataclass
class Row:
    """One linear condition: coeffs . x (rel) rhs, with a provenance tag."""

    coeffs: dict
    rel: str  # "eq" | "ge"
    rhs: Fraction
    tag: str

    def key(self):
        return (tuple(sorted(self.coeffs.items())), self.rel, self.rhs)


@dataclass
class LinearSystemSpec:
    """Variables plus equality/inequality rows; rows carry provenance tags."""

    variables: tuple
    rows: tuple

    def __post_init__(self):
        seen = set()
        names = set(self.variables)
        for r in self.rows:
            k = r.key()
            if k in seen:
                raise ValueError(f"duplicate row {r.tag}")
            seen.add(k)
            unknown = set(r.coeffs) - names
            if unknown:
                raise ValueError(f"row {r.tag} uses unknown variables {sorted(unknown)}")

    def count_by_tag(self, prefix: str) -> int:
        return sum(1 for r in self.rows if r.tag.split(":")[0] == prefix)


@dataclass(frozen=True)
class FarkasWitness:
    """Row multipliers certifying inconsistency.

    Nonnegative on inequality rows; the weighted sum of all rows must cancel
    every variable while leaving a strictly positive right side: 0 >= q > 0.
    """

    multipliers: tuple


def verify_farkas(sys: LinearSystemSpec, wit: FarkasWitness) -> bool:
    if len(wit.multipliers) != len(sys.rows):
        return False
    combo: dict = {}
    rhs_val = ZERO
    for y, row in zip(wit.multipliers, sys.rows):
        y = Fraction(y)
        if row.rel == "ge" and y < 0:
            return False
        if y == 0:
            continue
        for v, a in row.coeffs.items():
            combo[v] = combo.get(v, ZERO) + y * a
        rhs_val += y * row.rhs
    return all(x == 0 for x in combo.values()) and rhs_val > 0


# --- slice systems ----------------------------------------------------------


def _all_pairs(n: int):
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def _normalized_subsets(n: int, size: int):
    """Subsets of one size, one representative per complementary pair at n/2."""
    for cmb in itertools.combinations(range(1, n + 1), size):
        if 2 * size == n and cmb[0] != 1:
            continue
        yield cmb


@lru_cache(maxsize=64)
def _shared_rows(n: int, c: Fraction, a: tuple, m: int):
    """Degree, subset and nonnegativity rows; everything except stratum rows."""
    deg_rhs = m * c * (n - 1)
    if deg_rhs.denominator != 1:
        raise ValueError(f"degree right side {deg_rhs} is not an integer")

    def a_at(size):
        return a[size - 3] if size >= 3 else ZERO

    rows = []
    for i in range(1, n + 1):
        coeffs = {pair_var(i, j): ONE for j in range(1, n + 1) if j != i}
        rows.append(Row(coeffs, "eq", deg_rhs, f"degree:{i}"))
    for size in range(3, n // 2 + 1):
        rhs = m * a_at(size)
        if rhs <= 0:
            # implied by the nonnegativity rows below
            continue
        for cmb in _normalized_subsets(n, size):
            coeffs = {pair_var(i, j): ONE for i, j in itertools.combinations(cmb, 2)}
            rows.append(Row(coeffs, "ge", rhs, "subset:" + ",".join(map(str, cmb))))
    for i, j in _all_pairs(n):
        rows.append(Row({pair_var(i, j): ONE}, "ge", ZERO, f"nonneg:{i},{j}"))
    return tuple(rows)


def _stratum_rows(n: int, d: SymDivisorCA, m: int, s: Stratum):
    rows = []
    for mem in s.sorted_members():
        rhs = m * d.a_at(len(mem))
        coeffs = {pair_var(i, j): ONE for i, j in itertools.combinations(mem, 2)}
        rows.append(Row(coeffs, "eq", rhs, "stratum:" + ",".join(map(str, mem))))
    return rows


def _validated(n: int, d, m: int) -> SymDivisorCA:
    d = as_ca(d)
    if d.n != n:
        raise ValueError(f"divisor has n={d.n}, expected {n}")
    if not (isinstance(m, int) and m >= 1):
        raise ValueError(f"multiplier must be a positive integer, got {m!r}")
    if not is_f_nef(as_b(d)):
        raise ValueError("divisor is not F-nef")
    if not is_integral(d):
        raise ValueError("divisor is not integral")
    return d


def build_slice(n: int, d, m: int, s: Stratum) -> LinearSystemSpec:
    """Constraint system for weightings pinned along one stratum family."""
    d = _validated(n, d, m)
    if s.n != n:
        raise ValueError(f"stratum has n={s.n}, expected {n}")
    variables = tuple(pair_var(i, j) for i, j in _all_pairs(n))
    rows = list(_shared_rows(n, d.c, d.a, m)) + _stratum_rows(n, d, m, s)
    return LinearSystemSpec(variables, tuple(rows))


def build_intersection_slice(n: int, d, m: int, strata) -> LinearSystemSpec:
    """One system whose solutions satisfy every listed stratum at once.

    Any solution restricts to a solution for each stratum separately, so one
    feasible point covers a whole family of cells.
    """
    d = _validated(n, d, m)
    variables = tuple(pair_var(i, j) for i, j in _all_pairs(n))
    rows = list(_shared_rows(n, d.c, d.a, m))
    seen = {r.key() for r in rows}
    for s in strata:
        if s.n != n:
            raise ValueError(f"stratum has n={s.n}, expected {n}")
        for row in _stratum_rows(n, d, m, s):
            if row.key() not in seen:
                seen.add(row.key())
                rows.append(row)
    return LinearSystemSpec(variables, tuple(rows))


# --- prepared form shared by the solvers ------------------------------------


class _Prepared:
    """Index maps, native nonnegativity, zero fixing, reduced solver rows."""

    def __init__(self, sys: LinearSystemSpec):
        self.sys = sys
        self.var_index = {v: k for k, v in enumerate(sys.variables)}

        self.nonneg_var_rows: dict[str, int] = {}
        for idx, row in enumerate(sys.rows):
            if row.rel == "ge" and row.rhs == 0 and len(row.coeffs) == 1:
                (var, co), = row.coeffs.items()
                if co > 0 and var not in self.nonneg_var_rows:
                    self.nonneg_var_rows[var] = idx
        self.native_rows = set(self.nonneg_var_rows.values())

        # zero fixing: equality rows with zero right side over nonnegative
        # variables force every variable they touch to zero
        self.fixed: dict[str, int] = {}
        for idx, row in enumerate(sys.rows):
            if row.rel != "eq" or row.rhs != 0 or not row.coeffs:
                continue
            if all(co > 0 and var in self.nonneg_var_rows for var, co in row.coeffs.items()):
                for var in row.coeffs:
                    self.fixed.setdefault(var, idx)

        self.eq: list[tuple[int, Row]] = []
        self.ge: list[tuple[int, Row]] = []
        for idx, row in enumerate(sys.rows):
            if idx in self.native_rows:
                continue
            coeffs = {v: co for v, co in row.coeffs.items() if v not in self.fixed}
            red = Row(coeffs, row.rel, row.rhs, row.tag)
            (self.eq if row.rel == "eq" else self.ge).append((idx, red))

        # fixed variables keep their nonnegativity so their unused columns
        # are not split into free pairs
        self.nonneg_idx = {self.var_index[v] for v in self.nonneg_var_rows}

    def ge_float(self):
        """Float view of the reduced inequality rows, for screened scans."""
        got = getattr(self, "_ge_float", None)
        if got is None:
            got = [(idx, tuple((v, float(co)) for v, co in row.coeffs.items()),
                    float(row.rhs))
                   for idx, row in self.ge if row.coeffs]
            self._ge_float = got
        return got

    def contradiction_row(self):
        """Index of a reduced row that is empty yet unsatisfiable, if any."""
        for idx, row in self.eq:
            if not row.coeffs and row.rhs != 0:
                return idx
        for idx, row in self.ge:
            if not row.coeffs and row.rhs > 0:
                return idx
        return None

    def solver_row(self, row: Row):
        return ({self.var_index[v]: co for v, co in row.coeffs.items()}, row.rel, row.rhs)

    def full_point(self, data) -> dict:
        point = {v: data[self.var_index[v]] for v in self.sys.variables}
        for v in self.fixed:
            point[v] = ZERO
        return point


def point_violations(sys: LinearSystemSpec, point: dict) -> list[int]:
    """Indices of rows the point fails, in row order."""
    out = []
    for idx, row in enumerate(sys.rows):
        v = ZERO
        for var, co in row.coeffs.items():
            v += co * point.get(var, ZERO)
        if (row.rel == "eq" and v != row.rhs) or (row.rel == "ge" and v < row.rhs):
            out.append(idx)
    return out


# --- rational feasibility ---------------------------------------------------


@dataclass
class LpVerdict:
    feasible: bool
    point: dict | None
    witness: FarkasWitness | None
    rounds: int = 0
    active: tuple = ()


def _lift_witness(prep: _Prepared, mult: dict) -> FarkasWitness:
    """Extend multipliers on reduced rows to the full row list.

    Residual coefficients left on eliminated variables are cancelled through
    the zero-fixing equality rows (multiplier chosen small enough to push
    every residual nonpositive) and then through nonnegativity rows.
    """
    sys = prep.sys
    full = [ZERO] * len(sys.rows)
    residual: dict[str, Fraction] = {}
    for idx, y in mult.items():
        y = Fraction(y)
        if y == 0:
            continue
        full[idx] = y
        for var, co in sys.rows[idx].coeffs.items():
            residual[var] = residual.get(var, ZERO) + y * co

    fix_rows = sorted(set(prep.fixed.values()))
    for fidx in fix_rows:
        frow = sys.rows[fidx]
        lam = min(min((-residual.get(v, ZERO)) / co for v, co in frow.coeffs.items()), ZERO)
        if lam != 0:
            full[fidx] += lam
            for var, co in frow.coeffs.items():
                residual[var] = residual.get(var, ZERO) + lam * co

    for var, x in sorted(residual.items()):
        if x == 0:
            continue
        if x > 0 or var not in prep.nonneg_var_rows:
            raise AssertionError(f"cannot lift inconsistency multipliers: residual {x} on {var}")
        nidx = prep.nonneg_var_rows[var]
        full[nidx] += -x / sys.rows[nidx].coeffs[var]
    wit = FarkasWitness(tuple(full))
    if not verify_farkas(sys, wit):
        raise AssertionError("inconsistency certificate failed recombination")
    return wit


def lp_feasible(sys: LinearSystemSpec, initial_active=None, lazy_threshold: int = 48) -> LpVerdict:
    """Exact rational feasibility of the system.

    Inequality rows activate lazily: solve a working subsystem, pull in
    violated rows, repeat. Returned points are checked against every row;
    witnesses are re-verified by recombination before returning.
    """
    prep = _Prepared(sys)
    bad = prep.contradiction_row()
    if bad is not None:
        row = sys.rows[bad]
        y = ONE if row.rel == "ge" or row.rhs > 0 else -ONE
        return LpVerdict(False, None, _lift_witness(prep, {bad: y}), 0, ())

    active: set[int] = set()
    if initial_active:
        ge_ids = {idx for idx, _ in prep.ge}
        active |= set(initial_active) & ge_ids
    if len(prep.ge) <= lazy_threshold:
        active = {idx for idx, _ in prep.ge}
    ge_by_idx = dict(prep.ge)

    rounds = 0
    while True:
        rounds += 1
        kept = []
        solver_rows = []
        for idx, row in prep.eq:
            if row.coeffs:
                kept.append(idx)
                solver_rows.append(prep.solver_row(row))
        for idx in sorted(active):
            row = ge_by_idx[idx]
            if row.coeffs:
                kept.append(idx)
                solver_rows.append(prep.solver_row(row))
        status, data = simplex.solve_phase1(len(sys.variables), solver_rows, prep.nonneg_idx)
        if status == "infeasible":
            mult = {idx: y for idx, y in zip(kept, data) if y != 0}
            wit = _lift_witness(prep, mult)
            return LpVerdict(False, None, wit, rounds, tuple(sorted(active)))

        point = prep.full_point(data)
        violated = point_violations(sys, point)
        if not violated:
            return LpVerdict(True, point, None, rounds, tuple(sorted(active)))
        fresh = [idx for idx in violated if idx in ge_by_idx and idx not in active]
        if not fresh:
            raise AssertionError("solver point violates an active or eliminated row")
        active.update(fresh[:64])


# --- integral feasibility ---------------------------------------------------


@dataclass
class IlpVerdict:
    feasible: bool
    point: dict | None
    nodes: int
    exhausted: bool


def _prop_row(row: Row):
    """Propagation form of an integral-after-scaling row: all-int data."""
    vs = tuple(sorted(row.coeffs))
    scale = lcm(Fraction(row.rhs).denominator,
                *(Fraction(row.coeffs[v]).denominator for v in vs))
    coeffs = tuple(int(Fraction(row.coeffs[v]) * scale) for v in vs)
    return (vs, coeffs, row.rel, int(Fraction(row.rhs) * scale))


def _propagate_bounds(prop_rows, bounds, passes: int = 16) -> bool:
    """Integer interval tightening; False when a window empties.

    prop_rows: list of (var tuple, int coeff tuple, rel, int rhs) as built
    by _prop_row. bounds maps var to [lo, hi] ints (None = unbounded).
    Everything runs in machine-free exact integer arithmetic; sound for
    integer-valued variables.
    """
    for _ in range(passes):
        changed = False
        for vars_, coeffs, rel, rhs in prop_rows:
            clo = []
            chi = []
            lo_sum = hi_sum = 0
            lo_inf = hi_inf = 0
            for var, co in zip(vars_, coeffs):
                lo, hi = bounds[var]
                if co > 0:
                    a = None if lo is None else co * lo
                    b = None if hi is None else co * hi
                else:
                    a = None if hi is None else co * hi
                    b = None if lo is None else co * lo
                clo.append(a)
                chi.append(b)
                if a is None:
                    lo_inf += 1
                else:
                    lo_sum += a
                if b is None:
                    hi_inf += 1
                else:
                    hi_sum += b
            senses = (">=",) if rel == "ge" else (">=", "<=")
            for sense in senses:
                for k, (var, co) in enumerate(zip(vars_, coeffs)):
                    if sense == ">=":
                        if hi_inf - (1 if chi[k] is None else 0) > 0:
                            continue
                        target = rhs - (hi_sum - (chi[k] if chi[k] is not None else 0))
                        lo, hi = bounds[var]
                        if co > 0:
                            v = -((-target) // co)
                            if lo is None or v > lo:
                                bounds[var][0] = v
                                changed = True
                        else:
                            v = target // co
                            if hi is None or v < hi:
                                bounds[var][1] = v
                                changed = True
                    else:
                        if lo_inf - (1 if clo[k] is None else 0) > 0:
                            continue
                        target = rhs - (lo_sum - (clo[k] if clo[k] is not None else 0))
                        lo, hi = bounds[var]
                        if co > 0:
                            v = target // co
                            if hi is None or v < hi:
                                bounds[var][1] = v
                                changed = True
                        else:
                            v = -((-target) // co)
                            if lo is None or v > lo:
                                bounds[var][0] = v
                                changed = True
            for var in vars_:
                lo, hi = bounds[var]
                if lo is not None and hi is not None and lo > hi:
                    return False
        if not changed:
            break
    return True


def ilp_feasible(sys: LinearSystemSpec, node_budget=None, symmetry=None,
                 on_node=None, enable_cuts=None) -> IlpVerdict:
    """Exact integer feasibility by depth-first branch-and-bound.

    Branches on the variable whose relaxation value sits nearest the middle
    of an integer gap; integer bound propagation runs at every node. Negative
    answers mean the finite search tree was exhausted; they carry no compact
    certificate and are recorded as exhaustive.

    symmetry, if given, lists permutations of the variables (index tuples)
    that map solutions to solutions. Branching then works on whole variable
    orbits under the subgroup stabilizing the current node's bounds: one
    child caps a single representative below, the other raises the entire
    orbit above. Any solution with some orbit member below the split maps,
    by a stabilizer element, to one with the representative below it, so the
    two children still cover every solution and exhaustion stays a proof.

    Node relaxations are screened in floating point when a backend exists,
    but no verdict ever rests on it: prunes demand an exactly certified
    multiplier recombination, accepted points pass exact re-verification
    against every row, and anything ambiguous reruns on the exact solver.
    Root cutting needs the exact solver's tableau, so cuts stay off when
    orbit branching is available to do that work instead; enable_cuts, if
    given, forces them on or off regardless.

    on_node, if given, is called as on_node(count, deltas, stab) whenever a
    node is taken up; it exists for progress reporting only.
    """
    for row in sys.rows:
        if Fraction(row.rhs).denominator != 1 or any(Fraction(c).denominator != 1 for c in row.coeffs.values()):
            raise ValueError("integer feasibility needs integral row data")

    prep = _Prepared(sys)
    if prep.contradiction_row() is not None:
        return IlpVerdict(False, None, 0, True)

    live_vars = [v for v in sys.variables if v not in prep.fixed]
    red_rows = [row for _, row in prep.eq] + [row for _, row in prep.ge]
    prop_rows = [_prop_row(row) for row in red_rows if row.coeffs]

    root_bounds = {v: [0 if v in prep.nonneg_var_rows else None, None] for v in live_vars}
    if not _propagate_bounds(prop_rows, root_bounds):
        return IlpVerdict(False, None, 0, True)

    nvars = len(sys.variables)
    vnames = sys.variables
    identity = tuple(range(nvars))
    root_stab = []
    for p in (symmetry or ()):
        p = tuple(p)
        if len(p) != nvars or sorted(p) != list(range(nvars)):
            raise ValueError("symmetry entries must permute the variable indices")
        if p != identity:
            root_stab.append(p)
    # rounding cuts need the exact root tableau, which is worth paying for
    # only when no symmetry information is available to drive the branching
    use_cuts = (not root_stab) if enable_cuts is None else bool(enable_cuts)

    ge_by_idx = dict(prep.ge)
    nodes = 0
    cuts: list[Row] = []
    cut_rounds = 0
    # stack entries: (bound deltas {var: (lo, hi)}, inherited active set,
    #                 bound-stabilizing subgroup as a shared list)
    stack = [({}, set(), root_stab)]

    while stack:
        deltas, active, stab = stack.pop()
        nodes += 1
        if on_node is not None:
            on_node(nodes, deltas, stab)
        if node_budget is not None and nodes > node_budget:
            raise BudgetExceeded(f"integer search exceeded {node_budget} nodes")
        bounds = {v: list(b) for v, b in root_bounds.items()}
        for v, (lo, hi) in deltas.items():
            if lo is not None and (bounds[v][0] is None or lo > bounds[v][0]):
                bounds[v][0] = lo
            if hi is not None and (bounds[v][1] is None or hi < bounds[v][1]):
                bounds[v][1] = hi
        if not _propagate_bounds(prop_rows, bounds):
            continue

        if all(b[0] is not None and b[0] == b[1] for b in bounds.values()):
            data_point = {v: Fraction(bounds[v][0]) for v in live_vars}
            ok = True
            for row in red_rows:
                v = sum((co * data_point[var] for var, co in row.coeffs.items()), ZERO)
                if (row.rel == "eq" and v != row.rhs) or (row.rel == "ge" and v < row.rhs):
                    ok = False
                    break
            if not ok:
                continue
            point = dict(data_point)
            for v in prep.fixed:
                point[v] = ZERO
            if point_violations(sys, point):
                raise AssertionError("propagated point fails full verification")
            return IlpVerdict(True, point, nodes, False)

        at_root = not deltas
        want_tab = at_root and use_cuts and cut_rounds < 3
        node = _node_lp(prep, ge_by_idx, active, deltas, bounds, cuts,
                        want_tableau=want_tab, allow_float=not want_tab)
        if node is None:
            continue
        point_red, tight, approx = node[:3]
        if want_tab and any(x.denominator != 1 for x in point_red.values()):
            info, rowdefs, free_vars = node[3:]
            fresh = _gomory_cuts(info, rowdefs, point_red, len(cuts),
                                 free_vars)
            if fresh:
                cuts.extend(fresh)
                prop_rows.extend(_prop_row(cut) for cut in fresh)
                cut_rounds += 1
                stack.append(({}, active, stab))
                continue

        while True:
            frac_var = None
            frac_score = None
            for v in live_vars:
                x = point_red[v]
                if x.denominator != 1:
                    fpart = x - _floor_q(x)
                    score = abs(fpart - Fraction(1, 2))
                    if frac_score is None or score < frac_score:
                        frac_score = score
                        frac_var = v
            if frac_var is not None:
                break
            point = {v: point_red[v] for v in live_vars}
            for v in prep.fixed:
                point[v] = ZERO
            if not point_violations(sys, point):
                return IlpVerdict(True, point, nodes, False)
            if not approx:
                raise AssertionError("relaxation point fails full verification")
            # the screen's snapped point misses exactly: redo the node exactly
            node = _node_lp(prep, ge_by_idx, active, deltas, bounds, cuts)
            if node is None:
                break
            point_red, tight, approx = node[:3]
        if frac_var is None:
            continue

        x = point_red[frac_var]
        f = _floor_q(x)
        wlo, whi = bounds[frac_var]
        # clamp the split into the node window: any split point there keeps
        # the children a partition, and both their windows strictly smaller,
        # which is what terminates the search even on screened points
        if wlo is not None and f < wlo:
            f = wlo
        if whi is not None and f > whi - 1:
            f = whi - 1
        c = f + 1
        vi = prep.var_index[frac_var]
        sub_stab = [g for g in stab if g[vi] == vi] if stab else stab
        down = dict(deltas)
        lo, hi = down.get(frac_var, (None, None))
        down[frac_var] = (lo, f if hi is None else min(hi, f))
        children = [(down, sub_stab)]

        orbit = {vnames[g[vi]] for g in stab}
        orbit.add(frac_var)
        if not (c >= 1 and any(u in prep.fixed for u in orbit)):
            # a fixed orbit member sits at 0 <= f in every solution, so the
            # down child alone already covers everything in that case
            up = dict(deltas)
            for u in orbit:
                if u in prep.fixed:
                    continue
                lo, hi = up.get(u, (None, None))
                up[u] = (c if lo is None else max(lo, c), hi)
            children.append((up, stab if len(orbit) > 1 else sub_stab))

        # the last child pushed is explored first: nearest side of the split
        if x - f < Fraction(1, 2):
            children.reverse()
        for child_deltas, child_stab in children:
            stack.append((child_deltas, set(tight), child_stab))

    return IlpVerdict(False, None, nodes, True)


def _node_lp(prep: _Prepared, ge_by_idx, active: set, deltas, bounds, cuts,
             want_tableau=False, allow_float=False):
    """Relaxation at one search node; returns None when infeasible.

    bounds carries the node's propagated integer windows; deltas the
    branch-imposed ones. Single-value windows are substituted out as
    constants, shrinking the solver. Only branched variables get their
    window edges as explicit rows -- unbranched windows are implied by the
    system itself and as rows would only add degenerate pivoting. Propagated
    windows only trim non-integral points, keeping the relaxation valid for
    pruning.

    With allow_float, a floating-point screen runs first. A screened
    "infeasible" prunes only after its multipliers are certified exactly
    against this node's rows (a subset of the full system's consequences,
    so the prune is sound a fortiori); a screened point is snapped to
    rationals and marked approximate, and the violated/tight scans then
    use a small tolerance -- safe because approximate points are never
    accepted by the caller without exact re-verification. Anything
    ambiguous falls back to the exact solver.

    Returns (point, tight_active, approx) and, when want_tableau (exact
    only), additionally the solver tableau, a (coeffs, rhs) definition per
    solver row over the free variables, and the free variable list, for
    cutting.
    """
    pinned = {}
    free = []
    for v in prep.sys.variables:
        if v in prep.fixed:
            continue
        lo, hi = bounds[v]
        if lo is not None and lo == hi:
            pinned[v] = Fraction(lo)
        else:
            free.append(v)
    col = {v: k for k, v in enumerate(free)}
    nonneg_local = {col[v] for v in free if v in prep.nonneg_var_rows}

    def translate(row):
        rhs = row.rhs
        coeffs = {}
        for v, co in row.coeffs.items():
            if v in pinned:
                rhs -= co * pinned[v]
            else:
                coeffs[col[v]] = co
        return coeffs, rhs

    while True:
        solver_rows = []
        rowdefs = []
        ok = True
        for group, rel, bad in ((prep.eq, "eq", lambda r: r != 0),
                                (((i, ge_by_idx[i]) for i in sorted(active)), "ge",
                                 lambda r: r > 0)):
            for idx, row in group:
                if not row.coeffs:
                    continue
                coeffs, rhs = translate(row)
                if not coeffs:
                    if bad(rhs):
                        return None
                    continue
                solver_rows.append((coeffs, rel, rhs))
                rowdefs.append(({v: co for v, co in row.coeffs.items()
                                 if v not in pinned}, rhs))
        for v in sorted(deltas):
            if v not in col:
                continue
            lo, hi = bounds[v]
            if lo is not None and (lo > 0 or v not in prep.nonneg_var_rows):
                solver_rows.append(({col[v]: ONE}, "ge", Fraction(lo)))
                rowdefs.append(({v: ONE}, Fraction(lo)))
            if hi is not None:
                solver_rows.append(({col[v]: -ONE}, "ge", Fraction(-hi)))
                rowdefs.append(({v: -ONE}, Fraction(-hi)))
        for cut in cuts:
            coeffs, rhs = translate(cut)
            if not coeffs:
                if rhs > 0:
                    return None
                continue
            solver_rows.append((coeffs, "ge", rhs))
            rowdefs.append(({v: co for v, co in cut.coeffs.items()
                             if v not in pinned}, rhs))

        info: dict = {} if want_tableau else None
        fdata = None
        data = None
        if free:
            if allow_float and not want_tableau:
                fstatus, fres = simplex.solve_phase1_float(
                    len(free), solver_rows, nonneg_local)
                if fstatus == "infeasible":
                    if simplex.rationalize_multipliers(
                            len(free), solver_rows, nonneg_local, fres) is not None:
                        return None
                elif fstatus == "feasible":
                    fdata = fres
            if fdata is None:
                status, data = simplex.solve_phase1(len(free), solver_rows,
                                                    nonneg_local, tableau_out=info)
                if status == "infeasible":
                    return None

        if fdata is not None:
            # screened point: scan in floats with a tolerance; conclusions
            # drawn from it are re-verified exactly by the caller
            fpoint = {v: float(x) for v, x in pinned.items()}
            for v in free:
                fpoint[v] = fdata[col[v]]
            violated = []
            for idx, fco, frhs in prep.ge_float():
                if idx in active:
                    continue
                val = 0.0
                for var, co in fco:
                    val += co * fpoint[var]
                if val < frhs - 1e-6:
                    violated.append(idx)
            if violated:
                active.update(violated[:128])
                continue
            tight = set()
            for idx, fco, frhs in prep.ge_float():
                if idx not in active:
                    continue
                val = 0.0
                for var, co in fco:
                    val += co * fpoint[var]
                if abs(val - frhs) <= 1e-6:
                    tight.add(idx)
            point = dict(pinned)
            for v in free:
                point[v] = _snap_value(fdata[col[v]])
            return point, tight, True

        point = dict(pinned)
        if free:
            for v in free:
                point[v] = data[col[v]]
        violated = []
        for idx, row in prep.ge:
            if idx in active or not row.coeffs:
                continue
            val = sum((co * point[var] for var, co in row.coeffs.items()), ZERO)
            if val < row.rhs:
                violated.append(idx)
        # window edges and cuts are explicit rows, equalities are always
        # active: only lazy subset rows can be violated here
        if not violated:
            tight = set()
            for idx in active:
                row = ge_by_idx[idx]
                val = sum((co * point[var] for var, co in row.coeffs.items()), ZERO)
                if val == row.rhs:
                    tight.add(idx)
            if want_tableau:
                return point, tight, False, info, rowdefs, free
            return point, tight, False
        active.update(violated[:128])


def _snap_value(x: float) -> Fraction:
    """Screened relaxation value as a rational: integers win small noise."""
    r = round(x)
    if abs(x - r) <= 1e-7:
        return Fraction(r)
    return Fraction(x).limit_denominator(10**6)


def _frac_part(q: Fraction) -> Fraction:
    return q - (q.numerator // q.denominator)


def _gomory_cuts(info: dict, rowdefs, point, seq_start: int, variables,
                 max_cuts: int = 24, max_den: int = 64):
    """Fractional cuts from basic tableau rows, valid for all integer points.

    Every structural variable is integer-constrained and every slack equals
    its row's scaled activity, hence is integral too; artificial columns are
    zero in any solution and drop out. Split free-variable columns are not
    integer-constrained, so rows touching them are skipped. Only cuts the
    current point violates are returned, and cuts whose coefficient
    denominators do not share a small common multiple are dropped -- the
    solver scales each row by that multiple, and deep cut recursion
    otherwise swells the integer tableau until pivoting stalls.
    """
    tab = info["tab"]
    d = info["d"]
    basis = info["basis"]
    rhs_col = info["rhs_col"]
    cols = info["cols"]
    scales = info["scales"]
    if any(meta is not None and meta[0] == "xn" for meta in cols):
        return []
    cuts = []
    for r in range(len(tab)):
        if len(cuts) >= max_cuts:
            break
        bmeta = cols[basis[r]]
        if bmeta[0] == "a" or bmeta[0] == "xn":
            continue
        row = tab[r]
        f0 = _frac_part(Fraction(row[rhs_col], d))
        if f0 == 0:
            continue
        coeffs: dict = {}
        rhs = f0
        usable = True
        for j in range(rhs_col):
            entry = row[j]
            if entry == 0 or j == basis[r]:
                continue
            meta = cols[j]
            if meta[0] == "a":
                continue
            f = _frac_part(Fraction(entry, d))
            if f == 0:
                continue
            if meta[0] == "xn":
                usable = False
                break
            if meta[0] == "x":
                var = variables[meta[1]]
                coeffs[var] = coeffs.get(var, ZERO) + f
            else:  # slack of solver row k: value is scale*(coeffs.x - rhs)
                k = meta[1]
                rc, rr = rowdefs[k]
                L = f * scales[k]
                for var, co in rc.items():
                    coeffs[var] = coeffs.get(var, ZERO) + L * co
                rhs += L * rr
        if not usable:
            continue
        coeffs = {v: c for v, c in coeffs.items() if c != 0}
        scale = lcm(rhs.denominator, *(c.denominator for c in coeffs.values()))
        if scale > max_den:
            continue
        val = sum((c * point[v] for v, c in coeffs.items()), ZERO)
        if val >= rhs:
            continue
        cuts.append(Row(coeffs, "ge", rhs, f"cut:{seq_start + len(cuts)}"))
    return cuts


# --- symmetry reduction -----------------------------------------------------


def pair_symmetry_classes(n: int, gens) -> dict:
    """Orbit classes of pair variables under the generated permutation group.

    Returns var name -> class id, with ids numbered by each class's smallest
    pair. Union-find over the generator images; no group enumeration.
    """
    parent = {p: p for p in _all_pairs(n)}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    for g in gens:
        for i, j in _all_pairs(n):
            a, b = g[i], g[j]
            p, q = find((i, j)), find((min(a, b), max(a, b)))
            if p != q:
                parent[max(p, q)] = min(p, q)
    roots = sorted({find(p) for p in parent})
    root_id = {r: k for k, r in enumerate(roots)}
    return {pair_var(i, j): root_id[find((i, j))] for i, j in _all_pairs(n)}


def symmetry_reduce(sys: LinearSystemSpec, var_class: dict):
    """Quotient system over class-constant points.

    Every variable must be assigned a class. Rows reduce to class sums;
    identical reduced rows collapse, and the returned groups list (one list
    of original row indices per reduced row) supports lifting infeasibility
    multipliers back: splitting a reduced multiplier equally over its group
    recombines to class-constant coefficients, so cancellation per class
    becomes cancellation per variable.

    Feasibility of the reduction implies feasibility of the original by
    expansion; for rational solving the converse holds too, because averaging
    a solution over the symmetry group is again a solution. For integral
    solving the reduction is only a sufficient fast path.
    """
    missing = [v for v in sys.variables if v not in var_class]
    if missing:
        raise ValueError(f"variables without a class: {missing[:4]}")
    nclasses = 1 + max(var_class.values())
    rvars = tuple(f"y{k}" for k in range(nclasses))
    reduced_rows = []
    groups = []
    seen: dict = {}
    for idx, row in enumerate(sys.rows):
        agg: dict = {}
        for v, co in row.coeffs.items():
            k = var_class[v]
            agg[k] = agg.get(k, ZERO) + co
        coeffs = {rvars[k]: co for k, co in sorted(agg.items()) if co != 0}
        key = (tuple(sorted(coeffs.items())), row.rel, row.rhs)
        if key in seen:
            groups[seen[key]].append(idx)
        else:
            seen[key] = len(reduced_rows)
            reduced_rows.append(Row(coeffs, row.rel, row.rhs, row.tag))
            groups.append([idx])
    red = LinearSystemSpec(rvars, tuple(reduced_rows))
    cls_var = {v: rvars[k] for v, k in var_class.items()}
    return red, groups, cls_var


def _expand_point(sys: LinearSystemSpec, cls_var: dict, red_point: dict) -> dict:
    return {v: red_point[cls_var[v]] for v in sys.variables}


def _class_sum_system(red: LinearSystemSpec, cls_var: dict) -> LinearSystemSpec:
    """The quotient system rewritten in per-class sum variables.

    Averaging any solution over the symmetry group yields a class-constant
    solution whose common value on a class is the class sum divided by the
    class size. The sums of an integral solution are integers, so whenever
    the original system has an integral solution, this rescaled quotient
    (substitute y = z / size and clear denominators) has one too. Integral
    emptiness here is therefore a proof of integral emptiness of the full
    system -- the complement of the expansion fast path, which only proves
    existence.
    """
    size: dict = {}
    for rv in cls_var.values():
        size[rv] = size.get(rv, 0) + 1
    rows = []
    for row in red.rows:
        scale = lcm(*(size[rv] for rv in row.coeffs)) if row.coeffs else 1
        coeffs = {rv: co * (scale // size[rv]) for rv, co in row.coeffs.items()}
        rows.append(Row(coeffs, row.rel, row.rhs * scale, row.tag))
    return LinearSystemSpec(red.variables, tuple(rows))


def decide_rational(n: int, d, m: int, s: Stratum) -> LpVerdict:
    """Rational slice feasibility through the stabilizer quotient.

    Solves the class-reduced system, then either expands the point or lifts
    the multipliers; both directions are re-verified against the full system.
    """
    sys = build_slice(n, d, m, s)
    classes = pair_symmetry_classes(n, set_stabilizer_generators(s))
    red, groups, cls_var = symmetry_reduce(sys, classes)
    rv = lp_feasible(red)
    if rv.feasible:
        point = _expand_point(sys, cls_var, rv.point)
        if point_violations(sys, point):
            raise AssertionError("expanded symmetric point fails the full system")
        return LpVerdict(True, point, None, rv.rounds, ())
    full = [ZERO] * len(sys.rows)
    for group, y in zip(groups, rv.witness.multipliers):
        share = Fraction(y) / len(group)
        for idx in group:
            full[idx] = share
    wit = FarkasWitness(tuple(full))
    if not verify_farkas(sys, wit):
        raise AssertionError("lifted symmetric witness fails recombination")
    return LpVerdict(False, None, wit, rv.rounds, ())


def _stabilizer_elements(gens, n: int, cap: int = 200_000):
    """Closure of the generated point-permutation group; None past cap."""
    identity = tuple(range(n + 1))
    seen = {identity}
    frontier = [identity]
    while frontier:
        fresh = []
        for p in frontier:
            for g in gens:
                q = tuple(p[g[i]] for i in range(n + 1))
                if q not in seen:
                    if len(seen) >= cap:
                        return None
                    seen.add(q)
                    fresh.append(q)
        frontier = fresh
    return seen


def _pair_index_permutations(n: int, variables, elements):
    """Point permutations as index permutations of the pair variables."""
    pairs = _all_pairs(n)
    if tuple(pair_var(i, j) for i, j in pairs) != tuple(variables):
        raise ValueError("variable order does not match the pair enumeration")
    index = {pair: k for k, pair in enumerate(pairs)}
    out = []
    for p in elements:
        out.append(tuple(index[min(p[i], p[j]), max(p[i], p[j])]
                         for i, j in pairs))
    return out


def _assert_slice_symmetry(n: int, sys: LinearSystemSpec, gens) -> None:
    """Each generator must map the slice's solution set onto itself.

    Row sets are compared literally except for half-size subset rows, which
    the builder stores only for the representative containing point 1; a
    mapped row landing on the other representative is folded back through
    the complement, equivalent here because all degrees are pinned equal.
    """
    base = sorted(row.key() for row in sys.rows)
    for g in gens:
        vmap = {pair_var(i, j): pair_var(g[i], g[j]) for i, j in _all_pairs(n)}
        mapped = []
        for row in sys.rows:
            if row.tag.startswith("subset:"):
                members = [g[int(t)] for t in row.tag[7:].split(",")]
                if 2 * len(members) == n and 1 not in members:
                    members = [i for i in range(1, n + 1) if i not in members]
                coeffs = {pair_var(i, j): ONE
                          for i, j in itertools.combinations(sorted(members), 2)}
                mapped.append((tuple(sorted(coeffs.items())), row.rel, row.rhs))
            else:
                mapped.append(
                    (tuple(sorted((vmap[v], co) for v, co in row.coeffs.items())),
                     row.rel, row.rhs))
        if sorted(mapped) != base:
            raise AssertionError("stabilizer generator does not preserve the slice")


def decide_integral(n: int, d, m: int, s: Stratum, node_budget=None) -> IlpVerdict:
    """Integral slice feasibility: symmetric fast paths, exhaustive fallback.

    A class-constant integral solution proves existence by expansion; an
    integrally empty class-sum quotient proves emptiness by averaging. Only
    the gap between the two -- no class-constant integral point, yet the
    class sums admit one -- falls through to branch-and-bound on the full
    system, which branches on variable orbits under the stabilizer after a
    generator-level check that the slice really is invariant. Node counts
    accumulate across all phases.
    """
    sys = build_slice(n, d, m, s)
    gens = set_stabilizer_generators(s)
    classes = pair_symmetry_classes(n, gens)
    red, groups, cls_var = symmetry_reduce(sys, classes)
    rv = ilp_feasible(red, node_budget=node_budget)
    if rv.feasible:
        point = _expand_point(sys, cls_var, rv.point)
        if point_violations(sys, point):
            raise AssertionError("expanded symmetric point fails the full system")
        return IlpVerdict(True, point, rv.nodes, False)
    zv = ilp_feasible(_class_sum_system(red, cls_var), node_budget=node_budget)
    if not zv.feasible:
        return IlpVerdict(False, None, rv.nodes + zv.nodes, zv.exhausted)
    symmetry = None
    elements = _stabilizer_elements(gens, n)
    if elements is not None:
        _assert_slice_symmetry(n, sys, gens)
        symmetry = _pair_index_permutations(n, sys.variables, elements)
    fv = ilp_feasible(sys, node_budget=node_budget, symmetry=symmetry)
    return IlpVerdict(fv.feasible, fv.point, rv.nodes + zv.nodes + fv.nodes,
                      fv.exhausted)


# --- weightings and certificates -------------------------------------------


@dataclass
class GraphWeighting:
    """Nonnegative rational pair weighting; zero pairs are not stored."""

    n: int
    w: dict

    def __post_init__(self):
        clean = {}
        for key, val in self.w.items():
            i, j = key
            val = Fraction(val)
            if not (1 <= i < j <= self.n):
                raise ValueError(f"bad pair {key!r} for n={self.n}")
            if val != 0:
                clean[(i, j)] = val
        self.w = clean

    def value(self, i: int, j: int) -> Fraction:
        i, j = min(i, j), max(i, j)
        return self.w.get((i, j), ZERO)

    def degree(self, i: int) -> Fraction:
        return sum((self.value(i, j) for j in range(1, self.n + 1) if j != i), ZERO)

    def subset_weight(self, subset) -> Fraction:
        return sum((self.value(i, j) for i, j in itertools.combinations(sorted(subset), 2)), ZERO)

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.w.values())

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.w.values())

    def to_triples(self) -> list:
        return [[str(i), str(j), format_q(v)] for (i, j), v in sorted(self.w.items())]

    @classmethod
    def from_triples(cls, n: int, triples) -> "GraphWeighting":
        w = {}
        for i, j, val in triples:
            i, j = int(i), int(j)
            key = (min(i, j), max(i, j))
            if key in w:
                raise ValueError(f"duplicate pair {key} in weighting")
            w[key] = parse_q(val)
        return cls(n, w)


def weighting_from_point(n: int, point: dict) -> GraphWeighting:
    w = {}
    for (i, j) in _all_pairs(n):
        val = point.get(pair_var(i, j), ZERO)
        if val != 0:
            w[(i, j)] = val
    return GraphWeighting(n, w)


@dataclass
class Certificate:
    """Self-contained record that a weighting solves a slice system."""

    n: int
    m: int
    divisor: SymDivisorCA
    stratum: Stratum
    kind: str  # "integral" | "rational"
    weighting: GraphWeighting

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "m": self.m,
            "divisor": divisor_to_json_dict(self.divisor),
            "T": [list(t) for t in self.stratum.sorted_members()],
            "w": self.weighting.to_triples(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Certificate":
        n = int(obj["n"])
        return cls(
            n=n,
            m=int(obj["m"]),
            divisor=as_ca(divisor_from_json_dict(obj["divisor"])),
            stratum=Stratum(n, frozenset(frozenset(t) for t in obj["T"])),
            kind=str(obj["kind"]),
            weighting=GraphWeighting.from_triples(n, obj["w"]),
        )


def certificate_violations(cert: Certificate) -> list[str]:
    """Independent re-check of a certificate; empty list means valid.

    Enumerates every subset condition directly (including both halves of each
    complementary pair), without reusing the system builder.
    """
    out = []
    n, m, d, w = cert.n, cert.m, cert.divisor, cert.weighting
    if cert.kind not in ("integral", "rational"):
        return [f"unknown kind {cert.kind!r}"]
    if w.n != n or d.n != n or cert.stratum.n != n:
        return ["mismatched n between certificate parts"]
    if not (isinstance(m, int) and m >= 1):
        return [f"bad multiplier {m!r}"]
    if not w.is_nonnegative():
        out.append("negative pair weight")
    if cert.kind == "integral" and not w.is_integral():
        out.append("weighting is not integral")
    deg = m * d.c * (n - 1)
    for i in range(1, n + 1):
        got = w.degree(i)
        if got != deg:
            out.append(f"degree:{i} is {format_q(got)}, expected {format_q(deg)}")
    for size in range(3, n // 2 + 1):
        need = m * d.a_at(size)
        for cmb in itertools.combinations(range(1, n + 1), size):
            if w.subset_weight(cmb) < need:
                out.append(f"subset:{','.join(map(str, cmb))} below {format_q(need)}")
    for t in cert.stratum.sorted_members():
        need = m * d.a_at(len(t))
        got = w.subset_weight(t)
        if got != need:
            out.append(f"stratum:{','.join(map(str, t))} is {format_q(got)}, expected {format_q(need)}")
    return out


def verify_certificate(cert: Certificate) -> bool:
    return not certificate_violations(cert)


def witness_to_json_dict(n: int, m: int, d: SymDivisorCA, s: Stratum, wit: FarkasWitness) -> dict:
    return {
        "kind": "farkas",
        "n": n,
        "m": m,
        "divisor": divisor_to_json_dict(as_ca(d)),
        "T": [list(t) for t in s.sorted_members()],
        "multipliers": [format_q(y) for y in wit.multipliers],
    }


def verify_payload(obj: dict) -> tuple[bool, list[str]]:
    """Re-check any serialized certificate or witness payload."""
    kind = obj.get("kind")
    if kind in ("integral", "rational"):
        cert = Certificate.from_json_dict(obj)
        probs = certificate_violations(cert)
        return (not probs, probs)
    if kind == "farkas":
        n = int(obj["n"])
        d = as_ca(divisor_from_json_dict(obj["divisor"]))
        s = Stratum(n, frozenset(frozenset(t) for t in obj["T"]))
        sys = build_slice(n, d, int(obj["m"]), s)
        wit = FarkasWitness(tuple(parse_q(x) for x in obj["multipliers"]))
        ok = verify_farkas(sys, wit)
        return (ok, [] if ok else ["multipliers fail recombination"])
    return (False, [f"unknown payload kind {kind!r}"])


# --- base locus test --------------------------------------------------------


def stratum_in_base_locus(n: int, d, m: int, s: Stratum, kind: str = "integral",
                          node_budget=None) -> bool:
    """Whether every invariant multigraph section at multiple m meets s.

    True exactly when the slice system for s has no solution of the requested
    kind; integral mode decides by exhaustive search.
    """
    sys = build_slice(n, d, m, s)
    if kind == "rational":
        return not lp_feasible(sys).feasible
    if kind == "integral":
        return not ilp_feasible(sys, node_budget=node_budget).feasible
    raise ValueError(f"unknown kind {kind!r}")
