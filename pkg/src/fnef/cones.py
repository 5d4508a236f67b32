"""Symmetric nef-cone geometry in exact rational arithmetic.

The symmetric divisor classes on the n-marked moduli space form a vector
space of dimension floor(n/2) - 1. This module fixes integer lattice
coordinates on that space, cuts out the cone of classes pairing
nonnegatively with every four-part partition curve, and computes its
extremal rays and the Hilbert basis of its lattice points.

Everything is exact. Rays are found twice, by two unrelated algorithms
(facet-subset kernels and incremental double description), so each run of
one can be checked against the other. Hilbert-basis minimality is decided
by integer programming on the candidate generators themselves.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb, gcd

from . import simplex
from .divisors import (SymDivisorCA, as_b, enumerate_fcurve_partitions,
                       epsilon, f_curve_intersection, is_f_nef, is_integral)
from .feasibility import BudgetExceeded, LinearSystemSpec, Row, ilp_feasible
from .linalg import (hnf_rows, invert, mat_vec, nullspace,
                     primitive_integer_vector, rank, solve)

ZERO = Fraction(0)
ONE = Fraction(1)


# --- lattice coordinates ----------------------------------------------------


@dataclass(frozen=True)
class LatticeMap:
    """Integer coordinates on the symmetric divisor classes.

    The coordinate vector of a class with contraction data (c, a) is
    (c*(n-1)/eps, a_3, ..., a_{floor(n/2)}) where eps is the parity factor
    of n. A class is an integral divisor class exactly when its coordinate
    vector is an integer vector, so lattice questions about classes become
    lattice questions about plain integer tuples.
    """

    n: int

    def __post_init__(self):
        if self.n < 5:
            raise ValueError(f"need n >= 5, got {self.n}")

    @property
    def dim(self) -> int:
        return self.n // 2 - 1

    def coordinate_names(self) -> tuple:
        return ("chat",) + tuple(f"a{i}" for i in range(3, self.n // 2 + 1))

    def coords(self, d: SymDivisorCA) -> tuple:
        if d.n != self.n:
            raise ValueError(f"divisor has n={d.n}, lattice has n={self.n}")
        head = Fraction(self.n - 1) * d.c / epsilon(self.n)
        return (head,) + tuple(d.a_at(i) for i in range(3, self.n // 2 + 1))

    def divisor(self, vec) -> SymDivisorCA:
        vec = tuple(Fraction(x) for x in vec)
        if len(vec) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(vec)}")
        c = vec[0] * epsilon(self.n) / (self.n - 1)
        return SymDivisorCA(self.n, c, vec[1:])


def normalize_lattice(n: int) -> LatticeMap:
    """The coordinate system used by every cone computation at this n."""
    return LatticeMap(n)


# --- the cone ---------------------------------------------------------------


@dataclass(frozen=True)
class RationalCone:
    """A pointed, full-dimensional cone given by integer facet inequalities.

    Rows need not be irredundant, but their rank must equal the ambient
    dimension (pointedness) and the region they cut out must have a point
    satisfying all of them strictly (full dimension). ``build_fnef_cone``
    certifies both before handing a cone out.
    """

    dim: int
    facets: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"need dim >= 1, got {self.dim}")
        for f in self.facets:
            if len(f) != self.dim:
                raise ValueError(f"facet {f} has wrong length for dim {self.dim}")
            if not any(f):
                raise ValueError("zero facet row")
        if rank([list(f) for f in self.facets], self.dim) != self.dim:
            raise ValueError("facet rows do not have full rank; cone not pointed")

    def contains(self, vec) -> bool:
        vec = tuple(Fraction(x) for x in vec)
        return all(_dot(f, vec) >= 0 for f in self.facets)

    def tight_facets(self, vec):
        vec = tuple(Fraction(x) for x in vec)
        return tuple(f for f in self.facets if _dot(f, vec) == 0)


def _dot(f, vec) -> Fraction:
    return sum((co * x for co, x in zip(f, vec)), ZERO)


def build_fnef_cone(n: int) -> RationalCone:
    """The cone of symmetric classes pairing >= 0 with every partition curve.

    One inequality per four-part partition of n, obtained by evaluating the
    curve pairing on the lattice basis classes and scaling each row to a
    primitive integer vector. Duplicate rows (distinct partitions can induce
    proportional pairings) are removed. Pointedness and full dimension are
    certified exactly before returning.
    """
    lat = normalize_lattice(n)
    d = lat.dim
    basis = [as_b(lat.divisor(tuple(ONE if j == i else ZERO for j in range(d))))
             for i in range(d)]
    seen = set()
    facets = []
    for p in enumerate_fcurve_partitions(n):
        row = primitive_integer_vector(
            tuple(f_curve_intersection(b, p) for b in basis))
        if row not in seen:
            seen.add(row)
            facets.append(row)
    cone = RationalCone(d, tuple(sorted(facets)))
    # full dimension: exhibit a point with unit slack on every row
    rows = [(dict(enumerate(Fraction(co) for co in f)), "ge", ONE)
            for f in cone.facets]
    status, point = simplex.solve_phase1(d, rows, set())
    if status != "feasible":
        raise AssertionError(f"no strictly interior class at n={n}")
    if any(_dot(f, [point[i] for i in range(d)]) < 1 for f in cone.facets):
        raise AssertionError(f"interior witness fails a facet at n={n}")
    return cone


# --- extremal rays ----------------------------------------------------------


def _is_extremal(cone: RationalCone, v) -> bool:
    tight = cone.tight_facets(v)
    if cone.dim == 1:
        return True
    return rank([list(f) for f in tight], cone.dim) == cone.dim - 1


def extremal_rays(cone: RationalCone) -> tuple:
    """All extremal rays, as primitive integer vectors, sorted.

    Brute force over facet subsets: every extremal ray is the kernel of
    some rank-(dim-1) subset of dim-1 facet rows, oriented into the cone.
    Candidates whose full tight set has the wrong rank are discarded, so
    the result is exactly the set of extremal rays.
    """
    d = cone.dim
    if d == 1:
        v = (1,)
        return (v,) if cone.contains(v) else ((-1,),)
    found = set()
    for sub in combinations(cone.facets, d - 1):
        rows = [list(f) for f in sub]
        if rank(rows, d) != d - 1:
            continue
        kern = nullspace(rows, d)
        if len(kern) != 1:
            continue
        v = primitive_integer_vector(kern[0])
        if cone.contains(v):
            pass
        elif cone.contains(tuple(-x for x in v)):
            v = tuple(-x for x in v)
        else:
            continue
        if _is_extremal(cone, v):
            found.add(v)
    if not found:
        raise AssertionError("pointed full-dimensional cone with no extremal rays")
    return tuple(sorted(found))


def dd_extremal_rays(cone: RationalCone) -> tuple:
    """Extremal rays by incremental double description; independent of
    ``extremal_rays`` and used to cross-check it.

    Start from dim independent rows (their kernel cone is spanned by the
    columns of the inverse matrix), then insert the remaining rows one at a
    time, keeping the extremal rays of each intermediate cone: rays on the
    good side survive, and each adjacent (positive, negative) pair combines
    into a ray on the new row's boundary.
    """
    d = cone.dim
    base = []
    rest = []
    for f in cone.facets:
        if len(base) < d and rank([list(g) for g in base + [f]], d) > len(base):
            base.append(f)
        else:
            rest.append(f)
    if len(base) < d:
        raise AssertionError("facet rows lost rank")
    inv = invert([list(f) for f in base])
    rays = []
    for j in range(d):
        col = tuple(inv[i][j] for i in range(d))
        rays.append(primitive_integer_vector(col))
    done = list(base)

    def tight_rows(v):
        return [list(g) for g in done if _dot(g, v) == 0]

    for f in rest:
        signs = [(_dot(f, r), r) for r in rays]
        neg = [(s, r) for s, r in signs if s < 0]
        if not neg:
            done.append(f)
            continue
        pos = [(s, r) for s, r in signs if s > 0]
        keep = [r for s, r in signs if s >= 0]
        for (sp, rp), (sn, rn) in product(pos, neg):
            common = [row for row in tight_rows(rp) if _dot(row, rn) == 0]
            if d >= 2 and rank(common, d) != d - 2:
                continue
            w = tuple(sp * x - sn * y for x, y in
                      zip(rn, rp))  # on f's boundary, inside the old cone
            keep.append(primitive_integer_vector(w))
        done.append(f)
        sub = RationalCone(d, tuple(done))
        rays = [r for r in dict.fromkeys(keep) if _is_extremal(sub, r)]
    out = set()
    for r in rays:
        if not cone.contains(r):
            raise AssertionError(f"double description produced outside ray {r}")
        if _is_extremal(cone, r):
            out.add(r)
    return tuple(sorted(out))


# --- Hilbert basis ----------------------------------------------------------


@dataclass(frozen=True)
class HilbertBasis:
    """The irreducible lattice points of a pointed cone, sorted."""

    dim: int
    elements: tuple


def _positive_functional(cone: RationalCone):
    """A linear functional with positive integer values on cone lattice
    points other than zero: the sum of all facet rows (pointedness makes
    the common kernel of the rows trivial)."""
    return tuple(sum(f[i] for f in cone.facets) for i in range(cone.dim))


def _box_points(vecs, d):
    """Lattice points of the half-open parallelepiped spanned by ``vecs``.

    The column lattice of the generator matrix is put in triangular form;
    one representative per residue class, folded into the parallelepiped by
    subtracting the integer parts of its generator coordinates.
    """
    grows = [[Fraction(v[i]) for v in vecs] for i in range(d)]
    tri = hnf_rows([list(v) for v in vecs])
    diag = [tri[i][i] for i in range(d)]
    pts = []
    for z in product(*(range(x) for x in diag)):
        t = solve(grows, [Fraction(x) for x in z])
        fl = [x.numerator // x.denominator for x in t]
        if all(x == f for x, f in zip(t, fl)):
            continue  # the representative lies in the generator lattice
        w = tuple(z[i] - sum(vecs[j][i] * fl[j] for j in range(d))
                  for i in range(d))
        pts.append(w)
    return pts


def _volume(vecs, d) -> int:
    tri = hnf_rows([list(v) for v in vecs])
    vol = 1
    for i in range(d):
        vol *= tri[i][i]
    return vol


def _member_system(target, gens, phi):
    """Integer-program spec: is ``target`` a nonnegative integer combination
    of ``gens``? Bounded via the positive functional ``phi``."""
    pt = _dot(phi, target)
    rows = []
    seen = set()
    for i in range(len(target)):
        coeffs = {f"l{j}": Fraction(g[i]) for j, g in enumerate(gens) if g[i]}
        rhs = Fraction(target[i])
        key = (tuple(sorted(coeffs.items())), rhs)
        if key in seen:
            continue
        seen.add(key)
        if not coeffs:
            if rhs != 0:
                return None
            continue
        rows.append(Row(coeffs, "eq", rhs, f"coord:{i}"))
    for j, g in enumerate(gens):
        rows.append(Row({f"l{j}": ONE}, "ge", ZERO, f"nonneg:{j}"))
        cap = _floor_div(pt, _dot(phi, g))
        rows.append(Row({f"l{j}": -ONE}, "ge", Fraction(-cap), f"cap:{j}"))
    return LinearSystemSpec(tuple(f"l{j}" for j in range(len(gens))), tuple(rows))


def _floor_div(a: Fraction, b: Fraction) -> int:
    q = a / b
    return q.numerator // q.denominator


def in_monoid(target, gens, phi) -> bool:
    """Exact membership of ``target`` in the monoid generated by ``gens``."""
    sys = _member_system(target, gens, phi)
    if sys is None:
        return False
    return ilp_feasible(sys, node_budget=200_000).feasible


def hilbert_basis(cone: RationalCone, rays=None, max_volume: int = 500_000,
                  max_subsets: int = 50_000) -> HilbertBasis:
    """Hilbert basis of the cone's lattice points.

    Generation: every lattice point of the cone is a nonnegative rational
    combination of at most dim linearly independent extremal rays, hence a
    nonnegative *integer* combination of those rays and a lattice point of
    their half-open parallelepiped. Collecting the parallelepiped points of
    every independent ray subset of size dim therefore yields a generating
    set; no triangulation choice is needed.

    Minimization: candidates are processed in increasing order of a
    functional that is positive on all of them; each is kept exactly when
    it is not an integer combination of the already-kept elements, decided
    by an exact integer program. Any representation only involves elements
    of strictly smaller functional value, so one pass suffices and the
    kept set is exactly the irreducible elements.
    """
    d = cone.dim
    if rays is None:
        rays = extremal_rays(cone)
    phi = _positive_functional(cone)
    for r in rays:
        if _dot(phi, r) <= 0:
            raise AssertionError(f"functional not positive on ray {r}")
    cands = set(rays)
    subs = [s for s in combinations(rays, d)
            if rank([list(v) for v in s], d) == d]
    if len(subs) > max_subsets:
        raise BudgetExceeded(f"{len(subs)} ray subsets exceed cap {max_subsets}")
    total = 0
    for s in subs:
        total += _volume(s, d)
        if total > max_volume:
            raise BudgetExceeded(
                f"parallelepiped volume {total} exceeds cap {max_volume}")
        for w in _box_points(s, d):
            if not cone.contains(w):
                raise AssertionError(f"parallelepiped point {w} left the cone")
            cands.add(w)
    ordered = sorted(cands, key=lambda v: (_dot(phi, v), v))
    kept = []
    for v in ordered:
        if kept and in_monoid(v, kept, phi):
            continue
        kept.append(v)
    return HilbertBasis(d, tuple(sorted(kept)))


# --- reports ----------------------------------------------------------------


def cone_to_json_dict(n: int, include_rays: bool = True) -> dict:
    lat = normalize_lattice(n)
    cone = build_fnef_cone(n)
    out = {
        "n": n,
        "epsilon": epsilon(n),
        "dim": cone.dim,
        "coordinates": list(lat.coordinate_names()),
        "facets": [list(f) for f in cone.facets],
    }
    if include_rays:
        out["rays"] = [list(r) for r in extremal_rays(cone)]
    return out


def hilbert_to_json_dict(n: int, basis: HilbertBasis) -> dict:
    lat = normalize_lattice(n)
    if basis.dim != lat.dim:
        raise ValueError("basis dimension does not match n")
    return {
        "n": n,
        "epsilon": epsilon(n),
        "dim": basis.dim,
        "coordinates": list(lat.coordinate_names()),
        "elements": [list(v) for v in basis.elements],
    }


def ray_divisors(n: int) -> list:
    """Extremal-ray generators as divisor classes; each is checked to be an
    integral class pairing nonnegatively with every partition curve."""
    lat = normalize_lattice(n)
    cone = build_fnef_cone(n)
    out = []
    for r in extremal_rays(cone):
        d = lat.divisor(r)
        if not is_f_nef(d) or not is_integral(d):
            raise AssertionError(f"ray {r} fails the divisor-side checks")
        out.append(d)
    return out


def basis_divisors(n: int, **limits) -> list:
    """Hilbert-basis elements as divisor classes, same checks as rays."""
    lat = normalize_lattice(n)
    cone = build_fnef_cone(n)
    out = []
    for v in hilbert_basis(cone, **limits).elements:
        d = lat.divisor(v)
        if not is_f_nef(d) or not is_integral(d):
            raise AssertionError(f"basis element {v} fails the divisor-side checks")
        out.append(d)
    return out


# --- startup self-test ------------------------------------------------------


def _run_selftest() -> None:
    c5 = build_fnef_cone(5)
    if extremal_rays(c5) != ((1,),):
        raise AssertionError("n=5 must have the single ray (1,)")
    c6 = build_fnef_cone(6)
    if extremal_rays(c6) != ((1, 0), (2, 1)):
        raise AssertionError("n=6 rays are (1,0) and (2,1)")
    if dd_extremal_rays(c6) != extremal_rays(c6):
        raise AssertionError("ray enumerations disagree at n=6")
    lat = normalize_lattice(6)
    for r in extremal_rays(c6):
        d = lat.divisor(r)
        if not is_f_nef(d) or not is_integral(d):
            raise AssertionError("n=6 ray fails divisor-side checks")
        if lat.coords(d) != tuple(Fraction(x) for x in r):
            raise AssertionError("lattice map fails to round-trip")


_run_selftest()
