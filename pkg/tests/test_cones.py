"""Cone geometry against hand-derived small cases and brute lattice search.

The n=6 and n=7 facet rows are derived in comments from the pairing
formula; ray and Hilbert-basis answers for those cases follow by elementary
plane geometry. Larger n are covered by the agreement of two unrelated ray
algorithms and by bounded exhaustive lattice checks.
"""

import itertools
from fractions import Fraction
from math import gcd, lcm

import pytest

from fnef.cones import (RationalCone, build_fnef_cone, dd_extremal_rays,
                        extremal_rays, hilbert_basis, normalize_lattice)
from fnef.divisors import (as_b, enumerate_fcurve_partitions,
                           f_curve_intersection, is_f_nef, is_integral)


def test_lattice_map_round_trip():
    for n in range(5, 13):
        lat = normalize_lattice(n)
        d = lat.dim
        assert d == n // 2 - 1
        for i in range(d):
            vec = tuple(Fraction(3 if j == i else 1) for j in range(d))
            div = lat.divisor(vec)
            assert lat.coords(div) == vec
            assert is_integral(div)  # integer coordinates are integral classes


def test_integrality_matches_integer_coordinates():
    lat = normalize_lattice(12)
    assert is_integral(lat.divisor((4, 0, 1, 2, 4)))
    frac = lat.divisor((Fraction(1, 2), 0, 0, 0, 0))
    assert not is_integral(frac)


def test_facets_n6_hand_derivation():
    # pairing with (1,1,1,3): 3*b2 - b3; with (1,1,2,2): 2*b3 - b2.
    # With chat = 5c, b2 = c, b3 = 3c - a3 this reads:
    #   3c - (3c - a3) = a3            -> row (0, 1)
    #   2(3c - a3) - c = chat - 2*a3   -> row (1, -2)
    cone = build_fnef_cone(6)
    assert cone.facets == ((0, 1), (1, -2))


def test_facets_n7_hand_derivation():
    # partitions (1,1,1,4), (1,1,2,3), (1,2,2,2) pair as 3b2-b3, b3, 3(b3-b2);
    # with chat = 3c, b2 = c, b3 = 3c - a3 the primitive rows are
    # (0,1), (1,-1), (2,-3)
    cone = build_fnef_cone(7)
    assert cone.facets == ((0, 1), (1, -1), (2, -3))


def test_rays_small_cases():
    assert extremal_rays(build_fnef_cone(5)) == ((1,),)
    assert extremal_rays(build_fnef_cone(6)) == ((1, 0), (2, 1))
    assert extremal_rays(build_fnef_cone(7)) == ((1, 0), (3, 2))


@pytest.mark.parametrize("n", range(5, 13))
def test_ray_algorithms_agree(n):
    cone = build_fnef_cone(n)
    brute = extremal_rays(cone)
    dd = dd_extremal_rays(cone)
    assert brute == dd
    lat = normalize_lattice(n)
    for r in brute:
        d = lat.divisor(r)
        assert is_f_nef(d)
        assert is_integral(d)
        assert cone.contains(r)


def test_facet_rows_count_n12():
    # 15 four-part partitions of 12, and no two induce proportional rows
    cone = build_fnef_cone(12)
    assert len(cone.facets) == 15


def test_facets_are_exactly_the_partition_rows():
    # recompute every partition row here, with scaling done by plain
    # lcm/gcd arithmetic, and compare the deduplicated sets
    for n in (6, 8, 10, 12):
        cone = build_fnef_cone(n)
        lat = normalize_lattice(n)
        d = lat.dim
        basis = [as_b(lat.divisor(tuple(Fraction(int(j == i)) for j in range(d))))
                 for i in range(d)]
        derived = set()
        for p in enumerate_fcurve_partitions(n):
            row = [f_curve_intersection(b, p) for b in basis]
            mul = lcm(*(x.denominator for x in row))
            ints = [int(x * mul) for x in row]
            g = gcd(*ints)
            assert g > 0  # no partition pairs as the zero functional
            derived.add(tuple(x // g for x in ints))
        assert derived == set(cone.facets)


def test_hilbert_small_cases():
    assert hilbert_basis(build_fnef_cone(6)).elements == ((1, 0), (2, 1))
    assert hilbert_basis(build_fnef_cone(7)).elements == ((1, 0), (2, 1), (3, 2))


def brute_representable(target, gens, depth_cap=24):
    """Exhaustive: is target a nonnegative integer combination of gens?"""
    if all(x == 0 for x in target):
        return True
    if any(x < 0 for x in target):
        return False
    if depth_cap == 0:
        return False
    for i, g in enumerate(gens):
        rest = tuple(t - x for t, x in zip(target, g))
        if brute_representable(rest, gens[i:], depth_cap - 1):
            return True
    return False


@pytest.mark.parametrize("n", [6, 7, 8])
def test_hilbert_basis_generates_bounded_lattice(n):
    cone = build_fnef_cone(n)
    hb = hilbert_basis(cone).elements
    d = cone.dim
    bound = 6
    for vec in itertools.product(range(bound + 1), repeat=d):
        if not cone.contains(vec):
            continue
        assert brute_representable(vec, hb), vec


@pytest.mark.parametrize("n", [6, 7, 8, 9, 10])
def test_hilbert_basis_is_minimal(n):
    hb = hilbert_basis(build_fnef_cone(n)).elements
    for i, v in enumerate(hb):
        others = hb[:i] + hb[i + 1:]
        assert not brute_representable(v, others), v


def test_hilbert_contains_rays_and_integral_classes():
    for n in range(5, 13):
        cone = build_fnef_cone(n)
        rays = extremal_rays(cone)
        hb = hilbert_basis(cone, rays=rays)
        assert set(rays) <= set(hb.elements)
        lat = normalize_lattice(n)
        for v in hb.elements:
            dv = lat.divisor(v)
            assert is_f_nef(dv) and is_integral(dv)


def test_second_difference_convexity_on_generators():
    # pairing with the partitions (1,1,j,n-2-j) is the second difference of
    # the twist coefficients, so cone membership forces convexity of
    # j -> a_j (with a_1 = a_2 = 0) on rays and basis elements alike
    for n in range(5, 13):
        cone = build_fnef_cone(n)
        lat = normalize_lattice(n)
        vecs = set(extremal_rays(cone)) | set(hilbert_basis(cone).elements)
        for v in vecs:
            div = lat.divisor(v)

            def a(i):
                return div.a_at(i) if i >= 1 else Fraction(0)

            for j in range(1, n // 2 - 1):
                assert a(j) + a(j + 2) - 2 * a(j + 1) >= 0


def test_cone_validation():
    with pytest.raises(ValueError):
        RationalCone(2, ((1, 0),))  # rank 1 < 2: not pointed
    with pytest.raises(ValueError):
        RationalCone(2, ((0, 0),))
    with pytest.raises(ValueError):
        normalize_lattice(4)
