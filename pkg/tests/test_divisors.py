import itertools
import random
from fractions import Fraction
from math import comb

import pytest

from fnef.divisors import (FCurvePartition, SymDivisorB, SymDivisorCA, as_b,
                           as_ca, divisor_from_json_dict, divisor_from_text,
                           divisor_to_json_dict, divisor_to_text,
                           enumerate_fcurve_partitions, epsilon,
                           f_curve_intersection, fedorchuk_edge_weights,
                           is_f_nef, is_integral, to_ca_basis, to_b_basis,
                           to_fedorchuk_form)


def rand_b(rng, n):
    return SymDivisorB(n, tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 5))
                                for _ in range(2, n // 2 + 1)))


def test_partition_enumeration_matches_brute_force():
    # partitions of n into exactly four positive parts, counted independently
    for n in range(5, 13):
        brute = {tuple(sorted(p))
                 for p in itertools.combinations_with_replacement(range(1, n), 4)
                 if sum(p) == n}
        got = {p.parts for p in enumerate_fcurve_partitions(n)}
        assert got == brute
        for p in enumerate_fcurve_partitions(n):
            assert p.parts == tuple(sorted(p.parts))


def test_pairing_hand_cases_n6():
    # n=6, divisor with boundary coefficients (b2, b3), b(1)=0, b(4)=b(2):
    #  partition (1,1,1,3): pair sums 2,2,4 -> 3*b2, minus (3*b(1)+b(3))
    #    = 3*b2 - b3
    #  partition (1,1,2,2): pair sums 2,3,3 -> b2+2*b3, minus (2*b(1)+2*b(2))
    #    = 2*b3 - b2
    rng = random.Random(5)
    for _ in range(20):
        d = rand_b(rng, 6)
        b2, b3 = d.b_at(2), d.b_at(3)
        got = {p.parts: f_curve_intersection(d, p)
               for p in enumerate_fcurve_partitions(6)}
        assert got == {(1, 1, 1, 3): 3 * b2 - b3, (1, 1, 2, 2): 2 * b3 - b2}


def test_pairing_linear_in_divisor():
    rng = random.Random(6)
    for n in (7, 9, 12):
        d1, d2 = rand_b(rng, n), rand_b(rng, n)
        lam = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        mix = SymDivisorB(n, tuple(x + lam * y for x, y in zip(d1.b, d2.b)))
        for p in enumerate_fcurve_partitions(n):
            assert (f_curve_intersection(mix, p)
                    == f_curve_intersection(d1, p) + lam * f_curve_intersection(d2, p))


def test_basis_conversion_round_trip():
    rng = random.Random(9)
    for n in range(5, 13):
        for _ in range(10):
            d = rand_b(rng, n)
            back = to_b_basis(to_ca_basis(d))
            assert back.b == d.b
            ca = to_ca_basis(d)
            assert ca.c == d.b_at(2)
            for i in range(3, n // 2 + 1):
                assert ca.a_at(i) == ca.c * comb(i, 2) - d.b_at(i)
            assert ca.a_at(2) == 0


def test_is_f_nef_known_cases():
    assert is_f_nef(SymDivisorB(6, (Fraction(1), Fraction(1))))  # 3-1, 2-1 >= 0
    assert not is_f_nef(SymDivisorB(6, (Fraction(1), Fraction(4))))  # 3-4 < 0
    assert is_f_nef(SymDivisorCA(12, Fraction(4, 11), (0, 1, 2, 4)))


def test_epsilon_parity():
    for n in range(5, 15):
        assert epsilon(n) == (1 if n % 2 == 0 else 2)


def test_integrality_criterion():
    assert is_integral(SymDivisorCA(12, Fraction(4, 11), (0, 1, 2, 4)))
    assert is_integral(SymDivisorCA(12, Fraction(1, 11), (0, 0, 0, 0)))
    assert not is_integral(SymDivisorCA(12, Fraction(1, 2), (0, 0, 0, 0)))
    assert not is_integral(SymDivisorCA(12, Fraction(4, 11), (0, 1, 2, Fraction(9, 2))))
    # odd n: (n-1) c must be an even integer
    assert is_integral(SymDivisorCA(7, Fraction(1, 3), (0,)))
    assert not is_integral(SymDivisorCA(7, Fraction(1, 6), (0,)))


def test_text_and_json_round_trips():
    d = SymDivisorCA(12, Fraction(4, 11), (0, 1, 2, 4))
    assert divisor_from_text(divisor_to_text(d)).c == d.c
    assert as_ca(divisor_from_json_dict(divisor_to_json_dict(d))).a == d.a
    b = SymDivisorB(8, (Fraction(1), Fraction(2), Fraction(5, 3)))
    assert as_b(divisor_from_text(divisor_to_text(b))).b == b.b
    assert as_b(divisor_from_json_dict(divisor_to_json_dict(b))).b == b.b


def test_fedorchuk_form_identity():
    d = SymDivisorCA(10, Fraction(2, 9), (1, 2, 3))
    f = to_fedorchuk_form(d)
    for i in range(1, 6):
        assert f[i - 1] == (-d.c * i * 9 + d.a_at(i)) / 2
    w = {(1, 2): Fraction(3), (2, 5): Fraction(-4, 3)}
    assert fedorchuk_edge_weights(w) == {(1, 2): Fraction(-3, 2),
                                         (2, 5): Fraction(2, 3)}


def test_constructor_validation():
    with pytest.raises(ValueError):
        SymDivisorB(6, (Fraction(1),))  # wrong length
    with pytest.raises(ValueError):
        SymDivisorCA(6, Fraction(1), (0, 0))  # wrong length
    with pytest.raises(ValueError):
        FCurvePartition(8, (1, 1, 2, 3))  # sums to 7
    d = SymDivisorCA(8, Fraction(1), (0, 1))
    with pytest.raises(ValueError):
        d.a_at(5)  # beyond floor(n/2)
