"""Symmetric divisor classes on the moduli space of stable n-pointed genus-zero
curves, in exact rational arithmetic.

A symmetric divisor class is determined by its coefficients on the symmetrized
boundary classes indexed by part size k = 2 .. floor(n/2) (boundary basis), or
equivalently by a pair (c, a) where c is the coefficient along the pullback of
the symmetric polarization from the unordered point configuration quotient and
a = (a_3, ..., a_{floor(n/2)}) records the twist against each boundary class
(contraction basis). The two bases are related by

    c = b_2,      a_i = c * C(i,2) - b_i,

with the conventions a_1 = a_2 = 0 and b(k) = b(n-k), b(1) = 0.

Nefness is tested against the curve classes swept out by four-part boundary
strata: a partition (p1, p2, p3, p4) of n pairs with a divisor as

    b(p1+p2) + b(p1+p3) + b(p1+p4) - b(p1) - b(p2) - b(p3) - b(p4).

A divisor nonnegative against all of these is called F-nef.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .rational import format_q, format_q_list, parse_q, parse_q_list


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 4:
        raise ValueError(f"need an integer number of marked points n >= 4, got {n!r}")


@dataclass(frozen=True)
class FCurvePartition:
    """Partition of n into four positive parts, stored sorted ascending."""

    n: int
    parts: tuple[int, int, int, int]

    def __post_init__(self):
        _check_n(self.n)
        p = tuple(self.parts)
        if len(p) != 4 or any(not isinstance(x, int) or x < 1 for x in p):
            raise ValueError(f"need four positive integer parts, got {p!r}")
        if sum(p) != self.n:
            raise ValueError(f"parts {p!r} do not sum to n={self.n}")
        if list(p) != sorted(p):
            raise ValueError(f"parts must be sorted ascending, got {p!r}")


@dataclass(frozen=True)
class SymDivisorB:
    """Symmetric divisor in the boundary basis: b = (b_2, ..., b_{floor(n/2)})."""

    n: int
    b: tuple[Fraction, ...]

    def __post_init__(self):
        _check_n(self.n)
        want = self.n // 2 - 1
        if len(self.b) != want:
            raise ValueError(f"n={self.n} needs {want} boundary coefficients, got {len(self.b)}")
        object.__setattr__(self, "b", tuple(Fraction(x) for x in self.b))

    def b_at(self, k: int) -> Fraction:
        """Coefficient on the boundary class of a k-element subset, 1 <= k <= n-1.

        Uses the complement symmetry b(k) = b(n-k); b(1) = 0.
        """
        if not 1 <= k <= self.n - 1:
            raise ValueError(f"subset size {k} out of range for n={self.n}")
        k = min(k, self.n - k)
        if k == 1:
            return Fraction(0)
        return self.b[k - 2]


@dataclass(frozen=True)
class SymDivisorCA:
    """Symmetric divisor in the contraction basis: scale c and twists a_3.. ."""

    n: int
    c: Fraction
    a: tuple[Fraction, ...]

    def __post_init__(self):
        _check_n(self.n)
        want = max(0, self.n // 2 - 2)
        if len(self.a) != want:
            raise ValueError(f"n={self.n} needs {want} twist coefficients, got {len(self.a)}")
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "a", tuple(Fraction(x) for x in self.a))

    def a_at(self, i: int) -> Fraction:
        """Twist coefficient a_i for 1 <= i <= floor(n/2); a_1 = a_2 = 0."""
        if not 1 <= i <= self.n // 2:
            raise ValueError(f"index {i} out of range for n={self.n}")
        if i <= 2:
            return Fraction(0)
        return self.a[i - 3]


def to_ca_basis(d: SymDivisorB) -> SymDivisorCA:
    c = d.b_at(2)
    a = tuple(c * comb(i, 2) - d.b_at(i) for i in range(3, d.n // 2 + 1))
    return SymDivisorCA(d.n, c, a)


def to_b_basis(d: SymDivisorCA) -> SymDivisorB:
    b = tuple(d.c * comb(i, 2) - d.a_at(i) for i in range(2, d.n // 2 + 1))
    return SymDivisorB(d.n, b)


def as_b(d) -> SymDivisorB:
    return d if isinstance(d, SymDivisorB) else to_b_basis(d)


def as_ca(d) -> SymDivisorCA:
    return d if isinstance(d, SymDivisorCA) else to_ca_basis(d)


def enumerate_fcurve_partitions(n: int) -> list[FCurvePartition]:
    """All partitions of n into four positive parts, ascending, lex order."""
    _check_n(n)
    out = []
    for p1 in range(1, n // 4 + 1):
        for p2 in range(p1, (n - p1) // 3 + 1):
            for p3 in range(p2, (n - p1 - p2) // 2 + 1):
                p4 = n - p1 - p2 - p3
                if p4 >= p3:
                    out.append(FCurvePartition(n, (p1, p2, p3, p4)))
    return out


def f_curve_intersection(d: SymDivisorB, p: FCurvePartition) -> Fraction:
    """Pairing of the divisor with the four-part boundary curve class of p."""
    if d.n != p.n:
        raise ValueError(f"divisor has n={d.n}, partition has n={p.n}")
    p1, p2, p3, p4 = p.parts
    pos = d.b_at(p1 + p2) + d.b_at(p1 + p3) + d.b_at(p1 + p4)
    neg = d.b_at(p1) + d.b_at(p2) + d.b_at(p3) + d.b_at(p4)
    return pos - neg


def is_f_nef(d: SymDivisorB) -> bool:
    d = as_b(d)
    return all(f_curve_intersection(d, p) >= 0 for p in enumerate_fcurve_partitions(d.n))


def epsilon(n: int) -> int:
    """Parity factor in the integrality criterion: 1 for even n, 2 for odd."""
    return 1 if n % 2 == 0 else 2


def is_integral(d: SymDivisorCA) -> bool:
    """Whether the class lies in the divisor lattice.

    Holds iff every a_i is an integer and (n-1) c is an integer multiple of
    the parity factor (1 for even n, 2 for odd n).
    """
    d = as_ca(d)
    if any(x.denominator != 1 for x in d.a):
        return False
    return (Fraction(d.n - 1) * d.c / epsilon(d.n)).denominator == 1


def to_fedorchuk_form(d: SymDivisorCA) -> tuple[Fraction, ...]:
    """Concave-weighting presentation (f(1), ..., f(floor(n/2))).

    f(i) = (-c * i * (n-1) + a_i) / 2. A companion edge weighting m assigns
    -w(ij)/2 to each pair; see fedorchuk_edge_weights.
    """
    d = as_ca(d)
    return tuple((-d.c * i * (d.n - 1) + d.a_at(i)) / 2 for i in range(1, d.n // 2 + 1))


def fedorchuk_edge_weights(w: dict) -> dict:
    """Map a pair weighting w to the companion form m(ij) = -w(ij)/2."""
    return {k: -Fraction(v) / 2 for k, v in w.items()}


# --- serialization ---------------------------------------------------------


def divisor_to_text(d) -> str:
    if isinstance(d, SymDivisorCA):
        a = ",".join(format_q_list(d.a))
        return f"n={d.n} basis=ca c={format_q(d.c)} a={a}"
    if isinstance(d, SymDivisorB):
        b = ",".join(format_q_list(d.b))
        return f"n={d.n} basis=b b={b}"
    raise TypeError(f"not a divisor: {d!r}")


def divisor_from_text(text: str):
    fields = {}
    for tok in text.split():
        if "=" not in tok:
            raise ValueError(f"bad token {tok!r} in divisor text")
        k, _, v = tok.partition("=")
        if k in fields:
            raise ValueError(f"duplicate field {k!r} in divisor text")
        fields[k] = v
    try:
        n = int(fields["n"])
        basis = fields["basis"]
    except KeyError as e:
        raise ValueError(f"divisor text missing field {e}") from None

    def vec(s):
        return parse_q_list(s.split(",")) if s else ()

    if basis == "ca":
        return SymDivisorCA(n, parse_q(fields["c"]), vec(fields["a"]))
    if basis == "b":
        return SymDivisorB(n, vec(fields["b"]))
    raise ValueError(f"unknown basis {basis!r}")


def divisor_to_json_dict(d) -> dict:
    if isinstance(d, SymDivisorCA):
        return {"n": d.n, "basis": "ca", "c": format_q(d.c), "a": format_q_list(d.a)}
    if isinstance(d, SymDivisorB):
        return {"n": d.n, "basis": "b", "b": format_q_list(d.b)}
    raise TypeError(f"not a divisor: {d!r}")


def divisor_from_json_dict(obj: dict):
    n = int(obj["n"])
    basis = obj["basis"]
    if basis == "ca":
        return SymDivisorCA(n, parse_q(obj["c"]), parse_q_list(obj["a"]))
    if basis == "b":
        return SymDivisorB(n, parse_q_list(obj["b"]))
    raise ValueError(f"unknown basis {basis!r}")


# --- startup self-test -----------------------------------------------------


def _convexity_functional_check(n: int) -> None:
    # The partitions (1, 1, j, n-2-j) must pair with any divisor as the second
    # difference a_j + a_{j+2} - 2 a_{j+1}, where a is extended past floor(n/2)
    # by a_i = c*C(i,2) - b(n-i). For j + 2 <= floor(n/2) all three terms are
    # plain twist coefficients, so the pairing then vanishes on the
    # polarization pullback b_i = C(i,2).
    sizes = list(range(2, n // 2 + 1))
    pull = SymDivisorB(n, tuple(Fraction(comb(i, 2)) for i in sizes))
    for j in range(1, (n - 2) // 2 + 1):
        p = FCurvePartition(n, tuple(sorted((1, 1, j, n - 2 - j))))
        if j + 2 <= n // 2 and f_curve_intersection(pull, p) != 0:
            raise AssertionError(f"polarization pullback meets curve {p.parts} at n={n}")
        for k in sizes:
            unit = SymDivisorB(n, tuple(Fraction(1 if i == k else 0) for i in sizes))
            lhs = f_curve_intersection(unit, p)

            def a_ext(i, d=unit):
                c = d.b_at(2)
                return c * comb(i, 2) - d.b_at(i) if i >= 1 else Fraction(0)

            rhs = a_ext(j) + a_ext(j + 2) - 2 * a_ext(j + 1)
            if lhs != rhs:
                raise AssertionError(
                    f"four-part pairing disagrees with second difference at n={n}, j={j}, basis b_{k}")


def _run_selftest() -> None:
    for n in range(5, 17):
        _convexity_functional_check(n)


_run_selftest()
