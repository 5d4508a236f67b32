"""Exact rational parsing and formatting helpers.

All numeric data in this package is carried as `fractions.Fraction`; on-disk
formats carry rationals as strings ("4/11", "0", "-3/2") so that round-trips
are bit-exact and no float ever enters the pipeline.
"""

from __future__ import annotations

from fractions import Fraction


def parse_q(text: str) -> Fraction:
    """Parse "p/q" or "p" into a Fraction. Rejects floats and empty input."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational literal")
    if any(ch in s for ch in ".eE") and not s.lstrip("+-").isdigit():
        raise ValueError(f"rational literal must be integer or p/q, got {text!r}")
    return Fraction(s)


def format_q(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_q_list(items) -> tuple[Fraction, ...]:
    return tuple(parse_q(t) for t in items)


def format_q_list(xs) -> list[str]:
    return [format_q(x) for x in xs]
