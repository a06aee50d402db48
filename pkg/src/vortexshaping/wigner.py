"""Exact Wigner 3-j and 6-j symbols from the Racah formulas.

Quantum numbers may be integers or half-integers. They are passed as
anything :class:`fractions.Fraction` accepts (``2``, ``1.5``, ``"3/2"``).
Results are returned as ``(sign, Fraction)`` pairs internally and as
floats through the public helpers, with the squared value available as an
exact :class:`~fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

__all__ = ["wigner_3j", "wigner_3j_sq", "wigner_6j", "wigner_6j_sq"]


def _frac(x) -> Fraction:
    f = Fraction(x).limit_denominator(2)
    if f.denominator not in (1, 2):
        raise ValueError(f"{x!r} is not an integer or half-integer")
    return f


def _int(x: Fraction) -> int:
    if x.denominator != 1:
        raise ValueError("non-integer combination of angular momenta")
    return x.numerator


def _triangle_ok(a, b, c) -> bool:
    s = a + b + c
    return (
        s.denominator == 1
        and abs(a - b) <= c <= a + b
    )


def _delta_sq(a, b, c) -> Fraction:
    """Squared triangle coefficient Delta(abc)^2."""
    return Fraction(
        factorial(_int(a + b - c)) * factorial(_int(a - b + c)) * factorial(_int(-a + b + c)),
        factorial(_int(a + b + c + 1)),
    )


def _3j_signed(j1, j2, j3, m1, m2, m3):
    j1, j2, j3, m1, m2, m3 = map(_frac, (j1, j2, j3, m1, m2, m3))
    if m1 + m2 + m3 != 0:
        return 0, Fraction(0)
    if not _triangle_ok(j1, j2, j3):
        return 0, Fraction(0)
    for j, m in ((j1, m1), (j2, m2), (j3, m3)):
        if abs(m) > j or (j - m).denominator != 1:
            return 0, Fraction(0)

    pref_sq = _delta_sq(j1, j2, j3)
    for j, m in ((j1, m1), (j2, m2), (j3, m3)):
        pref_sq *= factorial(_int(j + m)) * factorial(_int(j - m))

    kmin = max(0, _int(j2 - j3 - m1), _int(j1 - j3 + m2))
    kmax = min(_int(j1 + j2 - j3), _int(j1 - m1), _int(j2 + m2))
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (
            factorial(k)
            * factorial(_int(j3 - j2 + k + m1))
            * factorial(_int(j3 - j1 + k - m2))
            * factorial(_int(j1 + j2 - j3 - k))
            * factorial(_int(j1 - k - m1))
            * factorial(_int(j2 - k + m2))
        )
        total += Fraction((-1) ** k, den)
    if total == 0:
        return 0, Fraction(0)
    sign = (-1) ** _int(j1 - j2 - m3)
    if total < 0:
        sign, total = -sign, -total
    return sign, total * total * pref_sq


def _6j_signed(j1, j2, j3, j4, j5, j6):
    j1, j2, j3, j4, j5, j6 = map(_frac, (j1, j2, j3, j4, j5, j6))
    triads = ((j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3))
    if not all(_triangle_ok(*t) for t in triads):
        return 0, Fraction(0)
    pref_sq = Fraction(1)
    for t in triads:
        pref_sq *= _delta_sq(*t)

    a = [_int(sum(t)) for t in triads]
    b = [_int(j1 + j2 + j4 + j5), _int(j2 + j3 + j5 + j6), _int(j3 + j1 + j6 + j4)]
    total = Fraction(0)
    for t in range(max(a), min(b) + 1):
        den = factorial(t - a[0]) * factorial(t - a[1]) * factorial(t - a[2]) * factorial(t - a[3])
        den *= factorial(b[0] - t) * factorial(b[1] - t) * factorial(b[2] - t)
        total += Fraction((-1) ** t * factorial(t + 1), den)
    if total == 0:
        return 0, Fraction(0)
    sign = 1
    if total < 0:
        sign, total = -1, -total
    return sign, total * total * pref_sq


def wigner_3j_sq(j1, j2, j3, m1, m2, m3) -> Fraction:
    """Exact square of the 3-j symbol (j1 j2 j3; m1 m2 m3)."""
    return _3j_signed(j1, j2, j3, m1, m2, m3)[1]


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    sign, sq = _3j_signed(j1, j2, j3, m1, m2, m3)
    return sign * float(sq) ** 0.5


def wigner_6j_sq(j1, j2, j3, j4, j5, j6) -> Fraction:
    """Exact square of the 6-j symbol {j1 j2 j3; j4 j5 j6}."""
    return _6j_signed(j1, j2, j3, j4, j5, j6)[1]


def wigner_6j(j1, j2, j3, j4, j5, j6) -> float:
    sign, sq = _6j_signed(j1, j2, j3, j4, j5, j6)
    return sign * float(sq) ** 0.5
