"""Wigner 3j symbols from the Racah single-sum formula in exact arithmetic."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial, isqrt, sqrt


def _doubled(x) -> int:
    two_x = Fraction(x) * 2
    if two_x.denominator != 1:
        raise ValueError(f"{x!r} is not a half-integer")
    return int(two_x)


def _fact_half(x2: int) -> int:
    # factorial of x2/2 for an even, non-negative doubled argument
    return factorial(x2 // 2)


@lru_cache(maxsize=None)
def wigner3j_doubled(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> tuple[int, Fraction]:
    """Return ``(sign, square)`` of the 3j symbol for doubled arguments.

    The symbol equals ``sign * sqrt(square)``; ``sign`` is 0 when a selection
    rule forbids it.
    """
    if m1 + m2 + m3 != 0:
        return 0, Fraction(0)
    if j3 > j1 + j2 or j3 < abs(j1 - j2) or (j1 + j2 + j3) % 2:
        return 0, Fraction(0)
    for j, m in ((j1, m1), (j2, m2), (j3, m3)):
        if j < 0 or abs(m) > j or (j - m) % 2:
            return 0, Fraction(0)
    t1 = (j2 - m1 - j3) // 2
    t2 = (j1 + m2 - j3) // 2
    t3 = (j1 + j2 - j3) // 2
    t4 = (j1 - m1) // 2
    t5 = (j2 + m2) // 2
    total = Fraction(0)
    for t in range(max(0, t1, t2), min(t3, t4, t5) + 1):
        den = (
            factorial(t) * factorial(t - t1) * factorial(t - t2)
            * factorial(t3 - t) * factorial(t4 - t) * factorial(t5 - t)
        )
        total += Fraction((-1) ** t, den)
    if total == 0:
        return 0, Fraction(0)
    triangle = Fraction(
        _fact_half(j1 + j2 - j3) * _fact_half(j1 - j2 + j3) * _fact_half(-j1 + j2 + j3),
        _fact_half(j1 + j2 + j3 + 2),
    )
    moments = (
        _fact_half(j1 + m1) * _fact_half(j1 - m1) * _fact_half(j2 + m2)
        * _fact_half(j2 - m2) * _fact_half(j3 + m3) * _fact_half(j3 - m3)
    )
    phase = -1 if ((j1 - j2 - m3) // 2) % 2 else 1
    sign = phase * (1 if total > 0 else -1)
    return sign, triangle * moments * total * total


def _sqrt_fraction(q: Fraction) -> float:
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return rn / rd
    return sqrt(float(q))


def wigner3j(j1, j2, j3, m1, m2, m3) -> float:
    """The Wigner 3j symbol ``(j1 j2 j3; m1 m2 m3)`` for half-integer arguments."""
    sign, square = wigner3j_doubled(*(_doubled(x) for x in (j1, j2, j3, m1, m2, m3)))
    if sign == 0:
        return 0.0
    return sign * _sqrt_fraction(square)
