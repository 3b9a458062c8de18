"""Closed-form cubic roots with a Newton polish.

Trigonometric form when all three roots are real, Cardano otherwise.
Small and dependency-free on purpose: the stability analysis uses it on
the reduced real cubic, and the test suite uses it as an oracle against
iterative root finders.
"""

from __future__ import annotations

import cmath
import math


def _polish(a: float, b: float, c: float, d: float, x: complex) -> complex:
    # one Newton step; near-critical points are left alone
    f = ((a * x + b) * x + c) * x + d
    df = (3.0 * a * x + 2.0 * b) * x + c
    if abs(df) > 1e-30:
        y = x - f / df
        fy = ((a * y + b) * y + c) * y + d
        if abs(fy) <= abs(f):
            return y
    return x


def roots(a: float, b: float, c: float, d: float) -> list[complex]:
    """All three roots of a*x^3 + b*x^2 + c*x + d, a != 0."""
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    b, c, d = b / a, c / a, d / a
    # depressed form t^3 + p*t + q with x = t - b/3
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3

    if disc < 0:
        # three distinct real roots
        m = 2.0 * math.sqrt(-p / 3.0)
        theta = math.acos(max(-1.0, min(1.0, 3.0 * q / (p * m)))) / 3.0
        ts = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
        out = [complex(t - shift, 0.0) for t in ts]
    else:
        sq = cmath.sqrt(complex(disc))
        u3 = -q / 2.0 + sq
        if abs(u3) < 1e-300:
            u3 = -q / 2.0 - sq
        u = u3 ** (1.0 / 3.0)
        if abs(u) < 1e-300:
            out = [complex(-shift, 0.0)] * 3
        else:
            v = -p / (3.0 * u)
            w = complex(-0.5, 0.5 * math.sqrt(3.0))
            out = [u + v - shift, u * w + v / w - shift,
                   u * w ** 2 + v / w ** 2 - shift]
    polished = [_polish(1.0, b, c, d, x) for x in out]
    # roots of a real cubic with tiny imaginary part are real
    cleaned = []
    for x in polished:
        if abs(x.imag) < 1e-9 * max(1.0, abs(x)):
            x = complex(x.real, 0.0)
        cleaned.append(x)
    return sorted(cleaned, key=lambda z: (z.real, z.imag))


def real_roots(a: float, b: float, c: float, d: float) -> list[float]:
    return [x.real for x in roots(a, b, c, d) if x.imag == 0.0]
