"""p-adic Newton polygons of monic integer polynomials."""
from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .fields import AlgebraError
from .poly import Poly


class NormalizationError(AlgebraError):
    pass


class NewtonPolygonResult(NamedTuple):
    vertices: list
    slope_zero_length: int


def p_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _integer_coeffs(f) -> list:
    coeffs = f.coeffs if isinstance(f, Poly) else tuple(f)
    out = []
    for c in coeffs:
        c = Fraction(c)
        if c.denominator != 1:
            raise NormalizationError("polynomial must have integer coefficients")
        out.append(int(c))
    while out and out[-1] == 0:
        out.pop()
    if not out or out[-1] != 1:
        raise NormalizationError("polynomial must be monic")
    return out


def lower_hull(points):
    """Lower convex hull of points sorted by x (monotone chain)."""
    hull = []
    for pt in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point if it lies on or above the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_unit_root_count(f, p: int) -> NewtonPolygonResult:
    """Newton polygon of f at p; the slope-zero run counts the p-adic unit roots.

    f is a Poly over Q (or a low-to-high coefficient sequence) that must be
    monic with integer coefficients.  Exponents of the points are the indices
    of the coefficients, so roots equal to zero contribute nothing.
    """
    coeffs = _integer_coeffs(f)
    points = [(i, p_valuation(c, p)) for i, c in enumerate(coeffs) if c != 0]
    hull = lower_hull(points)
    run = 0
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if y1 == y2:
            run += x2 - x1
    return NewtonPolygonResult([tuple(v) for v in hull], run)


def slopes(f, p: int) -> list:
    """Slopes of the polygon as (slope, horizontal length) pairs."""
    res = newton_unit_root_count(f, p)
    out = []
    for (x1, y1), (x2, y2) in zip(res.vertices, res.vertices[1:]):
        out.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    return out
