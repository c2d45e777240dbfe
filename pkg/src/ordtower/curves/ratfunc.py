"""Rational functions in one variable over a finite field."""
from __future__ import annotations

from ..algebra import Poly, TruncatedLaurentSeries


class RatFunc:
    """num/den with den monic and gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        F = num.ring
        if den is None:
            den = Poly(F, [F.one])
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = Poly(F, []), Poly(F, [F.one])
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num.exact_div(g), den.exact_div(g)
            lead = den.lead
            if not F.eq(lead, F.one):
                inv = F.inv(lead)
                num, den = num.scale(inv), den.scale(inv)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *_):
        raise AttributeError("RatFunc is immutable")

    @property
    def ring(self):
        return self.num.ring

    @classmethod
    def const(cls, F, c):
        return cls(Poly(F, [c]))

    @classmethod
    def x(cls, F):
        return cls(Poly.x(F))

    @classmethod
    def zero(cls, F):
        return cls(Poly(F, []))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den.degree == 0:
            return f"({self.num})"
        return f"({self.num})/({self.den})"

    def _lift(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        return RatFunc.const(self.ring, self.ring.canonical(other))

    def __add__(self, other):
        other = self._lift(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    def scale(self, c):
        return RatFunc(self.num.scale(c), self.den)

    def derivative(self):
        a, b = self.num, self.den
        return RatFunc(a.derivative() * b - a * b.derivative(), b * b)

    def __call__(self, v):
        F = self.ring
        d = self.den(v)
        if F.is_zero(d):
            raise ZeroDivisionError("pole")
        return F.mul(self.num(v), F.inv(d))

    def order_at(self, a) -> int:
        """Valuation at the finite point x = a."""
        return _poly_order(self.num, a) - _poly_order(self.den, a)

    def order_at_infinity(self) -> int:
        return self.den.degree - self.num.degree

    def expand(self, xs: TruncatedLaurentSeries) -> TruncatedLaurentSeries:
        """Substitute a Laurent series for x."""
        if self.den.degree == 0:
            return poly_at_series(self.num, xs)
        return poly_at_series(self.num, xs) / poly_at_series(self.den, xs)

    def map_coeffs(self, fn):
        return RatFunc(self.num.map_coeffs(fn), self.den.map_coeffs(fn))


def _poly_order(f: Poly, a) -> int:
    if f.is_zero():
        raise ValueError("order of zero")
    F = f.ring
    lin = Poly(F, [F.neg(a), F.one])
    n = 0
    while True:
        q, r = f.divmod(lin)
        if not r.is_zero():
            return n
        f = q
        n += 1


def poly_at_series(f: Poly, xs: TruncatedLaurentSeries) -> TruncatedLaurentSeries:
    """f(xs) by Horner's rule; precision follows the series arithmetic."""
    F = f.ring
    if f.is_zero():
        return TruncatedLaurentSeries.zero(F, xs.prec)
    acc = TruncatedLaurentSeries(F, 0, [f.lead], EXACT)
    for c in reversed(f.coeffs[:-1]):
        acc = acc * xs + TruncatedLaurentSeries(F, 0, [c], EXACT)
    return acc


# precision used for series that are exact (polynomials in the uniformizer)
EXACT = 10 ** 9
