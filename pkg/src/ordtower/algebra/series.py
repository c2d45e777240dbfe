"""Truncated Laurent series sum_{n >= low} a_n t^n + O(t^prec)."""
from __future__ import annotations

from .fields import AlgebraError, NotInvertibleError


class PrecisionError(AlgebraError):
    pass


class TruncatedLaurentSeries:
    __slots__ = ("ring", "low", "coeffs", "prec")

    def __init__(self, ring, low: int, coeffs, prec: int):
        coeffs = [ring.canonical(c) for c in coeffs]
        coeffs = coeffs[: max(prec - low, 0)]
        # strip leading zeros so that low is the valuation when nonzero
        k = 0
        while k < len(coeffs) and ring.is_zero(coeffs[k]):
            k += 1
        coeffs = coeffs[k:]
        low += k
        while coeffs and ring.is_zero(coeffs[-1]):
            coeffs.pop()
        if not coeffs:
            low = prec
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, *_):
        raise AttributeError("series are immutable")

    @classmethod
    def from_poly(cls, poly, prec: int, shift: int = 0):
        return cls(poly.ring, shift, poly.coeffs, prec)

    @classmethod
    def zero(cls, ring, prec: int):
        return cls(ring, prec, [], prec)

    @classmethod
    def one(cls, ring, prec: int):
        return cls(ring, 0, [ring.one], prec)

    @classmethod
    def monomial(cls, ring, n: int, prec: int, c=None):
        return cls(ring, n, [ring.one if c is None else c], prec)

    # access
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> int:
        """Lowest exponent with a nonzero coefficient (prec if zero to precision)."""
        return self.low

    def __getitem__(self, n: int):
        if n >= self.prec:
            raise PrecisionError(f"coefficient of t^{n} is beyond precision {self.prec}")
        i = n - self.low
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.ring.zero

    def items(self):
        for i, c in enumerate(self.coeffs):
            if not self.ring.is_zero(c):
                yield self.low + i, c

    def __repr__(self):
        terms = [f"{c}*t^{n}" for n, c in self.items()]
        return (" + ".join(terms) or "0") + f" + O(t^{self.prec})"

    def __eq__(self, other):
        """Equality up to the common precision."""
        if not isinstance(other, TruncatedLaurentSeries):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.low, self.coeffs, self.prec))

    def truncate(self, prec: int):
        return TruncatedLaurentSeries(self.ring, self.low, self.coeffs, min(prec, self.prec))

    # arithmetic
    def __add__(self, other):
        R = self.ring
        if not isinstance(other, TruncatedLaurentSeries):
            other = TruncatedLaurentSeries(R, 0, [other], self.prec)
        prec = min(self.prec, other.prec)
        low = min(self.low, other.low)
        top = max(self.low + len(self.coeffs), other.low + len(other.coeffs))
        out = [R.zero] * max(min(prec, top) - low, 0)
        for n, c in self.items():
            if n - low < len(out):
                out[n - low] = R.add(out[n - low], c)
        for n, c in other.items():
            if n - low < len(out):
                out[n - low] = R.add(out[n - low], c)
        return TruncatedLaurentSeries(R, low, out, prec)

    __radd__ = __add__

    def __neg__(self):
        R = self.ring
        return TruncatedLaurentSeries(R, self.low, [R.neg(c) for c in self.coeffs], self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        R = self.ring
        return TruncatedLaurentSeries(R, self.low, [R.mul(c, x) for x in self.coeffs], self.prec)

    def shift(self, n: int):
        """Multiply by t^n."""
        return TruncatedLaurentSeries(self.ring, self.low + n, self.coeffs, self.prec + n)

    def __mul__(self, other):
        R = self.ring
        if not isinstance(other, TruncatedLaurentSeries):
            return self.scale(R.canonical(other))
        va, vb = self.low, other.low
        prec = min(va + other.prec, vb + self.prec)
        if self.is_zero() or other.is_zero():
            return TruncatedLaurentSeries.zero(R, prec)
        low = va + vb
        n_out = min(prec - low, len(self.coeffs) + len(other.coeffs) - 1)
        out = [R.zero] * max(n_out, 0)
        a, b = self.coeffs, other.coeffs
        for i, x in enumerate(a):
            if i >= n_out:
                break
            if R.is_zero(x):
                continue
            for j in range(min(len(b), n_out - i)):
                y = b[j]
                if not R.is_zero(y):
                    out[i + j] = R.add(out[i + j], R.mul(x, y))
        return TruncatedLaurentSeries(R, low, out, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        result = TruncatedLaurentSeries.one(self.ring, self.prec - self.low)
        for _ in range(n):
            result = result * self
        return result

    def invert(self):
        R = self.ring
        if self.is_zero():
            raise NotInvertibleError("series is zero to the tracked precision")
        lead = self.coeffs[0]
        if not R.is_unit(lead):
            raise NotInvertibleError("leading coefficient is not a unit")
        v = self.low
        rel = self.prec - v
        if rel > 10 ** 6:
            raise PrecisionError("truncate an exact series before inverting it")
        inv0 = R.inv(lead)
        a = list(self.coeffs) + [R.zero] * max(rel - len(self.coeffs), 0)
        b = [R.zero] * rel
        b[0] = inv0
        for n in range(1, rel):
            acc = R.zero
            for k in range(1, n + 1):
                if not R.is_zero(a[k]):
                    acc = R.add(acc, R.mul(a[k], b[n - k]))
            b[n] = R.neg(R.mul(acc, inv0))
        return TruncatedLaurentSeries(R, -v, b, -v + rel)

    def __truediv__(self, other):
        if not isinstance(other, TruncatedLaurentSeries):
            return self.scale(self.ring.inv(self.ring.canonical(other)))
        return self * other.invert()

    def pth_root_coeffs(self):
        """Apply the inverse Frobenius to every coefficient (exponents unchanged)."""
        R = self.ring
        if not hasattr(R, "frob"):
            raise AlgebraError(f"p-th roots are not available over {R}")
        return TruncatedLaurentSeries(R, self.low, [R.frob(c, -1) for c in self.coeffs], self.prec)

    def map_coeffs(self, fn):
        return TruncatedLaurentSeries(self.ring, self.low, [fn(c) for c in self.coeffs], self.prec)

    def derivative(self):
        R = self.ring
        return TruncatedLaurentSeries(
            R, self.low - 1, [R.mul(R.from_int(self.low + i), c) for i, c in enumerate(self.coeffs)],
            self.prec - 1)

    def substitute(self, g):
        """self(g(t)); g must have positive valuation (or, for Laurent self, be invertible)."""
        R = self.ring
        if g.is_zero() or g.low < 1:
            raise AlgebraError("substitution needs a series of positive valuation")
        w = g.low
        prec = self.prec * w
        for n, _ in self.items():
            if n != 0:
                prec = min(prec, (n - 1) * w + g.prec)
        result = TruncatedLaurentSeries.zero(R, prec)
        if self.is_zero():
            return result
        pos = [TruncatedLaurentSeries.one(R, prec)]
        neg = [pos[0]]
        gi = None
        for n, c in self.items():
            if n >= 0:
                while len(pos) <= n:
                    pos.append((pos[-1] * g).truncate(prec))
                term = pos[n]
            else:
                if gi is None:
                    gi = g.invert()
                while len(neg) <= -n:
                    neg.append((neg[-1] * gi).truncate(prec))
                term = neg[-n]
            result = result + term.scale(c).truncate(prec)
        return result.truncate(prec)
