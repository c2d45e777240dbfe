"""Dense univariate polynomials over a coefficient ring."""
from __future__ import annotations

from .fields import AlgebraError


class Poly:
    """Immutable polynomial; coefficients are stored low-to-high without trailing zeros."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs=()):
        c = [ring.canonical(x) for x in coeffs]
        while c and ring.is_zero(c[-1]):
            c.pop()
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, *_):
        raise AttributeError("Poly is immutable")

    @classmethod
    def _raw(cls, ring, coeffs):
        obj = object.__new__(cls)
        c = list(coeffs)
        while c and ring.is_zero(c[-1]):
            c.pop()
        object.__setattr__(obj, "ring", ring)
        object.__setattr__(obj, "coeffs", tuple(c))
        return obj

    @classmethod
    def x(cls, ring):
        return cls._raw(ring, [ring.zero, ring.one])

    @classmethod
    def const(cls, ring, c):
        return cls(ring, [c])

    @classmethod
    def monomial(cls, ring, n, c=None):
        c = ring.one if c is None else ring.canonical(c)
        return cls._raw(ring, [ring.zero] * n + [c])

    @classmethod
    def from_roots(cls, ring, roots):
        out = cls._raw(ring, [ring.one])
        for r in roots:
            out = out * cls._raw(ring, [ring.neg(r), ring.one])
        return out

    # basic accessors
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else self.ring.zero

    def __getitem__(self, n):
        if 0 <= n < len(self.coeffs):
            return self.coeffs[n]
        return self.ring.zero

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self == Poly(self.ring, [other])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if self.ring.is_zero(c):
                continue
            terms.append(f"{c}" if i == 0 else f"{c}*x^{i}")
        return " + ".join(reversed(terms))

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        return Poly(self.ring, [other])

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        R = self.ring
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, y in enumerate(b):
            out[i] = R.add(out[i], y)
        return Poly._raw(R, out)

    __radd__ = __add__

    def __neg__(self):
        R = self.ring
        return Poly._raw(R, [R.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        R = self.ring
        if not isinstance(other, Poly):
            c = R.canonical(other)
            return Poly._raw(R, [R.mul(c, x) for x in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw(R, [])
        out = [R.zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if R.is_zero(x):
                continue
            for j, y in enumerate(b):
                out[i + j] = R.add(out[i + j], R.mul(x, y))
        return Poly._raw(R, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise AlgebraError("negative power of a polynomial")
        result = Poly._raw(self.ring, [self.ring.one])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c):
        return self * c

    def shift(self, n: int):
        """Multiply by x^n (n >= 0)."""
        if not self.coeffs:
            return self
        return Poly._raw(self.ring, [self.ring.zero] * n + list(self.coeffs))

    def divmod(self, other):
        R = self.ring
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        inv = R.inv(other.lead)
        rem = list(self.coeffs)
        db = other.degree
        if len(rem) - 1 < db:
            return Poly._raw(R, []), self
        quot = [R.zero] * (len(rem) - db)
        bc = other.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if R.is_zero(c):
                continue
            c = R.mul(c, inv)
            quot[k - db] = c
            for j in range(db + 1):
                rem[k - db + j] = R.sub(rem[k - db + j], R.mul(c, bc[j]))
        return Poly._raw(R, quot), Poly._raw(R, rem[:db])

    def __floordiv__(self, other):
        return self.divmod(self._coerce(other))[0]

    def __mod__(self, other):
        return self.divmod(self._coerce(other))[1]

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise AlgebraError("division is not exact")
        return q

    def monic(self):
        if self.is_zero():
            return self
        return self * self.ring.inv(self.lead)

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other):
        """Return (g, s, t) with s*self + t*other = g monic."""
        R = self.ring
        r0, r1 = self, other
        s0, s1 = Poly._raw(R, [R.one]), Poly._raw(R, [])
        t0, t1 = Poly._raw(R, []), Poly._raw(R, [R.one])
        while not r1.is_zero():
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0.is_zero():
            return r0, s0, t0
        inv = R.inv(r0.lead)
        return r0 * inv, s0 * inv, t0 * inv

    def __call__(self, x):
        R = self.ring
        acc = R.zero
        for c in reversed(self.coeffs):
            acc = R.add(R.mul(acc, x), c)
        return acc

    def compose(self, other):
        acc = Poly._raw(self.ring, [])
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def derivative(self):
        R = self.ring
        return Poly._raw(R, [R.mul(R.from_int(i), c) for i, c in enumerate(self.coeffs)][1:])

    def map_coeffs(self, fn, ring=None):
        ring = ring or self.ring
        return Poly(ring, [fn(c) for c in self.coeffs])

    def valuation_at_zero(self) -> int:
        for i, c in enumerate(self.coeffs):
            if not self.ring.is_zero(c):
                return i
        raise AlgebraError("valuation of the zero polynomial")

    def roots(self):
        """Roots in a finite coefficient field, by exhaustive search."""
        return [a for a in self.ring.elements() if self.ring.is_zero(self(a))]


def poly_from_ints(ring, coeffs) -> Poly:
    return Poly(ring, [ring.from_int(int(c)) for c in coeffs])


def squarefree_decomposition(f: Poly) -> dict:
    """{e: P_e} with f = lead * prod P_e^e, P_e squarefree and coprime (finite fields)."""
    R = f.ring
    p = R.characteristic
    if f.degree < 1:
        return {}
    out = {}
    f = f.monic()
    _yun(f, 1, p, out)
    return out


def _yun(f, mult, p, out):
    R = f.ring
    if f.degree < 1:
        return
    df = f.derivative()
    if df.is_zero():
        # f is a p-th power: take p-th roots of the coefficients
        root = Poly(R, [R.frob(f[i], -1) for i in range(0, f.degree + 1, p)])
        _yun(root, mult * p, p, out)
        return
    c = f.gcd(df).monic()
    w = f.exact_div(c)
    i = 1
    while w.degree >= 1:
        y = w.gcd(c).monic()
        z = w.exact_div(y)
        if z.degree >= 1:
            out[i * mult] = out.get(i * mult, Poly(R, [R.one])) * z
        w = y
        c = c.exact_div(y)
        i += 1
    if c.degree >= 1:
        root = Poly(R, [R.frob(c[j], -1) for j in range(0, c.degree + 1, p)])
        _yun(root, mult * p, p, out)
