"""Smooth curves over F_q: the projective line, elliptic curves and Artin-Schreier covers.

Function-field elements are tuples of rational functions in x: a single one
on the line, (g0, g1) meaning g0 + g1*eta on an elliptic curve written as
eta^2 = F(x), and (g_0, ..., g_{p-1}) meaning sum g_j y^j on y^p - y = f(x).
A meromorphic differential is such an element times dx.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from ..algebra import (AlgebraError, ExactMatrix, FiniteField, Poly, TruncatedLaurentSeries as TLS,
                       mat_rank_kernel_image)
from .local import LocalExpansionError, reversion, series_root
from .ratfunc import RatFunc


class UnsupportedCurveError(AlgebraError):
    pass


class DivisorError(AlgebraError):
    pass


@dataclass(frozen=True)
class Place:
    """A rational place.  kind is 'finite', 'infinity' or 'fiber' (a whole fiber over x)."""
    kind: str
    x: object = None
    branch: object = None
    ramified: bool = False

    def __repr__(self):
        base = "oo" if self.x is None else f"x={self.x}"
        if self.kind == "fiber":
            return f"Fiber({base})"
        tail = ", ram" if self.ramified else ("" if self.branch is None else f", y={self.branch}")
        return f"Place({base}{tail})"

    @property
    def is_infinite(self) -> bool:
        return self.x is None


INF = Place("infinity")


def fiber(x=None) -> Place:
    return Place("fiber", x)


@dataclass(frozen=True)
class DivisorData:
    entries: tuple = ()

    @classmethod
    def of(cls, *pairs):
        acc = {}
        for place, mult in pairs:
            acc[place] = acc.get(place, 0) + mult
        return cls(tuple((pl, m) for pl, m in acc.items() if m))

    def mult(self, place) -> int:
        return sum(m for pl, m in self.entries if pl == place)

    def is_effective(self) -> bool:
        return all(m >= 0 for _, m in self.entries)

    def scale(self, n: int) -> "DivisorData":
        return DivisorData(tuple((pl, n * m) for pl, m in self.entries))

    def places(self):
        return [pl for pl, _ in self.entries]

    def reduced(self) -> "DivisorData":
        return DivisorData(tuple((pl, 1) for pl, m in self.entries if m > 0))


class MeroDifferential:
    """(sum_j coeffs[j] * b_j) dx for the curve's function-field basis b_j."""

    __slots__ = ("curve", "coeffs")

    def __init__(self, curve, coeffs):
        coeffs = tuple(c if isinstance(c, RatFunc) else RatFunc.const(curve.F, c) for c in coeffs)
        if len(coeffs) != curve.rank:
            raise AlgebraError(f"expected {curve.rank} coefficients")
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *_):
        raise AttributeError("differentials are immutable")

    def __repr__(self):
        return f"MeroDifferential({list(self.coeffs)} dx)"

    def __eq__(self, other):
        return isinstance(other, MeroDifferential) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __add__(self, other):
        return MeroDifferential(self.curve, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return MeroDifferential(self.curve, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return MeroDifferential(self.curve, [-a for a in self.coeffs])

    def scale(self, c):
        return MeroDifferential(self.curve, [a.scale(c) for a in self.coeffs])

    def times(self, element):
        """Multiply by a function given as a coefficient tuple in the same basis."""
        return MeroDifferential(self.curve, self.curve.mul(element, self.coeffs))


class CurveModel:
    """Common interface; subclasses fill in the function field and the places."""

    variant = "abstract"
    rank = 1

    def __init__(self, F: FiniteField):
        if not isinstance(F, FiniteField):
            raise UnsupportedCurveError("curves are defined over finite fields")
        self.F = F
        self.p = F.characteristic
        self._local_cache = {}

    # -- function field -------------------------------------------------------
    def one(self):
        return tuple([RatFunc.const(self.F, 1)] + [RatFunc.zero(self.F)] * (self.rank - 1))

    def x(self):
        return tuple([RatFunc.x(self.F)] + [RatFunc.zero(self.F)] * (self.rank - 1))

    def mul(self, a, b):
        raise NotImplementedError

    def differential(self, coeffs) -> MeroDifferential:
        return MeroDifferential(self, coeffs)

    def exact(self, element) -> MeroDifferential:
        """d(element) as a differential."""
        raise NotImplementedError

    # -- places and expansions --------------------------------------------------
    def local_coordinates(self, place: Place, prec: int):
        """(x(t), b_1(t)) truncated at absolute precision prec, cached."""
        key = (place, prec)
        if key not in self._local_cache:
            self._local_cache[key] = self._local(place, prec)
        return self._local_cache[key]

    def _local(self, place, prec):
        raise NotImplementedError

    def basis_series(self, place, prec):
        """Expansions of the function-field basis elements b_j."""
        raise NotImplementedError

    def expand(self, w: MeroDifferential, place: Place, prec: int = 30) -> TLS:
        """Local expansion of w in the uniformizer t at the place (as the coefficient of dt)."""
        xs, _ = self.local_coordinates(place, prec)
        bs = self.basis_series(place, prec)
        dx = xs.derivative()
        acc = None
        for c, b in zip(w.coeffs, bs):
            if c.is_zero():
                continue
            term = c.expand(xs) * b
            acc = term if acc is None else acc + term
        if acc is None:
            return TLS.zero(self.F, prec)
        return acc * dx

    def expand_function(self, element, place: Place, prec: int = 30) -> TLS:
        xs, _ = self.local_coordinates(place, prec)
        bs = self.basis_series(place, prec)
        acc = TLS.zero(self.F, prec)
        for c, b in zip(element, bs):
            if not c.is_zero():
                acc = acc + c.expand(xs) * b
        return acc

    def valuation(self, w: MeroDifferential, place: Place, prec: int = 30) -> int:
        if w.is_zero():
            raise AlgebraError("valuation of the zero differential")
        while prec < 2000:
            s = self.expand(w, place, prec)
            if not s.is_zero():
                return s.valuation
            prec *= 2
        raise AlgebraError("differential vanishes to the working precision")

    def rational_places(self) -> list:
        raise NotImplementedError

    def places_over(self, x) -> list:
        """Rational places above x (None for infinity)."""
        return [pl for pl in self.rational_places() if pl.x == x or (x is None and pl.is_infinite)]

    # -- cohomology -------------------------------------------------------------------
    def genus(self) -> int:
        raise NotImplementedError

    def cartier(self, w: MeroDifferential) -> MeroDifferential:
        raise NotImplementedError

    def blocks(self, D: DivisorData):
        """[(j, den, E)]: coefficient j ranges over A/den with deg A <= E."""
        raise NotImplementedError

    def saturate(self, D: DivisorData) -> DivisorData:
        """Smallest divisor >= D that blocks() supports directly."""
        return D

    def differential_space(self, D: DivisorData) -> "DifferentialSpace":
        if not D.is_effective():
            raise DivisorError("divisor must be effective")
        Dsat = self.saturate(D)
        space = DifferentialSpace(self, Dsat, self.blocks(Dsat))
        if Dsat != D:
            space = space.restrict_poles(D)
        return space


def _cartier_line(g: RatFunc) -> RatFunc:
    """V(g dx) on the x-line, as the coefficient of dx.

    g = A/B = A B^{p-1} / B^p; writing h = A B^{p-1} = sum h_i^p x^i gives
    V(g dx) = h_{p-1} / B dx.
    """
    F = g.ring
    p = F.characteristic
    if g.is_zero():
        return g
    h = g.num * g.den ** (p - 1)
    coeffs = [F.frob(h[k * p + p - 1], -1) for k in range((h.degree + 1) // p + 1)]
    return RatFunc(Poly(F, coeffs), g.den)


def _lin(F, a):
    return Poly(F, [F.neg(a), F.one])


class ProjectiveLine(CurveModel):
    variant = "projective-line"
    rank = 1

    def __repr__(self):
        return f"ProjectiveLine({self.F})"

    def mul(self, a, b):
        return (a[0] * b[0],)

    def exact(self, element):
        return MeroDifferential(self, (element[0].derivative(),))

    def genus(self):
        return 0

    def rational_places(self):
        return [Place("finite", a) for a in self.F.elements()] + [INF]

    def _local(self, place, prec):
        F = self.F
        if place.is_infinite:
            return TLS(F, -1, [F.one], prec), None
        return TLS(F, 0, [place.x, F.one], prec), None

    def basis_series(self, place, prec):
        return [TLS.one(self.F, prec + 10 ** 6)]

    def cartier(self, w):
        return MeroDifferential(self, (_cartier_line(w.coeffs[0]),))

    def blocks(self, D):
        F = self.F
        den = Poly(F, [F.one])
        n_inf = 0
        for pl, m in D.entries:
            if pl.is_infinite:
                n_inf += m
            else:
                den = den * _lin(F, pl.x) ** m
        return [(0, den, den.degree + n_inf - 2)]

    def saturate(self, D):
        out = []
        for pl, m in D.entries:
            if pl.kind == "fiber":
                pl = INF if pl.x is None else Place("finite", pl.x)
            out.append((pl, m))
        return DivisorData.of(*out)


class EllipticCurve(CurveModel):
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6, stored as eta^2 = F(x), eta = y + (a1 x + a3)/2."""

    variant = "elliptic"
    rank = 2

    def __init__(self, F, ainvs):
        super().__init__(F)
        if self.p == 2:
            raise UnsupportedCurveError("characteristic 2 is not supported")
        a1, a2, a3, a4, a6 = [F.canonical(F.from_int(a) if isinstance(a, int) else a) for a in ainvs]
        self.ainvs = (a1, a2, a3, a4, a6)
        half = F.inv(F.from_int(2))
        quarter = F.mul(half, half)
        c2 = F.add(a2, F.mul(quarter, F.mul(a1, a1)))
        c1 = F.add(a4, F.mul(half, F.mul(a1, a3)))
        c0 = F.add(a6, F.mul(quarter, F.mul(a3, a3)))
        self.cubic = Poly(F, [c0, c1, c2, F.one])
        if not self.cubic.gcd(self.cubic.derivative()).degree == 0:
            raise UnsupportedCurveError("singular Weierstrass equation (discriminant zero)")
        self._shift = RatFunc(Poly(F, [F.mul(half, a3), F.mul(half, a1)]))

    def __repr__(self):
        return f"EllipticCurve({self.F}, {list(self.ainvs)})"

    def mul(self, a, b):
        Fx = RatFunc(self.cubic)
        return (a[0] * b[0] + a[1] * b[1] * Fx, a[0] * b[1] + a[1] * b[0])

    def y(self):
        """y = eta - (a1 x + a3)/2 in the (1, eta) basis."""
        return (-self._shift, RatFunc.const(self.F, 1))

    def exact(self, element):
        g0, g1 = element
        # d(g1 eta) = g1' eta dx + g1 F'/(2 eta) dx = (g1' + g1 F' / (2F)) eta dx
        Fx = RatFunc(self.cubic)
        half = self.F.inv(self.F.from_int(2))
        return MeroDifferential(self, (g0.derivative(),
                                       g1.derivative() + g1 * RatFunc(self.cubic.derivative()).scale(half) / Fx))

    def invariant_differential(self):
        """dx / (2y + a1 x + a3) = dx / (2 eta) = eta / (2 F) dx."""
        half = self.F.inv(self.F.from_int(2))
        return MeroDifferential(self, (RatFunc.zero(self.F), RatFunc(Poly(self.F, [half]), self.cubic)))

    def genus(self):
        return 1

    def count_points(self) -> int:
        F = self.F
        sq = {}
        for e in F.elements():
            s = F.mul(e, e)
            sq[s] = sq.get(s, 0) + 1
        return 1 + sum(sq.get(self.cubic(a), 0) for a in F.elements())

    def rational_places(self):
        F = self.F
        out = []
        roots = {}
        for e in F.elements():
            roots.setdefault(F.mul(e, e), []).append(e)
        for a in F.elements():
            v = self.cubic(a)
            if F.is_zero(v):
                out.append(Place("finite", a, F.zero, True))
            else:
                for b in roots.get(v, []):
                    out.append(Place("finite", a, b))
        out.append(Place("infinity", None, None, True))
        return out

    def _local(self, place, prec):
        F = self.F
        if place.is_infinite:
            # w = 1/x, t = x/eta: t^2 = w / G(w) with G(w) = w^3 F(1/w)
            G = TLS(F, 0, list(reversed(self.cubic.coeffs)), prec)
            phi = TLS(F, 1, [F.one], prec + 1) * G.invert()
            psi = reversion(phi.truncate(prec + 1), prec + 1)
            t2 = TLS(F, 2, [F.one], 2 * prec + 2)
            w = psi.substitute(t2).truncate(2 * prec)
            xs = w.invert().truncate(prec)
            eta = (xs * TLS(F, -1, [F.one], prec + 10)).truncate(prec)
            return xs, eta
        if place.ramified:
            # eta is the uniformizer; x - a = psi(t^2) with phi(s) = F(a + s)
            shifted = self.cubic.compose(Poly(F, [place.x, F.one]))
            phi = TLS(F, 0, shifted.coeffs, prec + 2)
            psi = reversion(phi, prec + 2)
            s = psi.substitute(TLS(F, 2, [F.one], 2 * prec + 4)).truncate(prec)
            xs = s + TLS(F, 0, [place.x], prec)
            return xs, TLS(F, 1, [F.one], prec)
        xs = TLS(F, 0, [place.x, F.one], prec)
        shifted = self.cubic.compose(Poly(F, [place.x, F.one]))
        eta = series_root(TLS(F, 0, shifted.coeffs, prec), 2, r0=place.branch)
        return xs, eta

    def basis_series(self, place, prec):
        _, eta = self.local_coordinates(place, prec)
        return [TLS.one(self.F, prec + 10 ** 6), eta]

    def cartier(self, w):
        g0, g1 = w.coeffs
        p = self.p
        # eta = eta^p F^{-(p-1)/2}
        twist = RatFunc(Poly(self.F, [self.F.one]), self.cubic ** ((p - 1) // 2))
        return MeroDifferential(self, (_cartier_line(g0), _cartier_line(g1 * twist)))

    def saturate(self, D):
        # promote single finite places to their whole fibers
        acc = {}
        for pl, m in D.entries:
            if pl.is_infinite or (pl.kind == "fiber" and pl.x is None):
                key = INF
            else:
                key = fiber(pl.x)
            if pl.kind == "finite" and not pl.ramified:
                m = m
            acc[key] = max(acc.get(key, 0), m)
        return DivisorData.of(*acc.items())

    def blocks(self, D):
        F = self.F
        den = Poly(F, [F.one])
        n_inf = 0
        for pl, m in D.entries:
            if pl.is_infinite:
                n_inf += m
            elif pl.kind == "fiber":
                # multiplicity m at each place of the fiber; a ramified fiber point
                # with multiplicity 2m or 2m+1 gives the same bound
                den = den * _lin(F, pl.x) ** m
            else:
                raise DivisorError(f"unsupported place {pl} for a block basis")
        # f = g0 + g1 eta in L(D); the differential is f dx/(2 eta) = (g1/2 + g0/(2F) eta) dx
        E0 = den.degree + (n_inf - 3) // 2
        E1 = den.degree + n_inf // 2
        return [(0, den, E0), (1, den * self.cubic, E1)]


class ArtinSchreierCurve(CurveModel):
    """y^p - y = f(x), f with poles of order prime to p; the base field must contain the poles."""

    variant = "artin-schreier"

    def __init__(self, F, f: RatFunc):
        super().__init__(F)
        self.rank = self.p
        self.f = f
        p = self.p
        self.poles = []                       # [(a, m)] finite poles
        den = f.den
        for a in F.elements():
            if F.is_zero(den(a)):
                self.poles.append((a, -f.order_at(a)))
        if sum(m for _, m in self.poles) != den.degree:
            raise UnsupportedCurveError("the poles of f must be rational over the base field")
        self.m_inf = max(0, f.num.degree - f.den.degree)
        for a, m in self.poles + [(None, self.m_inf)]:
            if m % p == 0 and m > 0:
                raise UnsupportedCurveError(f"pole order {m} at {a} is divisible by p (reduce f first)")
        if not self.poles and self.m_inf == 0:
            raise UnsupportedCurveError("f must have a pole (otherwise the cover is not ramified)")

    def __repr__(self):
        return f"ArtinSchreierCurve({self.F}, y^{self.p} - y = {self.f})"

    def branch_points(self):
        out = [a for a, _ in self.poles]
        if self.m_inf:
            out.append(None)
        return out

    def pole_order(self, a) -> int:
        if a is None:
            return self.m_inf
        for b, m in self.poles:
            if b == a:
                return m
        return 0

    def mul(self, a, b):
        p = self.p
        F = self.F
        prod = [RatFunc.zero(F)] * (2 * p - 1)
        for i, u in enumerate(a):
            if u.is_zero():
                continue
            for j, v in enumerate(b):
                if not v.is_zero():
                    prod[i + j] = prod[i + j] + u * v
        # y^{p+j} = y^{j+1} + f y^j
        for k in range(2 * p - 2, p - 1, -1):
            c = prod[k]
            if c.is_zero():
                continue
            prod[k] = RatFunc.zero(F)
            j = k - p
            prod[j + 1] = prod[j + 1] + c
            prod[j] = prod[j] + c * self.f
        return tuple(prod[:p])

    def y(self):
        F = self.F
        return tuple(RatFunc.const(F, 1) if j == 1 else RatFunc.zero(F) for j in range(self.p))

    def exact(self, element):
        # dy = -f' dx since p y^{p-1} dy = 0
        p = self.p
        fp = self.f.derivative()
        out = [RatFunc.zero(self.F)] * p
        for j, g in enumerate(element):
            if g.is_zero():
                continue
            out[j] = out[j] + g.derivative()
            if j:
                term = g * fp.scale(self.F.from_int(-j))
                out[j - 1] = out[j - 1] + term
        return MeroDifferential(self, out)

    def automorphism(self, w: MeroDifferential, c: int = 1) -> MeroDifferential:
        """Pull back along y -> y + c."""
        F = self.F
        out = [RatFunc.zero(F)] * self.p
        for j, g in enumerate(w.coeffs):
            if g.is_zero():
                continue
            for l in range(j + 1):
                coef = F.from_int(comb(j, l) * c ** (j - l))
                if not F.is_zero(coef):
                    out[l] = out[l] + g.scale(coef)
        return MeroDifferential(self, out)

    def genus(self):
        total = sum(m + 1 for _, m in self.poles) + (self.m_inf + 1 if self.m_inf else 0)
        return (self.p - 1) * (total - 2) // 2

    def rational_places(self):
        F = self.F
        p = self.p
        out = [Place("finite", a, None, True) for a, _ in self.poles]
        if self.m_inf:
            out.append(Place("infinity", None, None, True))
        roots = {}
        for c in F.elements():
            roots.setdefault(F.sub(F.pow(c, p), c), []).append(c)
        pole_set = {a for a, _ in self.poles}
        for a in F.elements():
            if a in pole_set:
                continue
            for c in roots.get(self.f(a), []):
                out.append(Place("finite", a, c))
        if not self.m_inf:
            lead = F.zero if self.f.num.degree < self.f.den.degree else self.f.num.lead
            for c in roots.get(lead, []):
                out.append(Place("infinity", None, c))
        return out

    def _local(self, place, prec):
        F = self.F
        p = self.p
        if not place.ramified:
            if place.is_infinite:
                xs = TLS(F, -1, [F.one], prec)
            else:
                xs = TLS(F, 0, [place.x, F.one], prec)
            fx = self.f.expand(xs).truncate(prec)
            y = TLS(F, 0, [place.branch], prec)
            # y = y^p - f converges p-adically fast from the right constant
            for _ in range(prec.bit_length() + 2):
                y = ((y ** p) - fx).truncate(prec)
            return xs, y
        m = self.pole_order(place.x)
        # local equation in s (s = x - a, or 1/x at infinity): f = s^{-m} h(s)
        wide = prec * p + p + 2
        if place.is_infinite:
            s_series = TLS(F, 1, [F.one], wide)
            h = self.f.expand(s_series.invert().truncate(wide - 2)).shift(m)
        else:
            s_series = TLS(F, 0, [place.x, F.one], wide)
            h = self.f.expand(s_series).shift(m)
        h = h.truncate(wide)
        hinv = h.invert()
        r = series_root(hinv.truncate(prec + 2), m)
        phi = TLS(F, 1, [F.one], prec + 3) * r
        psi = reversion(phi.truncate(prec + 3), prec + 2)
        # R(pi) = pi^p (1 - pi^{m(p-1)})^{-1/m}
        one_minus = TLS(F, 0, [F.one] + [F.zero] * (m * (p - 1) - 1) + [F.neg(F.one)], prec + 2)
        R = series_root(one_minus.invert(), m, r0=F.one).shift(p).truncate(prec + p)
        s = psi.substitute(R).truncate(prec + p)
        if place.is_infinite:
            xs = s.invert().truncate(prec)
        else:
            xs = (s + TLS(F, 0, [place.x], prec + p)).truncate(prec)
        y = TLS(F, -m, [F.one], prec)
        return xs, y

    def basis_series(self, place, prec):
        _, y = self.local_coordinates(place, prec)
        out = [TLS.one(self.F, prec + 10 ** 6)]
        for _ in range(1, self.p):
            out.append(out[-1] * y)
        return out

    def cartier(self, w):
        """V(sum g_j y^j dx) = sum_j sum_l C(j,l) y^l V(g_j (-f)^{j-l} dx)."""
        F = self.F
        p = self.p
        out = [RatFunc.zero(F)] * p
        negf = -self.f
        for j, g in enumerate(w.coeffs):
            if g.is_zero():
                continue
            for l in range(j + 1):
                coef = comb(j, l) % p
                if not coef:
                    continue
                out[l] = out[l] + _cartier_line(g * negf ** (j - l)).scale(F.from_int(coef))
        return MeroDifferential(self, out)

    def valuation_formula(self, w: MeroDifferential, place: Place) -> int:
        """Exact valuation at a ramified place; the terms have distinct residues mod p."""
        if not place.ramified:
            raise ValueError("formula only for ramified places")
        p = self.p
        m = self.pole_order(place.x)
        vdx = (m + 1) * (p - 1) - (2 * p if place.is_infinite else 0)
        best = None
        for j, g in enumerate(w.coeffs):
            if g.is_zero():
                continue
            vg = g.order_at_infinity() if place.is_infinite else g.order_at(place.x)
            v = p * vg - j * m + vdx
            best = v if best is None else min(best, v)
        if best is None:
            raise AlgebraError("valuation of the zero differential")
        return best

    def saturate(self, D):
        acc = {}
        for pl, m in D.entries:
            a = pl.x
            if a in self.branch_points() or (a is None and self.m_inf):
                key = Place("infinity", None, None, True) if a is None else Place("finite", a, None, True)
            else:
                key = fiber(a)
            acc[key] = max(acc.get(key, 0), m)
        return DivisorData.of(*acc.items())

    def blocks(self, D):
        F = self.F
        p = self.p
        n_ram = {}
        fibers = []
        n_inf_fiber = 0
        for pl, mult in D.entries:
            if pl.ramified:
                n_ram[pl.x] = n_ram.get(pl.x, 0) + mult
            elif pl.kind == "fiber":
                if pl.x is None:
                    n_inf_fiber += mult
                else:
                    fibers.append((pl.x, mult))
            else:
                raise DivisorError(f"unsupported place {pl} for a block basis")
        out = []
        for j in range(p):
            num_extra = Poly(F, [F.one])
            den = Poly(F, [F.one])
            total = 0
            for a, m in self.poles:
                nu = ((m + 1) * (p - 1) - j * m + n_ram.get(a, 0)) // p
                total += nu
                if nu >= 0:
                    den = den * _lin(F, a) ** nu
                else:
                    num_extra = num_extra * _lin(F, a) ** (-nu)
            for a, mult in fibers:
                den = den * _lin(F, a) ** mult
                total += mult
            if self.m_inf:
                m = self.m_inf
                deg_bound = ((m + 1) * (p - 1) - 2 * p - j * m + n_ram.get(None, 0)) // p
            else:
                deg_bound = n_inf_fiber - 2
            E = total + deg_bound
            if num_extra.degree > 0:
                out.append((j, (den, num_extra), E))
            else:
                out.append((j, den, E))
        return out


@dataclass
class DifferentialSpace:
    """Basis of H^0(C, Omega^1(D)) with coordinates.

    Block form: coefficient j of the differential is extra(x) * A(x) / den(x)
    with deg A <= E; the block coordinates are the coefficients of A.
    A restricted space carries an explicit change of basis.
    """
    curve: CurveModel
    divisor: DivisorData
    block_list: list
    subbasis: list | None = None          # vectors in block coordinates
    _basis: list | None = field(default=None, repr=False)

    def _block_info(self):
        out = []
        for j, den, E in self.block_list:
            extra = None
            if isinstance(den, tuple):
                den, extra = den
            out.append((j, den, extra, E))
        return out

    @property
    def block_dim(self) -> int:
        return sum(max(E + 1, 0) for _, _, E in self.block_list)

    def block_element(self, vec) -> MeroDifferential:
        C = self.curve
        F = C.F
        coeffs = [RatFunc.zero(F)] * C.rank
        pos = 0
        for j, den, extra, E in self._block_info():
            n = max(E + 1, 0)
            if n:
                A = Poly(F, list(vec[pos:pos + n]))
                if extra is not None:
                    A = A * extra
                coeffs[j] = coeffs[j] + RatFunc(A, den)
            pos += n
        return MeroDifferential(C, coeffs)

    def block_coords(self, w: MeroDifferential):
        """Block coordinates of w, or None if w is not in the block space."""
        F = self.curve.F
        out = []
        for j, den, extra, E in self._block_info():
            g = w.coeffs[j]
            n = max(E + 1, 0)
            A = g * RatFunc(den)
            if A.den.degree > 0:
                return None
            A = A.num
            if extra is not None:
                A, r = A.divmod(extra)
                if not r.is_zero():
                    return None
            if A.degree >= n:
                return None
            out.extend(A[i] for i in range(n))
        return out

    def basis(self) -> list:
        if self._basis is None:
            if self.subbasis is None:
                vecs = []
                n = self.block_dim
                for i in range(n):
                    v = [self.curve.F.zero] * n
                    v[i] = self.curve.F.one
                    vecs.append(v)
            else:
                vecs = self.subbasis
            self._basis = [self.block_element(v) for v in vecs]
        return self._basis

    def element(self, vec) -> MeroDifferential:
        """sum vec[i] * basis()[i]."""
        if self.subbasis is None:
            return self.block_element(vec)
        F = self.curve.F
        n = self.block_dim
        bv = [F.zero] * n
        for c, b in zip(vec, self.subbasis):
            for i in range(n):
                bv[i] = F.add(bv[i], F.mul(c, b[i]))
        return self.block_element(bv)

    @property
    def dim(self) -> int:
        return len(self.subbasis) if self.subbasis is not None else self.block_dim

    def coords(self, w: MeroDifferential):
        """Coordinates in basis(); None when w is not in the space."""
        bc = self.block_coords(w)
        if bc is None:
            return None
        if self.subbasis is None:
            return tuple(bc)
        F = self.curve.F
        if not self.subbasis:
            return () if all(F.is_zero(c) for c in bc) else None
        B = ExactMatrix.from_columns(F, self.subbasis, self.block_dim)
        try:
            sol = B.solve(ExactMatrix.from_columns(F, [bc], self.block_dim))
        except Exception:
            return None
        vec = sol.column(0)
        if B.apply(vec) != tuple(F.canonical(c) for c in bc):
            return None
        return vec

    def contains(self, w: MeroDifferential) -> bool:
        return w.is_zero() or self.coords(w) is not None

    def restrict_poles(self, D: DivisorData) -> "DifferentialSpace":
        """Impose v_P >= -D(P) at places where D is smaller than the saturated divisor."""
        C = self.curve
        F = C.F
        n = self.block_dim
        rows = []
        check = []
        for pl in C.rational_places():
            sat = _saturated_mult(C, self.divisor, pl)
            want = D.mult(pl)
            if pl.kind != "fiber" and want < sat:
                check.append((pl, want))
        basis = self.basis()
        for pl, want in check:
            prec = 20 + 2 * n
            exps = [C.expand(w, pl, prec) for w in basis]
            for e in range(-10 * (n + 5), -want):
                row = []
                for s in exps:
                    try:
                        row.append(s[e])
                    except Exception:
                        row.append(F.zero)
                if any(not F.is_zero(c) for c in row):
                    rows.append(row)
        if not rows:
            return DifferentialSpace(C, D, self.block_list, None)
        A = ExactMatrix.from_rows(F, rows, n)
        ker = mat_rank_kernel_image(A).kernel
        return DifferentialSpace(C, D, self.block_list, [tuple(v) for v in ker])


def _saturated_mult(C, Dsat, pl):
    for q, m in Dsat.entries:
        if q == pl:
            return m
        if q.kind == "fiber" and q.x == pl.x and not pl.ramified:
            return m
        if q.kind == "fiber" and q.x == pl.x and pl.ramified:
            return 2 * m if C.variant == "elliptic" and not pl.is_infinite else m
        if q.is_infinite and pl.is_infinite:
            return m
    return 0


def differentials_with_poles_basis(c: CurveModel, d: DivisorData) -> list:
    return c.differential_space(d).basis()
