"""Explicit Kummer models of the Igusa curve Ig_1 over genus-zero X_1(N).

Over the Tate normal form E_t with a point of order N, the Hasse invariant
H(t) (with respect to the Weierstrass differential) is a polynomial in t, and
Ig_1 is birational to the Kummer cover s^(p-1) = H(t).  Holomorphic
differentials t^i s^-j dt split by j into eigenspaces for F_p^x acting on s,
and the Cartier operator preserves each block:

    V(t^i s^-j dt) = s^-j V(t^i H^j dt)      (since s^(-jp) H^j = s^-j).
"""
from __future__ import annotations

from dataclasses import dataclass

from ..algebra import GF, ExactMatrix, Poly, mat_rank_kernel_image
from ..algebra.poly import squarefree_decomposition


class IgusaModelError(RuntimeError):
    pass


def tate_normal_form(F, N: int):
    """(b, c) as polynomials in t with E: y^2 + (1-c)xy - by = x^3 - bx^2 having (0,0) of order N."""
    t = Poly.x(F)
    one = Poly.const(F, 1)
    if N == 4:
        return t, Poly(F, [])
    if N == 5:
        return t, t
    if N == 6:
        return t + t * t, t
    if N == 7:
        return t ** 3 - t ** 2, t ** 2 - t
    if N == 9:
        c = t ** 2 * (t - one)
        return c * (t ** 2 - t + one), c
    raise IgusaModelError(f"no genus-zero Tate normal form tabulated for N={N}")


SUPPORTED_LEVELS = (4, 5, 6, 7, 9)


def hasse_polynomial(p: int, N: int) -> Poly:
    """Hasse invariant of the Tate normal form as a polynomial in t over F_p."""
    F = GF(p)
    b, c = tate_normal_form(F, N)
    one = Poly.const(F, 1)
    zero = Poly(F, [])
    # a1 = 1-c, a2 = -b, a3 = -b, a4 = a6 = 0
    a1, a2, a3 = one - c, -b, -b
    b2 = a1 * a1 + a2.scale(4)
    b4 = a1 * a3
    b6 = a3 * a3
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    cubic = [b6, b4.scale(2), b2, Poly.const(F, 4)]
    power = [one]
    for _ in range((p - 1) // 2):
        nxt = [zero] * (len(power) + 3)
        for i, u in enumerate(power):
            for j, v in enumerate(cubic):
                nxt[i + j] = nxt[i + j] + u * v
        power = nxt
    return power[p - 1]


@dataclass
class KummerCurve:
    """s^m = H(t) with H squarefree (after removing m-th powers)."""
    p: int
    m: int
    H: Poly

    @property
    def degree(self) -> int:
        return self.H.degree

    def holomorphic_basis(self) -> dict:
        """{j: [i, ...]} such that t^i s^-j dt is holomorphic."""
        D, m = self.degree, self.m
        from math import gcd
        g0 = gcd(D, m)
        out = {}
        for j in range(1, m):
            top = (j * D - g0) // m - 1
            out[j] = list(range(top + 1)) if top >= 0 else []
        return out

    def genus(self) -> int:
        """Riemann-Hurwitz for a squarefree Kummer cover of the t-line."""
        from math import gcd
        D, m = self.degree, self.m
        g0 = gcd(D, m)
        two_g_minus_2 = -2 * m + D * (m - 1) + (m - g0)
        return two_g_minus_2 // 2 + 1

    def cartier_block(self, j: int) -> ExactMatrix:
        """Matrix of V on span{t^i s^-j dt} (columns are images)."""
        F = self.H.ring
        basis = self.holomorphic_basis()[j]
        n = len(basis)
        Hj = self.H ** j
        cols = []
        for i in basis:
            f = Hj.shift(i)
            img = [F.zero] * n
            for e in range(len(f.coeffs)):
                if (e + 1) % self.p == 0 and not F.is_zero(f[e]):
                    target = (e + 1) // self.p - 1
                    if target not in basis:
                        raise IgusaModelError("Cartier image left the holomorphic block")
                    img[basis.index(target)] = F.frob(f[e], -1)
            cols.append(img)
        return ExactMatrix.from_columns(F, cols, n)

    def block_p_ranks(self) -> dict:
        """Stable rank of V on each block j (the V-ordinary dimension)."""
        out = {}
        for j in range(1, self.m):
            A = self.cartier_block(j)
            n = A.rows
            out[j] = mat_rank_kernel_image(A.power(n)).rank if n else 0
        return out

    def p_rank(self) -> int:
        return sum(self.block_p_ranks().values())


@dataclass
class IgusaModel:
    p: int
    N: int
    curve: KummerCurve
    supersingular_roots: int


def igusa_model(p: int, N: int) -> IgusaModel:
    """Kummer model of Ig_1 over X_1(N) for genus-zero N in SUPPORTED_LEVELS."""
    H = hasse_polynomial(p, N)
    if H.is_zero():
        raise IgusaModelError("Hasse polynomial vanishes identically")
    m = p - 1
    sqf = squarefree_decomposition(H)
    F = H.ring
    reduced = Poly.const(F, H.lead)
    ss_roots = 0
    for e, P in sqf.items():
        r = e % m
        if r not in (0, 1):
            raise IgusaModelError(f"factor of multiplicity {e} is not a simple Kummer branch")
        if r == 1:
            reduced = reduced * P
            ss_roots += P.degree
    return IgusaModel(p, N, KummerCurve(p, m, reduced), ss_roots)
