"""Supersingular points on X_1(N) mod p and the p-rank of small X_1(N)."""
from __future__ import annotations

from fractions import Fraction

from ..algebra import GF
from .dims import count_level_structures, genus


class MassFormulaError(RuntimeError):
    pass


def _curve_with_j(F, j):
    """Short Weierstrass (a, b) with j-invariant j (p >= 5)."""
    if F.is_zero(j):
        return F.zero, F.one
    if F.eq(j, F.from_int(1728)):
        return F.one, F.zero
    c = F.sub(F.from_int(1728), j)
    a = F.mul(F.from_int(3), F.mul(j, c))
    b = F.mul(F.from_int(2), F.mul(j, F.mul(c, c)))
    return a, b


def _count_points(F, a, b) -> int:
    squares = {}
    for y in F.elements():
        s = F.mul(y, y)
        squares[s] = squares.get(s, 0) + 1
    total = 1
    for x in F.elements():
        rhs = F.add(F.mul(x, F.add(F.mul(x, x), a)), b)
        total += squares.get(rhs, 0)
    return total


def automorphism_order(p: int, j_is_0: bool, j_is_1728: bool) -> int:
    if p == 3 and j_is_0:
        return 12
    if j_is_0:
        return 6
    if j_is_1728:
        return 4
    return 2


def supersingular_j(p: int) -> list:
    """Supersingular j-invariants over F_{p^2} as (element, #Aut) pairs, found by point counts."""
    if p < 5:
        raise ValueError("the short Weierstrass enumeration needs p >= 5")
    F = GF(p, 2)
    q = p * p
    out = []
    j1728 = F.from_int(1728)
    for j in F.elements():
        a, b = _curve_with_j(F, j)
        trace = q + 1 - _count_points(F, a, b)
        if trace % p == 0:
            out.append((j, automorphism_order(p, F.is_zero(j), F.eq(j, j1728))))
    return out


def supersingular_count(p: int, N: int) -> int:
    """delta = number of geometric supersingular points on X_1(N)_{F_p}.

    Each supersingular j carries count/#Aut points, count being the number of
    points of exact order N on E[N]; Aut acts freely on them once N >= 4.
    """
    if N < 4 or N % p == 0:
        raise ValueError("need N >= 4 and p prime to N")
    ss = supersingular_j(p)
    mass = sum((Fraction(1, aut) for _, aut in ss), Fraction(0))
    if mass != Fraction(p - 1, 24):
        raise MassFormulaError(f"mass {mass} != (p-1)/24 for p={p}")
    structures = count_level_structures(N)
    delta = Fraction(0)
    for _, aut in ss:
        delta += Fraction(structures, aut)
    if delta.denominator != 1:
        raise MassFormulaError("non-integral point count over a supersingular j")
    return int(delta)


def supersingular_count_mass(p: int, N: int) -> int:
    """Second path: count_level_structures(N) * (p - 1) / 24."""
    val = Fraction(count_level_structures(N) * (p - 1), 24)
    assert val.denominator == 1
    return int(val)


# Weierstrass models [a1, a2, a3, a4, a6] of the genus-one curves X_1(N)
X1_GENUS_ONE = {
    11: (0, -1, 1, 0, 0),
    14: (1, 0, 1, -1, 0),
    15: (1, 1, 1, 0, 0),
}


def trace_of_frobenius(ainv, p: int) -> int:
    a1, a2, a3, a4, a6 = ainv
    count = 1
    for x in range(p):
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - (x ** 3 + a2 * x * x + a4 * x + a6)) % p == 0:
                count += 1
    return p + 1 - count


def p_rank_oracle(p: int, N: int):
    """p-rank of Jac(X_1(N)) mod p from explicit models, or None when no model is tabulated."""
    g = genus(N)
    if g == 0:
        return 0
    if N in X1_GENUS_ONE:
        return 0 if trace_of_frobenius(X1_GENUS_ONE[N], p) % p == 0 else 1
    return None
