"""Closed-form invariants of Gamma_1(N): genus, cusps, elliptic points, dim S_k."""
from __future__ import annotations

from fractions import Fraction
from math import gcd

from ..algebra.fields import factor_int


def euler_phi(n: int) -> int:
    out = n
    for ell in factor_int(n):
        out = out // ell * (ell - 1)
    return out


def divisors(n: int) -> list:
    return [d for d in range(1, n + 1) if n % d == 0]


def psl2_index(N: int) -> int:
    """Index of +-Gamma_1(N) in PSL_2(Z)."""
    if N == 1:
        return 1
    if N == 2:
        return 3
    idx = N * N
    for ell in factor_int(N):
        idx = idx * (ell * ell - 1) // (ell * ell)
    return idx // 2


def elliptic_points(N: int) -> tuple:
    """(e2, e3) for Gamma_1(N)."""
    return {1: (1, 1), 2: (1, 0), 3: (0, 1)}.get(N, (0, 0))


def cusp_counts(N: int) -> tuple:
    """(regular, irregular) cusp counts of Gamma_1(N)."""
    if N == 1:
        return 1, 0
    if N == 2:
        return 2, 0
    if N == 4:
        return 2, 1
    total = sum(euler_phi(d) * euler_phi(N // d) for d in divisors(N)) // 2
    return total, 0


def genus(N: int) -> int:
    e2, e3 = elliptic_points(N)
    reg, irr = cusp_counts(N)
    g = 1 + Fraction(psl2_index(N), 12) - Fraction(e2, 4) - Fraction(e3, 3) - Fraction(reg + irr, 2)
    assert g.denominator == 1
    return int(g)


def minus_one_in_group(N: int) -> bool:
    return N <= 2


def dim_cusp_forms(N: int, k: int) -> int:
    """dim S_k(Gamma_1(N)) for k >= 2."""
    if k < 2:
        raise ValueError("weight must be at least 2")
    g = genus(N)
    e2, e3 = elliptic_points(N)
    reg, irr = cusp_counts(N)
    if k % 2 == 0:
        if k == 2:
            return g
        return (k - 1) * (g - 1) + (k // 2 - 1) * (reg + irr) + (k // 4) * e2 + (k // 3) * e3
    if minus_one_in_group(N):
        return 0
    val = ((k - 1) * (g - 1) + Fraction(k - 2, 2) * reg + Fraction(k - 1, 2) * irr
           + (k // 3) * e3)
    assert val.denominator == 1
    return int(val)


def count_level_structures(N: int) -> int:
    """Number of points of exact order N on (Z/N)^2."""
    out = N * N
    for ell in factor_int(N):
        out = out * (ell * ell - 1) // (ell * ell)
    return out


def is_coprime_triple(c, d, N):
    return gcd(gcd(c, d), N) == 1
