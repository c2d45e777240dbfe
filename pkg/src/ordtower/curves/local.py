"""Power-series tools for local expansions: roots, reversion, the local Cartier formula."""
from __future__ import annotations

from ..algebra import AlgebraError, TruncatedLaurentSeries as TLS


class LocalExpansionError(AlgebraError):
    pass


def field_root(F, c, m: int):
    """Some m-th root of c in F, by search."""
    for r in F.elements():
        if F.eq(F.pow(r, m), c):
            return r
    raise LocalExpansionError(f"{c} has no {m}-th root in {F}; enlarge the base field")


def series_root(s: TLS, m: int, r0=None) -> TLS:
    """m-th root of a power series with unit constant term (m prime to p).

    Coefficients are solved one at a time from r^m = s.
    """
    F = s.ring
    if s.low != 0:
        raise LocalExpansionError("series_root needs a unit constant term")
    n = s.prec
    a = [s[i] for i in range(n)]
    if r0 is None:
        r0 = field_root(F, a[0], m)
    # r^m = s  =>  m r0^{m-1} r_k = s_k - [coefficient k of r^m with r_k = 0]
    r = [F.zero] * n
    r[0] = r0
    scale = F.inv(F.mul(F.from_int(m), F.pow(r0, m - 1)))
    for k in range(1, n):
        partial = TLS(F, 0, r[:k], k + 1)
        pk = (partial ** m)[k]
        r[k] = F.mul(F.sub(a[k], pk), scale)
    return TLS(F, 0, r, n)


def reversion(phi: TLS, prec: int) -> TLS:
    """psi with phi(psi(u)) = u, for phi of valuation 1 (coefficient by coefficient)."""
    F = phi.ring
    if phi.low != 1:
        raise LocalExpansionError("reversion needs a series of valuation exactly 1")
    c1inv = F.inv(phi[1])
    b = [F.zero, c1inv]
    for k in range(2, prec):
        psi = TLS(F, 1, b[1:], k + 1)
        val = phi.truncate(k + 1).substitute(psi)
        ck = val[k]
        b.append(F.neg(F.mul(ck, c1inv)))
    return TLS(F, 1, b[1:], prec)


def local_cartier(w: TLS) -> TLS:
    """V(sum a_n t^n dt) = sum_{n = -1 mod p} a_n^{1/p} t^{(n+1)/p - 1} dt."""
    F = w.ring
    p = F.characteristic
    out = {}
    for n, c in w.items():
        if (n + 1) % p == 0:
            out[(n + 1) // p - 1] = F.frob(c, -1)
    # precision: coefficients with (n+1)/p - 1 < ceil((prec+1)/p) - 1 are known
    prec = -((-(w.prec + 1)) // p) - 1
    if not out:
        return TLS.zero(F, prec)
    low = min(out)
    coeffs = [out.get(i, F.zero) for i in range(low, max(out) + 1)]
    return TLS(F, low, coeffs, prec)
