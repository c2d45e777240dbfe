"""Hecke, diamond and Atkin-Lehner matrices with consistency checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from ..algebra import QQ, ExactMatrix, charpoly
from .manin import ModularSymbolSpace


class HeckeCommutationError(RuntimeError):
    pass


class AtkinLehnerError(RuntimeError):
    def __init__(self, msg, identity):
        super().__init__(msg)
        self.identity = identity


@dataclass(frozen=True)
class HeckeData:
    label: str
    matrix: ExactMatrix


def parse_label(label):
    """Normalise 'T7', 'U5', 'U*5', '<3>', 'w' or tuples to (kind, arg)."""
    if isinstance(label, tuple):
        return label if len(label) == 2 else (label[0], None)
    s = str(label).strip()
    if s == "w":
        return ("w", None)
    if s.startswith("<") and s.endswith(">"):
        return ("diamond", int(s[1:-1]))
    if s.startswith("U*"):
        return ("U*", int(s[2:]))
    if s[0] in "TU":
        return (s[0], int(s[1:]))
    raise ValueError(f"unknown operator label {label!r}")


def _format(kind, arg):
    if kind == "diamond":
        return f"<{arg}>"
    if kind == "w":
        return "w"
    return f"{kind}{arg}"


def _is_prime(n):
    return n > 1 and all(n % q for q in range(2, int(n ** 0.5) + 1))


def hecke_matrix(s: ModularSymbolSpace, label) -> HeckeData:
    """Matrix of an operator on the cuspidal symbols.

    T, U and diamond matrices are checked to commute with every such matrix
    computed before on the same space.
    """
    kind, arg = parse_label(label)
    M = s.M
    if kind == "T":
        if not _is_prime(arg) or M % arg == 0:
            raise ValueError(f"T_{arg} needs a prime not dividing {M}")
        mat = s.hecke_T(arg)
        cp = charpoly(mat)
        if any(Fraction(c).denominator != 1 for c in cp.coeffs):
            raise HeckeCommutationError(f"charpoly of T_{arg} is not integral")
    elif kind == "U":
        if not _is_prime(arg) or M % arg:
            raise ValueError(f"U_{arg} needs a prime dividing {M}")
        mat = s.hecke_T(arg)
    elif kind == "U*":
        mat = s.hecke_U_star(arg)
    elif kind == "diamond":
        if gcd(arg, M) != 1:
            raise ValueError(f"<{arg}> needs a unit mod {M}")
        mat = s.diamond(arg % M)
    elif kind == "w":
        mat = s.fricke()
    else:
        raise ValueError(f"unknown operator kind {kind}")
    name = _format(kind, arg)
    if kind in ("T", "U", "diamond"):
        for other, om in s.hecke_log.items():
            if mat @ om != om @ mat:
                raise HeckeCommutationError(f"{name} does not commute with {other}")
        s.hecke_log[name] = mat
    return HeckeData(name, mat)


def diamond_split(M: int, p: int, u: int, v: int) -> int:
    """The unit d mod M = Np with d = u mod p^a and d = v mod N."""
    pa = 1
    while M % (pa * p) == 0:
        pa *= p
    N = M // pa
    for d in range(1, M):
        if gcd(d, M) == 1 and (d - u) % pa == 0 and (d - v) % N == 0:
            return d
    raise ValueError("no such unit")


def _solve_nullspace(rows, nvars):
    """Kernel of a sparse Fraction system given as a list of dicts."""
    from .manin import _insert_row
    piv = {}
    for r in rows:
        r = {c: Fraction(v) for c, v in r.items() if v}
        if r:
            _insert_row(piv, r)
    basis = []
    for f in range(nvars):
        if f in piv:
            continue
        v = [Fraction(0)] * nvars
        v[f] = Fraction(1)
        for pc, row in piv.items():
            v[pc] = -row.get(f, Fraction(0))
        basis.append(v)
    return basis


def equivariant_pairing(s: ModularSymbolSpace, ops, star=None, rng=None) -> ExactMatrix:
    """An alternating form G with T^T G = G T^* for every (T, T^*) in ops.

    When a star matrix is given, G is also required to satisfy
    star^T G star = -G (complex conjugation reverses orientation).
    A random member of the solution space is returned; it must be perfect.
    """
    n = s.dim
    idx = {}
    for i in range(n):
        for j in range(i + 1, n):
            idx[(i, j)] = len(idx)

    def g_entry(i, j):
        # G[i][j] as a sparse combination of the unknowns
        if i == j:
            return {}
        if i < j:
            return {idx[(i, j)]: 1}
        return {idx[(j, i)]: -1}

    rows = []

    def bilinear_rows(A, B, C, D, sign):
        # entries of A^T G B - sign * C^T G D
        for a in range(n):
            for b in range(n):
                row = {}
                for i in range(n):
                    x = A[i, a]
                    if x:
                        for j in range(n):
                            y = B[j, b]
                            if y:
                                for c, v in g_entry(i, j).items():
                                    row[c] = row.get(c, 0) + x * y * v
                    x = C[i, a]
                    if x:
                        for j in range(n):
                            y = D[j, b]
                            if y:
                                for c, v in g_entry(i, j).items():
                                    row[c] = row.get(c, 0) - sign * x * y * v
                rows.append(row)

    I = ExactMatrix.identity(QQ, n)
    for T, Ts in ops:
        # T^T G I - I^T G T^*
        bilinear_rows(T, I, I, Ts, 1)
    if star is not None:
        bilinear_rows(star, star, I, I, -1)
    sols = _solve_nullspace(rows, len(idx))
    if not sols:
        raise AtkinLehnerError("no equivariant alternating form", "pairing")
    rng = rng if rng is not None else np.random.default_rng(0)
    for _ in range(20):
        coeffs = [int(c) for c in rng.integers(-3, 4, size=len(sols))]
        vec = [sum((c * v[t] for c, v in zip(coeffs, sols)), Fraction(0)) for t in range(len(idx))]
        G = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), t in idx.items():
            G[i][j] = vec[t]
            G[j][i] = -vec[t]
        Gm = ExactMatrix.from_rows(QQ, G, n)
        if Gm.is_invertible():
            return Gm
    raise AtkinLehnerError("equivariant forms are all degenerate", "pairing")


@dataclass
class AtkinLehnerReport:
    level: int
    p: int
    N: int
    w: HeckeData
    checks: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(self.checks.values())

    def as_dict(self):
        return {"level": self.level, "p": self.p, "N": self.N, "checks": dict(self.checks),
                "holds": self.holds}


def atkin_lehner_matrix(s: ModularSymbolSpace, p: int, ells=(2, 3), rng=None,
                        raise_on_failure: bool = True) -> AtkinLehnerReport:
    """Fricke involution at level M = Np (weight 2) and its intertwining relations.

    Checks, as exact matrix identities:
      w^2 = <-1>;  w <u><v>_N = <u^-1><v^-1>_N w;  w T_l = T_l^* w with
      T_l^* = <l>^-1 T_l;  w U_p w^-1 = U_p^* (U_p^* from its own cosets);
    then realises <x, y> = (x, w U_p^* y) on an equivariant alternating form
    and checks <T^* x, y> = <x, T^* y> for the listed T^*.
    """
    M = s.M
    if M % p:
        raise ValueError("the level must be divisible by p")
    N = M // p
    while N % p == 0:
        N //= p
    W = hecke_matrix(s, "w").matrix
    checks = {}
    checks["w^2 = <-1>"] = W @ W == s.diamond(M - 1)
    units = [d for d in range(2, M) if gcd(d, M) == 1]
    ok = True
    for u in range(1, p):
        for v in range(1, N + 1):
            if gcd(v, N) != 1:
                continue
            d = diamond_split(M, p, u, v)
            dinv = pow(d, -1, M)
            if W @ s.diamond(d) != s.diamond(dinv) @ W:
                ok = False
    checks["w <u><v>_N = <u^-1><v^-1>_N w"] = ok
    Winv = W.inverse()
    Up = hecke_matrix(s, f"U{p}").matrix
    Ups = s.hecke_U_star(p)
    checks["w U_p w^-1 = U_p^*"] = W @ Up @ Winv == Ups
    adj = [(Up, Ups)]
    stars = [Ups]
    ok = True
    for ell in ells:
        if M % ell == 0:
            continue
        T = hecke_matrix(s, f"T{ell}").matrix
        Ts = s.diamond(pow(ell, -1, M)) @ T
        ok = ok and (W @ T == Ts @ W)
        adj.append((T, Ts))
        stars.append(Ts)
    checks["w T_l = T_l^* w"] = ok
    for d in units:
        adj.append((s.diamond(d), s.diamond(pow(d, -1, M))))
    G = equivariant_pairing(s, adj, star=s.star(), rng=rng)
    B = G @ W @ Ups
    sa = True
    for Ts in stars + [s.diamond(d) for d in units]:
        sa = sa and (Ts.T @ B == B @ Ts)
    checks["<T^* x, y> = <x, T^* y>"] = sa
    checks["pairing perfect"] = G.is_invertible()
    rep = AtkinLehnerReport(M, p, N, HeckeData("w", W), checks)
    rep.pairing = G
    rep.twisted_gram = B
    if raise_on_failure and not rep.holds:
        bad = [k for k, v in checks.items() if not v]
        raise AtkinLehnerError(f"violated: {bad}", bad[0])
    return rep
