"""Carrier modules M_s standing in for differentials on Igusa curves of level p^s.

All carriers live over F_p, where the Cartier operator F_* is linear.
Diamonds are stored as two commuting matrices per level: the Teichmuller
lift of a fixed primitive root g mod p, and gamma = <1+p>.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..algebra import GF, ExactMatrix, mat_rank_kernel_image, span_basis
from ..semilinear import SemilinearOperator, fitting_decompose
from ..tower import CyclicPLevel


class CarrierConfigError(ValueError):
    pass


class RelationError(CarrierConfigError):
    def __init__(self, msg, failures=None):
        super().__init__(msg)
        self.failures = failures or []


def primitive_root(p: int) -> int:
    for g in range(2, p + 1):
        if all(pow(g, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)):
            return g
    return 1


def _prime_factors(n):
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def unit_coordinates(u: int, p: int, s: int):
    """(i, k) with u = omega(g)^i (1+p)^k mod p^s."""
    if u % p == 0:
        raise CarrierConfigError(f"{u} is not a unit mod {p}")
    g = primitive_root(p)
    i = next(i for i in range(p - 1) if pow(g, i, p) == u % p)
    if s <= 1:
        return i, 0
    m = p ** s
    omega = pow(g, p ** (s - 1), m)
    u1 = u * pow(omega, -i, m) % m
    return i, CyclicPLevel(p, s).log(u1)


@dataclass
class IgusaCarrier:
    """Spaces M_s for s in levels, with F_*, rho_*, rho^*, diamonds and <p>_N.

    rho_lower[s]: M_s -> M_{s-1}; rho_upper[s]: M_{s-1} -> M_s.
    ordinary[s], when given, is the designated ordinary subspace; otherwise
    the Fitting ordinary part of F_* is used.  residues[s] is an optional list
    of functionals (row vectors), one per supersingular point.
    """
    p: int
    dims: dict
    frob: dict
    teich: dict
    gamma: dict
    p_N: dict
    rho_lower: dict = field(default_factory=dict)
    rho_upper: dict = field(default_factory=dict)
    residues: dict | None = None
    ordinary: dict | None = None
    label: str = "carrier"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def F(self):
        return GF(self.p)

    @property
    def levels(self) -> list:
        return sorted(self.dims)

    @property
    def r_max(self) -> int:
        return max(self.dims)

    def require(self, s: int):
        if s not in self.dims:
            raise CarrierConfigError(f"carrier {self.label} has no level {s}")

    def zero(self, s):
        return tuple([0] * self.dims[s])

    def diamond(self, s: int, u: int) -> ExactMatrix:
        key = ("dia", s, u % self.p ** s)
        if key not in self._cache:
            self.require(s)
            i, k = unit_coordinates(u, self.p, s)
            self._cache[key] = self.teich[s].power(i) @ self.gamma[s].power(k)
        return self._cache[key]

    def diamond_inv(self, s: int, u: int) -> ExactMatrix:
        return self.diamond(s, pow(u, -1, self.p ** s))

    def diamond_sum(self, s: int, us, inverse=False) -> ExactMatrix:
        key = ("dsum", s, tuple(sorted(v % self.p ** s for v in us)), inverse)
        if key not in self._cache:
            acc = ExactMatrix.zeros(self.F, self.dims[s], self.dims[s])
            for v in us:
                acc = acc + (self.diamond_inv(s, v) if inverse else self.diamond(s, v))
            self._cache[key] = acc
        return self._cache[key]

    def p_N_power(self, s: int, e: int) -> ExactMatrix:
        key = ("pN", s, e)
        if key not in self._cache:
            M = self.p_N[s]
            self._cache[key] = M.power(e) if e >= 0 else M.inverse().power(-e)
        return self._cache[key]

    def frob_power(self, s: int, e: int) -> ExactMatrix:
        key = ("F", s, e)
        if key not in self._cache:
            self._cache[key] = self.frob[s].power(e)
        return self._cache[key]

    def frob_operator(self, s: int) -> SemilinearOperator:
        return SemilinearOperator(self.frob[s], -1)

    def rho_down(self, s: int, e: int = 1) -> ExactMatrix:
        """rho_*^e : M_s -> M_{s-e}."""
        out = ExactMatrix.identity(self.F, self.dims[s])
        for t in range(s, s - e, -1):
            if t not in self.rho_lower:
                raise CarrierConfigError(f"carrier {self.label} lacks rho_* on level {t}")
            out = self.rho_lower[t] @ out
        return out

    def rho_up(self, s: int) -> ExactMatrix:
        """rho^* : M_{s-1} -> M_s."""
        if s not in self.rho_upper:
            raise CarrierConfigError(f"carrier {self.label} lacks rho^* into level {s}")
        return self.rho_upper[s]

    # -- ordinary parts ------------------------------------------------------------
    def ordinary_basis(self, s: int) -> list:
        key = ("ord", s)
        if key not in self._cache:
            if self.ordinary and s in self.ordinary:
                basis = list(self.ordinary[s])
                _check_invertible_on(self, s, basis)
            else:
                basis = fitting_decompose(self.frob_operator(s)).ordinary_basis if self.dims[s] else []
            self._cache[key] = basis
        return self._cache[key]

    def frob_inverse_on_ordinary(self, s: int, v, e: int = 1):
        """F_*^{-e} v for v in the ordinary part."""
        basis = self.ordinary_basis(s)
        F = self.F
        if not basis:
            if any(F.canonical(x) for x in v):
                raise CarrierConfigError("vector is not in the ordinary part")
            return tuple(v)
        B = ExactMatrix.from_columns(F, basis, self.dims[s])
        key = ("Finv", s)
        if key not in self._cache:
            self._cache[key] = B.solve(self.frob[s] @ B).inverse()
        c = _coords(B, v)
        if c is None:
            raise CarrierConfigError("vector is not in the ordinary part")
        Ainv = self._cache[key]
        for _ in range(e):
            c = Ainv.apply(c)
        return B.apply(c)

    def is_ordinary(self, s: int, v) -> bool:
        basis = self.ordinary_basis(s)
        if not any(self.F.canonical(x) for x in v):
            return True
        if not basis:
            return False
        return _coords(ExactMatrix.from_columns(self.F, basis, self.dims[s]), v) is not None


def _coords(B: ExactMatrix, v):
    F = B.ring
    try:
        sol = B.solve(ExactMatrix.from_columns(F, [tuple(v)], B.rows))
    except Exception:
        return None
    c = sol.column(0)
    if B.apply(c) != tuple(F.canonical(x) for x in v):
        return None
    return c


def _check_invertible_on(c: IgusaCarrier, s: int, basis):
    F = c.F
    if not basis:
        return
    B = ExactMatrix.from_columns(F, basis, c.dims[s])
    images = [c.frob[s].apply(b) for b in basis]
    for im in images:
        if _coords(B, im) is None:
            raise CarrierConfigError(f"designated ordinary part of level {s} is not F_*-stable")
    A = B.solve(c.frob[s] @ B)
    if not A.is_invertible():
        raise CarrierConfigError(f"F_* is not invertible on the designated ordinary part of level {s}")


# -- relation checks ---------------------------------------------------------------------

def validate_relations(c: IgusaCarrier) -> list:
    """Return a list of failed relation names (empty when all hold)."""
    F = c.F
    p = c.p
    fails = []
    for s in c.levels:
        n = c.dims[s]
        I = ExactMatrix.identity(F, n)
        order = p ** (s - 1)
        if not c.gamma[s].power(order).is_identity():
            fails.append(f"gamma^(p^{s - 1}) = 1 on M_{s}")
        if not c.teich[s].power(p - 1).is_identity():
            fails.append(f"teich^(p-1) = 1 on M_{s}")
        mats = {"F": c.frob[s], "teich": c.teich[s], "gamma": c.gamma[s], "<p>_N": c.p_N[s]}
        names = list(mats)
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                A, B = mats[names[i]], mats[names[j]]
                if A @ B != B @ A:
                    fails.append(f"{names[i]} commutes with {names[j]} on M_{s}")
        if not c.p_N[s].is_invertible():
            fails.append(f"<p>_N invertible on M_{s}")
        if s - 1 in c.dims and s in c.rho_lower and s in c.rho_upper:
            lo, up = c.rho_lower[s], c.rho_upper[s]
            if not (lo @ up).is_zero():
                fails.append(f"rho_* rho^* = 0 into M_{s - 1}")
            kernel = [pow(1 + p, j * p ** (s - 2), p ** s) for j in range(p)] if s >= 2 else []
            if kernel:
                if up @ lo != c.diamond_sum(s, kernel):
                    fails.append(f"rho^* rho_* = sum of <delta> on M_{s}")
            if lo @ c.frob[s] != c.frob[s - 1] @ lo:
                fails.append(f"F commutes with rho_* on M_{s}")
            if c.frob[s] @ up != up @ c.frob[s - 1]:
                fails.append(f"F commutes with rho^* on M_{s}")
            if lo @ c.p_N[s] != c.p_N[s - 1] @ lo or c.p_N[s] @ up != up @ c.p_N[s - 1]:
                fails.append(f"<p>_N commutes with rho on M_{s}")
            for u in (primitive_root(p), 1 + p):
                if lo @ c.diamond(s, u) != c.diamond(s - 1, u) @ lo:
                    fails.append(f"rho_* <u> = <u> rho_* on M_{s}")
                if c.diamond(s, u) @ up != up @ c.diamond(s - 1, u):
                    fails.append(f"rho^* <u> = <u> rho^* on M_{s}")
        if c.residues and s in c.residues:
            for lam in c.residues[s]:
                row = ExactMatrix.from_rows(F, [lam], n)
                if row @ c.frob[s] != row:
                    fails.append(f"res(F eta) = res(eta) on M_{s}")
                for u in (primitive_root(p), 1 + p):
                    if row @ c.diamond(s, u) != row:
                        fails.append(f"res(<u> eta) = res(eta) on M_{s}")
                if s - 1 in c.residues and s in c.rho_lower:
                    lo_rows = [ExactMatrix.from_rows(F, [l2], c.dims[s - 1]) @ c.rho_lower[s]
                               for l2 in c.residues[s - 1]]
                    if row not in lo_rows:
                        fails.append(f"res(rho_* eta) = res(eta) on M_{s}")
    return list(dict.fromkeys(fails))


# -- constructions --------------------------------------------------------------------------

def _np(F, a):
    return ExactMatrix.from_numpy(F, np.asarray(a, dtype=np.int64) % F.characteristic)


def _kron(F, A: ExactMatrix, B: ExactMatrix) -> ExactMatrix:
    a = np.asarray(A.to_numpy(), dtype=np.int64)
    b = np.asarray(B.to_numpy(), dtype=np.int64)
    return _np(F, np.kron(a, b))


def _regular_shift(F, n):
    a = np.zeros((n, n), dtype=np.int64)
    for k in range(n):
        a[(k + 1) % n, k] = 1
    return _np(F, a)


def _projection(F, n_big, n_small):
    a = np.zeros((n_small, n_big), dtype=np.int64)
    for k in range(n_big):
        a[k % n_small, k] = 1
    return _np(F, a)


def _random_invertible(F, n, rng):
    while True:
        A = _np(F, [[rng.randrange(F.characteristic) for _ in range(n)] for _ in range(n)])
        if A.is_invertible():
            return A


@dataclass(frozen=True)
class SeedData:
    """Level-one data W with Teichmuller characters, F and <p>_N, plus a residue functional."""
    chars: tuple
    frob: ExactMatrix
    p_N: ExactMatrix
    residue: tuple | None = None


def random_seed(p: int, d: int, rng, with_residue: bool = True) -> SeedData:
    """Block-diagonal by character; a trivial block with F = 1 carries the residue functional."""
    F = GF(p)
    chars = []
    blocks_F, blocks_N = [], []
    if with_residue and d >= 1:
        chars.append(0)
        blocks_F.append(ExactMatrix.identity(F, 1))
        blocks_N.append(ExactMatrix.identity(F, 1))
        rest = d - 1
    else:
        rest = d
    by_char = {}
    for _ in range(rest):
        j = rng.randrange(p - 1)
        by_char[j] = by_char.get(j, 0) + 1
    for j in sorted(by_char):
        m = by_char[j]
        A = _random_invertible(F, m, rng)
        chars.extend([j] * m)
        blocks_F.append(A)
        blocks_N.append(A.power(rng.randrange(1, 4)))
    frob = ExactMatrix.block_diag(F, blocks_F) if blocks_F else ExactMatrix.zeros(F, 0, 0)
    pN = ExactMatrix.block_diag(F, blocks_N) if blocks_N else ExactMatrix.zeros(F, 0, 0)
    residue = tuple([1] + [0] * (d - 1)) if with_residue and d >= 1 else None
    return SeedData(tuple(chars), frob, pN, residue)


def free_carrier(p: int, r_max: int, seed: SeedData, nil_dim: int = 0, label="synthetic") -> IgusaCarrier:
    """M_s = W (x) F_p[Delta_1/Delta_s] (+ a nilpotent block), free of rank dim W."""
    F = GF(p)
    g = primitive_root(p)
    d = len(seed.chars)
    T_W = ExactMatrix.diag(F, [pow(g, j, p) for j in seed.chars]) if d else ExactMatrix.zeros(F, 0, 0)
    dims, frob, teich, gamma, pN = {}, {}, {}, {}, {}
    rho_lower, rho_upper, residues = {}, {}, {}
    for s in range(1, r_max + 1):
        n = p ** (s - 1)
        In = ExactMatrix.identity(F, n)
        Id = ExactMatrix.identity(F, d)
        nilJ = _np(F, np.eye(nil_dim, k=-1, dtype=np.int64)) if nil_dim else None
        Inil = ExactMatrix.identity(F, nil_dim)

        def ext(A, B=None):
            blocks = [A]
            if nil_dim:
                blocks.append(B if B is not None else Inil)
            return ExactMatrix.block_diag(F, blocks)

        dims[s] = d * n + nil_dim
        frob[s] = ext(_kron(F, seed.frob, In), nilJ)
        teich[s] = ext(_kron(F, T_W, In))
        gamma[s] = ext(_kron(F, Id, _regular_shift(F, n)))
        pN[s] = ext(_kron(F, seed.p_N, In))
        if s >= 2:
            m = p ** (s - 2)
            P = _kron(F, Id, _projection(F, n, m))
            lo = ExactMatrix.zeros(F, dims[s - 1], dims[s])
            up = ExactMatrix.zeros(F, dims[s], dims[s - 1])
            lo = _embed(F, lo, P, 0, 0)
            up = _embed(F, up, P.T, 0, 0)
            rho_lower[s], rho_upper[s] = lo, up
        if seed.residue is not None:
            lam = []
            for i in range(d):
                lam.extend([seed.residue[i]] * n)
            residues[s] = [tuple(lam + [0] * nil_dim)]
    return IgusaCarrier(p, dims, frob, teich, gamma, pN, rho_lower, rho_upper,
                        residues if seed.residue is not None else None, None, label)


def _embed(F, big: ExactMatrix, small: ExactMatrix, i0: int, j0: int) -> ExactMatrix:
    a = np.asarray(big.to_numpy(), dtype=np.int64).copy()
    b = np.asarray(small.to_numpy(), dtype=np.int64)
    a[i0:i0 + b.shape[0], j0:j0 + b.shape[1]] = b
    return _np(F, a)


def synthetic_carrier(p: int, r_max: int, d: int, rng, nil_dim: int = 0, with_residue=True) -> IgusaCarrier:
    return free_carrier(p, r_max, random_seed(p, d, rng, with_residue), nil_dim,
                        label=f"synthetic(p={p}, r={r_max}, d={d})")


def nonfree_carrier(p: int, r_max: int, d: int, rng) -> IgusaCarrier:
    """A deliberately broken carrier: gamma acts trivially on the top level."""
    c = synthetic_carrier(p, r_max, d, rng)
    s = r_max
    gamma = dict(c.gamma)
    gamma[s] = ExactMatrix.identity(c.F, c.dims[s])
    return IgusaCarrier(p, c.dims, c.frob, c.teich, gamma, c.p_N, c.rho_lower, c.rho_upper,
                        c.residues, None, label=f"non-free(p={p}, r={r_max}, d={d})")


def singular_frobenius_carrier(p: int, d: int, rng) -> IgusaCarrier:
    """Level-one carrier whose designated ordinary part is all of M_1 while F_* is singular."""
    c = synthetic_carrier(p, 1, d, rng, with_residue=False)
    F = c.F
    frob = dict(c.frob)
    frob[1] = ExactMatrix.zeros(F, c.dims[1], c.dims[1])
    ident = [tuple(1 if i == j else 0 for i in range(c.dims[1])) for j in range(c.dims[1])]
    return IgusaCarrier(p, c.dims, frob, c.teich, c.gamma, c.p_N, {}, {}, None, {1: ident},
                        label="singular-F")


def modular_carrier(p: int, N: int, d_k: dict | None = None) -> IgusaCarrier:
    """Level-one carrier from weight 3..p+1 cusp forms on Gamma_1(N).

    Block k has dimension d_k, the Teichmuller character tau^(k-2), and F_*
    given by T_p on the plus part reduced mod p and cut to its ordinary part
    (companion matrix of the unit-root factor when the lattice is not p-integral).
    """
    from ..modular import ModularSymbolSpace
    from ..modular.ordinary import _restrict, _star_subspace
    from ..algebra import QQ, charpoly, Poly
    F = GF(p)
    g = primitive_root(p)
    chars, Fblocks, Nblocks = [], [], []
    dk_out = {}
    for k in range(3, p + 2):
        s = ModularSymbolSpace(N, k)
        if s.dim == 0:
            dk_out[k] = 0
            continue
        plus = _star_subspace(s, 1)
        T = _restrict(s.hecke_T(p), plus)
        D = _restrict(s.diamond(p % N), plus) if N > 1 else ExactMatrix.identity(QQ, T.rows)
        blockF, blockN = _mod_p_ordinary(F, T, D, p)
        if blockF is None:
            f = charpoly(T)
            fp = Poly(F, [F.from_int(int(c.numerator) * pow(int(c.denominator), -1, p)) for c in f.coeffs])
            while fp.degree > 0 and F.is_zero(fp[0]):
                fp = Poly(F, fp.coeffs[1:])
            blockF = ExactMatrix.companion(fp) if fp.degree > 0 else ExactMatrix.zeros(F, 0, 0)
            blockN = ExactMatrix.identity(F, blockF.rows)
        dk_out[k] = blockF.rows
        if blockF.rows:
            chars.extend([(k - 2) % (p - 1)] * blockF.rows)
            Fblocks.append(blockF)
            Nblocks.append(blockN)
    if d_k is not None:
        for k, v in d_k.items():
            if k >= 3 and dk_out.get(k, 0) != v:
                raise CarrierConfigError(f"block {k} has dimension {dk_out.get(k)} but d_{k} = {v}")
    frob = ExactMatrix.block_diag(F, Fblocks) if Fblocks else ExactMatrix.zeros(F, 0, 0)
    pN = ExactMatrix.block_diag(F, Nblocks) if Nblocks else ExactMatrix.zeros(F, 0, 0)
    n = frob.rows
    teich = ExactMatrix.diag(F, [pow(g, j, p) for j in chars]) if n else ExactMatrix.zeros(F, 0, 0)
    carrier = IgusaCarrier(p, {1: n}, {1: frob}, {1: teich}, {1: ExactMatrix.identity(F, n)},
                           {1: pN}, label=f"modular(p={p}, N={N})")
    carrier._cache["block_dims"] = dk_out
    return carrier


def _mod_p_ordinary(F, T, D, p):
    """Reduce T and D mod p and restrict to the Fitting ordinary part of T; None if not p-integral."""
    rows = []
    for M in (T, D):
        vals = []
        for x in M.entries:
            if x.denominator % p == 0:
                return None, None
            vals.append(x.numerator * pow(x.denominator, -1, p) % p)
        rows.append(_np(F, np.array(vals, dtype=np.int64).reshape(M.rows, M.cols)))
    Tp, Dp = rows
    fit = fitting_decompose(SemilinearOperator(Tp, 0))
    if not fit.ordinary_basis:
        return ExactMatrix.zeros(F, 0, 0), ExactMatrix.zeros(F, 0, 0)
    B = ExactMatrix.from_columns(F, fit.ordinary_basis, Tp.rows)
    if Dp @ Tp != Tp @ Dp:
        return None, None
    return B.solve(Tp @ B), B.solve(Dp @ B)
