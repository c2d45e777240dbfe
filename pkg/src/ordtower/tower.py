"""Modules over A[Delta_1/Delta_r], truncated towers and Lambda-valued pairings.

Delta_1/Delta_r is cyclic of order p^(r-1), generated by the image gamma of
1+p.  A module at level r is a space with the matrix of gamma; a group-ring
element is stored as its coefficient vector (c_0, ..., c_{n-1}) on
gamma^0, ..., gamma^{n-1}.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (AlgebraError, ExactMatrix, FiniteField, PAdicTruncation,
                      mat_rank_kernel_image, rref)


class TowerError(AlgebraError):
    pass


class HypothesisError(TowerError):
    """Raised when an operation needs hypotheses that were not verified."""


class PairingCompatibilityError(TowerError):
    def __init__(self, msg, violation=None):
        super().__init__(msg)
        self.violation = violation


@dataclass(frozen=True)
class CyclicPLevel:
    p: int
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise TowerError("level must be at least 1")

    @property
    def order(self) -> int:
        return self.p ** (self.r - 1)

    def unit(self, k: int) -> int:
        """The unit (1+p)^k mod p^r represented by gamma^k."""
        return pow(1 + self.p, k, self.p ** self.r)

    def log(self, u: int) -> int:
        """k with (1+p)^k = u mod p^r, for u = 1 mod p."""
        mod = self.p ** self.r
        u %= mod
        for k in range(self.order):
            if self.unit(k) == u:
                return k
        raise TowerError(f"{u} is not in Delta_1 mod {mod}")


def _base_field(ring):
    if isinstance(ring, FiniteField):
        return ring
    if isinstance(ring, PAdicTruncation) or hasattr(ring, "residue_field"):
        return ring.residue_field()
    raise TowerError(f"unsupported base ring {ring}")


@dataclass(frozen=True)
class GroupRingModule:
    ring: object
    level: CyclicPLevel
    gen: ExactMatrix

    def __post_init__(self):
        if self.gen.rows != self.gen.cols:
            raise TowerError("generator action must be square")
        if not self.gen.power(self.level.order).is_identity():
            raise TowerError("generator action does not have order dividing p^(r-1)")

    @property
    def dim(self) -> int:
        return self.gen.rows

    def act(self, k: int) -> ExactMatrix:
        return self.gen.power(k % self.level.order)

    def act_group_ring(self, elem) -> ExactMatrix:
        """Matrix of a group-ring element sum c_k gamma^k."""
        R = self.ring
        out = ExactMatrix.zeros(R, self.dim, self.dim)
        g = ExactMatrix.identity(R, self.dim)
        for c in elem:
            if not R.is_zero(c):
                out = out + g.scale(c)
            g = g @ self.gen
        return out

    def reduce(self):
        if self.ring.is_field:
            return self
        return GroupRingModule(_base_field(self.ring), self.level, self.gen.reduce_to_residue())


def regular_module(F, p: int, r: int, d: int = 1) -> GroupRingModule:
    level = CyclicPLevel(p, r)
    return GroupRingModule(F, level, regular_gen(F, level.order, d))


def regular_gen(F, n: int, d: int) -> ExactMatrix:
    """gamma on A[Z/n]^d in the basis gamma^k e_i, index i*n + k."""
    a = np.zeros((n * d, n * d), dtype=np.int64)
    for i in range(d):
        for k in range(n):
            a[i * n + (k + 1) % n, i * n + k] = 1
    return _mat(F, a)


def _mat(F, a):
    if isinstance(F, FiniteField):
        return ExactMatrix.from_numpy(F, a)
    return ExactMatrix.from_rows(F, a.tolist(), a.shape[1])


@dataclass(frozen=True)
class FreenessResult:
    free: bool
    rank: int | None
    kernel_dims: tuple


def is_free_of_rank(m: GroupRingModule) -> FreenessResult:
    """Jordan-block test: free of rank d iff dim ker (gamma-1)^i = d*i for i <= p^(r-1)."""
    F = m.ring
    if getattr(F, "characteristic", 0) == 0:
        raise TowerError("freeness test needs a base of characteristic p")
    m = m.reduce()
    F = m.ring
    n = m.level.order
    N = m.gen - ExactMatrix.identity(F, m.dim)
    dims = [0]
    P = ExactMatrix.identity(F, m.dim)
    for _ in range(n):
        P = P @ N
        dims.append(m.dim - P.rank())
    if m.dim % n:
        return FreenessResult(False, None, tuple(dims))
    d = m.dim // n
    ok = all(dims[i] == d * i for i in range(n + 1))
    return FreenessResult(ok, d if ok else None, tuple(dims))


def group_ring_mul(F, a, b):
    n = len(a)
    out = [F.zero] * n
    for i, x in enumerate(a):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b):
            if not F.is_zero(y):
                out[(i + j) % n] = F.add(out[(i + j) % n], F.mul(x, y))
    return out


def group_ring_project(F, a, n_small: int):
    out = [F.zero] * n_small
    for k, c in enumerate(a):
        out[k % n_small] = F.add(out[k % n_small], c)
    return out


def augmentation(F, a):
    acc = F.zero
    for c in a:
        acc = F.add(acc, c)
    return acc


def group_ring_matrix(F, n: int, X) -> ExactMatrix:
    """A-linear matrix of a d x d matrix X over A[Z/n] acting on A[Z/n]^d."""
    d = len(X)
    a = [[F.zero] * (n * d) for _ in range(n * d)]
    for i in range(d):
        for j in range(d):
            elem = X[i][j]
            for k in range(n):
                for t, c in enumerate(elem):
                    if not F.is_zero(c):
                        a[i * n + (k + t) % n][j * n + k] = F.add(a[i * n + (k + t) % n][j * n + k], c)
    return ExactMatrix.from_rows(F, a, n * d)


def projection_matrix(F, n_big: int, n_small: int, d: int) -> ExactMatrix:
    """Canonical A[Z/n_big]^d -> A[Z/n_small]^d."""
    a = np.zeros((n_small * d, n_big * d), dtype=np.int64)
    for i in range(d):
        for k in range(n_big):
            a[i * n_small + k % n_small, i * n_big + k] = 1
    return _mat(F, a)


@dataclass(frozen=True)
class TruncatedTower:
    """Levels 1..r_max with adjacent transitions rho_{r,r-1}: M_r -> M_{r-1}.

    `synthetic` marks towers whose base ring is the same at every level.
    """

    p: int
    modules: tuple
    transitions: tuple  # transitions[i] : modules[i+1] -> modules[i]
    operators: dict = field(default_factory=dict)
    synthetic: bool = True

    def __post_init__(self):
        if len(self.transitions) != len(self.modules) - 1:
            raise TowerError("need one transition per adjacent pair of levels")
        for i, M in enumerate(self.modules):
            if M.level.r != i + 1 or M.level.p != self.p:
                raise TowerError(f"module {i} has level {M.level}, expected r={i + 1}")
        for i, T in enumerate(self.transitions):
            src, dst = self.modules[i + 1], self.modules[i]
            if T.shape != (dst.dim, src.dim):
                raise TowerError(f"transition {i + 2}->{i + 1} has shape {T.shape}")
            if not (T @ src.gen == dst.gen @ T):
                raise TowerError(f"transition {i + 2}->{i + 1} is not gamma-equivariant")

    @property
    def r_max(self) -> int:
        return len(self.modules)

    @property
    def ring(self):
        return self.modules[0].ring

    def module(self, r: int) -> GroupRingModule:
        return self.modules[r - 1]

    def rho(self, r: int, s: int) -> ExactMatrix:
        if s > r:
            raise TowerError("rho_{r,s} needs r >= s")
        M = ExactMatrix.identity(self.ring, self.module(r).dim)
        for k in range(r, s, -1):
            M = self.transitions[k - 2] @ M
        return M


@dataclass
class LevelReport:
    r: int
    freehyp: bool
    rank: int | None
    surjhyp: bool
    detail: str = ""


@dataclass
class HypothesisReport:
    levels: list
    d: int | None
    synthetic: bool

    @property
    def holds(self) -> bool:
        return self.d is not None and all(l.freehyp and l.surjhyp for l in self.levels)

    @property
    def first_failure(self):
        for l in self.levels:
            if not (l.freehyp and l.surjhyp):
                return l.r
        return None

    def as_dict(self):
        return {
            "holds": self.holds, "d": self.d, "synthetic": self.synthetic,
            "first_failure": self.first_failure,
            "levels": [{"r": l.r, "freehyp": l.freehyp, "rank": l.rank,
                        "surjhyp": l.surjhyp, "detail": l.detail} for l in self.levels],
        }


def _validate_ideals(t: TruncatedTower, ideals):
    if ideals is None:
        ideals = ["maximal"] * t.r_max
    ideals = list(ideals)
    if len(ideals) != t.r_max or any(i not in ("zero", "maximal") for i in ideals):
        raise TowerError("ideals must list 'zero' or 'maximal' for each level")
    R = t.ring
    if R.is_field:
        return ideals
    for a, b in zip(ideals, ideals[1:]):
        if a == "maximal" and b == "zero":
            raise TowerError("ideal chain is malformed: I_r must map into I_{r+1}")
    if "zero" in ideals:
        raise TowerError("zero ideal over a non-field base needs exact module theory; "
                         "only the maximal ideal is supported")
    return ideals


def check_tower_hypotheses(t: TruncatedTower, ideals=None) -> HypothesisReport:
    """Per-level freehyp (M_r/I_r free of a common rank) and surjhyp (reduced transitions onto)."""
    _validate_ideals(t, ideals)
    levels = []
    d = None
    common = True
    for r in range(1, t.r_max + 1):
        M = t.module(r).reduce()
        fr = is_free_of_rank(M)
        free = fr.free
        detail = ""
        if free:
            if d is None:
                d = fr.rank
            elif fr.rank != d:
                free = False
                common = False
                detail = f"rank {fr.rank} differs from {d}"
        else:
            detail = f"kernel dims {list(fr.kernel_dims)}"
        surj = True
        if r >= 2:
            T = t.transitions[r - 2]
            if not T.ring.is_field:
                T = T.reduce_to_residue()
            if T.rank() != t.module(r - 1).dim:
                surj = False
                detail = (detail + "; " if detail else "") + f"rho_{{{r},{r - 1}}} not surjective"
        levels.append(LevelReport(r, free, fr.rank if free else None, surj, detail))
    if not common or any(not l.freehyp for l in levels):
        d_out = None
    else:
        d_out = d
    return HypothesisReport(levels, d_out, t.synthetic)


def _quotient_complement(F, image_vectors, dim):
    """Indices of unit vectors spanning a complement of the given span."""
    if not image_vectors:
        return list(range(dim))
    red, piv = rref(ExactMatrix.from_rows(F, image_vectors, dim))
    pivset = set(piv)
    return [i for i in range(dim) if i not in pivset]


@dataclass
class ControlResult:
    holds: bool
    witness: ExactMatrix
    kernel_dim: int
    cokernel_dim: int


def _require(t: TruncatedTower, report):
    report = report or check_tower_hypotheses(t)
    if not report.holds:
        raise HypothesisError(f"tower hypotheses fail at level {report.first_failure}")
    return report


def control_isomorphism(t: TruncatedTower, r: int, s: int, report=None) -> ControlResult:
    """M_r tensor A[Delta_1/Delta_s] -> M_s; the source is M_r / (gamma^(p^(s-1)) - 1) M_r."""
    _require(t, report)
    if not 1 <= s <= r <= t.r_max:
        raise TowerError("need 1 <= s <= r <= r_max")
    Mr = t.module(r).reduce()
    F = Mr.ring
    rho = t.rho(r, s)
    if not rho.ring.is_field:
        rho = rho.reduce_to_residue()
    Ns = Mr.gen.power(p_pow(t.p, s - 1)) - ExactMatrix.identity(F, Mr.dim)
    img = mat_rank_kernel_image(Ns).image
    comp = _quotient_complement(F, [list(v) for v in img], Mr.dim)
    witness = rho.submatrix(range(rho.rows), comp) if comp else ExactMatrix.zeros(F, rho.rows, 0)
    # well-definedness: rho kills the relations
    if not (rho @ Ns).is_zero():
        return ControlResult(False, witness, -1, -1)
    rk = witness.rank()
    ker = witness.cols - rk
    coker = witness.rows - rk
    return ControlResult(ker == 0 and coker == 0, witness, ker, coker)


def p_pow(p, k):
    return p ** k


@dataclass
class TruncatedLimit:
    module: GroupRingModule
    basis: list          # e_1..e_d in M_{r_max}
    images: dict         # level s -> list of images of e_i in M_s
    specialization_ok: bool


def free_basis(M: GroupRingModule) -> list:
    """Vectors whose images span M/(gamma-1)M; by Nakayama they generate M freely."""
    M = M.reduce()
    F = M.ring
    N = M.gen - ExactMatrix.identity(F, M.dim)
    img = mat_rank_kernel_image(N).image
    comp = _quotient_complement(F, [list(v) for v in img], M.dim)
    out = []
    for i in comp:
        v = [0] * M.dim
        v[i] = 1
        out.append(tuple(v))
    return out


def spans_freely(M: GroupRingModule, basis) -> bool:
    """Do the gamma^k b_i form a basis of M?"""
    M = M.reduce()
    F = M.ring
    vecs = []
    for b in basis:
        v = tuple(b)
        for _ in range(M.level.order):
            vecs.append(v)
            v = M.gen.apply(v)
    if len(vecs) != M.dim:
        return False
    return ExactMatrix.from_columns(F, vecs).is_invertible()


def truncated_limit(t: TruncatedTower, report=None) -> TruncatedLimit:
    report = _require(t, report)
    top = t.module(t.r_max).reduce()
    basis = free_basis(top)
    if len(basis) != report.d:
        raise TowerError("coinvariant dimension differs from the rank")
    images = {}
    ok = spans_freely(top, basis)
    for s in range(1, t.r_max + 1):
        rho = t.rho(t.r_max, s)
        if not rho.ring.is_field:
            rho = rho.reduce_to_residue()
        images[s] = [rho.apply(b) for b in basis]
        ok = ok and spans_freely(t.module(s), images[s])
        ok = ok and control_isomorphism(t, t.r_max, s, report).holds
    return TruncatedLimit(top, basis, images, ok)


# pairings --------------------------------------------------------------

@dataclass(frozen=True)
class PairingFamily:
    """Per-level Gram matrices: <m, m'>_r = m^T G_r m'."""
    grams: tuple

    def pair(self, r, x, y):
        G = self.grams[r - 1]
        F = G.ring
        gy = G.apply(y)
        acc = F.zero
        for a, b in zip(x, gy):
            acc = F.add(acc, F.mul(a, b))
        return acc


def _unit_vectors(F, n):
    for i in range(n):
        v = [F.zero] * n
        v[i] = F.one
        yield i, tuple(v)


def verify_pairing_compat(pf: PairingFamily, t: TruncatedTower, t2: TruncatedTower,
                          collect: bool = False):
    """Check <rho m, rho' m'>_s = sum_{delta in Delta_s/Delta_r} <m, delta^{-1} m'>_r on unit vectors.

    Also checks self-adjointness of gamma and perfectness per level.  With
    collect=True returns (ok, violations) instead of a bare boolean.
    """
    violations = []
    F = t.ring
    for r in range(1, t.r_max + 1):
        G = pf.grams[r - 1]
        M, M2 = t.module(r), t2.module(r)
        if G.shape != (M.dim, M2.dim) or not G.is_invertible():
            violations.append(("perfect", r, None, None))
            continue
        if not (M.gen.T @ G == G @ M2.gen):
            violations.append(("self-adjoint", r, None, None))
    if violations:
        return (False, violations) if collect else False
    for r in range(1, t.r_max + 1):
        M2 = t2.module(r)
        n = M2.level.order
        for s in range(1, r + 1):
            rho, rho2 = t.rho(r, s), t2.rho(r, s)
            step = p_pow(t.p, s - 1)
            # S = sum over the subgroup gamma^{step * j}, inverses included
            S = ExactMatrix.zeros(F, M2.dim, M2.dim)
            for j in range(n // step):
                S = S + M2.act(-step * j)
            lhs = rho.T @ pf.grams[s - 1] @ rho2
            rhs = pf.grams[r - 1] @ S
            if lhs != rhs:
                diff = (lhs - rhs).to_lists()
                i, j = next((i, j) for i in range(len(diff)) for j in range(len(diff[0]))
                            if not F.is_zero(diff[i][j]))
                violations.append(("compat", r, s, (i, j)))
    ok = not violations
    return (ok, violations) if collect else ok


@dataclass
class LambdaPairing:
    r: int
    gram: list            # d x d matrix of group-ring elements
    perfect: bool
    augmentation_gram: ExactMatrix


def pairing_value(pf: PairingFamily, t2: TruncatedTower, r: int, x, y) -> list:
    """(x, y)_r = sum_k <x, gamma^{-k} y>_r gamma^k."""
    M2 = t2.module(r)
    n = M2.level.order
    out = []
    for k in range(n):
        out.append(pf.pair(r, x, M2.act(-k).apply(y)))
    return out


def build_lambda_pairing(t: TruncatedTower, t2: TruncatedTower, pf: PairingFamily) -> list:
    ok, violations = verify_pairing_compat(pf, t, t2, collect=True)
    if not ok:
        raise PairingCompatibilityError(f"pairing family violates compatibility: {violations[0]}",
                                        violations[0])
    rep1, rep2 = _require(t, None), _require(t2, None)
    F = t.ring
    out = []
    for r in range(1, t.r_max + 1):
        B1 = free_basis(t.module(r))
        B2 = free_basis(t2.module(r))
        gram = [[pairing_value(pf, t2, r, x, y) for y in B2] for x in B1]
        aug = ExactMatrix.from_rows(F, [[augmentation(F, g) for g in row] for row in gram], len(B2))
        perfect = len(B1) == len(B2) and aug.is_invertible()
        out.append(LambdaPairing(r, gram, perfect, aug))
    return out


def check_lambda_bilinear(pf: PairingFamily, t: TruncatedTower, t2: TruncatedTower, r: int, x, y) -> bool:
    """(gamma x, y) = gamma (x, y) = (x, gamma y)."""
    F = t.ring
    M, M2 = t.module(r), t2.module(r)
    n = M.level.order
    base = pairing_value(pf, t2, r, x, y)
    shifted = [base[(k - 1) % n] for k in range(n)]
    return (pairing_value(pf, t2, r, M.gen.apply(x), y) == shifted
            and pairing_value(pf, t2, r, x, M2.gen.apply(y)) == shifted)


def check_specialization(pf: PairingFamily, t: TruncatedTower, t2: TruncatedTower, r: int, s: int, x, y) -> bool:
    """(rho x, rho' y)_s equals the image of (x, y)_r in A[Delta_1/Delta_s]."""
    F = t.ring
    big = pairing_value(pf, t2, r, x, y)
    small = pairing_value(pf, t2, s, t.rho(r, s).apply(x), t2.rho(r, s).apply(y))
    return group_ring_project(F, big, t.module(s).level.order) == small


# synthetic constructions ---------------------------------------------------

def random_group_ring_unit_matrix(F, n: int, d: int, rng):
    """d x d matrix over A[Z/n] whose augmentation is invertible."""
    while True:
        X = [[[F.random_element(rng) for _ in range(n)] for _ in range(d)] for _ in range(d)]
        aug = ExactMatrix.from_rows(F, [[augmentation(F, X[i][j]) for j in range(d)] for i in range(d)], d)
        if aug.is_invertible():
            return X


def standard_tower(F, p: int, r_max: int, d: int) -> TruncatedTower:
    mods = tuple(regular_module(F, p, r, d) for r in range(1, r_max + 1))
    trans = tuple(projection_matrix(F, p ** r, p ** (r - 1), d) for r in range(1, r_max))
    return TruncatedTower(p, mods, trans)


def trace_form_family(F, t: TruncatedTower, mix=None) -> PairingFamily:
    """<x, y>_r = sum_{i,j} C_ij * (coefficient of 1 in x_i y_j) on a standard tower."""
    d = t.module(1).dim
    C = mix if mix is not None else ExactMatrix.identity(F, d)
    grams = []
    for r in range(1, t.r_max + 1):
        n = t.module(r).level.order
        a = [[F.zero] * (n * d) for _ in range(n * d)]
        for i in range(d):
            for j in range(d):
                c = C[i, j]
                if F.is_zero(c):
                    continue
                for k in range(n):
                    a[i * n + k][j * n + (-k) % n] = c
        grams.append(ExactMatrix.from_rows(F, a, n * d))
    return PairingFamily(tuple(grams))


def transport(t: TruncatedTower, changes) -> TruncatedTower:
    """Apply level-wise gamma-equivariant isomorphisms g_r: M_r -> M_r."""
    mods = []
    for M, g in zip(t.modules, changes):
        mods.append(GroupRingModule(M.ring, M.level, g @ M.gen @ g.inverse()))
    trans = []
    for i, T in enumerate(t.transitions):
        trans.append(changes[i] @ T @ changes[i + 1].inverse())
    return TruncatedTower(t.p, tuple(mods), tuple(trans), dict(t.operators), t.synthetic)


def transport_pairing(pf: PairingFamily, g, h) -> PairingFamily:
    grams = [gi.inverse().T @ G @ hi.inverse() for G, gi, hi in zip(pf.grams, g, h)]
    return PairingFamily(tuple(grams))


def random_changes(F, t: TruncatedTower, rng):
    d = t.module(1).dim
    out = []
    for M in t.modules:
        n = M.level.order
        out.append(group_ring_matrix(F, n, random_group_ring_unit_matrix(F, n, d, rng)))
    return out


def random_free_tower(F, p: int, r_max: int, d: int, rng) -> TruncatedTower:
    t = standard_tower(F, p, r_max, d)
    return transport(t, random_changes(F, t, rng))


def random_dual_pair(F, p: int, r_max: int, d: int, rng):
    """Two random free towers with a compatible perfect pairing family."""
    t0 = standard_tower(F, p, r_max, d)
    while True:
        mix = ExactMatrix(F, d, d, [F.random_element(rng) for _ in range(d * d)])
        if mix.is_invertible():
            break
    pf0 = trace_form_family(F, t0, mix)
    g, h = random_changes(F, t0, rng), random_changes(F, t0, rng)
    return transport(t0, g), transport(t0, h), transport_pairing(pf0, g, h)


def coinvariant_map(M: GroupRingModule, d: int) -> ExactMatrix:
    """An equivariant map M -> A^d (trivial action) of maximal rank <= d."""
    F = M.ring
    N = M.gen - ExactMatrix.identity(F, M.dim)
    rows = mat_rank_kernel_image(N.T).kernel[:d]
    while len(rows) < d:
        rows.append(tuple([F.zero] * M.dim))
    return ExactMatrix.from_rows(F, rows, M.dim)


def broken_fixtures(F, p: int, r_max: int, d: int, rng) -> list:
    """(name, tower, expected failing level) triples violating one hypothesis each."""
    out = []
    base = standard_tower(F, p, r_max, d)
    if r_max >= 2:
        # rank-dropping transition into level r_max - 1
        lvl = r_max
        n_small = p ** (lvl - 2)
        X = [[[F.zero] * n_small for _ in range(d)] for _ in range(d)]
        for i in range(d - 1):
            X[i][i][0] = F.one
        X[d - 1][d - 1][1 % n_small] = F.one
        X[d - 1][d - 1][0] = F.neg(F.one) if n_small > 1 else F.zero
        kill = group_ring_matrix(F, n_small, X)
        trans = list(base.transitions)
        trans[lvl - 2] = kill @ trans[lvl - 2]
        out.append(("rank-dropping transition", TruncatedTower(p, base.modules, tuple(trans)), lvl))
        # non-free module at level 2: the last regular summand is replaced by a
        # Jordan block of size p-1 plus a trivial line
        n = p
        a = np.array(regular_gen(F, n, d).to_lists(), dtype=np.int64)
        i0 = (d - 1) * n
        a[i0:i0 + n, i0:i0 + n] = 0
        for k in range(n - 1):
            a[i0 + k, i0 + k] = 1
            if k + 1 < n - 1:
                a[i0 + k + 1, i0 + k] = 1
        a[i0 + n - 1, i0 + n - 1] = 1
        bad = GroupRingModule(F, CyclicPLevel(p, 2), _mat(F, a))
        mods = list(base.modules)
        mods[1] = bad
        trans = list(base.transitions)
        trans[0] = coinvariant_map(bad, d)
        if r_max >= 3:
            trans[1] = ExactMatrix.zeros(F, bad.dim, mods[2].dim)
        out.append(("non-free level", TruncatedTower(p, tuple(mods), tuple(trans)), 2))
    # rank changing with the level: level r_max has rank d+1
    if r_max == 1:
        return out
    mods = list(base.modules)
    mods[-1] = regular_module(F, p, r_max, d + 1)
    trans = list(base.transitions)
    if r_max >= 2:
        trans[-1] = projection_matrix(F, p ** (r_max - 1), p ** (r_max - 2), d + 1).submatrix(
            range(d * p ** (r_max - 2)), range((d + 1) * p ** (r_max - 1)))
    out.append(("rank varies with level", TruncatedTower(p, tuple(mods), tuple(trans)), r_max))
    return out
