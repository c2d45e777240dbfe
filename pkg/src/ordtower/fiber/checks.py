"""Ordinary contraction to the good components and the Frobenius splitting of H^1."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..algebra import ExactMatrix, span_basis
from ..semilinear import SemilinearOperator, fitting_decompose, semilinear_dual
from ..tower import CyclicPLevel, GroupRingModule, is_free_of_rank
from .carrier import IgusaCarrier, RelationError, primitive_root, validate_relations
from .sections import (from_vector, gamma_map, operator_matrix, pullback_i_star, residue_sum,
                       to_vector, up_apply, upstar_apply)


def _rank(F, vecs, n):
    return len(span_basis(F, vecs, n)) if vecs else 0


@dataclass
class ContractionReport:
    r: int
    relations: list
    ordinary_dim: int
    rank: int | None
    e_dim: int
    e_star_dim: int
    iso_infinity: bool
    iso_zero: bool
    inverse_infinity: bool
    inverse_zero: bool

    @property
    def holds(self) -> bool:
        return (not self.relations and self.iso_infinity and self.iso_zero
                and self.inverse_infinity and self.inverse_zero)

    def as_dict(self):
        return {"r": self.r, "relations": list(self.relations), "ordinary_dim": self.ordinary_dim,
                "rank": self.rank, "e_dim": self.e_dim, "e_star_dim": self.e_star_dim,
                "iso_infinity": self.iso_infinity, "iso_zero": self.iso_zero,
                "inverse_infinity": self.inverse_infinity, "inverse_zero": self.inverse_zero,
                "holds": self.holds}


def _good_projection_iso(c, r, image, star, ord_basis):
    """Projection onto the good component restricted to image: injective with image M_r^ord."""
    F = c.F
    proj = [pullback_i_star(from_vector(c, r, v), star) for v in image]
    n = c.dims[r]
    if _rank(F, proj, n) != len(image):
        return False
    if len(image) != len(ord_basis):
        return False
    return _rank(F, list(proj) + list(ord_basis), n) == len(ord_basis)


def ordinary_contraction_check(c: IgusaCarrier, r: int | None = None) -> ContractionReport:
    """e_r and e_r^* of the product space map isomorphically onto M_r^ord via the good components."""
    r = c.r_max if r is None else r
    fails = validate_relations(c)
    if fails:
        raise RelationError("carrier relations fail: " + "; ".join(fails), fails)
    ord_basis = c.ordinary_basis(r)      # raises if F_* is not invertible on a designated part
    out = {}
    for star, op in (("inf", up_apply), ("0", upstar_apply)):
        U = operator_matrix(c, r, op)
        image = fitting_decompose(SemilinearOperator(U, 0)).ordinary_basis
        iso = _good_projection_iso(c, r, image, star, ord_basis)
        # gamma o i^* = id on the image and i^* o gamma = id on M_r^ord
        inv = True
        for v in image:
            eta = from_vector(c, r, v)
            back = gamma_map(c, star, pullback_i_star(eta, star), r)
            if to_vector(back) != tuple(v):
                inv = False
                break
        for nu in ord_basis:
            if pullback_i_star(gamma_map(c, star, nu, r), star) != tuple(nu):
                inv = False
                break
        out[star] = (len(image), iso, inv)
    group = c.p ** (r - 1)
    d = len(ord_basis)
    return ContractionReport(r, [], d, d // group if d % group == 0 else None,
                             out["inf"][0], out["0"][0], out["inf"][1], out["0"][1],
                             out["inf"][2], out["0"][2])


@dataclass
class SplittingReport:
    r: int
    ranks: tuple
    free: tuple
    kernel_dims: tuple
    splitting_equivariant: bool
    splitting_is_section: bool
    frobenius_kills_sub: bool
    relations: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        d = self.ranks[0]
        return (all(self.free) and d is not None and self.ranks == (d, 2 * d, d)
                and self.splitting_equivariant and self.splitting_is_section
                and self.frobenius_kills_sub)

    def as_dict(self):
        return {"r": self.r, "ranks": list(self.ranks), "free": list(self.free),
                "kernel_dims": [list(k) for k in self.kernel_dims],
                "splitting_equivariant": self.splitting_equivariant,
                "splitting_is_section": self.splitting_is_section,
                "frobenius_kills_sub": self.frobenius_kills_sub,
                "relations": list(self.relations), "holds": self.holds}


def _restrict(M: ExactMatrix, B: ExactMatrix) -> ExactMatrix:
    return B.solve(M @ B)


def _block(F, A, B, C, D):
    top = A.hstack(B)
    bot = C.hstack(D)
    return top.vstack(bot)


def frobenius_splitting_check(c: IgusaCarrier, r: int | None = None, rng=None) -> SplittingReport:
    """Split exact sequence 0 -> H0 -> E -> H1 -> 0 with E free of rank 2d.

    H0 is M_r^ord with the diamond action, H1 its contragredient with F^* the
    dual of F_*, and E carries F_E = [[0, B], [0, F1]] for an equivariant B.
    The Frobenius splitting is h -> F_E(0, F1^{-1} h).
    """
    import random
    rng = rng or random.Random(0)
    r = c.r_max if r is None else r
    F = c.F
    p = c.p
    relations = validate_relations(c)
    basis = c.ordinary_basis(r)
    d0 = len(basis)
    if not d0:
        return SplittingReport(r, (0, 0, 0), (True, True, True), ((0,), (0,), (0,)), True, True, True,
                               relations)
    Bm = ExactMatrix.from_columns(F, basis, c.dims[r])
    g = primitive_root(p)
    T0 = _restrict(c.diamond(r, g), Bm)
    G0 = _restrict(c.gamma[r], Bm)
    F0 = _restrict(c.frob[r], Bm)
    # contragredient: u acts by the transpose of <u^-1>, F^* is the dual of V
    T1 = T0.inverse().T
    G1 = G0.inverse().T
    F1 = semilinear_dual(SemilinearOperator(F0, -1), ExactMatrix.identity(F, d0)).matrix
    # equivariant B : H1 -> H0 by averaging a random map over the group
    R = ExactMatrix.from_rows(F, [[rng.randrange(p) for _ in range(d0)] for _ in range(d0)], d0)
    Bmap = ExactMatrix.zeros(F, d0, d0)
    for i in range(p - 1):
        for k in range(p ** (r - 1)):
            D0 = T0.power(i) @ G0.power(k)
            D1 = T1.power(i) @ G1.power(k)
            Bmap = Bmap + D0 @ R @ D1.inverse()
    Z = ExactMatrix.zeros(F, d0, d0)
    FE = _block(F, Z, Bmap, Z, F1)
    TE = _block(F, T0, Z, Z, T1)
    GE = _block(F, G0, Z, Z, G1)
    kills = (FE @ _block(F, ExactMatrix.identity(F, d0), Z, Z, Z)).is_zero()
    # splitting s(h) = F_E(0, F1^{-1} h) = (B F1^{-1} h, h)
    S = (Bmap @ F1.inverse()).vstack(ExactMatrix.identity(F, d0))
    proj = Z.hstack(ExactMatrix.identity(F, d0))
    is_section = (proj @ S).is_identity()
    equivariant = (TE @ S == S @ T1) and (GE @ S == S @ G1) and (FE @ S == S @ F1)
    level = CyclicPLevel(p, r)
    results = [is_free_of_rank(GroupRingModule(F, level, M)) for M in (G0, GE, G1)]
    ranks = tuple(res.rank for res in results)
    return SplittingReport(r, ranks, tuple(res.free for res in results),
                           tuple(res.kernel_dims for res in results), equivariant, is_section,
                           kills, relations)


@dataclass
class ResidueCheck:
    status: str          # "pass", "fail" or "skipped"
    sums: list | None
    relation_failures: list

    @property
    def holds(self) -> bool:
        return self.status != "fail"

    def as_dict(self):
        return {"status": self.status, "sums": self.sums, "relation_failures": list(self.relation_failures)}


def residue_sum_check(c: IgusaCarrier, star: str, nu, r: int | None = None) -> ResidueCheck:
    """Total residue of gamma^star(nu) at every crossing vanishes; skipped without functionals."""
    if not c.residues:
        return ResidueCheck("skipped", None, [])
    r = c.r_max if r is None else r
    fails = [f for f in validate_relations(c) if f.startswith("res(")]
    sums = residue_sum(c, gamma_map(c, star, nu, r))
    ok = not fails and all(x == 0 for x in sums)
    return ResidueCheck("pass" if ok else "fail", list(sums), fails)
