"""Cartier operator on curve models, residues, Hasse-Witt invariants and Nakajima checks."""
from __future__ import annotations

from dataclasses import dataclass

from ..algebra import AlgebraError, ExactMatrix, mat_rank_kernel_image
from ..semilinear import SemilinearOperator, fitting_decompose
from ..tower import CyclicPLevel, GroupRingModule, is_free_of_rank
from .local import local_cartier
from .model import (INF, ArtinSchreierCurve, CurveModel, DivisorData, MeroDifferential, Place,
                    ProjectiveLine, fiber)


class InsufficientPrecisionError(AlgebraError):
    pass


class CartierMismatchError(AlgebraError):
    pass


class UnramifiedCoverError(ValueError):
    pass


def cartier_apply(c: CurveModel, w: MeroDifferential, check_places=None, prec: int = 40) -> MeroDifferential:
    """V(w) by the global rewrite; optionally verified against local expansions."""
    if w.curve is not c:
        raise AlgebraError("differential lives on a different curve")
    out = c.cartier(w)
    for pl in check_places or ():
        a = c.expand(out, pl, prec)
        b = local_cartier(c.expand(w, pl, prec))
        top = min(a.prec, b.prec)
        if a.truncate(top) != b.truncate(top):
            raise CartierMismatchError(f"global and local Cartier disagree at {pl}")
    return out


def residue_at(w: MeroDifferential, place: Place, prec: int = 20):
    c = w.curve
    while prec <= 4000:
        s = c.expand(w, place, prec)
        if s.prec > -1:
            return s[-1]
        prec *= 2
    raise InsufficientPrecisionError(f"could not reach the residue coefficient at {place}")


def pole_places(w: MeroDifferential) -> list:
    """Rational places where w may have a pole.

    Raises when a candidate fiber has places that are not rational over the base field.
    """
    c = w.curve
    xs = set()
    for g in w.coeffs:
        if g.is_zero():
            continue
        for a in c.F.elements():
            if c.F.is_zero(g.den(a)):
                xs.add(a)
    if isinstance(c, ArtinSchreierCurve):
        xs.update(a for a, _ in c.poles)
    if c.variant == "elliptic":
        xs.update(pl.x for pl in c.rational_places() if pl.ramified and not pl.is_infinite)
    out = []
    for a in sorted(xs, key=repr) + [None]:
        places = c.places_over(a)
        ram = any(pl.ramified for pl in places)
        full = c.rank if c.variant == "artin-schreier" else (1 if c.variant == "projective-line" else 2)
        if not ram and len(places) != full:
            raise InsufficientPrecisionError(f"fiber over {a} is not split over {c.F}")
        out.extend(places)
    return out


def residue_sum(w: MeroDifferential):
    F = w.curve.F
    total = F.zero
    for pl in pole_places(w):
        total = F.add(total, residue_at(w, pl))
    return total


def cartier_matrix(space) -> ExactMatrix:
    """Columns are coordinates of V(b_i); raises if V leaves the space."""
    c = space.curve
    cols = []
    for b in space.basis():
        v = space.coords(c.cartier(b))
        if v is None:
            raise CartierMismatchError("Cartier image left the space")
        cols.append(v)
    return ExactMatrix.from_columns(c.F, cols, space.dim)


@dataclass
class HasseWittResult:
    matrix: ExactMatrix
    gamma: int
    basis: list


def hasse_witt(c: CurveModel) -> HasseWittResult:
    """Matrix of V on H^0(Omega^1) and the p-rank (Fitting ordinary dimension)."""
    space = c.differential_space(DivisorData())
    M = cartier_matrix(space)
    gamma = fitting_decompose(SemilinearOperator(M, -1)).ordinary_dim if space.dim else 0
    return HasseWittResult(M, gamma, space.basis())


def pole_improvement_check(c: CurveModel, d: DivisorData, n: int) -> bool:
    """V maps H^0(Omega^1(nD)) into H^0(Omega^1(ceil(n/p) D))."""
    if n < 1:
        raise ValueError("n must be positive")
    src = c.differential_space(d.scale(n))
    dst = c.differential_space(d.scale(-(-n // c.p)))
    return all(dst.contains(c.cartier(b)) for b in src.basis())


def _base_points(d_base) -> list:
    pts = []
    if isinstance(d_base, DivisorData):
        for pl, m in d_base.entries:
            if m > 0:
                pts.append(pl.x)
    else:
        pts = list(d_base)
    return list(dict.fromkeys(pts))


def reduced_pullback(cover: ArtinSchreierCurve, d_base) -> DivisorData:
    """(rho^* D_X)_red for a set of base points (x-values, None for infinity)."""
    pts = _base_points(d_base)
    branch = cover.branch_points()
    missing = [a for a in branch if a not in pts]
    if missing:
        raise ValueError(f"base divisor misses branch points {missing}")
    pairs = []
    for a in pts:
        if a in branch:
            pairs.append((Place("infinity", None, None, True) if a is None
                          else Place("finite", a, None, True), 1))
        else:
            pairs.append((fiber(a), 1))
    return DivisorData.of(*pairs)


@dataclass
class NakajimaResult:
    free: bool
    rank: int | None
    expected_rank: int
    ordinary_dim: int
    ordinary_dim_np: int
    independent_of_n: bool
    kernel_dims: tuple
    space_dim: int

    @property
    def holds(self) -> bool:
        return (self.free and self.rank == self.expected_rank and self.independent_of_n)

    def as_dict(self):
        return {"free": self.free, "rank": self.rank, "expected_rank": self.expected_rank,
                "ordinary_dim": self.ordinary_dim, "ordinary_dim_np": self.ordinary_dim_np,
                "independent_of_n": self.independent_of_n, "kernel_dims": list(self.kernel_dims),
                "space_dim": self.space_dim, "holds": self.holds}


def _ordinary_part(space):
    M = cartier_matrix(space)
    if space.dim == 0:
        return []
    return fitting_decompose(SemilinearOperator(M, -1)).ordinary_basis


def _automorphism_matrix(cover, space) -> ExactMatrix:
    cols = []
    for b in space.basis():
        v = space.coords(cover.automorphism(b))
        if v is None:
            raise AlgebraError("automorphism does not preserve the space")
        cols.append(v)
    return ExactMatrix.from_columns(cover.F, cols, space.dim)


def nakajima_check(cover: ArtinSchreierCurve, d_base) -> NakajimaResult:
    """Freeness of the V-ordinary part of H^0(Y, Omega^1(D_Y,red)) over F[Z/p]."""
    if not isinstance(cover, ArtinSchreierCurve):
        raise TypeError("nakajima_check needs an Artin-Schreier cover")
    if not cover.branch_points():
        raise UnramifiedCoverError("cover is unramified")
    F = cover.F
    p = cover.p
    DY = reduced_pullback(cover, d_base)
    expected = 0 - 1 + len(_base_points(d_base))
    W1 = cover.differential_space(DY)
    ord1 = _ordinary_part(W1)
    if ord1:
        S = _automorphism_matrix(cover, W1)
        B = ExactMatrix.from_columns(F, ord1, W1.dim)
        gen = B.solve(S @ B)
    else:
        gen = ExactMatrix.zeros(F, 0, 0)
    module = GroupRingModule(F, CyclicPLevel(p, 2), gen)
    res = is_free_of_rank(module) if ord1 else None
    free = res.free if res else expected == 0
    rank = res.rank if res else 0
    # independence of n: the ordinary part of W_p is the image of the ordinary part of W_1
    Wp = cover.differential_space(DY.scale(p))
    ordp = _ordinary_part(Wp)
    images = [Wp.coords(W1.element(v)) for v in ord1] if ord1 else []
    independent = len(ordp) == len(ord1)
    if independent and ord1:
        A = ExactMatrix.from_columns(F, list(ordp) + images, Wp.dim)
        independent = A.rank() == len(ordp)
    return NakajimaResult(free, rank, expected, len(ord1), len(ordp), independent,
                          res.kernel_dims if res else (0,), W1.dim)


def base_line(cover: CurveModel) -> ProjectiveLine:
    if not hasattr(cover, "_base_line"):
        cover._base_line = ProjectiveLine(cover.F)
    return cover._base_line


def trace_pushforward(cover: ArtinSchreierCurve, w: MeroDifferential) -> MeroDifferential:
    """Grothendieck trace to the x-line: rho_*(sum g_j y^j dx) = -g_{p-1} dx.

    Only y^{p-1} has nonzero trace among 1, y, ..., y^{p-1}, and Tr(y^{p-1}) = -1.
    """
    if not isinstance(cover, ArtinSchreierCurve):
        raise TypeError("pushforward is implemented for Artin-Schreier covers")
    return MeroDifferential(base_line(cover), (-w.coeffs[-1],))


def pullback(cover: ArtinSchreierCurve, w: MeroDifferential) -> MeroDifferential:
    F = cover.F
    from .ratfunc import RatFunc
    return MeroDifferential(cover, (w.coeffs[0],) + tuple(RatFunc.zero(F) for _ in range(cover.p - 1)))


def base_place(pl: Place) -> Place:
    return INF if pl.is_infinite else Place("finite", pl.x)
