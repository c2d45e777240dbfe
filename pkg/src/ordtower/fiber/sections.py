"""Meromorphic sections on the normalized special fiber and the U_p, U_p^* action on them."""
from __future__ import annotations

from dataclasses import dataclass

from ..algebra import ExactMatrix
from .carrier import CarrierConfigError, IgusaCarrier
from .components import ComponentIndex, check_index, lifts, list_components, reduce_unit


@dataclass(frozen=True)
class MeroSection:
    """eta = (eta_(a,b,u)) with eta_(a,b,u) a vector in M_max(a,b)."""
    p: int
    r: int
    parts: tuple          # ((ComponentIndex, vector), ...) in list_components order

    def __getitem__(self, c: ComponentIndex):
        for k, v in self.parts:
            if k == c:
                return v
        raise KeyError(c)

    def as_dict(self):
        return dict(self.parts)

    def components(self):
        return [k for k, _ in self.parts]

    def is_zero(self) -> bool:
        return all(not any(x for x in v) for _, v in self.parts)


def section(c: IgusaCarrier, r: int, parts: dict | None = None) -> MeroSection:
    parts = parts or {}
    out = []
    comps = list_components(c.p, r)
    for k in parts:
        check_index(k, c.p, r)
        if k not in comps:
            raise ValueError(f"{k} is not a component at level {r}")
    for k in comps:
        c.require(k.level)
        v = parts.get(k)
        out.append((k, tuple(c.F.canonical(x) for x in v) if v is not None else c.zero(k.level)))
    return MeroSection(c.p, r, tuple(out))


def zero_section(c: IgusaCarrier, r: int) -> MeroSection:
    return section(c, r)


def product_dim(c: IgusaCarrier, r: int) -> int:
    return sum(c.dims[k.level] for k in list_components(c.p, r))


def to_vector(eta: MeroSection) -> tuple:
    out = []
    for _, v in eta.parts:
        out.extend(v)
    return tuple(out)


def from_vector(c: IgusaCarrier, r: int, vec) -> MeroSection:
    parts = {}
    pos = 0
    for k in list_components(c.p, r):
        n = c.dims[k.level]
        parts[k] = tuple(vec[pos:pos + n])
        pos += n
    return section(c, r, parts)


def _add(F, x, y):
    return tuple(F.add(a, b) for a, b in zip(x, y))


def _sum(F, vecs, n):
    acc = tuple([F.zero] * n)
    for v in vecs:
        acc = _add(F, acc, v)
    return acc


def up_apply(c: IgusaCarrier, eta: MeroSection) -> MeroSection:
    """U_p = (pi_1)_* pi_2^* on the product of the component spaces."""
    p, r, F = c.p, eta.r, c.F
    E = eta.as_dict()
    top = ComponentIndex(r, 0, 1)
    out = {}
    for k in list_components(p, r):
        a, b, u = k.a, k.b, k.u
        s = k.level
        if (a, b) == (r, 0):
            out[k] = c.frob[r].apply(E[top])
        elif 0 < b <= a:
            src = ComponentIndex(a + 1, b - 1, reduce_unit(u, p, b - 1))
            out[k] = c.rho_down(a + 1).apply(E[src])
        elif r % 2 == 1 and a == b - 1:
            src = ComponentIndex(a + 1, b - 1, u)
            out[k] = c.diamond_sum(s, lifts(u, p, a, a + 1)).apply(E[src])
        elif r % 2 == 0 and a == b - 2:
            vecs = []
            for v in lifts(u, p, a, a + 1):
                src = ComponentIndex(a + 1, b - 1, v)
                vecs.append(c.rho_up(s).apply(c.diamond(a + 1, v).apply(E[src])))
            out[k] = _sum(F, vecs, c.dims[s])
        else:   # 0 <= a < b - 2
            vecs = []
            for v in lifts(u, p, a, a + 1):
                src = ComponentIndex(a + 1, b - 1, v)
                vecs.append(c.rho_up(s).apply(E[src]))
            out[k] = _sum(F, vecs, c.dims[s])
    return section(c, r, out)


def upstar_apply(c: IgusaCarrier, eta: MeroSection) -> MeroSection:
    """U_p^* = (pi_2)_* pi_1^*."""
    p, r, F = c.p, eta.r, c.F
    E = eta.as_dict()
    bottom = ComponentIndex(0, r, 1)
    out = {}
    for k in list_components(p, r):
        a, b, u = k.a, k.b, k.u
        s = k.level
        if (a, b) == (0, r):
            out[k] = c.p_N_power(r, -1).apply(c.frob[r].apply(E[bottom]))
        elif 0 < a < b:
            src = ComponentIndex(a - 1, b + 1, reduce_unit(u, p, a - 1))
            out[k] = c.rho_down(b + 1).apply(E[src])
        elif r % 2 == 0 and a == b:
            src = ComponentIndex(a - 1, b + 1, reduce_unit(u, p, a - 1))
            out[k] = c.diamond_inv(a, u).apply(c.rho_down(a + 1).apply(E[src]))
        elif r % 2 == 1 and b == a - 1:
            src = ComponentIndex(a - 1, b + 1, u)
            out[k] = c.diamond_sum(s, lifts(u, p, b, b + 1), inverse=True).apply(E[src])
        else:   # 0 <= b < a - 1
            vecs = []
            for v in lifts(u, p, b, b + 1):
                src = ComponentIndex(a - 1, b + 1, v)
                vecs.append(c.rho_up(s).apply(E[src]))
            out[k] = _sum(F, vecs, c.dims[s])
    return section(c, r, out)


def iterate(op, c, eta, n):
    for _ in range(n):
        eta = op(c, eta)
    return eta


def up_power_closed_form(c: IgusaCarrier, eta: MeroSection, n: int) -> MeroSection:
    """U_p^n for n >= r: depends only on the (r,0,1)-component."""
    p, r = c.p, eta.r
    if n < r:
        raise ValueError(f"closed form needs n >= r (got n={n}, r={r})")
    x = eta[ComponentIndex(r, 0, 1)]
    out = {}
    for k in list_components(p, r):
        a, b, u = k.a, k.b, k.u
        if b <= a:
            out[k] = c.rho_down(r, b).apply(c.frob_power(r, n - b).apply(x))
        else:
            y = c.rho_down(r, a).apply(c.frob_power(r, n - b).apply(x))
            out[k] = c.diamond_sum(b, lifts(u, p, a, b)).apply(y)
    return section(c, r, out)


def upstar_power_closed_form(c: IgusaCarrier, eta: MeroSection, n: int) -> MeroSection:
    """(U_p^*)^n for n >= r: depends only on the (0,r,1)-component."""
    p, r = c.p, eta.r
    if n < r:
        raise ValueError(f"closed form needs n >= r (got n={n}, r={r})")
    x = eta[ComponentIndex(0, r, 1)]
    out = {}
    for k in list_components(p, r):
        a, b, u = k.a, k.b, k.u
        if a < b:
            y = c.p_N_power(r, a - n).apply(c.frob_power(r, n - a).apply(x))
            out[k] = c.rho_down(r, a).apply(y)
        else:
            y = c.p_N_power(r, a - n).apply(c.frob_power(r, n - a).apply(x))
            y = c.rho_down(r, b).apply(y)
            out[k] = c.diamond_sum(a, lifts(u, p, b, a), inverse=True).apply(y)
    return section(c, r, out)


def operator_matrix(c: IgusaCarrier, r: int, op) -> ExactMatrix:
    n = product_dim(c, r)
    F = c.F
    cols = []
    for i in range(n):
        e = [F.zero] * n
        e[i] = F.one
        cols.append(to_vector(op(c, from_vector(c, r, e))))
    return ExactMatrix.from_columns(F, cols, n)


# -- gamma maps and pullbacks -----------------------------------------------------------

def pullback_i_star(eta: MeroSection, star: str):
    """Pullback along the good component: projection onto (r,0,1) or (0,r,1)."""
    r = eta.r
    if star in ("inf", "infinity", "oo"):
        return eta[ComponentIndex(r, 0, 1)]
    if star in ("0", 0, "zero"):
        return eta[ComponentIndex(0, r, 1)]
    raise ValueError(f"unknown cusp label {star!r}")


def gamma_map(c: IgusaCarrier, star: str, nu, r: int) -> MeroSection:
    """gamma_r^star(nu) for nu in the ordinary part of M_r."""
    p = c.p
    if not c.is_ordinary(r, nu):
        raise CarrierConfigError("nu is not in the V-ordinary part")
    out = {}
    inf = star in ("inf", "infinity", "oo")
    if not inf and star not in ("0", 0, "zero"):
        raise ValueError(f"unknown cusp label {star!r}")
    for k in list_components(p, r):
        a, b, u = k.a, k.b, k.u
        if inf:
            y = c.frob_inverse_on_ordinary(r, nu, b)
            if b <= a:
                out[k] = c.rho_down(r, b).apply(y)
            else:
                out[k] = c.diamond_sum(b, lifts(u, p, a, b)).apply(c.rho_down(r, a).apply(y))
        else:
            y = c.p_N_power(r, a).apply(c.frob_inverse_on_ordinary(r, nu, a))
            if a < b:
                out[k] = c.rho_down(r, a).apply(y)
            else:
                out[k] = c.diamond_sum(a, lifts(u, p, b, a), inverse=True).apply(c.rho_down(r, b).apply(y))
    return section(c, r, out)


def residue_sum(c: IgusaCarrier, eta: MeroSection) -> list:
    """Per supersingular point: the sum over components of the residues there."""
    if not c.residues:
        return None
    F = c.F
    npts = len(next(iter(c.residues.values())))
    totals = [F.zero] * npts
    for k, v in eta.parts:
        for i, lam in enumerate(c.residues[k.level]):
            val = F.zero
            for x, y in zip(lam, v):
                val = F.add(val, F.mul(x, y))
            totals[i] = F.add(totals[i], val)
    return totals
