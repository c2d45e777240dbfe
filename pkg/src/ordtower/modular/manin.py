"""Weight-k modular symbols for Gamma_1(M) presented by Manin symbols.

A Manin symbol [P, (c, d)] stands for g(P {0, oo}) where g in SL_2(Z) has
bottom row congruent to (c, d) mod M and P = X^i Y^(k-2-i).  Matrices act on
polynomials on the left by gP(X, Y) = P(dX - bY, -cX + aY).

The relation module is solved in two passes: the two-term relations (sigma
and the sign relation for -1) collapse symbols into signed classes with a
union-find; the three-term tau relations are then eliminated sparsely over Q.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

from ..algebra import QQ, ExactMatrix, charpoly
from .dims import dim_cusp_forms


class PresentationError(RuntimeError):
    """The computed presentation disagrees with the dimension oracle."""


# -- polynomials --------------------------------------------------------------

@lru_cache(maxsize=None)
def _linear_powers(u, v, n):
    """Coefficient lists of (uX + vY)^j for j = 0..n (index = power of X)."""
    out = [[1]]
    for j in range(1, n + 1):
        out.append([comb(j, i) * u ** i * v ** (j - i) for i in range(j + 1)])
    return out


def act_poly(coeffs, g) -> list:
    """g acting on a homogeneous polynomial of degree len(coeffs)-1."""
    a, b, c, d = g
    n = len(coeffs) - 1
    A = _linear_powers(d, -b, n)      # powers of dX - bY
    B = _linear_powers(-c, a, n)      # powers of -cX + aY
    out = [0] * (n + 1)
    for i, p in enumerate(coeffs):
        if not p:
            continue
        left, right = A[i], B[n - i]
        for s, x in enumerate(left):
            if not x:
                continue
            for t, y in enumerate(right):
                if y:
                    out[s + t] += p * x * y
    return out


def _mat_mul(g, h):
    a, b, c, d = g
    e, f, gg, hh = h
    return (a * e + b * gg, a * f + b * hh, c * e + d * gg, c * f + d * hh)


def lift_to_sl2z(c, d, M):
    """A matrix in SL_2(Z) whose bottom row is congruent to (c, d) mod M."""
    if M == 1:
        return (1, 0, 0, 1)
    c %= M
    d %= M
    if c == 0:
        c = M
    t = 0
    while gcd(c, d + t * M) != 1:
        t += 1
    d = d + t * M
    g, x, y = _xgcd(d, c)
    # a*d - b*c = 1 with a = x, b = -y
    return (x, -y, c, d)


def _xgcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def convergents(u, w):
    """Convergents p_j/q_j of u/w (w > 0), starting from p_{-2}/q_{-2} = 0/1."""
    ps, qs = [0, 1], [1, 0]
    while w:
        a = u // w
        u, w = w, u - a * w
        ps.append(a * ps[-1] + ps[-2])
        qs.append(a * qs[-1] + qs[-2])
    return ps, qs


class _SignedUnionFind:
    """x_i = sign_i * x_parent; a root flagged zero is forced to vanish."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.sign = [1] * n
        self.zero = [False] * n

    def find(self, i):
        s = 1
        path = []
        while self.parent[i] != i:
            path.append(i)
            s *= self.sign[i]
            i = self.parent[i]
        root = i
        # path compression
        acc = s
        for j in path:
            nxt_sign = self.sign[j]
            self.parent[j] = root
            self.sign[j] = acc
            acc *= nxt_sign
        return root, s

    def union(self, a, b, s):
        """Impose x_a = s * x_b."""
        ra, sa = self.find(a)
        rb, sb = self.find(b)
        rel = sa * s * sb          # x_ra = rel * x_rb
        if ra == rb:
            if rel == -1:
                self.zero[ra] = True
            return
        self.parent[ra] = rb
        self.sign[ra] = rel
        if self.zero[ra]:
            self.zero[rb] = True


class ModularSymbolSpace:
    """Cuspidal weight-k modular symbols for Gamma_1(M) over Q."""

    def __init__(self, M: int, k: int, check: bool = True):
        if M < 1 or k < 2:
            raise ValueError("need M >= 1 and k >= 2")
        self.M, self.k = M, k
        self.n = k - 2
        self.rows = [(c, d) for c in range(M) for d in range(M) if gcd(gcd(c, d), M) == 1]
        self.row_index = {cd: i for i, cd in enumerate(self.rows)}
        self._solve_relations()
        self._build_boundary()
        self._cache = {}
        self.hecke_log = {}
        if check:
            expected = 2 * dim_cusp_forms(M, k)
            if self.dim != expected:
                raise PresentationError(
                    f"cuspidal dimension {self.dim} != 2*dim S_{k}(Gamma_1({M})) = {expected}")

    def __repr__(self):
        return f"ModularSymbolSpace(M={self.M}, k={self.k}, dim={self.dim})"

    # symbol indexing: (i, row) with P = X^i Y^(n-i)
    def sym(self, i, cd):
        c, d = cd
        return self.row_index[(c % self.M, d % self.M)] * (self.n + 1) + i

    def _solve_relations(self):
        n, M = self.n, self.M
        nsym = len(self.rows) * (n + 1)
        uf = _SignedUnionFind(nsym)
        for (c, d) in self.rows:
            for i in range(n + 1):
                s = self.sym(i, (c, d))
                # sigma: [X^iY^(n-i), (c,d)] = -(-1)^i [X^(n-i)Y^i, (d,-c)]
                uf.union(s, self.sym(n - i, (d, -c)), -((-1) ** i))
                # sign: [P, (-c,-d)] = (-1)^k [P, (c,d)]
                uf.union(self.sym(i, (-c, -d)), s, (-1) ** self.k)
        roots = sorted({uf.find(s)[0] for s in range(nsym)})
        roots = [r for r in roots if not uf.zero[r]]
        var = {r: j for j, r in enumerate(roots)}

        def to_vars(i_poly, cd, out, scale=1):
            for i, coef in enumerate(i_poly):
                if not coef:
                    continue
                r, s = uf.find(self.sym(i, cd))
                if uf.zero[r]:
                    continue
                j = var[r]
                out[j] = out.get(j, 0) + scale * s * coef

        pivots = {}
        for (c, d) in self.rows:
            for i in range(n + 1):
                row = {}
                mono = [0] * (n + 1)
                mono[i] = 1
                to_vars(mono, (c, d), row)
                # tau^{-1} P = P(-Y, X - Y), tau^{-2} P = P(-X + Y, -X)
                to_vars(act_poly(mono, (-1, 1, -1, 0)), (d, -c - d), row)
                to_vars(act_poly(mono, (0, -1, 1, -1)), (-c - d, c), row)
                row = {j: Fraction(v) for j, v in row.items() if v}
                _insert_row(pivots, row)
        self._uf = uf
        self._var = var
        self._roots = roots
        self._pivots = pivots
        free = [j for j in range(len(roots)) if j not in pivots]
        self.free_vars = free
        self.free_index = {j: t for t, j in enumerate(free)}
        self.ambient_dim = len(free)
        # representative symbol for each quotient basis element
        self.basis_symbols = []
        for j in free:
            s = roots[j]
            row_i, i = divmod(s, n + 1)
            self.basis_symbols.append((i, self.rows[row_i]))

    def coordinates(self, poly, cd) -> dict:
        """Quotient coordinates of sum_i poly[i] [X^i Y^(n-i), cd]."""
        out = {}
        uf, var, piv, fi = self._uf, self._var, self._pivots, self.free_index
        for i, coef in enumerate(poly):
            if not coef:
                continue
            r, s = uf.find(self.sym(i, cd))
            if uf.zero[r]:
                continue
            j = var[r]
            c = s * coef
            if j in piv:
                for jj, v in piv[j].items():
                    if jj != j:
                        t = fi[jj]
                        out[t] = out.get(t, 0) - c * v
            else:
                t = fi[j]
                out[t] = out.get(t, 0) + c
        return {t: v for t, v in out.items() if v}

    # -- boundary -------------------------------------------------------------
    def _cusp_key(self, u, w):
        M = self.M
        g = gcd(w, M)
        return (w % M, u % g if g else 0)

    def cusp_class(self, u, w):
        """(class index, sign) of the boundary symbol [(u, w)], or None if it vanishes."""
        k1 = self._cusp_key(u, w)
        k2 = self._cusp_key(-u, -w)
        rep = min(k1, k2)
        if k1 == k2 and self.k % 2 == 1:
            return None
        sign = 1 if k1 == rep else (-1) ** self.k
        if rep not in self._cusp_ids:
            self._cusp_ids[rep] = len(self._cusp_ids)
        return self._cusp_ids[rep], sign

    def _build_boundary(self):
        self._cusp_ids = {}
        n = self.n
        cols = []
        for (i, (c, d)) in self.basis_symbols:
            a, b, cc, dd = lift_to_sl2z(c, d, self.M)
            col = {}
            if i == n:   # P(1, 0) = 1 at g(oo) = (a, c)
                cs = self.cusp_class(a, cc)
                if cs:
                    col[cs[0]] = col.get(cs[0], 0) + cs[1]
            if i == 0:   # P(0, 1) = 1 at g(0) = (b, d)
                cs = self.cusp_class(b, dd)
                if cs:
                    col[cs[0]] = col.get(cs[0], 0) - cs[1]
            cols.append(col)
        nb = len(self._cusp_ids)
        rows = [[Fraction(cols[j].get(r, 0)) for j in range(len(cols))] for r in range(nb)]
        kernel = _kernel_normalized(rows, len(cols))
        self.boundary_rows = rows
        self.cusp_basis = kernel            # list of (vector, free column)
        self.dim = len(kernel)

    def cuspidal_vectors(self) -> list:
        return [v for v, _ in self.cusp_basis]

    def cuspidal_coords(self, w) -> list:
        """Coordinates of an ambient vector lying in the cuspidal subspace."""
        coords = [w[f] for _, f in self.cusp_basis]
        rebuilt = [sum((coords[t] * self.cusp_basis[t][0][j] for t in range(self.dim)), Fraction(0))
                   for j in range(self.ambient_dim)]
        if rebuilt != list(w):
            raise PresentationError("image is not cuspidal")
        return coords

    # -- operators --------------------------------------------------------------
    def _act_symbol(self, mats, i, cd) -> dict:
        """sum over h in mats of h acting on the Manin symbol [X^i Y^(n-i), cd]."""
        n = self.n
        g = lift_to_sl2z(cd[0], cd[1], self.M)
        mono = [0] * (n + 1)
        mono[i] = 1
        out = {}
        for h in mats:
            hg = _mat_mul(h, g)
            Q = act_poly(mono, hg)
            a, b, c, d = hg
            # Q{hg 0, hg oo} = Q{0, hg oo} - Q{0, hg 0}
            for (u, w), sgn in (((a, c), 1), ((b, d), -1)):
                for t, v in self._zero_to(Q, u, w).items():
                    out[t] = out.get(t, 0) + sgn * v
        return out

    def _zero_to(self, Q, u, w) -> dict:
        """Coordinates of Q{0, u/w}, expanded into Manin symbols by continued fractions."""
        out = {}

        def add(d):
            for t, v in d.items():
                out[t] = out.get(t, 0) + v

        # Q{0, oo} = [Q, identity]
        add(self.coordinates(Q, (0, 1)))
        if w == 0:
            return out
        if w < 0:
            u, w = -u, -w
        ps, qs = convergents(u, w)
        # {oo, u/w} = sum_j {p_{j-1}/q_{j-1}, p_j/q_j}, each g_j {0, oo}
        for j in range(len(ps) - 2):
            pj, qj = ps[j + 2], qs[j + 2]
            pm, qm = ps[j + 1], qs[j + 1]
            s = -1 if j % 2 == 0 else 1            # (-1)^(j-1)
            gj = (s * pj, pm, s * qj, qm)
            ginv = (qm, -pm, -s * qj, s * pj)
            add(self.coordinates(act_poly(Q, ginv), (s * qj, qm)))
        return out

    def operator_matrix(self, mats) -> ExactMatrix:
        """Matrix on the cuspidal basis of sum_{h in mats} h."""
        images = []
        for (i, cd) in self.basis_symbols:
            images.append(self._act_symbol(mats, i, cd))
        return self._restrict(images)

    def _restrict(self, images) -> ExactMatrix:
        cols = []
        for v, _ in self.cusp_basis:
            w = [Fraction(0)] * self.ambient_dim
            for j, c in enumerate(v):
                if c:
                    for t, x in images[j].items():
                        w[t] += c * x
            cols.append(self.cuspidal_coords(w))
        return ExactMatrix.from_columns(QQ, cols, self.dim)

    def symbol_map_matrix(self, fn) -> ExactMatrix:
        """Matrix of a map given on Manin symbols: fn(i, cd) -> (poly, cd')."""
        images = []
        for (i, cd) in self.basis_symbols:
            poly, cd2 = fn(i, cd)
            images.append(self.coordinates(poly, cd2))
        return self._restrict(images)

    def diamond(self, d: int) -> ExactMatrix:
        if gcd(d, self.M) != 1:
            raise ValueError(f"<{d}> needs d prime to the level {self.M}")
        n = self.n

        def fn(i, cd):
            mono = [0] * (n + 1)
            mono[i] = 1
            return mono, (d * cd[0], d * cd[1])
        return self.symbol_map_matrix(fn)

    def star(self) -> ExactMatrix:
        """[P(X,Y), (u,v)]* = -[P(-X, Y), (-u, v)]."""
        n = self.n

        def fn(i, cd):
            mono = [0] * (n + 1)
            mono[i] = -((-1) ** i)
            return mono, (-cd[0], cd[1])
        return self.symbol_map_matrix(fn)

    def hecke_T(self, ell: int) -> ExactMatrix:
        """T_ell for ell prime to the level; U_ell when ell divides it."""
        M = self.M
        mats = [(1, j, 0, ell) for j in range(ell)]
        if M % ell:
            # sigma_ell in SL_2(Z) congruent to diag(ell^-1, ell) mod M
            _, x, y = _xgcd(ell, M)          # x*ell + y*M = 1
            sig = (x, -y, M, ell)
            mats.append(_mat_mul(sig, (ell, 0, 0, 1)))
        return self.operator_matrix(mats)

    def hecke_U_star(self, ell: int) -> ExactMatrix:
        """Adjoint U_ell^* for ell dividing the level, from the cosets (ell 0; -Mj 1)."""
        if self.M % ell:
            raise ValueError("U* is only defined here for ell dividing the level")
        return self.operator_matrix([(ell, 0, -self.M * j, 1) for j in range(ell)])

    def fricke(self) -> ExactMatrix:
        return self.operator_matrix([(0, -1, self.M, 0)])

    def charpoly_T(self, ell: int):
        return charpoly(self.hecke_T(ell))


def _insert_row(pivots, row):
    """Add a sparse relation to an incrementally maintained reduced echelon form."""
    for c in [c for c in row if c in pivots]:
        f = row.get(c)
        if not f:
            continue
        for cc, v in pivots[c].items():
            nv = row.get(cc, 0) - f * v
            if nv:
                row[cc] = nv
            else:
                row.pop(cc, None)
    # the rows of pivots never contain other pivot columns, so one pass suffices
    if not row:
        return
    pc = max(row)
    inv = 1 / row[pc]
    row = {c: v * inv for c, v in row.items()}
    for other in pivots.values():
        f = other.get(pc)
        if f:
            for cc, v in row.items():
                nv = other.get(cc, 0) - f * v
                if nv:
                    other[cc] = nv
                else:
                    other.pop(cc, None)
    pivots[pc] = row


def _kernel_normalized(rows, ncols):
    """Kernel basis of a dense Fraction matrix; vector t has a 1 at its free column."""
    A = [list(r) for r in rows]
    piv_cols = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(A)) if A[i][c]), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    out = []
    for f in range(ncols):
        if f in piv_cols:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(piv_cols):
            v[c] = -A[i][f]
        out.append((v, f))
    return out
