"""Dense exact matrices.

Over finite fields the entries live in a read-only int64 numpy array and all
row operations are vectorised; over every other ring entries are a tuple of
row tuples handled by plain Python loops.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .fields import AlgebraError, FiniteField, NotInvertibleError
from .poly import Poly


class DimensionError(AlgebraError):
    pass


class ResidueFieldOnly(AlgebraError):
    """Raised when an exact kernel is requested over a non-field truncation ring."""


def _ff(ring) -> bool:
    return isinstance(ring, FiniteField)


class ExactMatrix:
    __slots__ = ("ring", "rows", "cols", "_a")

    def __init__(self, ring, rows: int, cols: int, entries):
        entries = list(entries)
        if len(entries) != rows * cols:
            raise DimensionError(f"expected {rows * cols} entries, got {len(entries)}")
        if _ff(ring):
            arr = np.array([ring.canonical(x) for x in entries], dtype=np.int64).reshape(rows, cols)
        else:
            flat = [ring.canonical(x) for x in entries]
            arr = tuple(tuple(flat[i * cols:(i + 1) * cols]) for i in range(rows))
        self._set(ring, rows, cols, arr)

    def _set(self, ring, rows, cols, arr):
        if isinstance(arr, np.ndarray):
            arr.setflags(write=False)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_a", arr)

    def __setattr__(self, *_):
        raise AttributeError("ExactMatrix is immutable")

    # construction
    @classmethod
    def _wrap(cls, ring, arr, rows=None, cols=None):
        obj = object.__new__(cls)
        if isinstance(arr, np.ndarray):
            arr = np.array(arr, dtype=np.int64)
            rows, cols = arr.shape
        else:
            arr = tuple(tuple(r) for r in arr)
            if rows is None:
                rows = len(arr)
                cols = len(arr[0]) if arr else 0
        obj._set(ring, rows, cols, arr)
        return obj

    @classmethod
    def from_rows(cls, ring, rows, ncols: int | None = None):
        rows = [list(r) for r in rows]
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged rows")
        return cls(ring, nrows, ncols, [x for r in rows for x in r])

    @classmethod
    def from_columns(cls, ring, cols, nrows: int | None = None):
        cols = [list(c) for c in cols]
        if not cols:
            return cls.zeros(ring, nrows or 0, 0)
        return cls.from_rows(ring, cols).T

    @classmethod
    def from_numpy(cls, field, arr):
        arr = np.asarray(arr, dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionError("expected a 2-d array")
        return cls._wrap(field, arr % field.q if isinstance(field, FiniteField) and field.m == 1 else arr)

    @classmethod
    def zeros(cls, ring, rows: int, cols: int):
        if _ff(ring):
            return cls._wrap(ring, np.zeros((rows, cols), dtype=np.int64))
        return cls._wrap(ring, [[ring.zero] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, ring, n: int):
        if _ff(ring):
            return cls._wrap(ring, np.eye(n, dtype=np.int64))
        return cls._wrap(ring, [[ring.one if i == j else ring.zero for j in range(n)]
                                for i in range(n)], n, n)

    @classmethod
    def diag(cls, ring, values):
        values = list(values)
        n = len(values)
        rows = [[values[i] if i == j else ring.zero for j in range(n)] for i in range(n)]
        return cls.from_rows(ring, rows, n)

    @classmethod
    def block_diag(cls, ring, blocks):
        blocks = list(blocks)
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = cls.zeros(ring, n, m).to_lists()
        i = j = 0
        for b in blocks:
            bl = b.to_lists()
            for a in range(b.rows):
                out[i + a][j:j + b.cols] = bl[a]
            i += b.rows
            j += b.cols
        return cls.from_rows(ring, out, m)

    @classmethod
    def companion(cls, poly: Poly):
        """Companion matrix of a monic polynomial (last column holds -coefficients)."""
        R = poly.ring
        n = poly.degree
        if n < 1 or not R.eq(poly.lead, R.one):
            raise AlgebraError("companion matrix needs a monic polynomial of degree >= 1")
        rows = [[R.zero] * n for _ in range(n)]
        for i in range(1, n):
            rows[i][i - 1] = R.one
        for i in range(n):
            rows[i][n - 1] = R.neg(poly[i])
        return cls.from_rows(R, rows, n)

    # access
    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def entries(self) -> tuple:
        if isinstance(self._a, np.ndarray):
            return tuple(int(x) for x in self._a.ravel())
        return tuple(x for r in self._a for x in r)

    def to_lists(self) -> list:
        if isinstance(self._a, np.ndarray):
            return self._a.tolist()
        return [list(r) for r in self._a]

    def to_numpy(self):
        if not isinstance(self._a, np.ndarray):
            raise AlgebraError("numpy view only available over finite fields")
        return self._a

    def __getitem__(self, ij):
        i, j = ij
        x = self._a[i][j] if not isinstance(self._a, np.ndarray) else int(self._a[i, j])
        return x

    def row(self, i) -> tuple:
        return tuple(self.to_lists()[i])

    def column(self, j) -> tuple:
        return tuple(r[j] for r in self.to_lists())

    def columns(self) -> list:
        return [tuple(c) for c in zip(*self.to_lists())] if self.rows else [()] * self.cols

    def __repr__(self):
        return f"ExactMatrix({self.ring!r}, {self.rows}x{self.cols}, {self.to_lists()})"

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape or self.ring != other.ring:
            return False
        if isinstance(self._a, np.ndarray):
            return bool(np.array_equal(self._a, other._a))
        R = self.ring
        return all(R.eq(x, y) for x, y in zip(self.entries, other.entries))

    def __hash__(self):
        return hash((self.shape, self.entries))

    # arithmetic
    def _check_same(self, other):
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        R = self.ring
        if _ff(R):
            return ExactMatrix._wrap(R, R.vadd(self._a, other._a))
        return ExactMatrix._wrap(R, [[R.add(x, y) for x, y in zip(a, b)]
                                     for a, b in zip(self._a, other._a)], *self.shape)

    def __neg__(self):
        R = self.ring
        if _ff(R):
            return ExactMatrix._wrap(R, R.vneg(self._a))
        return ExactMatrix._wrap(R, [[R.neg(x) for x in a] for a in self._a], *self.shape)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        R = self.ring
        if _ff(R):
            return ExactMatrix._wrap(R, R.vmul(self._a, int(c)))
        return ExactMatrix._wrap(R, [[R.mul(c, x) for x in a] for a in self._a], *self.shape)

    @property
    def T(self):
        if isinstance(self._a, np.ndarray):
            return ExactMatrix._wrap(self.ring, self._a.T.copy())
        return ExactMatrix._wrap(self.ring, list(zip(*self._a)) if self.rows else [],
                                 self.cols, self.rows)

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.cols != other.rows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            return ExactMatrix._wrap(self.ring, _matmul(self.ring, self._a, other._a,
                                                        self.rows, self.cols, other.cols),
                                     self.rows, other.cols)
        return self.apply(other)

    def apply(self, v) -> tuple:
        v = list(v)
        if len(v) != self.cols:
            raise DimensionError(f"vector of length {len(v)} for {self.shape} matrix")
        R = self.ring
        if _ff(R):
            col = np.array(v, dtype=np.int64).reshape(-1, 1)
            res = _matmul(R, self._a, col, self.rows, self.cols, 1)
            return tuple(int(x) for x in res.ravel())
        out = []
        for row in self._a:
            acc = R.zero
            for x, y in zip(row, v):
                if not R.is_zero(x) and not R.is_zero(y):
                    acc = R.add(acc, R.mul(x, y))
            out.append(acc)
        return tuple(out)

    def power(self, n: int):
        if self.rows != self.cols:
            raise DimensionError("power of a non-square matrix")
        if n < 0:
            return self.inverse().power(-n)
        result = ExactMatrix.identity(self.ring, self.rows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def frob(self, e: int):
        """Entrywise x -> x^(p^e) over a finite field."""
        R = self.ring
        return ExactMatrix._wrap(R, R.vfrob(self._a, e))

    def map_entries(self, fn, ring=None):
        ring = ring or self.ring
        return ExactMatrix(ring, self.rows, self.cols, [fn(x) for x in self.entries])

    def reduce_to_residue(self):
        R = self.ring
        F = R.residue_field()
        return ExactMatrix(F, self.rows, self.cols, [R.to_residue(x) for x in self.entries])

    def submatrix(self, rows, cols):
        L = self.to_lists()
        rows, cols = list(rows), list(cols)
        return ExactMatrix.from_rows(self.ring, [[L[i][j] for j in cols] for i in rows], len(cols))

    def hstack(self, other):
        if self.rows != other.rows:
            raise DimensionError("hstack row mismatch")
        L, M = self.to_lists(), other.to_lists()
        return ExactMatrix.from_rows(self.ring, [a + b for a, b in zip(L, M)], self.cols + other.cols)

    def vstack(self, other):
        if self.cols != other.cols:
            raise DimensionError("vstack column mismatch")
        return ExactMatrix.from_rows(self.ring, self.to_lists() + other.to_lists(), self.cols)

    def is_zero(self):
        R = self.ring
        return all(R.is_zero(x) for x in self.entries)

    def is_identity(self):
        return self.rows == self.cols and self == ExactMatrix.identity(self.ring, self.rows)

    # linear algebra shortcuts
    def rank(self) -> int:
        return mat_rank_kernel_image(self).rank

    def inverse(self):
        if self.rows != self.cols:
            raise DimensionError("inverse of a non-square matrix")
        n = self.rows
        R = self.ring
        if not R.is_field:
            # local ring: invert mod the maximal ideal then Newton-lift
            red = self.reduce_to_residue()
            x0 = red.inverse()
            X = ExactMatrix(R, n, n, [R.from_int(int(v)) for v in x0.entries])
            two = ExactMatrix.identity(R, n).scale(R.from_int(2))
            for _ in range(64):
                AX = self @ X
                if AX.is_identity():
                    return X
                X = X @ (two - AX)
            raise NotInvertibleError("matrix inverse did not converge")
        aug = self.hstack(ExactMatrix.identity(R, n))
        red, piv = rref(aug)
        if piv[:n] != list(range(n)):
            raise NotInvertibleError("matrix is singular")
        return red.submatrix(range(n), range(n, 2 * n))

    def is_invertible(self) -> bool:
        if self.rows != self.cols:
            return False
        M = self if self.ring.is_field else self.reduce_to_residue()
        return mat_rank_kernel_image(M).rank == self.rows

    def solve(self, B):
        """Return X with self @ X = B; raises if inconsistent."""
        R = self.ring
        aug = self.hstack(B)
        red, piv = rref(aug)
        if any(c >= self.cols for c in piv):
            raise AlgebraError("inconsistent linear system")
        L = red.to_lists()
        X = [[R.zero] * B.cols for _ in range(self.cols)]
        for i, c in enumerate(piv):
            X[c] = L[i][self.cols:]
        return ExactMatrix.from_rows(R, X, B.cols)


def _matmul(R, a, b, n, k, m):
    if _ff(R):
        if R.m == 1:
            p = R.p
            if p * p * max(k, 1) < 2 ** 62:
                return (a @ b) % p
            out = np.zeros((n, m), dtype=np.int64)
            for t in range(k):
                out = (out + np.outer(a[:, t], b[t, :]) % p) % p
            return out
        out = np.zeros((n, m), dtype=np.int64)
        for t in range(k):
            out = R.vadd(out, R.vmul(a[:, t][:, None], b[t, :][None, :]))
        return out
    out = []
    bt = list(zip(*b)) if b else [()] * m
    for i in range(n):
        row = a[i]
        new = []
        for j in range(m):
            acc = R.zero
            col = bt[j] if bt else ()
            for x, y in zip(row, col):
                if not R.is_zero(x) and not R.is_zero(y):
                    acc = R.add(acc, R.mul(x, y))
            new.append(acc)
        out.append(new)
    return out


def rref(M: ExactMatrix):
    """Reduced row echelon form over a field; returns (matrix, pivot columns)."""
    R = M.ring
    if not R.is_field:
        raise ResidueFieldOnly("row reduction needs a field")
    if _ff(R):
        A, piv = _rref_ff(R, np.array(M._a, dtype=np.int64))
        return ExactMatrix._wrap(R, A), piv
    A, piv = _rref_generic(R, M.to_lists(), M.cols)
    return ExactMatrix._wrap(R, A, M.rows, M.cols), piv


def _rref_ff(F, A):
    rows, cols = A.shape
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = F.inv(int(A[r, c]))
        if inv != 1:
            A[r] = F.vmul(A[r], inv)
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            A[hit] = F.vsub(A[hit], F.vmul(col[hit][:, None], A[r][None, :]))
        piv.append(c)
        r += 1
    return A, piv


def _rref_generic(R, A, cols):
    rows = len(A)
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        i = next((i for i in range(r, rows) if not R.is_zero(A[i][c])), None)
        if i is None:
            continue
        A[r], A[i] = A[i], A[r]
        inv = R.inv(A[r][c])
        A[r] = [R.mul(inv, x) for x in A[r]]
        pr = A[r]
        for k in range(rows):
            if k != r and not R.is_zero(A[k][c]):
                f = A[k][c]
                A[k] = [R.sub(x, R.mul(f, y)) for x, y in zip(A[k], pr)]
        piv.append(c)
        r += 1
    return A, piv


class RankKernelImage(NamedTuple):
    rank: int
    kernel: list
    image: list
    residue_field_only: bool = False


def mat_rank_kernel_image(m: ExactMatrix, exact: bool = False) -> RankKernelImage:
    """Rank, a kernel basis and a column-space basis.

    Over a truncation ring the computation is done on the reduction to the
    residue field and flagged; asking for exact=True there raises
    ResidueFieldOnly.
    """
    flagged = False
    if not m.ring.is_field:
        if exact:
            raise ResidueFieldOnly(f"exact kernel over {m.ring} is not available")
        m = m.reduce_to_residue()
        flagged = True
    R = m.ring
    red, piv = rref(m)
    L = red.to_lists()
    pivset = set(piv)
    kernel = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v = [R.zero] * m.cols
        v[f] = R.one
        for i, c in enumerate(piv):
            v[c] = R.neg(L[i][f])
        kernel.append(tuple(v))
    image = [m.column(c) for c in piv]
    return RankKernelImage(len(piv), kernel, image, flagged)


def span_basis(ring, vectors, dim: int | None = None) -> list:
    """Row-reduced basis of the span of the given vectors."""
    vectors = [list(v) for v in vectors]
    if not vectors:
        return []
    M = ExactMatrix.from_rows(ring, vectors, dim)
    red, piv = rref(M)
    return [red.row(i) for i in range(len(piv))]


def in_span(ring, basis, v) -> bool:
    if not basis:
        return all(ring.is_zero(x) for x in v)
    M = ExactMatrix.from_columns(ring, basis)
    return M.rank() == M.hstack(ExactMatrix.from_columns(ring, [v])).rank()


def charpoly(m: ExactMatrix) -> Poly:
    """det(xI - m) via reduction to upper Hessenberg form."""
    if m.rows != m.cols:
        raise DimensionError("charpoly of a non-square matrix")
    R = m.ring
    if not R.is_field:
        raise AlgebraError("charpoly needs a field or the rationals")
    n = m.rows
    H = m.to_lists()
    for j in range(1, n - 1):
        i = next((i for i in range(j, n) if not R.is_zero(H[i][j - 1])), None)
        if i is None:
            continue
        if i != j:
            H[i], H[j] = H[j], H[i]
            for row in H:
                row[i], row[j] = row[j], row[i]
        t_inv = R.inv(H[j][j - 1])
        for i in range(j + 1, n):
            u = R.mul(H[i][j - 1], t_inv)
            if R.is_zero(u):
                continue
            H[i] = [R.sub(a, R.mul(u, b)) for a, b in zip(H[i], H[j])]
            for row in H:
                row[j] = R.add(row[j], R.mul(u, row[i]))
    x = Poly.x(R)
    polys = [Poly(R, [R.one])]
    for k in range(n):
        pk = polys[k] * (x - H[k][k])
        prod = R.one
        for i in range(1, k + 1):
            prod = R.mul(prod, H[k - i + 1][k - i])
            if R.is_zero(prod):
                break
            pk = pk - polys[k - i] * R.mul(prod, H[k - i][k])
        polys.append(pk)
    return polys[n]


def poly_eval_matrix(f: Poly, m: ExactMatrix) -> ExactMatrix:
    """Evaluate f at a square matrix by Horner's rule."""
    n = m.rows
    acc = ExactMatrix.zeros(m.ring, n, n)
    eye = ExactMatrix.identity(m.ring, n)
    for c in reversed(f.coeffs):
        acc = acc @ m + eye.scale(c)
    return acc
