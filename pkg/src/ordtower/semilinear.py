"""Frobenius-semilinear operators and their Fitting decomposition.

An operator with twist e acts by v -> M * phi^e(v) where phi is the p-power
map applied to coordinates.  Iterating gives

    op^n(v) = M phi^e(M) ... phi^{(n-1)e}(M) phi^{ne}(v),

so images and kernels of powers are linear-algebra questions about the
product matrix P_n; the kernel of op^n is phi^{-ne} of ker P_n.
"""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import (AlgebraError, DimensionError, ExactMatrix, FiniteField,
                      mat_rank_kernel_image, span_basis)


class DegeneratePairingError(AlgebraError):
    pass


@dataclass(frozen=True)
class SemilinearOperator:
    matrix: ExactMatrix
    twist: int = 0

    def __post_init__(self):
        if self.matrix.rows != self.matrix.cols:
            raise DimensionError("semilinear operator needs a square matrix")
        if not isinstance(self.matrix.ring, FiniteField):
            raise AlgebraError("semilinear operators are only supported over finite fields")

    @property
    def ring(self):
        return self.matrix.ring

    @property
    def dim(self) -> int:
        return self.matrix.rows

    def phi(self, v, e=None):
        e = self.twist if e is None else e
        F = self.ring
        return tuple(F.frob(x, e) for x in v)

    def __call__(self, v):
        return apply(self, v)

    def power_matrix(self, n: int) -> ExactMatrix:
        """P_n with op^n = P_n o phi^{ne}."""
        M = self.matrix
        P = ExactMatrix.identity(self.ring, self.dim)
        for i in range(n):
            P = P @ M.frob(i * self.twist)
        return P

    def compose(self, other: "SemilinearOperator") -> "SemilinearOperator":
        """self o other."""
        return SemilinearOperator(self.matrix @ other.matrix.frob(self.twist),
                                  self.twist + other.twist)

    def restrict(self, basis) -> ExactMatrix:
        """Matrix of op on a stable subspace, in coordinates of the given basis."""
        B = ExactMatrix.from_columns(self.ring, basis)
        images = ExactMatrix.from_columns(self.ring, [apply(self, b) for b in basis])
        return B.solve(images)


def apply(op: SemilinearOperator, v) -> tuple:
    v = tuple(v)
    if len(v) != op.dim:
        raise DimensionError(f"vector of length {len(v)} for operator of dimension {op.dim}")
    return op.matrix.apply(op.phi(v))


@dataclass(frozen=True)
class FittingDecomposition:
    ordinary_basis: list
    nilpotent_basis: list
    projector: ExactMatrix

    @property
    def ordinary_dim(self) -> int:
        return len(self.ordinary_basis)

    @property
    def nilpotent_dim(self) -> int:
        return len(self.nilpotent_basis)


def fitting_decompose(op: SemilinearOperator) -> FittingDecomposition:
    n = op.dim
    F = op.ring
    if n == 0:
        return FittingDecomposition([], [], ExactMatrix.zeros(F, 0, 0))
    P = op.power_matrix(n)
    rki = mat_rank_kernel_image(P)
    ordinary = span_basis(F, rki.image, n)
    # ker op^n = phi^{-ne}(ker P_n)
    nil = [tuple(F.frob(x, -n * op.twist) for x in v) for v in rki.kernel]
    nil = span_basis(F, nil, n)
    proj = _projector(F, ordinary, nil, n)
    return FittingDecomposition(ordinary, nil, proj)


def _projector(F, ordinary, nil, n) -> ExactMatrix:
    if not ordinary:
        return ExactMatrix.zeros(F, n, n)
    if not nil:
        return ExactMatrix.identity(F, n)
    B = ExactMatrix.from_columns(F, list(ordinary) + list(nil))
    k = len(ordinary)
    D = ExactMatrix.diag(F, [1] * k + [0] * (n - k))
    return B @ D @ B.inverse()


def ordinary_projector(op: SemilinearOperator) -> ExactMatrix:
    return fitting_decompose(op).projector


def restricted_operator(op: SemilinearOperator, basis) -> SemilinearOperator:
    """op on a stable subspace, in the coordinates of the (F_p-rational) basis."""
    return SemilinearOperator(op.restrict(basis), op.twist)


def semilinear_dual(op: SemilinearOperator, pairing: ExactMatrix) -> SemilinearOperator:
    """Adjoint op' with twist -e so that <op x, y> = phi^e <x, op' y>.

    The pairing is <x, y> = x^T P y.  Solving gives M' = P^{-1} phi^{-e}(M^T P).
    """
    P = pairing
    if P.rows != op.dim or P.cols != P.rows:
        raise DimensionError("pairing must be square of the operator's dimension")
    if not P.is_invertible():
        raise DegeneratePairingError("pairing is degenerate")
    e = op.twist
    Mp = P.inverse() @ (op.matrix.T @ P).frob(-e)
    return SemilinearOperator(Mp, -e)


def is_stable(op: SemilinearOperator, basis) -> bool:
    from .algebra import in_span
    return all(in_span(op.ring, basis, apply(op, b)) for b in basis)


def krylov_span(op: SemilinearOperator, vectors) -> list:
    """Smallest op-stable subspace containing the given vectors."""
    F = op.ring
    basis = span_basis(F, vectors, op.dim)
    while True:
        grown = span_basis(F, list(basis) + [apply(op, b) for b in basis], op.dim)
        if len(grown) == len(basis):
            return basis
        basis = grown
