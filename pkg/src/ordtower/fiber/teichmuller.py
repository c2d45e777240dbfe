"""Eigenspace decomposition for an action of (Z/p)^x through its Teichmuller characters."""
from __future__ import annotations

from dataclasses import dataclass

from ..algebra import AlgebraError, ExactMatrix, mat_rank_kernel_image
from .carrier import primitive_root


class TeichmullerError(AlgebraError):
    pass


def _root_of_unity(F, p: int):
    """omega(g) for the primitive root g mod p, as an element of F of exact order p - 1."""
    n = p - 1
    if F.characteristic == p:
        return F.canonical(primitive_root(p))
    if (F.q - 1) % n:
        raise TeichmullerError(f"F_{F.q} has no primitive {n}-th root of unity")
    for z in F.units():
        if F.pow(z, n) == F.one and all(F.pow(z, n // q) != F.one for q in _primes(n)):
            return z
    raise TeichmullerError("no primitive root of unity found")


def _primes(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass
class TeichmullerDecomposition:
    p: int
    idempotents: list        # f_0, ..., f_{p-2}
    eigenspaces: list        # bases of f_j M
    f_prime: ExactMatrix     # sum over j != 0, the projection away from the 0-eigenspace

    @property
    def dims(self) -> list:
        return [len(b) for b in self.eigenspaces]

    def check(self) -> dict:
        """Exact identities: sum f_j = 1, f_i f_j = delta_ij f_i, f' = 1 - f_0."""
        F = self.idempotents[0].ring
        n = self.idempotents[0].rows
        I = ExactMatrix.identity(F, n)
        total = ExactMatrix.zeros(F, n, n)
        for f in self.idempotents:
            total = total + f
        orth = all((fi @ fj).is_zero() if i != j else fi @ fi == fi
                   for i, fi in enumerate(self.idempotents)
                   for j, fj in enumerate(self.idempotents))
        return {"sum_is_identity": total == I, "orthogonal_idempotents": orth,
                "dims_sum": sum(self.dims) == n,
                "f_prime": self.f_prime == I - self.idempotents[0]}


def teichmuller_decompose(F, g_action: ExactMatrix, p: int) -> TeichmullerDecomposition:
    """Split M by f_j = (p-1)^-1 sum_a omega(a)^-j <a>, given the matrix of <g> for g the
    least primitive root mod p.

    Requires p - 1 invertible in F and <g>^(p-1) = 1.
    """
    n = p - 1
    if n % F.characteristic == 0:
        raise TeichmullerError(f"p - 1 = {n} is not invertible in characteristic {F.characteristic}")
    dim = g_action.rows
    I = ExactMatrix.identity(F, dim)
    if not g_action.power(n).is_identity():
        raise TeichmullerError("the action does not factor through (Z/p)^x")
    zeta = _root_of_unity(F, p)
    inv_n = F.inv(n % F.p)
    powers = [I]
    for _ in range(1, n):
        powers.append(powers[-1] @ g_action)
    idems, spaces = [], []
    for j in range(n):
        f = ExactMatrix.zeros(F, dim, dim)
        for i in range(n):
            f = f + powers[i].scale(F.pow(zeta, -i * j))
        f = f.scale(inv_n)
        idems.append(f)
        spaces.append(mat_rank_kernel_image(f).image)
    f_prime = ExactMatrix.zeros(F, dim, dim)
    for f in idems[1:]:
        f_prime = f_prime + f
    return TeichmullerDecomposition(p, idems, spaces, f_prime)


def regular_representation(F, p: int) -> ExactMatrix:
    """<g> acting on F[(Z/p)^x] by cyclically shifting g^i -> g^(i+1)."""
    n = p - 1
    rows = [[F.one if (i - 1) % n == j else F.zero for j in range(n)] for i in range(n)]
    return ExactMatrix.from_rows(F, rows, n)
