import random

import pytest
from hypothesis import given, settings, strategies as st

from ordtower.algebra import GF, AlgebraError, ExactMatrix, in_span, span_basis
from ordtower.semilinear import (DegeneratePairingError, SemilinearOperator, apply,
                                 fitting_decompose, is_stable, krylov_span, ordinary_projector,
                                 semilinear_dual)

F9 = GF(3, 2, (2, 2, 1))      # alpha^2 = alpha + 1


def random_matrix(F, n, rng, rank=None):
    A = ExactMatrix.from_rows(F, [[rng.randrange(F.q) for _ in range(n)] for _ in range(n)], n)
    if rank is not None:
        D = ExactMatrix.diag(F, [1] * rank + [0] * (n - rank))
        A = A @ D @ ExactMatrix.from_rows(F, [[rng.randrange(F.q) for _ in range(n)]
                                              for _ in range(n)], n)
    return A


def random_op(F, n, rng, twist):
    return SemilinearOperator(random_matrix(F, n, rng, rank=rng.randint(0, n)), twist)


fields = st.sampled_from([(GF(3), 0), (GF(5), 0), (GF(7), 0), (F9, 1), (F9, -1), (GF(5, 2), 1)])


def test_apply_identity():
    F = GF(5)
    op = SemilinearOperator(ExactMatrix.identity(F, 3), 0)
    assert apply(op, (1, 2, 3)) == (1, 2, 3)


def test_apply_frobenius_on_f9():
    alpha = F9.encode([0, 1])
    op = SemilinearOperator(ExactMatrix.identity(F9, 1), 1)
    # alpha^3 = alpha * (alpha + 1) = 2 alpha + 1
    assert apply(op, (alpha,)) == (F9.encode([1, 2]),)


def test_operator_requires_finite_field_and_square():
    from ordtower.algebra import QQ
    with pytest.raises(AlgebraError):
        SemilinearOperator(ExactMatrix.identity(QQ, 2), 0)
    with pytest.raises(AlgebraError):
        SemilinearOperator(ExactMatrix.zeros(GF(3), 2, 3), 0)


def test_fitting_zero_and_invertible():
    F = GF(5)
    z = fitting_decompose(SemilinearOperator(ExactMatrix.zeros(F, 3, 3), 0))
    assert z.ordinary_dim == 0 and z.nilpotent_dim == 3
    i = fitting_decompose(SemilinearOperator(ExactMatrix.diag(F, [2, 3, 4]), 0))
    assert i.ordinary_dim == 3 and i.nilpotent_dim == 0


def test_fitting_diag_1_0():
    res = fitting_decompose(SemilinearOperator(ExactMatrix.diag(GF(5), [1, 0]), 0))
    assert (res.ordinary_dim, res.nilpotent_dim) == (1, 1)


def test_projector_examples():
    F = GF(5)
    nil = SemilinearOperator(ExactMatrix.from_rows(F, [[0, 1], [0, 0]]), 0)
    assert ordinary_projector(nil).is_zero()
    assert ordinary_projector(SemilinearOperator(ExactMatrix.identity(F, 2), 0)).is_identity()
    # powers of diag(2, 0) stabilise with image e_1 and kernel e_2
    assert ordinary_projector(SemilinearOperator(ExactMatrix.diag(F, [2, 0]), 0)) == \
        ExactMatrix.diag(F, [1, 0])


def test_dual_of_identity():
    F = GF(7)
    I = ExactMatrix.identity(F, 3)
    assert semilinear_dual(SemilinearOperator(I, 0), I).matrix.is_identity()


def test_dual_needs_perfect_pairing():
    F = GF(3)
    with pytest.raises(DegeneratePairingError):
        semilinear_dual(SemilinearOperator(ExactMatrix.identity(F, 2), 0), ExactMatrix.zeros(F, 2, 2))


@settings(max_examples=60, deadline=None)
@given(fe=fields, n=st.integers(1, 9), seed=st.integers(0, 2 ** 32))
def test_fitting_is_a_decomposition(fe, n, seed):
    F, e = fe
    rng = random.Random(seed)
    op = random_op(F, n, rng, e)
    res = fitting_decompose(op)
    assert res.ordinary_dim + res.nilpotent_dim == n
    assert len(span_basis(F, list(res.ordinary_basis) + list(res.nilpotent_basis), n)) == n
    # bijective on the ordinary part, nilpotent on the other
    if res.ordinary_basis:
        assert is_stable(op, res.ordinary_basis)
        imgs = [apply(op, v) for v in res.ordinary_basis]
        assert len(span_basis(F, imgs, n)) == res.ordinary_dim
    for v in res.nilpotent_basis:
        w = v
        for _ in range(n):
            w = apply(op, w)
        assert all(x == 0 for x in w)
    P = res.projector
    assert P @ P == P
    # both summands are stable, so P commutes with op
    for v in [tuple(rng.randrange(F.q) for _ in range(n)) for _ in range(3)]:
        assert P.apply(apply(op, v)) == apply(op, P.apply(v))
    assert P.rank() == res.ordinary_dim


@settings(max_examples=40, deadline=None)
@given(fe=fields, n=st.integers(1, 8), seed=st.integers(0, 2 ** 32))
def test_fitting_uniqueness(fe, n, seed):
    """Any op-stable subspace on which op is bijective lies in the ordinary part."""
    F, e = fe
    rng = random.Random(seed)
    op = random_op(F, n, rng, e)
    ordinary = fitting_decompose(op).ordinary_basis
    for _ in range(3):
        k = rng.randint(1, min(6, n))
        W = krylov_span(op, [tuple(rng.randrange(F.q) for _ in range(n)) for _ in range(k)])
        if not W:
            continue
        bijective = len(span_basis(F, [apply(op, w) for w in W], n)) == len(W)
        if bijective:
            assert all(in_span(F, ordinary, w) for w in W)
        # its image under op^n always is bijective and therefore ordinary
        Wn = W
        for _ in range(n):
            Wn = span_basis(F, [apply(op, w) for w in Wn], n) if Wn else []
        assert all(in_span(F, ordinary, w) for w in Wn)


@settings(max_examples=40, deadline=None)
@given(fe=fields, k=st.integers(0, 5), m=st.integers(1, 5), seed=st.integers(0, 2 ** 32))
def test_ordinary_part_is_exact(fe, k, m, seed):
    """For V -> V/W with W stable, ordinary parts map onto the ordinary part of the quotient."""
    F, e = fe
    rng = random.Random(seed)
    A = random_matrix(F, k, rng, rng.randint(0, k)) if k else None
    C = random_matrix(F, m, rng, rng.randint(0, m))
    B = ExactMatrix.from_rows(F, [[rng.randrange(F.q) for _ in range(m)] for _ in range(k)], m) \
        if k else None
    if k:
        M = A.hstack(B).vstack(ExactMatrix.zeros(F, m, k).hstack(C))
    else:
        M = C
    big = fitting_decompose(SemilinearOperator(M, e))
    small = fitting_decompose(SemilinearOperator(C, e))
    image = [tuple(v[k:]) for v in big.ordinary_basis]
    assert len(span_basis(F, image, m)) == small.ordinary_dim if image else small.ordinary_dim == 0
    assert all(in_span(F, small.ordinary_basis, v) for v in image)


@settings(max_examples=40, deadline=None)
@given(fe=fields, n=st.integers(1, 7), seed=st.integers(0, 2 ** 32))
def test_duality_exchanges_projectors(fe, n, seed):
    F, e = fe
    rng = random.Random(seed)
    op = random_op(F, n, rng, e)
    while True:
        P = random_matrix(F, n, rng)
        if P.is_invertible():
            break
    dual = semilinear_dual(op, P)
    E = ordinary_projector(op)
    assert P.inverse() @ E.T @ P == ordinary_projector(dual)
    assert fitting_decompose(dual).ordinary_dim == fitting_decompose(op).ordinary_dim


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2 ** 32))
def test_dual_adjunction(n, seed):
    """<op x, y> = phi^e <x, op' y> on F_9."""
    F = F9
    rng = random.Random(seed)
    op = random_op(F, n, rng, 1)
    P = ExactMatrix.identity(F, n)
    dual = semilinear_dual(op, P)
    x = tuple(rng.randrange(F.q) for _ in range(n))
    y = tuple(rng.randrange(F.q) for _ in range(n))

    def pair(a, b):
        acc = F.zero
        for s, t in zip(a, b):
            acc = F.add(acc, F.mul(s, t))
        return acc
    assert pair(apply(op, x), y) == F.frob(pair(x, apply(dual, y)), 1)


def test_twist_is_irrelevant_over_prime_field():
    F = GF(5)
    rng = random.Random(3)
    M = random_matrix(F, 4, rng, 2)
    a = fitting_decompose(SemilinearOperator(M, 0))
    b = fitting_decompose(SemilinearOperator(M, -1))
    assert a.projector == b.projector
