import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ordtower.algebra import (GF, QQ, AlgebraError, DimensionError, ExactMatrix,
                              NormalizationError, Poly, PrecisionError, ResidueFieldOnly,
                              TruncatedCyclotomic, TruncatedLaurentSeries as TLS, charpoly,
                              make_ring, mat_rank_kernel_image, newton_unit_root_count)
from ordtower.algebra.matrix import poly_eval_matrix

PRIMES = [3, 5, 7]


def random_matrix(F, n, m, rng):
    return ExactMatrix.from_rows(F, [[rng.randrange(F.q) for _ in range(m)] for _ in range(n)], m)


def det_by_permutations(rows, ring_one, ring_zero):
    """Leibniz expansion over polynomial entries."""
    n = len(rows)
    total = ring_zero
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = ring_one
        for i in range(n):
            term = term * rows[i][perm[i]]
        total = total + term if sign > 0 else total - term
    return total


# -- fields ------------------------------------------------------------------------------

def test_prime_field_basics():
    F = GF(7)
    assert F.characteristic == 7 and F.q == 7
    assert F.mul(3, F.inv(3)) == 1
    assert len(list(F.units())) == 6


def test_extension_field_rejects_reducible_modulus():
    with pytest.raises(AlgebraError):
        GF(3, 2, (1, 0, 1 + 1))     # x^2 + 2 = (x - 1)(x + 1) over F_3


def test_extension_field_frobenius_order():
    F = GF(5, 2)
    for a in F.elements():
        assert F.frob(F.frob(a, 1), 1) == a
        assert F.frob(F.frob(a, 1), -1) == a


def test_truncated_cyclotomic_is_not_a_field():
    R = TruncatedCyclotomic(3, 2, 1)
    M = ExactMatrix.identity(R, 2)
    with pytest.raises(ResidueFieldOnly):
        from ordtower.algebra import rref
        rref(M)
    res = mat_rank_kernel_image(M)
    assert res.residue_field_only and res.rank == 2


def test_make_ring_round_trip():
    F = make_ring({"variant": "extension-field", "p": 3, "m": 2})
    assert F.q == 9
    assert make_ring({"variant": "prime-field", "p": 5}).q == 5


# -- rank / kernel / image -----------------------------------------------------------------

def test_identity_rank():
    res = mat_rank_kernel_image(ExactMatrix.identity(GF(5), 3))
    assert res.rank == 3 and res.kernel == []


def test_zero_matrix_kernel():
    res = mat_rank_kernel_image(ExactMatrix.zeros(GF(7), 2, 4))
    assert res.rank == 0 and len(res.kernel) == 4


def test_companion_of_x2_minus_1_rank():
    F = GF(3)
    C = ExactMatrix.companion(Poly(F, [2, 0, 1]))
    # x^2 - 1 = x^2 + 2; hand row reduction: [[0, 1], [1, 0]] is a permutation matrix
    assert C.to_lists() in ([[0, 1], [1, 0]],)
    assert mat_rank_kernel_image(C).rank == 2


@settings(max_examples=40, deadline=None)
@given(p=st.sampled_from(PRIMES), n=st.integers(1, 7), m=st.integers(1, 7), seed=st.integers(0, 2 ** 32))
def test_rank_nullity(p, n, m, seed):
    F = GF(p)
    A = random_matrix(F, n, m, random.Random(seed))
    res = mat_rank_kernel_image(A)
    assert res.rank + len(res.kernel) == m
    assert len(res.image) == res.rank
    for v in res.kernel:
        assert all(x == 0 for x in A.apply(v))


@settings(max_examples=20, deadline=None)
@given(n=st.integers(1, 5), seed=st.integers(0, 2 ** 32))
def test_rank_nullity_extension_field(n, seed):
    F = GF(3, 2)
    A = random_matrix(F, n, n + 1, random.Random(seed))
    res = mat_rank_kernel_image(A)
    assert res.rank + len(res.kernel) == n + 1


@settings(max_examples=30, deadline=None)
@given(p=st.sampled_from(PRIMES), n=st.integers(1, 6), seed=st.integers(0, 2 ** 32))
def test_inverse_and_solve(p, n, seed):
    F = GF(p)
    rng = random.Random(seed)
    A = random_matrix(F, n, n, rng)
    if A.is_invertible():
        assert (A @ A.inverse()).is_identity()
        B = random_matrix(F, n, 2, rng)
        assert A @ A.solve(B) == B
    else:
        assert A.rank() < n


def test_dimension_errors():
    F = GF(5)
    with pytest.raises(DimensionError):
        charpoly(ExactMatrix.zeros(F, 2, 3))
    with pytest.raises(DimensionError):
        ExactMatrix.zeros(F, 2, 3) @ ExactMatrix.zeros(F, 2, 3)


# -- characteristic polynomials ------------------------------------------------------------

def test_charpoly_identity():
    F = GF(5)
    x = Poly.x(F)
    assert charpoly(ExactMatrix.identity(F, 2)) == (x - Poly.const(F, 1)) ** 2


@pytest.mark.parametrize("p", PRIMES)
def test_charpoly_of_companion(p):
    F = GF(p)
    rng = random.Random(p)
    for deg in range(1, 6):
        f = Poly(F, [rng.randrange(p) for _ in range(deg)] + [1])
        assert charpoly(ExactMatrix.companion(f)) == f


def test_charpoly_matches_leibniz_expansion():
    F = GF(5)
    rng = random.Random(11)
    x = Poly.x(F)
    for _ in range(10):
        M = random_matrix(F, 4, 4, rng)
        rows = [[(x if i == j else Poly(F)) - Poly.const(F, M[i, j]) for j in range(4)]
                for i in range(4)]
        assert charpoly(M) == det_by_permutations(rows, Poly.const(F, 1), Poly(F))


def test_charpoly_over_rationals():
    from fractions import Fraction
    M = ExactMatrix.from_rows(QQ, [[Fraction(1, 2), 1], [3, 4]])
    f = charpoly(M)
    assert f.coeffs == (Fraction(1, 2) * 4 - 3, -Fraction(9, 2), 1)


@settings(max_examples=30, deadline=None)
@given(p=st.sampled_from(PRIMES), n=st.integers(1, 8), seed=st.integers(0, 2 ** 32))
def test_cayley_hamilton(p, n, seed):
    F = GF(p)
    M = random_matrix(F, n, n, random.Random(seed))
    assert poly_eval_matrix(charpoly(M), M).is_zero()


# -- Newton polygons -------------------------------------------------------------------------

def test_newton_example():
    res = newton_unit_root_count([5, -3, 1], 5)
    assert res.vertices == [(0, 1), (1, 0), (2, 0)]
    assert res.slope_zero_length == 1


@pytest.mark.parametrize("n", [1, 2, 5])
@pytest.mark.parametrize("p", [3, 7])
def test_newton_monomial(n, p):
    assert newton_unit_root_count([0] * n + [1], p).slope_zero_length == 0


def test_newton_x3_minus_x():
    assert newton_unit_root_count([0, -1, 0, 1], 7).slope_zero_length == 2


def test_newton_rejects_bad_input():
    from fractions import Fraction
    with pytest.raises(NormalizationError):
        newton_unit_root_count([1, 2], 5)   # leading coefficient 2
    with pytest.raises(NormalizationError):
        newton_unit_root_count([Fraction(1, 2), 1], 5)


def monic_int_poly():
    return st.lists(st.integers(-60, 60), min_size=0, max_size=5).map(lambda c: c + [1])


def _mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@settings(max_examples=80, deadline=None)
@given(f=monic_int_poly(), g=monic_int_poly(), p=st.sampled_from([3, 5, 7, 11]))
def test_newton_additive(f, g, p):
    if f[0] == 0 or g[0] == 0:
        return   # zero roots sit outside the polygon's points
    lhs = newton_unit_root_count(_mul(f, g), p).slope_zero_length
    rhs = newton_unit_root_count(f, p).slope_zero_length + newton_unit_root_count(g, p).slope_zero_length
    assert lhs == rhs


# -- series ----------------------------------------------------------------------------------

def test_series_product():
    F = GF(5)
    a = TLS(F, 0, [1, 1], 5)
    b = TLS(F, 0, [1, 4], 5)
    assert a * b == TLS(F, 0, [1, 0, 4], 5)


def test_series_invert():
    F = GF(7)
    assert TLS(F, 0, [1, 1], 3).invert() == TLS(F, 0, [1, 6, 1], 3)


def test_series_invert_zero_fails():
    F = GF(7)
    with pytest.raises((PrecisionError, ArithmeticError, AlgebraError)):
        TLS.zero(F, 4).invert()


def test_pth_root_of_coefficients_over_f25():
    F = GF(5, 2)
    alpha = F.generator
    s = TLS(F, 1, [alpha], 4).pth_root_coeffs()
    # brute-force oracle: the inverse of x -> x^5 on F_25 is x -> x^(5^(2-1))
    assert s[1] == F.pow(alpha, 5)
    assert F.pow(s[1], 5) == alpha


def test_pth_root_needs_finite_field():
    s = TLS(QQ, 0, [1], 3)
    with pytest.raises(AlgebraError):
        s.pth_root_coeffs()


def test_substitute_geometric():
    F = GF(5)
    one_over = TLS(F, 0, [1, 1, 1, 1, 1, 1], 6)       # 1/(1 - t)
    t2 = TLS(F, 2, [1], 8)
    assert one_over.substitute(t2) == TLS(F, 0, [1, 0, 1, 0, 1, 0, 1], 8)


def series_strategy(F):
    return st.tuples(st.integers(-2, 2), st.lists(st.integers(0, F.q - 1), min_size=1, max_size=6)) \
        .map(lambda t: TLS(F, t[0], t[1], 6))


F5 = GF(5)


@settings(max_examples=60, deadline=None)
@given(a=series_strategy(F5), b=series_strategy(F5), c=series_strategy(F5))
def test_series_ring_laws(a, b, c):
    assert a * b == b * a
    lhs, rhs = (a * b) * c, a * (b * c)
    prec = min(lhs.prec, rhs.prec)
    assert lhs.truncate(prec) == rhs.truncate(prec)
    assert (a + b) - b == a.truncate(min(a.prec, b.prec))
