import random

import pytest
from hypothesis import given, settings, strategies as st

from ordtower.algebra import GF, Poly
from ordtower.curves import (INF, ArtinSchreierCurve, CrossedUnion, DivisorData, DivisorError,
                             EllipticCurve, Place, ProjectiveLine, RatFunc, UnramifiedCoverError,
                             UnsupportedCurveError, cartier_apply, differentials_with_poles_basis,
                             hasse_witt, nakajima_check, pole_improvement_check, pullback,
                             residue_at, residue_sum, rosenlicht_sections_simple,
                             trace_pushforward)


def as_curve(p, poles):
    """y^p - y = sum of 1/(x-a)^m and x^m terms."""
    F = GF(p)
    x = RatFunc.x(F)
    f = RatFunc.zero(F)
    for a, m in poles:
        f = f + (x ** m if a is None else (x - RatFunc.const(F, a)).inverse() ** m)
    return ArtinSchreierCurve(F, f)


def random_ratfunc(F, rng, deg=3, den_roots=()):
    num = Poly(F, [rng.randrange(F.q) for _ in range(deg + 1)])
    den = Poly(F, [1])
    for a in den_roots:
        den = den * Poly(F, [F.neg(a), 1])
    return RatFunc(num, den)


def brute_point_count(p, a, b):
    """Projective points of y^2 = x^3 + a x + b by counting square roots."""
    squares = {}
    for y in range(p):
        squares[y * y % p] = squares.get(y * y % p, 0) + 1
    return 1 + sum(squares.get((x ** 3 + a * x + b) % p, 0) for x in range(p))


# -- bases -------------------------------------------------------------------------------------

def test_projective_line_has_no_holomorphic_differentials():
    assert differentials_with_poles_basis(ProjectiveLine(GF(3)), DivisorData()) == []


def test_elliptic_invariant_differential():
    F = GF(5)
    E = EllipticCurve(F, [0, 0, 0, 1, 1])
    basis = differentials_with_poles_basis(E, DivisorData())
    assert len(basis) == 1
    w = E.invariant_differential()
    S = E.differential_space(DivisorData())
    assert S.contains(w) and not w.is_zero()


def test_artin_schreier_genus_four():
    c = as_curve(5, [(None, 3)])
    assert c.genus() == 4
    assert len(differentials_with_poles_basis(c, DivisorData())) == 4


def test_artin_schreier_rejects_bad_f():
    F = GF(3)
    x = RatFunc.x(F)
    with pytest.raises(UnsupportedCurveError):
        ArtinSchreierCurve(F, x ** 3)            # pole order divisible by p
    with pytest.raises(UnsupportedCurveError):
        ArtinSchreierCurve(F, RatFunc.const(F, 1))
    # x^2 + 1 has no root in F_3, so the poles are not rational
    with pytest.raises(UnsupportedCurveError):
        ArtinSchreierCurve(F, RatFunc(Poly(F, [1]), Poly(F, [1, 0, 1])))


@pytest.mark.parametrize("p,poles", [(3, [(None, 1)]), (3, [(0, 1), (None, 2)]),
                                     (5, [(0, 1), (1, 2)]), (7, [(None, 3)])])
def test_space_dimension_is_riemann_roch(p, poles):
    c = as_curve(p, poles)
    g = c.genus()
    assert c.differential_space(DivisorData()).dim == g
    pl = c.rational_places()[0]
    # one simple pole adds nothing (residue theorem); two add one
    q = c.rational_places()[-1]
    assert c.differential_space(DivisorData.of((pl, 1))).dim == g
    assert c.differential_space(DivisorData.of((pl, 1), (q, 1))).dim == g + 1


# -- the Cartier operator on the line ----------------------------------------------------------

@pytest.mark.parametrize("p", [3, 5, 7])
def test_cartier_local_formula_examples(p):
    F = GF(p)
    P = ProjectiveLine(F)
    t = RatFunc.x(F)
    one = RatFunc.const(F, 1)
    origin = Place("finite", 0)
    dt = P.differential([one])
    assert cartier_apply(P, dt, [origin]).is_zero()
    assert cartier_apply(P, P.differential([t ** (p - 1)]), [origin]) == dt
    dlog = P.differential([t.inverse()])
    assert cartier_apply(P, dlog, [origin, INF]) == dlog
    assert residue_at(dt, origin) == 0
    assert residue_at(dlog, origin) == 1
    assert residue_at(dlog, INF) == F.neg(F.one)


def _random_function(c, rng):
    F = c.F
    roots = [a for a in (0, 1) if a < F.q]
    return tuple(random_ratfunc(F, rng, 2, roots[:rng.randint(0, 2)]) if j < 2 else RatFunc.zero(F)
                 for j in range(c.rank))


CURVES = [ProjectiveLine(GF(5)), EllipticCurve(GF(5), [0, 0, 0, 1, 1]),
          EllipticCurve(GF(7), [0, 0, 0, 1, 3]), as_curve(3, [(0, 1), (None, 1)]),
          as_curve(5, [(None, 3)])]


@settings(max_examples=30, deadline=None)
@given(ci=st.integers(0, len(CURVES) - 1), seed=st.integers(0, 2 ** 32))
def test_cartier_identities(ci, seed):
    c = CURVES[ci]
    rng = random.Random(seed)
    F = c.F
    w1 = c.differential(_random_function(c, rng))
    w2 = c.differential(_random_function(c, rng))
    # additivity
    assert c.cartier(w1 + w2) == c.cartier(w1) + c.cartier(w2)
    # V(u^p w) = u V(w)
    u = _random_function(c, rng)
    up = u
    for _ in range(c.p - 1):
        up = c.mul(up, u)
    assert c.cartier(w1.times(up)) == c.cartier(w1).times(u)
    # V kills exact differentials
    assert c.cartier(c.exact(u)).is_zero()


@settings(max_examples=30, deadline=None)
@given(p=st.sampled_from([3, 5, 7]), seed=st.integers(0, 2 ** 32))
def test_cartier_fixes_dlog(p, seed):
    F = GF(p)
    rng = random.Random(seed)
    for c in (ProjectiveLine(F), as_curve(p, [(0, 1), (None, 1)])):
        g = random_ratfunc(F, rng, 2, [1])
        if g.is_zero():
            continue
        u = (g,) + tuple(RatFunc.zero(F) for _ in range(c.rank - 1))
        du = c.exact(u)
        dlog = du.times((g.inverse(),) + u[1:])
        assert c.cartier(dlog) == dlog


@pytest.mark.parametrize("p,poles", [(3, [(0, 1), (None, 1)]), (5, [(0, 1), (None, 1)]),
                                     (7, [(None, 2)])])
def test_residue_identity_and_theorem(p, poles):
    c = as_curve(p, poles)
    rng = random.Random(p)
    places = c.rational_places()
    for _ in range(8):
        chosen = rng.sample(places, min(3, len(places)))
        S = c.differential_space(DivisorData.of(*[(pl, rng.randint(1, 3)) for pl in chosen]))
        w = S.element([rng.randrange(p) for _ in range(S.dim)])
        v = cartier_apply(c, w, check_places=chosen)
        for pl in chosen:
            assert c.F.frob(residue_at(v, pl), 1) == residue_at(w, pl)
        assert residue_sum(w) == 0


# -- Hasse-Witt ----------------------------------------------------------------------------------

def test_hasse_witt_projective_line():
    assert hasse_witt(ProjectiveLine(GF(5))).gamma == 0


def test_hasse_witt_examples():
    F = GF(5)
    assert brute_point_count(5, 1, 1) == 9
    assert hasse_witt(EllipticCurve(F, [0, 0, 0, 1, 1])).gamma == 1
    assert hasse_witt(EllipticCurve(F, [0, 0, 0, 0, 1])).gamma == 0


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_hasse_witt_matches_point_counts(p):
    F = GF(p)
    for a in range(p):
        for b in range(p):
            if (4 * a ** 3 + 27 * b * b) % p == 0:
                continue
            trace = p + 1 - brute_point_count(p, a, b)
            assert hasse_witt(EllipticCurve(F, [0, 0, 0, a, b])).gamma == (1 if trace % p else 0)


@pytest.mark.parametrize("p,poles", [(3, [(None, 1)]), (3, [(0, 1), (None, 1)]),
                                     (3, [(0, 1), (1, 1), (None, 1)]), (5, [(0, 1), (None, 2)]),
                                     (5, [(None, 3)])])
def test_deuring_shafarevich(p, poles):
    c = as_curve(p, poles)
    assert hasse_witt(c).gamma == (len(c.branch_points()) - 1) * (p - 1)


# -- pole improvement -----------------------------------------------------------------------

def test_pole_improvement_small_n():
    c = as_curve(3, [(0, 1), (None, 1)])
    D = DivisorData.of(*[(pl, 1) for pl in c.rational_places()[:2]])
    assert pole_improvement_check(c, D, 1)
    assert pole_improvement_check(c, D, 3)
    with pytest.raises(ValueError):
        pole_improvement_check(c, D, 0)


@pytest.mark.parametrize("p,poles", [(3, [(0, 1), (None, 1)]), (3, [(None, 2)]), (5, [(0, 1)])])
def test_pole_improvement_family(p, poles):
    c = as_curve(p, poles)
    rng = random.Random(p)
    for n in sorted(rng.sample(range(1, p * p + 1), 3)):
        pls = rng.sample(c.rational_places(), 2)
        assert pole_improvement_check(c, DivisorData.of(*[(pl, 1) for pl in pls]), n)


# -- Nakajima ------------------------------------------------------------------------------------

def test_nakajima_one_branch_point():
    c = as_curve(5, [(None, 3)])
    res = nakajima_check(c, c.branch_points())
    assert res.free and res.rank == 0 and res.ordinary_dim == 0


def test_nakajima_two_branch_points_p3():
    c = as_curve(3, [(0, 1), (1, 1)])
    res = nakajima_check(c, c.branch_points())
    assert res.holds and res.rank == 1 and res.ordinary_dim == 3


def test_nakajima_three_branch_points_p5():
    c = as_curve(5, [(0, 1), (1, 1), (None, 1)])
    res = nakajima_check(c, c.branch_points())
    assert res.holds and res.rank == 2 and res.ordinary_dim == 10
    assert hasse_witt(c).gamma == 8


def test_nakajima_extra_unramified_point_raises_rank():
    c = as_curve(3, [(0, 1), (None, 1)])
    res = nakajima_check(c, c.branch_points() + [1])
    # gamma_X - 1 + deg D_red = 0 - 1 + 3
    assert res.holds and res.rank == 2 and res.ordinary_dim == 6


def test_nakajima_needs_branch_locus():
    c = as_curve(3, [(0, 1), (None, 1)])
    with pytest.raises(ValueError):
        nakajima_check(c, [0])


def test_nakajima_unramified_cover_rejected():
    c = as_curve(3, [(None, 1)])
    object.__setattr__(c, "poles", [])
    c.m_inf = 0
    with pytest.raises(UnramifiedCoverError):
        nakajima_check(c, [])


# -- pushforward ---------------------------------------------------------------------------------

@pytest.mark.parametrize("p", [3, 5])
def test_trace_of_y_power(p):
    c = as_curve(p, [(0, 1), (None, 1)])
    F = c.F
    rng = random.Random(p)
    line = ProjectiveLine(F)
    for _ in range(5):
        w = line.differential([random_ratfunc(F, rng, 2, [0])])
        up = pullback(c, w)
        ypow = tuple(RatFunc.const(F, 1) if j == p - 1 else RatFunc.zero(F) for j in range(p))
        pushed = trace_pushforward(c, up.times(ypow))
        assert pushed.coeffs == tuple(-g for g in w.coeffs)
        assert trace_pushforward(c, up).is_zero()


@pytest.mark.parametrize("p", [3, 5])
def test_cartier_commutes_with_pushforward(p):
    c = as_curve(p, [(0, 1), (None, 2)])
    rng = random.Random(7)
    line_cartier = lambda w: w.curve.cartier(w)
    for _ in range(5):
        w = c.differential(_random_function(c, rng))
        assert trace_pushforward(c, c.cartier(w)) == line_cartier(trace_pushforward(c, w))


# -- Rosenlicht ----------------------------------------------------------------------------------

def test_two_lines_one_crossing():
    F = GF(3)
    L1, L2 = ProjectiveLine(F), ProjectiveLine(F)
    res = rosenlicht_sections_simple(CrossedUnion([L1, L2], [(Place("finite", 0), Place("finite", 0))]))
    assert res.dim == 0 and res.matches


def test_two_lines_two_crossings():
    F = GF(5)
    L1, L2 = ProjectiveLine(F), ProjectiveLine(F)
    cross = [(Place("finite", 0), Place("finite", 0)), (Place("finite", 1), Place("finite", 1))]
    res = rosenlicht_sections_simple(CrossedUnion([L1, L2], cross))
    assert res.dim == 1 and res.arithmetic_genus == 1
    eta1, eta2 = res.basis[0]
    for pl1, pl2 in cross:
        assert F.add(residue_at(eta1, pl1), residue_at(eta2, pl2)) == 0


def test_single_smooth_component():
    E = EllipticCurve(GF(5), [0, 0, 0, 1, 1])
    res = rosenlicht_sections_simple(CrossedUnion([E]))
    assert res.dim == 1 and res.matches


def test_crossing_places_must_be_distinct():
    F = GF(3)
    L = ProjectiveLine(F)
    with pytest.raises(DivisorError):
        CrossedUnion([L, L], [(Place("finite", 0), Place("finite", 0)),
                              (Place("finite", 0), Place("finite", 1))])
