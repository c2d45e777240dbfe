import random

import pytest
from hypothesis import given, settings, strategies as st

from ordtower.algebra import GF, ExactMatrix
from ordtower.fiber import (CarrierConfigError, ComponentIndex, OperatorWord, RelationError,
                            TableError, chain_check, cross_validate, degeneracy_description,
                            frobenius_splitting_check, from_vector, gamma_map,
                            inertia_composition_check, inertia_description, iterate, lifts,
                            list_components, modular_carrier, nonfree_carrier,
                            ordinary_contraction_check, product_dim, pullback_i_star,
                            regular_representation, residue_sum, residue_sum_check, section,
                            singular_frobenius_carrier, synthetic_carrier, table_dump, to_vector,
                            up_apply, up_power_closed_form, upstar_apply,
                            upstar_power_closed_form, validate_relations, zero_section,
                            teichmuller_decompose, TeichmullerError)

C = ComponentIndex


def random_section(c, r, rng):
    n = product_dim(c, r)
    return from_vector(c, r, [rng.randrange(c.p) for _ in range(n)])


def vadd(F, *vs):
    out = [F.zero] * len(vs[0])
    for v in vs:
        out = [F.add(x, y) for x, y in zip(out, v)]
    return tuple(out)


# -- components ------------------------------------------------------------------------------

def test_components_level_one():
    assert list_components(5, 1) == [C(1, 0, 1), C(0, 1, 1)]


@pytest.mark.parametrize("p,r,n", [(5, 2, 6), (3, 3, 6), (3, 2, 4), (3, 4, 12)])
def test_component_counts(p, r, n):
    comps = list_components(p, r)
    assert len(comps) == n == len(set(comps))
    assert all(k.r == r for k in comps)


def test_lifts_and_bad_indices():
    assert lifts(1, 3, 1, 2) == [1, 4, 7]
    with pytest.raises(ValueError):
        C(-1, 0)
    with pytest.raises(ValueError):
        list_components(3, 0)


# -- the carrier ---------------------------------------------------------------------------

@pytest.mark.parametrize("p,r,d", [(3, 1, 1), (3, 2, 2), (5, 2, 2), (3, 3, 1)])
def test_synthetic_carrier_relations(p, r, d):
    c = synthetic_carrier(p, r, d, random.Random(p * r + d), nil_dim=1)
    assert validate_relations(c) == []
    assert c.dims[r] == d * p ** (r - 1) + 1
    assert len(c.ordinary_basis(r)) == d * p ** (r - 1)


def test_section_rejects_foreign_components():
    c = synthetic_carrier(3, 2, 1, random.Random(0))
    with pytest.raises(ValueError):
        section(c, 2, {C(1, 0, 1): (1,)})
    with pytest.raises(ValueError):
        section(c, 2, {C(1, 1, 3): (1,)})


# -- U_p against a second transcription of the component formulas --------------------------

def up_by_hand(c, eta):
    """U_p for r = 2 (even) and r = 3 (odd), written out case by case."""
    p, r, F = c.p, eta.r, c.F
    E = eta.as_dict()
    out = {}
    if r == 2:
        out[C(2, 0, 1)] = c.frob[2].apply(E[C(2, 0, 1)])
        for u in range(1, p):
            out[C(1, 1, u)] = c.rho_down(2).apply(E[C(2, 0, 1)])
        out[C(0, 2, 1)] = vadd(F, *[c.rho_up(2).apply(c.diamond(1, v).apply(E[C(1, 1, v)]))
                                    for v in range(1, p)])
    elif r == 3:
        out[C(3, 0, 1)] = c.frob[3].apply(E[C(3, 0, 1)])
        for u in range(1, p):
            out[C(2, 1, u)] = c.rho_down(3).apply(E[C(3, 0, 1)])
            # a = b - 1: sum of <u'> over lifts of u to (Z/p^2)^x, same source index
            lifted = [v for v in range(1, p * p) if v % p == u]
            out[C(1, 2, u)] = vadd(F, *[c.diamond(2, v).apply(E[C(2, 1, u)]) for v in lifted])
        out[C(0, 3, 1)] = vadd(F, *[c.rho_up(3).apply(E[C(1, 2, v)]) for v in range(1, p)])
    return section(c, r, out)


def upstar_by_hand(c, eta):
    p, r, F = c.p, eta.r, c.F
    E = eta.as_dict()
    assert r == 2
    out = {C(2, 0, 1): vadd(F, *[c.rho_up(2).apply(E[C(1, 1, v)]) for v in range(1, p)])}
    for u in range(1, p):
        out[C(1, 1, u)] = c.diamond_inv(1, u).apply(c.rho_down(2).apply(E[C(0, 2, 1)]))
    out[C(0, 2, 1)] = c.p_N_power(2, -1).apply(c.frob[2].apply(E[C(0, 2, 1)]))
    return section(c, r, out)


@pytest.mark.parametrize("p,r", [(3, 2), (5, 2), (3, 3)])
def test_up_matches_hand_transcription(p, r):
    rng = random.Random(10 * p + r)
    c = synthetic_carrier(p, r, 2, rng, nil_dim=1)
    for _ in range(5):
        eta = random_section(c, r, rng)
        assert up_apply(c, eta) == up_by_hand(c, eta)


@pytest.mark.parametrize("p", [3, 5])
def test_upstar_matches_hand_transcription(p):
    rng = random.Random(p)
    c = synthetic_carrier(p, 2, 2, rng, nil_dim=1)
    for _ in range(5):
        eta = random_section(c, 2, rng)
        assert upstar_apply(c, eta) == upstar_by_hand(c, eta)


def test_operators_kill_zero():
    c = synthetic_carrier(3, 2, 1, random.Random(1))
    z = zero_section(c, 2)
    assert up_apply(c, z).is_zero() and upstar_apply(c, z).is_zero()


# -- closed forms for high powers ------------------------------------------------------------

carrier_shapes = st.tuples(st.sampled_from([3, 5]), st.integers(1, 3), st.integers(1, 2))


@settings(max_examples=20, deadline=None)
@given(shape=carrier_shapes, seed=st.integers(0, 2 ** 32))
def test_closed_forms_match_iteration(shape, seed):
    p, r, d = shape
    if p == 5 and r == 3:
        r = 2
    rng = random.Random(seed)
    c = synthetic_carrier(p, r, d, rng, nil_dim=1)
    eta = random_section(c, r, rng)
    for n in range(r, 2 * r + 1):
        assert up_power_closed_form(c, eta, n) == iterate(up_apply, c, eta, n)
        assert upstar_power_closed_form(c, eta, n) == iterate(upstar_apply, c, eta, n)


@pytest.mark.parametrize("p,r", [(3, 2), (3, 3), (5, 2)])
def test_high_powers_see_only_the_good_component(p, r):
    rng = random.Random(r)
    c = synthetic_carrier(p, r, 1, rng, nil_dim=1)
    eta = random_section(c, r, rng)
    top, bottom = C(r, 0, 1), C(0, r, 1)
    only_top = section(c, r, {top: eta[top]})
    only_bottom = section(c, r, {bottom: eta[bottom]})
    assert iterate(up_apply, c, eta, r) == iterate(up_apply, c, only_top, r)
    assert iterate(upstar_apply, c, eta, r) == iterate(upstar_apply, c, only_bottom, r)


def test_closed_form_needs_n_at_least_r():
    c = synthetic_carrier(3, 2, 1, random.Random(0))
    eta = zero_section(c, 2)
    with pytest.raises(ValueError):
        up_power_closed_form(c, eta, 1)
    with pytest.raises(ValueError):
        upstar_power_closed_form(c, eta, 1)


# -- contraction, gamma maps, residues -------------------------------------------------------

@pytest.mark.parametrize("p,r,d", [(3, 1, 2), (3, 2, 2), (5, 2, 1), (3, 3, 1)])
def test_contraction_onto_ordinary_part(p, r, d):
    c = synthetic_carrier(p, r, d, random.Random(d), nil_dim=1)
    rep = ordinary_contraction_check(c)
    assert rep.holds, rep.as_dict()
    assert rep.e_dim == rep.e_star_dim == rep.ordinary_dim == d * p ** (r - 1)
    assert rep.rank == d


def test_gamma_map_sections_are_fixed_by_up():
    """gamma^inf(nu) lies in the ordinary part of U_p and pulls back to nu."""
    rng = random.Random(4)
    c = synthetic_carrier(3, 2, 2, rng, nil_dim=1)
    for nu in c.ordinary_basis(2):
        eta = gamma_map(c, "inf", nu, 2)
        assert pullback_i_star(eta, "inf") == tuple(nu)
        # U_p gamma(nu) = gamma(F_* nu)
        assert up_apply(c, eta) == gamma_map(c, "inf", c.frob[2].apply(nu), 2)
        eta0 = gamma_map(c, "0", nu, 2)
        assert pullback_i_star(eta0, "0") == tuple(nu)


def test_gamma_of_zero_and_non_ordinary():
    c = synthetic_carrier(3, 2, 1, random.Random(2), nil_dim=1)
    zero = tuple([0] * c.dims[2])
    assert gamma_map(c, "inf", zero, 2).is_zero()
    nil = tuple([0] * (c.dims[2] - 1) + [1])
    with pytest.raises(CarrierConfigError):
        gamma_map(c, "inf", nil, 2)
    with pytest.raises(ValueError):
        gamma_map(c, "north", zero, 2)


@pytest.mark.parametrize("star", ["inf", "0"])
def test_residue_sums_vanish(star):
    c = synthetic_carrier(3, 2, 2, random.Random(5), nil_dim=1)
    for nu in c.ordinary_basis(2):
        assert residue_sum_check(c, star, nu).status == "pass"
    assert residue_sum(c, zero_section(c, 2)) == [0]


def test_residue_check_skipped_without_functionals():
    c = synthetic_carrier(3, 1, 2, random.Random(0), with_residue=False)
    assert residue_sum_check(c, "inf", c.ordinary_basis(1)[0]).status == "skipped"


def test_splitting_ranks_d_2d_d():
    c = synthetic_carrier(3, 2, 2, random.Random(6))
    rep = frobenius_splitting_check(c)
    assert rep.ranks == (2, 4, 2) and rep.holds


def test_nonfree_carrier_is_flagged():
    c = nonfree_carrier(3, 2, 1, random.Random(0))
    assert validate_relations(c)
    with pytest.raises(RelationError) as exc:
        ordinary_contraction_check(c)
    assert exc.value.failures
    assert not frobenius_splitting_check(c).holds


def test_singular_frobenius_rejected():
    c = singular_frobenius_carrier(3, 2, random.Random(0))
    with pytest.raises(CarrierConfigError):
        ordinary_contraction_check(c)


def test_modular_carrier_level_one():
    c = modular_carrier(5, 7, {3: 0, 4: 3, 5: 4, 6: 7})
    assert c.dims[1] == 14
    rep = ordinary_contraction_check(c)
    assert rep.holds and rep.rank == rep.ordinary_dim
    with pytest.raises(CarrierConfigError):
        modular_carrier(5, 7, {4: 2})


def test_operator_diamond_commutation_on_level_one():
    """At level one the projection operators commute with the Teichmuller diamonds."""
    c = synthetic_carrier(5, 1, 3, random.Random(8), nil_dim=1)
    T = c.diamond(1, 2)
    for op in (up_apply, upstar_apply):
        rng = random.Random(0)
        for _ in range(3):
            eta = random_section(c, 1, rng)
            twisted = section(c, 1, {k: T.apply(v) for k, v in eta.parts})
            lhs = to_vector(op(c, twisted))
            rhs = to_vector(section(c, 1, {k: T.apply(v) for k, v in op(c, eta).parts}))
            assert lhs == rhs


# -- degeneracy tables ---------------------------------------------------------------------

@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_good_component_rows(p, r):
    row = degeneracy_description("pi2", C(r + 1, 0, 1), p)
    assert row.target == C(r, 0, 1) and str(row.word) == "id"
    row = degeneracy_description("pi1", C(0, r + 1, 1), p)
    assert row.target == C(0, r, 1) and str(row.word) == "<p>_N"
    row = degeneracy_description("sigma", C(0, r + 1, 1), p)
    assert row.target == C(0, r, 1) and str(row.word) == "<p>_N rho"


def test_inertia_rows():
    assert inertia_description(2, C(2, 1, 1), 3).word.is_identity
    row = inertia_description(2, C(1, 2, 1), 3)
    assert str(row.word) == f"<{pow(2, -1, 9)}>"
    assert row.target == C(1, 2, 2)
    assert inertia_description(1, C(1, 2, 2), 3).word.normal_form(3, 2)[2] == 1
    with pytest.raises(TableError):
        inertia_description(3, C(1, 1, 1), 3)


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_tables_are_consistent(p, r):
    assert cross_validate(p, r).holds
    for label in ("sigma", "rho"):
        assert chain_check(label, p, r) == []
    assert inertia_composition_check(2, p + 1, p, r) == []


def test_table_dump_shape():
    dump = table_dump(5, 1)
    assert set(dump) == {"sigma", "rho", "pi1", "pi2"}
    assert all(len(rows) == 6 for rows in dump.values())


def test_unknown_labels():
    with pytest.raises(TableError):
        degeneracy_description("tau", C(1, 0, 1), 3)
    with pytest.raises(TableError):
        OperatorWord((("X", 1),))
    with pytest.raises(TableError):
        chain_check("pi1", 3, 1)


def test_word_evaluation_on_carrier():
    c = synthetic_carrier(3, 2, 2, random.Random(3))
    w = OperatorWord.parse("F", "rho")
    assert w.evaluate(c, 2) == c.frob[1] @ c.rho_down(2)
    dead = OperatorWord.parse("rho", "rho*")
    assert dead.normal_form(3, 1) is None
    assert dead.evaluate(c, 1).is_zero()


# -- Teichmuller decomposition -----------------------------------------------------------------

@pytest.mark.parametrize("p", [3, 5, 7])
def test_regular_representation_splits_into_lines(p):
    dec = teichmuller_decompose(GF(p), regular_representation(GF(p), p), p)
    assert dec.dims == [1] * (p - 1)
    assert all(dec.check().values())


def test_trivial_action_is_the_zero_character():
    F = GF(5)
    dec = teichmuller_decompose(F, ExactMatrix.identity(F, 3), 5)
    assert dec.idempotents[0].is_identity() and dec.f_prime.is_zero()


def test_carrier_teichmuller_dims_match_characters():
    c = synthetic_carrier(5, 1, 4, random.Random(9))
    dec = teichmuller_decompose(c.F, c.teich[1], 5)
    assert sum(dec.dims) == c.dims[1]


def test_teichmuller_errors():
    with pytest.raises(TeichmullerError):
        teichmuller_decompose(GF(3), ExactMatrix.identity(GF(3), 2), 7)
    with pytest.raises(TeichmullerError):
        teichmuller_decompose(GF(5), ExactMatrix.from_rows(GF(5), [[2]]), 3)
    with pytest.raises(TeichmullerError):
        teichmuller_decompose(GF(5), ExactMatrix.identity(GF(5), 1), 7)
