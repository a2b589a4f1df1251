import pytest

from bianchilab.field import (
    ideal_from_generators,
    ideals_of_norm_up_to,
    make_field,
    principal_ideal,
    unit_ideal,
)
from bianchilab.congruence import (
    FLAVORS,
    HECKE,
    PRINCIPAL,
    SEMI,
    LevelStructure,
    QuotientTooLargeError,
    check_index_level,
    coset_table,
    count_sl2_exhaustive,
    is_torsion_free,
    p1_size_formula,
    sl2_order_formula,
    sl2_quotient,
    subgroup_index,
)
from bianchilab.matrices import Mat2
from bianchilab.presentations import presentation


F = make_field(-1)
P = presentation(F)


def ideal_of(a, b=0):
    return ideal_from_generators(F, [F.element(a, b)])


def test_quotient_orders_spec_examples():
    assert sl2_quotient(F, ideal_of(1, 1)).order == 6
    assert sl2_quotient(F, ideal_of(2)).order == 48
    assert sl2_quotient(F, ideal_of(3)).order == 720


def test_enumeration_matches_formula_small():
    for I in ideals_of_norm_up_to(F, 12):
        if I.norm == 1:
            continue
        q = sl2_quotient(F, I)
        assert q.order == sl2_order_formula(F, I)
        assert count_sl2_exhaustive(F, I) == q.order


def test_order_multiplicative_over_coprime():
    ideals = [I for I in ideals_of_norm_up_to(F, 60) if I.norm > 1]
    from bianchilab.field import factor_ideal

    for I in ideals:
        for J in ideals:
            pi = {p.hnf for p, _ in factor_ideal(F, I)}
            pj = {p.hnf for p, _ in factor_ideal(F, J)}
            if pi & pj:
                continue
            assert sl2_order_formula(F, I * J) == sl2_order_formula(
                F, I
            ) * sl2_order_formula(F, J)


def test_quotient_too_large():
    big = principal_ideal(F, F.element(101))
    with pytest.raises(QuotientTooLargeError) as err:
        sl2_quotient(F, big)
    assert "bound" in str(err.value)


def test_subgroup_indices_spec_examples():
    opi = ideal_of(1, 1)
    assert subgroup_index(F, LevelStructure(opi, PRINCIPAL)) == 6
    assert subgroup_index(F, LevelStructure(opi, HECKE)) == 3
    assert subgroup_index(F, LevelStructure(ideal_of(2, 1), HECKE)) == 6
    assert subgroup_index(F, LevelStructure(ideal_of(3), HECKE)) == 10


def test_index_divisibility_chain():
    for I in ideals_of_norm_up_to(F, 40):
        if I.norm == 1:
            continue
        i_pr = subgroup_index(F, LevelStructure(I, PRINCIPAL))
        i_semi = subgroup_index(F, LevelStructure(I, SEMI))
        i_hecke = subgroup_index(F, LevelStructure(I, HECKE))
        assert i_pr % i_semi == 0
        assert i_semi % i_hecke == 0


def test_check_index_level_sweep():
    for d in (-1, -3):
        Fd = make_field(d)
        for I in ideals_of_norm_up_to(Fd, 100):
            for flavor in FLAVORS:
                assert check_index_level(Fd, LevelStructure(I, flavor))


def test_membership_predicates_match_eq_ppal():
    import random

    rng = random.Random(2)
    I = ideal_of(2, 1)
    lv_pr = LevelStructure(I, PRINCIPAL)
    lv_h = LevelStructure(I, HECKE)
    lv_s = LevelStructure(I, SEMI)
    one = F.one
    for _ in range(100):
        w = [rng.choice([1, 2, 3, 4, -1, -2, -3, -4]) for _ in range(rng.randint(1, 7))]
        g = P.evaluate(tuple(w))
        a, b, c, dd = g.m
        assert lv_h.contains(g) == I.contains(c)
        assert lv_s.contains(g) == (
            I.contains(c) and I.contains(a - one) and I.contains(dd - one)
        )
        assert lv_pr.contains(g) == (
            I.contains(b)
            and I.contains(c)
            and I.contains(a - one)
            and I.contains(dd - one)
        )


def test_coset_table_unit_ideal():
    tab = coset_table(P, LevelStructure(unit_ideal(F), PRINCIPAL))
    assert tab.index == 1
    assert all(perm == [0] for perm in tab.action)


def test_coset_table_transitive_and_consistent():
    for flavor in FLAVORS:
        tab = coset_table(P, LevelStructure(ideal_of(3), flavor))
        assert tab.is_transitive()
        for rel in P.relators:
            perm = tab.permutation_of_word(rel)
            assert perm == list(range(tab.index))


def test_coset_table_matrix_action_matches_words():
    tab = coset_table(P, LevelStructure(ideal_of(2, 1), HECKE))
    for k, g in enumerate(P.images):
        assert tab.permutation_of_matrix(g) == tab.action[k]


def test_transversal_matrices_hit_their_cosets():
    lv = LevelStructure(ideal_of(3), HECKE)
    tab = coset_table(P, lv)
    for c in range(tab.index):
        g = tab.transversal_matrix(c)
        perm = tab.permutation_of_matrix(g)
        assert perm[0] == c


def test_torsion_verdicts():
    assert is_torsion_free(F, LevelStructure(ideal_of(3), PRINCIPAL)).status == "certified-free"
    v = is_torsion_free(F, LevelStructure(ideal_of(3), HECKE))
    assert v.status == "has-torsion"
    v = is_torsion_free(F, LevelStructure(unit_ideal(F), PRINCIPAL))
    assert v.status == "has-torsion"
    v = is_torsion_free(F, LevelStructure(ideal_of(1, 1), PRINCIPAL))
    assert v.status == "has-torsion" and v.witness is not None
    # witnesses really are finite order and really are members
    for flavor in FLAVORS:
        for I in [ideal_of(1, 1), ideal_of(2, 1), ideal_of(3), ideal_of(2)]:
            lv = LevelStructure(I, flavor)
            verdict = is_torsion_free(F, lv)
            if verdict.witness is not None:
                w = verdict.witness
                assert lv.contains(w)
                order = 1
                acc = w
                while not acc.is_identity():
                    acc = acc * w
                    order += 1
                    assert order <= 12
                assert order > 1


def test_gamma1_certified_free_examples():
    seven = ideal_of(7)
    assert is_torsion_free(F, LevelStructure(seven, SEMI)).status == "certified-free"
    assert is_torsion_free(F, LevelStructure(seven, PRINCIPAL)).status == "certified-free"


def test_p1_size_matches_orbit_count():
    for I in ideals_of_norm_up_to(F, 20):
        if I.norm == 1:
            continue
        tab = coset_table(P, LevelStructure(I, HECKE))
        assert tab.index == p1_size_formula(F, I)
