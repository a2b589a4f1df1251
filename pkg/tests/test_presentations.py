import pytest

from bianchilab.field import make_field
from bianchilab.matrices import Mat2
from bianchilab.presentations import (
    FinitePresentation,
    SUPPORTED_DS,
    UnsupportedFieldError,
    abelianization,
    presentation,
    psl_presentation,
    verify_presentation,
)

# abelianizations of the projective groups, from the classical presentations
PSL_ABELIANIZATIONS = {
    -1: (0, [2, 2]),
    -2: (1, [6]),
    -3: (0, [3]),
    -7: (1, [2]),
    -11: (1, [3]),
}


@pytest.mark.parametrize("d", SUPPORTED_DS)
def test_relators_evaluate_to_identity(d):
    p = presentation(make_field(d))
    rep = verify_presentation(p)
    assert rep.all_identity
    for g in p.images:
        assert g.det() == 1


@pytest.mark.parametrize("d", SUPPORTED_DS)
def test_projective_relators_central(d):
    p = psl_presentation(make_field(d))
    rep = verify_presentation(p)
    assert rep.all_central


def test_unsupported_field():
    with pytest.raises(UnsupportedFieldError):
        presentation(make_field(-5))


@pytest.mark.parametrize("d", SUPPORTED_DS)
def test_projective_abelianization(d):
    ab = abelianization(psl_presentation(make_field(d)))
    free, torsion = PSL_ABELIANIZATIONS[d]
    assert ab.free_rank == free
    assert ab.torsion_factors == torsion


def test_corrupted_relator_flagged():
    p = presentation(make_field(-1))
    # flip one inversion sign in the [t, u] commutator: t u t^-1 u = u^2 != +-1
    bad = FinitePresentation(
        generator_names=p.generator_names,
        images=p.images,
        relators=[p.relators[0], (2, 3, -2, 3)],
        field=p.field,
    )
    rep = verify_presentation(bad)
    assert rep.statuses[1] == "fail"
    assert any("fail" in ln for ln in rep.lines())


def test_empty_relator_list_vacuous_pass():
    p = presentation(make_field(-1))
    empty = FinitePresentation(
        generator_names=p.generator_names,
        images=p.images,
        relators=[],
        field=p.field,
    )
    assert verify_presentation(empty).all_identity


def test_abelianization_trivial_cases():
    F = make_field(-1)
    eye = Mat2.identity(F)
    free2 = FinitePresentation(["x", "y"], [eye, eye], [], field=F)
    ab = abelianization(free2)
    assert ab.free_rank == 2 and ab.torsion_factors == []
    z3 = FinitePresentation(["x"], [eye], [(1, 1, 1)], field=F)
    ab = abelianization(z3)
    assert ab.free_rank == 0 and ab.torsion_factors == [3]


def test_abelianization_invariant_under_relabeling():
    import random

    p = presentation(make_field(-2))
    base = abelianization(p)
    rng = random.Random(1)
    perm = list(range(1, p.ngens + 1))
    rng.shuffle(perm)
    relabeled = [
        tuple((perm[abs(x) - 1]) * (1 if x > 0 else -1) for x in rel)
        for rel in p.relators
    ]
    rng.shuffle(relabeled)
    q = FinitePresentation(
        generator_names=[f"g{i}" for i in range(p.ngens)],
        images=[Mat2.identity(p.field)] * p.ngens,
        relators=relabeled,
        field=p.field,
    )
    assert abelianization(q) == base


def test_json_roundtrip_bit_exact():
    for d in SUPPORTED_DS:
        p = presentation(make_field(d))
        text = p.to_json()
        q = FinitePresentation.from_json(text)
        assert q.to_json() == text
        assert q.relators == p.relators
        assert all(a == b for a, b in zip(q.images, p.images))


def test_sl2_abelianization_matches_homology_route():
    # the SL_2 lift must not change H_1 computed through the Fox pipeline
    from bianchilab.homology import group_homology
    from bianchilab.modules import trivial_module

    for d in SUPPORTED_DS:
        F = make_field(d)
        p = presentation(F)
        ab = abelianization(p)
        _h0, h1 = group_homology(p, trivial_module(F))
        assert h1.free_rank == ab.free_rank
        assert h1.elementary_divisors == ab.torsion_factors
