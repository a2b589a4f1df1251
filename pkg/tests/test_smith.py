import random

import pytest
from hypothesis import given, settings, strategies as st

from bianchilab.smith import (
    SparseIntMatrix,
    kernel_basis,
    minors_gcd_invariant_factors,
    rank_mod_p,
    row_hnf,
    smith_normal_form,
)


def dense_matrix(rng, n, m, lo=-9, hi=9, density=1.0):
    return [
        [rng.randint(lo, hi) if rng.random() < density else 0 for _ in range(m)]
        for _ in range(n)
    ]


def test_spec_examples():
    A = SparseIntMatrix.from_dense([[2, 4], [6, 8]])
    assert smith_normal_form(A).invariant_factors == [2, 4]
    I = SparseIntMatrix.from_dense([[int(i == j) for j in range(6)] for i in range(6)])
    assert smith_normal_form(I).invariant_factors == [1] * 6
    Z = SparseIntMatrix(4, 7)
    res = smith_normal_form(Z)
    assert res.invariant_factors == [] and res.rank == 0


def test_oracle_agreement_small():
    rng = random.Random(20240901)
    for _ in range(200):
        n, m = rng.randint(1, 8), rng.randint(1, 8)
        d = dense_matrix(rng, n, m)
        res = smith_normal_form(SparseIntMatrix.from_dense(d))
        assert res.invariant_factors == minors_gcd_invariant_factors(d)


def test_transforms_give_diagonal():
    rng = random.Random(4)
    for _ in range(60):
        n, m = rng.randint(1, 10), rng.randint(1, 10)
        d = dense_matrix(rng, n, m, lo=-15, hi=15, density=0.8)
        A = SparseIntMatrix.from_dense(d)
        res = smith_normal_form(A, want_transforms=True)
        LAR = res.left.matmul(A).matmul(res.right).to_dense()
        for i in range(n):
            for j in range(m):
                want = (
                    res.invariant_factors[i]
                    if i == j and i < len(res.invariant_factors)
                    else 0
                )
                assert LAR[i][j] == want


def test_divisibility_chain_and_determinism():
    rng = random.Random(99)
    for _ in range(50):
        d = dense_matrix(rng, rng.randint(2, 12), rng.randint(2, 12), lo=-30, hi=30)
        A = SparseIntMatrix.from_dense(d)
        f1 = smith_normal_form(A).invariant_factors
        f2 = smith_normal_form(SparseIntMatrix.from_dense(d)).invariant_factors
        assert f1 == f2
        for a, b in zip(f1, f1[1:]):
            assert b % a == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=3, max_size=5))
def test_snf_matches_oracle_property(rows):
    A = SparseIntMatrix.from_dense(rows)
    assert smith_normal_form(A).invariant_factors == minors_gcd_invariant_factors(rows)


def test_modular_check_runs():
    rng = random.Random(7)
    A = SparseIntMatrix(50, 50)
    for _ in range(120):
        A.set_entry(rng.randrange(50), rng.randrange(50), rng.choice([1, -1, 2, 3]))
    res = smith_normal_form(A, modular_check=True)
    assert res.modular_checked


def test_rank_mod_p():
    A = SparseIntMatrix.from_dense([[2, 0], [0, 3]])
    assert rank_mod_p(A, 5) == 2
    assert rank_mod_p(A, 3) == 1
    assert rank_mod_p(A, 2) == 1


def test_kernel_basis_saturated():
    mat = [[1, 2, 3], [2, 4, 6]]
    basis = kernel_basis(mat)
    assert len(basis) == 2
    for v in basis:
        assert all(sum(r[j] * v[j] for j in range(3)) == 0 for r in mat)
    # saturation: SNF of the basis matrix has all-unit invariant factors
    res = smith_normal_form(SparseIntMatrix.from_dense(basis))
    assert res.invariant_factors == [1, 1]


def test_row_hnf_canonical():
    rows = [[2, 0, 0], [0, 2, 0], [1, 1, 1]]
    h = row_hnf(rows)
    assert h == [[1, 1, 1], [0, 2, 0], [0, 0, 2]] or all(
        r[0] >= 0 for r in h
    )
    # idempotent
    assert row_hnf(h) == h


def test_coordinate_roundtrip():
    rng = random.Random(3)
    A = SparseIntMatrix(9, 5)
    for _ in range(12):
        A.set_entry(rng.randrange(9), rng.randrange(5), rng.randint(-10**12, 10**12))
    B = SparseIntMatrix.from_coordinate_text(A.to_coordinate_text())
    assert B.to_dense() == A.to_dense()


@pytest.mark.slow
def test_sparse_200_performance():
    import time

    t0 = time.time()
    for trial in range(3):
        rng = random.Random(500 + trial)
        A = SparseIntMatrix(200, 200)
        for _ in range(800):
            A.set_entry(
                rng.randrange(200), rng.randrange(200), rng.choice([1, 2, 3, 4, 5, -1, -2, -3, -4, -5])
            )
        smith_normal_form(A, modular_check=True)
    assert time.time() - t0 < 30
