"""Exact linear algebra: ranks, solvers, homology, chain-map checks."""

from fractions import Fraction

import pytest

from metriclie.linalg import (FiniteChainComplex, LinearSolver, SparseMatrix,
                              find_chain_homotopy, is_chain_map,
                              rank_kernel_image)

F = Fraction


def test_sparse_matrix_basics():
    m = SparseMatrix.from_rows([[1, 2], [3, 4]])
    assert m.rows == 2 and m.cols == 2
    assert m.apply({0: F(1), 1: F(1)}) == {0: F(3), 1: F(7)}
    assert (m @ SparseMatrix.identity(2)) == m
    assert m.transpose().transpose() == m
    assert (m - m).is_zero()
    with pytest.raises(ValueError):
        SparseMatrix.from_rows([[1], [1, 2]])
    with pytest.raises(ValueError):
        m @ SparseMatrix.identity(3)


def test_rank_kernel_image_known():
    # rank 2 with a one-dimensional kernel spanned by (1, 1, -1)
    m = SparseMatrix.from_rows([[1, 0, 1], [0, 1, 1], [1, 1, 2]])
    rank, kernel, image = rank_kernel_image(m)
    assert rank == 2
    assert len(kernel) == 1
    assert len(image) == 2
    v = kernel[0]
    assert m.apply(v) == {}
    scale = v[0]
    assert {k: val / scale for k, val in v.items()} == \
        {0: F(1), 1: F(1), 2: F(-1)}


def test_linear_solver():
    m = SparseMatrix.from_rows([[2, 0], [0, 3], [2, 3]])
    sol = LinearSolver(m).solve({0: F(4), 1: F(3), 2: F(7)})
    assert sol == {0: F(2), 1: F(1)}
    assert LinearSolver(m).solve({0: F(1), 1: F(0), 2: F(0)}) is None


def test_complex_homology_and_square_check():
    # 0 -> Q -> Q^2 -> Q -> 0 with d0 = (1, 0)^T and d1 = (0, 1)
    d0 = SparseMatrix.from_rows([[1], [0]])
    d1 = SparseMatrix.from_rows([[0, 1]])
    c = FiniteChainComplex({0: 1, 1: 2, 2: 1}, {0: d0, 1: d1})
    assert c.betti() == {0: 0, 1: 0, 2: 0}

    bad = SparseMatrix.from_rows([[1, 0]])
    with pytest.raises(Exception):
        FiniteChainComplex({0: 1, 1: 2, 2: 1}, {0: d0, 1: bad})


def test_homology_representatives_and_classes():
    # zero differentials: homology is everything
    c = FiniteChainComplex({0: 2, 1: 1},
                           {0: SparseMatrix.zero(1, 2)})
    h0 = c.homology(0)
    assert h0.dimension == 2
    assert h0.same_class({0: F(1)}, {0: F(1)})
    assert not h0.same_class({0: F(1)}, {1: F(1)})
    assert h0.is_boundary({})


def test_is_chain_map_couples_shift_and_sign():
    # C = D = (Q -> Q with identity differential); the identity map is a
    # chain map at shift 0 and the shift-1 convention demands the minus sign
    ident = SparseMatrix.identity(1)
    c = FiniteChainComplex({0: 1, 1: 1}, {0: ident})
    ok, witness = is_chain_map({0: ident, 1: ident}, c, c, shift=0)
    assert ok and witness is None

    d_shift = FiniteChainComplex({-1: 1, 0: 1, 1: 1},
                                 {-1: ident, 0: SparseMatrix.zero(1, 1)})
    ok, witness = is_chain_map({0: ident, 1: ident}, c, d_shift, shift=-1)
    assert not ok and witness is not None

    flipped = {0: ident, 1: ident.scale(-1)}
    ok, _ = is_chain_map(flipped, c, d_shift, shift=-1)
    assert ok

    with pytest.raises(ValueError, match="map shape mismatch"):
        is_chain_map({0: SparseMatrix.zero(5, 1), 1: ident}, c, c, shift=0)


def test_find_chain_homotopy_feasible_and_not():
    # dims 1,1,1 with d(0->1) = id and d(1->2) = 0; a degree -1 family is a
    # commutator d K + K d exactly when its bottom block vanishes
    ident = SparseMatrix.identity(1)
    c = FiniteChainComplex({0: 1, 1: 1, 2: 1},
                           {0: ident, 1: SparseMatrix.zero(1, 1)})
    phi_good = {1: SparseMatrix.zero(1, 1), 2: ident.scale(F(5))}
    status, ks = find_chain_homotopy(c, phi_good)
    assert status == "feasible"
    k2 = ks[2]
    assert (c.differential(0) @ k2) == phi_good[2]

    phi_bad = {1: ident, 2: SparseMatrix.zero(1, 1)}
    status, witness = find_chain_homotopy(c, phi_bad)
    assert status == "infeasible"
    assert witness is not None
