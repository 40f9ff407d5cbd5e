"""Chain-level complexes: windows, transport, peel maps, negative controls."""

from fractions import Fraction

import pytest

from metriclie.algebras import abelian, sl2
from metriclie.forms import FormSpace
from metriclie.hochschild import (ONE_FORMS, build_hochschild,
                                  d0_on_chains, d0_transport_report,
                                  deformed_product,
                                  degree_one_representatives_report,
                                  eps_extract_d0, filtration_representative,
                                  hkr_matrices, verify_at_maps, verify_hkr)
from metriclie.linalg import LinearSolver, SparseMatrix, is_chain_map

F = Fraction

G14 = [[F(1), F(0)], [F(0), F(4)]]


def test_chain_dims_frozen_sl2():
    h = build_hochschild(sl2(), 3)
    assert {m: len(b) for m, b in h.basis_by_degree.items()} == {
        0: 40, 1: 222, 2: 550, 3: 805, 4: 772, 5: 505, 6: 226, 7: 67,
        8: 12, 9: 1}
    hm = build_hochschild(sl2(), 3, coefficients=ONE_FORMS)
    assert {m: len(b) for m, b in hm.basis_by_degree.items()} == {
        1: 120, 2: 666, 3: 1650, 4: 2415, 5: 2316, 6: 1515, 7: 678,
        8: 201, 9: 36, 10: 3}


def test_differential_squares_both_fibers():
    # complex() validates d^2 = 0 at construction
    for alg in (abelian(1), abelian(2, metric=G14), sl2()):
        build_hochschild(alg, 2).complex()
        build_hochschild(alg, 2, coefficients=ONE_FORMS).complex()


def test_betti_frozen():
    assert build_hochschild(abelian(1), 3).complex().betti() == {0: 4, 1: 4}
    assert build_hochschild(abelian(2), 3).complex().betti() == {
        0: 10, 1: 31, 2: 38, 3: 24, 4: 8, 5: 1}
    assert build_hochschild(sl2(), 3).complex().betti() == {
        0: 1, 1: 0, 2: 1, 3: 1, 4: 1, 5: 1, 6: 1, 7: 1, 8: 0, 9: 1}


def test_deformed_product_associative_mod_eps2():
    def mul(a, b, alg):
        out = {}
        for (m1, p1), v1 in a.items():
            for (m2, p2), v2 in b.items():
                if p1 + p2 > 1:
                    continue
                for (m3, p3), v3 in deformed_product(alg, m1, m2).items():
                    if p1 + p2 + p3 > 1:
                        continue
                    key = (m3, p1 + p2 + p3)
                    s = out.get(key, F(0)) + v1 * v2 * v3
                    if s:
                        out[key] = s
                    elif key in out:
                        del out[key]
        return out

    for alg in (sl2(), abelian(2, metric=G14)):
        n = 1 << alg.dim
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    ea = {(a, 0): F(1)}
                    eb = {(b, 0): F(1)}
                    ec = {(c, 0): F(1)}
                    lhs = mul(mul(ea, eb, alg), ec, alg)
                    rhs = mul(ea, mul(eb, ec, alg), alg)
                    assert lhs == rhs, (a, b, c)


def test_d0_hand_value_abelian():
    # x (x) x over the one-dimensional abelian algebra with <x,x> = 1:
    # the fiber merge and the cyclic fold each contribute -1/2 of the unit
    h = build_hochschild(abelian(1), 3)
    out = d0_on_chains(h, ((1, -1), (1,)))
    assert out == {((0, -1), ()): F(-1)}


def test_d0_dual_route_everywhere():
    for alg in (abelian(2, metric=G14), sl2()):
        h = build_hochschild(alg, 2)
        for basis in h.basis_by_degree.values():
            for key in basis:
                assert d0_on_chains(h, key) == eps_extract_d0(h, key)


def test_hkr_window_certificates_frozen():
    rep = verify_hkr(abelian(1), 3, 4)
    assert rep["chain_map"] and rep["les_consistent"]
    assert rep["window"] == [0, 1] and rep["window_matches"]

    rep = verify_hkr(abelian(2), 3, 4)
    assert rep["chain_map"] and rep["les_consistent"]
    assert rep["window"] == [0] and rep["window_matches"]

    rep = verify_hkr(sl2(), 3, 4)
    assert rep["chain_map"] and rep["les_consistent"]
    assert rep["surjective_onto_window_forms"]
    assert rep["window"] == [1, 8] and rep["window_matches"]


def test_hkr_flipped_sign_fails_with_witness():
    # a nonabelian case: both sides of the chain-map identity are nonzero,
    # so flipping one degree block must break it with a concrete witness
    h = build_hochschild(sl2(), 2)
    space = FormSpace(sl2(), 2)
    maps = hkr_matrices(h, space)
    ok, witness = is_chain_map(maps, h.complex(), space.complex(), shift=0)
    assert ok and witness is None
    maps[1] = maps[1].scale(-1)
    ok, witness = is_chain_map(maps, h.complex(), space.complex(), shift=0)
    assert not ok
    assert witness is not None and witness[2]


def test_degree_one_representatives():
    rep = degree_one_representatives_report(abelian(1), 3, 4)
    assert rep["window_feasible"]
    assert rep["feasible_per_degree"] == {0: (4, 4), 1: (4, 4)}

    rep = degree_one_representatives_report(sl2(), 3, 4)
    assert rep["window_feasible"]
    # the unit and volume classes are genuine and feasible; the remaining
    # classes are truncation artifacts and stay infeasible at this length
    per = rep["feasible_per_degree"]
    assert per[0] == (1, 1)
    assert per[3] == (1, 1)
    assert per[2] == (0, 1)


def test_corrupted_boundary_space_infeasible():
    h = build_hochschild(abelian(2), 3)
    c = h.complex()
    basis = h.basis_by_degree[1]
    bad = {i for i, (fib, slots) in enumerate(basis)
           if any(bin(s).count("1") >= 2 for s in slots)}
    target = None
    for rep in c.homology(1).representatives:
        if any(i in bad and v for i, v in rep.items()) and \
                filtration_representative(h, 1, rep) is not None:
            target = rep
            break
    assert target is not None
    # the honest boundary space corrects the class; an emptied one cannot
    z_out = {i: v for i, v in target.items() if i in bad}
    assert z_out
    rowmap = {r: k for k, r in enumerate(sorted(z_out))}
    corrupted = SparseMatrix(len(rowmap), c.differential(0).cols, {})
    sol = LinearSolver(corrupted).solve(
        {rowmap[r]: v for r, v in z_out.items()})
    assert sol is None


def test_at_maps_are_chain_maps():
    for alg in (abelian(2), sl2()):
        rep = verify_at_maps(alg, 3)
        assert rep["first_is_chain_map"], rep["first_witness"]
        assert rep["second_is_chain_map"], rep["second_witness"]


def test_d0_transport_on_classes():
    for alg in (abelian(1), abelian(2, metric=G14)):
        rep = d0_transport_report(alg, 3, 4)
        assert rep["dual_route_equal"]
        assert rep["anticommutes_with_total"]
        assert rep["transport_ok"]
        for checks in rep["transport_per_degree"].values():
            assert all(checks)
