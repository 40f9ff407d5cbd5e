"""Jet series, character oracles, and the operator identities."""

from fractions import Fraction

from metriclie.algebras import abelian, oscillator, sl2, so3
from metriclie.duflo import (OperatorSpace, PolyMatrix, ad_powers,
                             ad_tensor, bernoulli_table, d0_half_sum_matrix,
                             d0_matrix, duflo_character,
                             homotopy_solver_crosscheck, poly_exp, poly_inv,
                             poly_mul, poly_one, verify_char,
                             verify_character_square, verify_field_oracle)

F = Fraction


def test_bernoulli_frozen():
    assert bernoulli_table(6) == [F(1), F(-1, 2), F(1, 6), F(0), F(-1, 30),
                                  F(0), F(1, 42)]


def test_poly_exp_inv_roundtrip():
    x = {(1, 0): F(1), (0, 2): F(-3)}
    e = poly_exp(x, 6)
    xneg = {k: -v for k, v in x.items()}
    assert poly_mul(e, poly_exp(xneg, 6), 6) == poly_one(2)
    one_plus = dict(poly_one(2))
    one_plus[(1, 0)] = F(1)
    inv = poly_inv(one_plus, 4)
    assert poly_mul(one_plus, inv, 4) == poly_one(2)


def test_ad_tensor_sl2_entries():
    t = ad_tensor(sl2(), 3)
    # entry (i, j) = sum_k y^k c_kj^i
    assert t.entry(1, 1) == {(1, 0, 0): F(2)}
    assert t.entry(2, 2) == {(1, 0, 0): F(-2)}
    assert t.entry(0, 2) == {(0, 1, 0): F(1)}


def test_field_oracle_all_builtins():
    for alg in (sl2(), so3(), oscillator(), abelian(2)):
        rep = verify_field_oracle(alg, 6)
        assert rep["all"], rep


def test_character_square_is_determinant():
    for alg in (sl2(), so3(), oscillator()):
        assert verify_character_square(alg, 6)["all"]


def test_character_abelian_is_one():
    assert duflo_character(abelian(3), 6) == poly_one(3)


def test_character_sl2_frozen():
    assert duflo_character(sl2(), 4) == {
        (0, 0, 0): F(1), (2, 0, 0): F(1, 6), (0, 1, 1): F(1, 6),
        (4, 0, 0): F(1, 120), (2, 1, 1): F(1, 60), (0, 2, 2): F(1, 120)}


def test_verify_char_identities():
    for alg in (sl2(), so3(), oscillator()):
        rep = verify_char(alg, jets=4)
        assert rep["all"], rep


def test_homotopy_solver_agrees():
    rep = homotopy_solver_crosscheck(sl2(), jets=3)
    assert rep["status"] == "feasible"
    assert rep["solution_verified"]


def test_truncated_series_detected():
    # cutting the even series one order early must disagree with both the
    # full operator and the independently built half-sum route
    ospace = OperatorSpace(sl2(), 4)
    full = ospace.restrict(d0_matrix(ospace))
    trunc = ospace.restrict(d0_matrix(ospace, order=2))
    half = ospace.restrict(d0_half_sum_matrix(ospace))
    assert full == half
    assert trunc != full
    assert trunc != half


def test_left_raising_fails_commutator_identity():
    # raising the adjoint power on the wrong side has no transpose symmetry
    # for the sl2 metric, and the n = 1 commutator identity detects it
    alg = sl2()
    ospace = OperatorSpace(alg, 4)
    dce = ospace.d_ce_matrix()
    dbr_ok = ospace.contraction_matrix(
        ospace.pairing_polymatrix(ad_powers(alg, ospace.cap, 0)[0]), "y")
    pows = ad_powers(alg, ospace.cap, 2)
    pair = PolyMatrix.from_constant(alg.metric_inverse, ospace.n, ospace.cap)
    right = pows[2].mul(pair)
    left = pair.mul(pows[2])
    assert right != left

    h_right = ospace.contraction_matrix(pows[1].mul(pair), "xi")
    h_left = ospace.contraction_matrix(pair.mul(pows[1]), "xi")
    tr = pows[2].trace()
    mtr = ospace.mult_matrix(tr)
    rest = ospace.restrict

    def identity_holds(h_op, raised):
        lhs = dce @ h_op - h_op @ dce
        contr = ospace.contraction_matrix(raised, "y")
        rhs = contr.scale(2) - (dbr_ok @ mtr - mtr @ dbr_ok).scale(F(1, 2))
        return rest(lhs) == rest(rhs)

    assert identity_holds(h_right, right)
    assert not identity_holds(h_left, left)
