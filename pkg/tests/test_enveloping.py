"""PBW straightening and the symbol-to-operator maps."""

from fractions import Fraction

from metriclie.algebras import casimir, sl2, so3
from metriclie.enveloping import (UniversalEnvelope, duflo_map,
                                  pbw_symmetrize, verify_duflo_isomorphism)

F = Fraction


def diff(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, F(0)) - v
    return {k: v for k, v in out.items() if v}


def test_straightening_sl2():
    env = UniversalEnvelope(sl2())
    # f.e = e.f - h in the ordered basis (h, e, f)
    fe = env.product({(0, 0, 1): F(1)}, {(0, 1, 0): F(1)})
    assert fe == {(0, 1, 1): F(1), (1, 0, 0): F(-1)}


def test_product_associative_spot():
    env = UniversalEnvelope(sl2())
    a = {(1, 0, 0): F(1)}
    b = {(0, 1, 0): F(1)}
    c = {(0, 0, 1): F(1)}
    ab_c = env.product(env.product(a, b), c)
    a_bc = env.product(a, env.product(b, c))
    assert ab_c == a_bc


def test_duflo_vs_pbw_on_casimir():
    alg = sl2()
    env = UniversalEnvelope(alg)
    cas = casimir(alg)
    d = duflo_map(env, cas)
    p = pbw_symmetrize(env, cas)
    assert diff(d, p) == {(0, 0, 0): F(1, 8)}


def test_duflo_image_central():
    for alg in (sl2(), so3()):
        env = UniversalEnvelope(alg)
        assert env.is_central(duflo_map(env, casimir(alg)))


def test_duflo_isomorphism_report():
    for alg in (sl2(), so3()):
        rep = verify_duflo_isomorphism(alg, degree=4)
        assert rep["invariant_count"] == 3
        assert rep["invariant_degrees"] == [0, 2, 4]
        assert rep["multiplicative"]
        assert rep["central"]
        assert rep["naive_symmetrization_fails"]
        assert rep["all"], rep
