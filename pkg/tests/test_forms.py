"""Jet-truncated forms: grading, differentials, truncation compatibility."""

from math import comb

from metriclie.algebras import abelian, oscillator, sl2
from metriclie.ce import verify_de_rham
from metriclie.forms import FormSpace


def test_dimensions_sl2_jets3():
    space = FormSpace(sl2(), 3)
    jets = sum(comb(3 + d - 1, d) for d in range(4))  # 20 monomials
    assert space.degree_dims() == {0: jets, 1: 3 * jets, 2: 3 * jets,
                                   3: jets}


def test_differential_squares_to_zero():
    # complex construction validates d^2 = 0; reaching betti proves it ran
    for alg in (sl2(), oscillator(), abelian(2)):
        c = FormSpace(alg, 4).complex()
        assert sum(c.betti().values()) >= 1


def test_de_rham_is_anticommuting_chain_map():
    for alg in (sl2(), oscillator()):
        rep = verify_de_rham(alg, 4)
        assert rep["chain_map_shift_minus_one"], rep["witness"]
        assert rep["square_zero"]


def test_truncation_is_order_compatible_filter():
    for alg in (sl2(), abelian(2)):
        small = FormSpace(alg, 2)
        big = FormSpace(alg, 4)
        pos = {key: i for i, key in enumerate(big.basis)}
        assert all(key in pos for key in small.basis)
        positions = [pos[key] for key in small.basis]
        assert positions == sorted(positions)
