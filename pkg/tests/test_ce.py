"""Dual-exterior cohomology across coefficient modules."""

from math import comb

from metriclie.algebras import abelian, oscillator, sl2, so3
from metriclie.ce import build_ce_module, ce_cohomology, parse_module_spec

import pytest


def test_module_spec_parsing():
    assert parse_module_spec("trivial") == "trivial"
    assert parse_module_spec("jets:4") == ("jets", 4)
    assert parse_module_spec("uea:2") == ("uea", 2)
    for bad in ("jets", "jets:x", "uea:-1", "frobnicate"):
        with pytest.raises(ValueError):
            parse_module_spec(bad)


def test_trivial_cohomology_semisimple():
    assert ce_cohomology(sl2(), "trivial") == {0: 1, 1: 0, 2: 0, 3: 1}
    assert ce_cohomology(so3(), "trivial") == {0: 1, 1: 0, 2: 0, 3: 1}


def test_trivial_cohomology_abelian_binomials():
    for n in (1, 2, 3):
        assert ce_cohomology(abelian(n), "trivial") == \
            {k: comb(n, k) for k in range(n + 1)}


def test_trivial_cohomology_oscillator_frozen():
    assert ce_cohomology(oscillator(), "trivial") == \
        {0: 1, 1: 1, 2: 0, 3: 1, 4: 1}


def test_module_cohomology_frozen():
    assert ce_cohomology(sl2(), ("jets", 2)) == {0: 2, 1: 0, 2: 0, 3: 2}
    assert ce_cohomology(sl2(), ("uea", 2)) == {0: 2, 1: 0, 2: 0, 3: 2}
    assert ce_cohomology(oscillator(), ("jets", 2)) == \
        {0: 4, 1: 6, 2: 4, 3: 6, 4: 4}


def test_differentials_square_exactly():
    # construction raises on any d^2 defect, over every module kind
    for alg in (abelian(2), sl2(), oscillator()):
        for module in ("trivial", ("jets", 3), ("uea", 2)):
            cx = build_ce_module(alg, module)
            assert cx.dim(0) >= 1
