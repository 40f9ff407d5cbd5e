"""Unknot composition against the symmetric-algebra oracle."""

import json

import pytest
from fractions import Fraction

from metriclie.algebras import abelian, oscillator, sl2, so3
from metriclie.wilson import (InvariantFunction, casimir_dual,
                              parse_invariant_spec, unknot_invariant,
                              unknot_oracle)

F = Fraction

FROZEN = {
    ("sl2", "one"): [F(1), F(1, 8), F(1, 128), F(1, 3072)],
    ("sl2", "casimir"): [F(0), F(6), F(5, 4), F(7, 64)],
    ("so3", "one"): [F(1), F(-1, 4), F(1, 32), F(-1, 384)],
    ("so3", "casimir"): [F(0), F(6), F(-5, 2), F(7, 16)],
    ("oscillator", "one"): [F(1), F(0), F(0), F(0)],
    ("oscillator", "casimir"): [F(0), F(8), F(0), F(0)],
}

ALGS = {"sl2": sl2, "so3": so3, "oscillator": oscillator}


@pytest.mark.parametrize("name,spec", sorted(FROZEN))
def test_unknot_frozen_and_oracle(name, spec):
    alg = ALGS[name]()
    f = parse_invariant_spec(alg, spec)
    got = unknot_invariant(alg, f, 3)
    assert got == FROZEN[(name, spec)]
    assert got == unknot_oracle(alg, f, 3)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_unknot_abelian_closed_form(n):
    alg = abelian(n)
    one = parse_invariant_spec(alg, "one")
    cas = parse_invariant_spec(alg, "casimir")
    # flat bracket: the character is 1, so only the m <= 1 derivative
    # terms of exp(h t) survive the constant-term extraction
    assert unknot_invariant(alg, one, 3) == [F(1), F(0), F(0), F(0)]
    assert unknot_invariant(alg, cas, 3) == [F(0), F(2 * n), F(0), F(0)]


def test_casimir_dual_uses_metric():
    assert casimir_dual(sl2()) == {(2, 0, 0): F(8), (0, 1, 1): F(8)}


def test_parse_specs(tmp_path):
    alg = sl2()
    assert parse_invariant_spec(alg, "one").degree == 0
    assert parse_invariant_spec(alg, "casimir").degree == 2
    assert parse_invariant_spec(alg, "casimir^2").degree == 4
    p = tmp_path / "inv.json"
    p.write_text(json.dumps([[2, 0, 0, 8, 1], [0, 1, 1, 8, 1]]))
    f = parse_invariant_spec(alg, f"file:{p}")
    assert f.poly == casimir_dual(alg)
    with pytest.raises(ValueError):
        parse_invariant_spec(alg, "gibberish")
    with pytest.raises(ValueError):
        parse_invariant_spec(alg, "casimir^x")


def test_non_invariant_rejected():
    alg = sl2()
    with pytest.raises(ValueError, match="not coadjoint invariant"):
        InvariantFunction(alg, {(1, 0, 0): F(1)}, "h-coordinate")
