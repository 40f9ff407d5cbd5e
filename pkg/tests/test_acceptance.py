"""End-to-end acceptance gates with wall-clock budgets.

Each test pins one headline guarantee and the time envelope it must fit.
Budgets are generous multiples of the measured cost on the development
machine; a blown budget means an algorithmic regression, not jitter.
"""

import json
import time
from contextlib import contextmanager
from fractions import Fraction

from metriclie import cli
from metriclie.algebras import abelian, casimir, oscillator, sl2, so3
from metriclie.ce import build_ce_module, ce_cohomology
from metriclie.duflo import (duflo_character, poly_one, verify_char,
                             verify_character_square, verify_field_oracle)
from metriclie.enveloping import (UniversalEnvelope, duflo_map,
                                  pbw_symmetrize, verify_duflo_isomorphism)
from metriclie.hochschild import (d0_transport_report,
                                  degree_one_representatives_report,
                                  verify_at_maps, verify_hkr)
from metriclie.wilson import parse_invariant_spec, unknot_invariant, \
    unknot_oracle

F = Fraction

SIX = [abelian(1), abelian(2), abelian(3), sl2(), so3(), oscillator()]


@contextmanager
def budget(seconds):
    t0 = time.monotonic()
    yield
    elapsed = time.monotonic() - t0
    assert elapsed < seconds, f"took {elapsed:.1f}s, budget {seconds}s"


def test_01_axioms_and_square_zero():
    with budget(10):
        for alg in SIX:
            assert alg.validate().ok, alg.name
            for module in ("trivial", ("jets", 6), ("uea", 4)):
                build_ce_module(alg, module)  # construction checks d^2 = 0


def test_02_cohomology_dimensions():
    with budget(5):
        assert ce_cohomology(sl2()) == {0: 1, 1: 0, 2: 0, 3: 1}
        assert ce_cohomology(so3()) == {0: 1, 1: 0, 2: 0, 3: 1}
        assert ce_cohomology(oscillator()) == {0: 1, 1: 1, 2: 0, 3: 1, 4: 1}
        assert ce_cohomology(abelian(3)) == {0: 1, 1: 3, 2: 3, 3: 1}
        assert ce_cohomology(sl2(), ("jets", 2)) == {0: 2, 1: 0, 2: 0, 3: 2}
        assert ce_cohomology(sl2(), ("uea", 2)) == {0: 2, 1: 0, 2: 0, 3: 2}
        assert ce_cohomology(oscillator(), ("jets", 2)) == \
            {0: 4, 1: 6, 2: 4, 3: 6, 4: 4}


def test_03_multiplication_map_window():
    with budget(120):
        rep = verify_hkr(sl2(), 3, 4)
        assert rep["chain_map"], rep["chain_map_witness"]
        assert rep["surjective_onto_window_forms"]
        assert rep["les_consistent"]
        assert rep["window"] == [1, 8]
        assert rep["window_matches"]


def test_04_degree_one_representatives():
    with budget(120):
        rep = degree_one_representatives_report(sl2(), 3, 4)
        assert rep["window_feasible"]
        per = rep["feasible_per_degree"]
        assert per[0] == (1, 1)
        assert per[3] == (1, 1)


def test_05_peel_maps_are_chain_maps():
    with budget(60):
        rep = verify_at_maps(sl2(), 3)
        assert rep["first_is_chain_map"], rep["first_witness"]
        assert rep["second_is_chain_map"], rep["second_witness"]


def test_06_deformation_transport():
    with budget(300):
        rep = d0_transport_report(sl2(), 3, 4)
        assert rep["dual_route_equal"]
        assert rep["anticommutes_with_total"]
        assert rep["transport_ok"], rep["transport_per_degree"]


def test_07_exponential_field_inverses():
    with budget(30):
        for alg in (sl2(), so3(), oscillator()):
            assert verify_field_oracle(alg, 6)["all"], alg.name


def test_08_character_squares_to_determinant():
    with budget(30):
        for alg in (sl2(), so3(), oscillator()):
            assert verify_character_square(alg, 6)["all"], alg.name
        assert duflo_character(abelian(3), 6) == poly_one(3)


def test_09_operator_identities():
    with budget(300):
        for alg in (sl2(), so3(), oscillator()):
            rep = verify_char(alg, jets=6)
            assert rep["all"], (alg.name, rep)


def test_10_symbol_map_multiplicative():
    with budget(120):
        for alg in (sl2(), so3()):
            rep = verify_duflo_isomorphism(alg, degree=4)
            assert rep["all"], (alg.name, rep)
        env = UniversalEnvelope(sl2())
        cas = casimir(sl2())
        d = duflo_map(env, cas)
        p = pbw_symmetrize(env, cas)
        shift = {k: d.get(k, F(0)) - p.get(k, F(0))
                 for k in set(d) | set(p)}
        shift = {k: v for k, v in shift.items() if v}
        assert shift == {(0, 0, 0): F(1, 8)}


def test_11_unknot_against_oracle():
    with budget(120):
        for alg in (sl2(), so3(), oscillator()):
            for spec in ("one", "casimir"):
                f = parse_invariant_spec(alg, spec)
                assert unknot_invariant(alg, f, 3) == \
                    unknot_oracle(alg, f, 3), (alg.name, spec)
        for n in (1, 2, 3):
            alg = abelian(n)
            one = parse_invariant_spec(alg, "one")
            cas = parse_invariant_spec(alg, "casimir")
            assert unknot_invariant(alg, one, 3) == [F(1), F(0), F(0), F(0)]
            assert unknot_invariant(alg, cas, 3) == \
                [F(0), F(2 * n), F(0), F(0)]


def test_12_suite_reports_are_reproducible(tmp_path):
    argv = ["suite", "run", "--algebra", "sl2",
            "--max-len", "3", "--jets", "4",
            "--order", "6", "--degree", "4", "--h-order", "2"]
    a = tmp_path / "first.json"
    b = tmp_path / "second.json"
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text())
    assert report["all_pass"] is True
    assert report["invariant_failed"] is False
    assert all(body["timings"] is None
               for body in report["checks"].values())
