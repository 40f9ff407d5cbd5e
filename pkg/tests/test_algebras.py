"""Structure constants, axioms, builtins, and JSON ingestion."""

import json
from fractions import Fraction

import pytest

from metriclie.algebras import (MetricLieAlgebra, abelian, builtin, casimir,
                                from_json_dict, from_json_file, killing_form,
                                oscillator, sl2, so3)

F = Fraction


def test_builtins_validate():
    for alg in (abelian(1), abelian(3), sl2(), so3(), oscillator()):
        report = alg.validate()
        assert report.ok, report.failed()


def test_jacobi_failure_has_witness():
    # [x0,x1]=x1, [x0,x2]=x2, [x1,x2]=x0 breaks Jacobi on (0,1,2)
    bad = MetricLieAlgebra(
        "bad", 3,
        [(0, 1, 1, F(1)), (0, 2, 2, F(1)), (1, 2, 0, F(1))],
        [[F(1), 0, 0], [0, F(1), 0], [0, 0, F(1)]])
    report = bad.validate()
    names = {c["name"]: c for c in report.as_dict()["checks"]}
    assert not names["jacobi"]["passed"]
    assert names["jacobi"]["witness"] is not None


def test_non_invariant_metric_flagged():
    tweaked = MetricLieAlgebra(
        "sl2-euclid", 3,
        [(0, 1, 1, F(2)), (0, 2, 2, F(-2)), (1, 2, 0, F(1))],
        [[F(1), 0, 0], [0, F(1), 0], [0, 0, F(1)]])
    names = {c["name"]: c for c in tweaked.validate().as_dict()["checks"]}
    assert not names["metric_invariant"]["passed"]


def test_degenerate_metric():
    alg = abelian(2, metric=[[F(1), F(0)], [F(0), F(0)]])
    names = {c["name"]: c for c in alg.validate().as_dict()["checks"]}
    assert not names["metric_nondegenerate"]["passed"]
    with pytest.raises(ValueError):
        alg.metric_inverse


def test_sl2_structure_frozen():
    alg = sl2()
    assert alg.c(0, 1, 1) == 2
    assert alg.c(0, 2, 2) == -2
    assert alg.c(1, 2, 0) == 1
    assert alg.c(1, 0, 1) == -2
    assert killing_form(alg) == alg.metric
    assert casimir(alg) == {(2, 0, 0): F(1, 8), (0, 1, 1): F(1, 2)}


def test_casimir_is_ad_invariant_for_so3():
    assert casimir(so3()) == {(2, 0, 0): F(1), (0, 2, 0): F(1),
                              (0, 0, 2): F(1)}


def test_builtin_registry():
    assert builtin("abelian", 2).dim == 2
    assert builtin("oscillator").dim == 4
    with pytest.raises(ValueError):
        builtin("e8")


def test_json_roundtrip(tmp_path):
    data = {
        "name": "sl2-file",
        "dim": 3,
        "bracket": [[0, 1, 1, 2, 1], [0, 2, 2, -2, 1], [1, 2, 0, 1, 1]],
        "metric": [[0, 0, 8, 1], [1, 2, 4, 1], [2, 1, 4, 1]],
    }
    alg = from_json_dict(data)
    assert alg.validate().ok
    ref = sl2()
    for i in range(3):
        for j in range(3):
            assert alg.metric[i][j] == ref.metric[i][j]
            for k in range(3):
                assert alg.c(i, j, k) == ref.c(i, j, k)

    path = tmp_path / "alg.json"
    path.write_text(json.dumps(data))
    assert from_json_file(str(path)).validate().ok


def test_json_rejects_bad_rows():
    with pytest.raises((ValueError, KeyError)):
        from_json_dict({"name": "x", "dim": 2, "bracket": [[0, 1, 5, 1, 1]],
                        "metric": [[0, 0, 1, 1], [1, 1, 1, 1]]})
