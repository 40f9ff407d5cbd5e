"""Command-line surface: exit codes, determinism, baselines, schema."""

import json
import os

import pytest

from metriclie import cli


def run(argv):
    return cli.main(argv)


def test_validate_builtin_ok(capsys):
    assert run(["algebra", "validate", "sl2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is True
    # exact values ride as [numerator, denominator] pairs
    assert report["metric"][0][0] == [8, 1]
    names = {c["name"] for c in report["checks"]}
    assert {"antisymmetry", "jacobi", "metric_invariant",
            "metric_nondegenerate"} <= names


def test_validate_malformed_file_usage_error(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert run(["algebra", "validate", str(p)]) == 2
    assert "error:" in capsys.readouterr().err


def test_validate_degenerate_metric_exit3(tmp_path, capsys):
    p = tmp_path / "degenerate.json"
    p.write_text(json.dumps({
        "name": "flat-degenerate",
        "dim": 2,
        "bracket": [],
        "metric": [[0, 0, 1, 1]],
    }))
    assert run(["algebra", "validate", str(p)]) == 3
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is False
    failed = {c["name"] for c in report["checks"] if not c["passed"]}
    assert "metric_nondegenerate" in failed


def test_unknown_algebra_usage_error(capsys):
    assert run(["algebra", "validate", "nope"]) == 2
    capsys.readouterr()


def test_ce_representatives(capsys):
    assert run(["ce", "cohomology", "--algebra", "so3",
                "--representatives"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["betti"] == {"0": 1, "1": 0, "2": 0, "3": 1}
    assert "representatives" in report
    assert report["representatives"]["3"]


def test_hochschild_checks_subset(capsys):
    assert run(["hochschild", "verify", "--algebra", "abelian:1",
                "--max-len", "2", "--jets", "3", "--checks", "at"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["at"]["status"] == "pass"
    assert report["at"]["first_is_chain_map"] is True
    assert "hkr" not in report


def test_hochschild_jets_below_window_usage(capsys):
    assert run(["hochschild", "verify", "--algebra", "abelian:1",
                "--max-len", "3", "--jets", "2"]) == 2
    capsys.readouterr()


def test_wilson_char_order_too_small(capsys):
    assert run(["wilson", "unknot", "--algebra", "sl2", "--f", "casimir",
                "--h-order", "3", "--char-order", "4"]) == 2
    capsys.readouterr()


def test_duflo_character_json(capsys):
    assert run(["duflo", "character", "--algebra", "sl2",
                "--order", "4"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["monomials"]["0,0,0"] == [1, 1]
    assert report["monomials"]["2,0,0"] == [1, 6]


def test_text_format_marks_decimals(capsys):
    assert run(["duflo", "character", "--algebra", "sl2", "--order", "4",
                "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert "1/6" in out
    assert "approximate" in out


SMALL = ["suite", "run", "--algebra", "abelian:2",
         "--max-len", "2", "--jets", "3", "--order", "4",
         "--degree", "2", "--h-order", "1"]


def test_suite_byte_identical(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run(SMALL + ["--out", str(a)]) == 0
    assert run(SMALL + ["--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_suite_out_respects_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("METRICLIE_OUT", str(tmp_path))
    assert run(["algebra", "validate", "so3", "--out", "sub/report.json"]) == 0
    capsys.readouterr()
    assert (tmp_path / "sub" / "report.json").exists()


def test_suite_baseline_cycle(tmp_path, capsys):
    base = tmp_path / "baseline.json"
    out = tmp_path / "run.json"
    argv = SMALL + ["--out", str(out), "--baseline", str(base)]

    assert run(argv) == 0
    assert "baseline created" in capsys.readouterr().err
    assert base.exists()

    assert run(argv) == 0
    assert "baseline match" in capsys.readouterr().err

    # perturb one stored value: the rerun must fail and name the key
    stored = json.loads(base.read_text())
    stored["config"]["jets"] = 99
    base.write_text(json.dumps(stored))
    assert run(argv) == 4
    err = capsys.readouterr().err
    assert "regression drift at key config.jets" in err


def test_suite_report_matches_schema(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(SMALL + ["--out", str(out)]) == 0
    capsys.readouterr()
    report = json.loads(out.read_text())
    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    with open(os.path.join(here, "docs", "report-schema.json")) as fh:
        schema = json.load(fh)
    check_schema(report, schema, "report")


# minimal structural validator for the shapes the schema file uses
def check_schema(value, schema, path):
    t = schema.get("type")
    if t == "fraction":
        assert (isinstance(value, list) and len(value) == 2
                and all(isinstance(x, int) for x in value)), path
        return
    if t == "object":
        assert isinstance(value, dict), path
        for key in schema.get("required", []):
            assert key in value, f"{path}: missing {key}"
        props = schema.get("properties", {})
        extra = schema.get("additionalProperties")
        for key, sub in value.items():
            if key in props:
                check_schema(sub, props[key], f"{path}.{key}")
            elif isinstance(extra, dict):
                check_schema(sub, extra, f"{path}.{key}")
        return
    if t == "array":
        assert isinstance(value, list), path
        item = schema.get("items")
        if item:
            for i, sub in enumerate(value):
                check_schema(sub, item, f"{path}[{i}]")
        return
    if t == "string":
        assert isinstance(value, str), path
    elif t == "integer":
        assert isinstance(value, int) and not isinstance(value, bool), path
    elif t == "boolean":
        assert isinstance(value, bool), path
    elif t == "null":
        assert value is None, path
    if "enum" in schema:
        assert value in schema["enum"], f"{path}: {value!r} not allowed"


def test_checks_argument_rejects_unknown(capsys):
    assert run(["suite", "run", "--algebra", "so3",
                "--checks", "validate,bogus"]) == 2
    capsys.readouterr()


def test_suite_invariant_failure_aborts_downstream(tmp_path, capsys):
    p = tmp_path / "nonjacobi.json"
    p.write_text(json.dumps({
        "name": "nonjacobi",
        "dim": 3,
        "bracket": [[0, 1, 1, 1, 1], [0, 2, 2, 1, 1], [1, 2, 0, 1, 1]],
        "metric": [[0, 0, 1, 1], [1, 2, 1, 1], [2, 1, 1, 1]],
    }))
    code = run(["suite", "run", "--algebra", str(p),
                "--checks", "validate,ce"])
    out = json.loads(capsys.readouterr().out)
    assert code == 3
    assert out["invariant_failed"] is True
    assert out["checks"]["validate"]["status"] == "fail"
    assert out["checks"]["ce"]["status"] == "skipped"
