"""Command-line front door: validation, reports, and the regression suite.

Every machine report is deterministic: exact rationals are emitted as
[numerator, denominator] pairs, dictionary keys are sorted, and timing
fields are fixed to null so repeated runs with the same configuration are
byte-identical.  Text mode renders decimals for humans and marks them
approximate.

Exit codes: 0 all requested checks pass, 2 usage or configuration error,
3 structural invariant failure (algebra axioms, squared differentials),
4 identity or regression failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import __version__
from .algebras import MetricLieAlgebra, abelian, builtin, from_json_file

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_IDENTITY = 4


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


def parse_algebra(spec: str) -> MetricLieAlgebra:
    """Builtin name ("sl2", "abelian:3") or a JSON file path."""
    if spec in ("sl2", "so3", "oscillator"):
        return builtin(spec)
    if spec.startswith("abelian:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad abelian dimension in {spec!r}") from None
        if n < 0:
            raise UsageError("abelian dimension must be >= 0")
        return abelian(n)
    if os.path.exists(spec):
        try:
            return from_json_file(spec)
        except (ValueError, KeyError, json.JSONDecodeError, OSError) as exc:
            raise UsageError(f"malformed algebra file {spec!r}: {exc}") \
                from None
    raise UsageError(f"unknown algebra {spec!r} (not a builtin, not a file)")


# -- deterministic serialization -------------------------------------------


def jsonable(obj):
    """Exact encoding: fractions become [num, den], keys become strings."""
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int) or isinstance(obj, str):
        return obj
    if isinstance(obj, float):
        raise TypeError("floats have no place in an exact report")
    if isinstance(obj, dict):
        return {_key(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(x) for x in k)
    return str(k)


def dump_report(report: dict, fmt: str, out: Optional[str]) -> None:
    payload = jsonable(report)
    if fmt == "json":
        text = json.dumps(payload, sort_keys=True, indent=2,
                          separators=(",", ": ")) + "\n"
    else:
        text = render_text(payload)
    if out is None:
        sys.stdout.write(text)
        return
    base = os.environ.get("METRICLIE_OUT")
    if base and not os.path.isabs(out):
        out = os.path.join(base, out)
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
    sys.stderr.write(f"report written to {out}\n")


def render_text(payload, indent: int = 0) -> str:
    """Human rendering; decimal values are marked as approximate."""
    pad = "  " * indent
    lines: List[str] = []
    if isinstance(payload, dict):
        for k in sorted(payload):
            v = payload[k]
            if isinstance(v, (dict, list)) and not _is_fraction_pair(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v)}")
        return "\n".join(ln for ln in lines if ln) + ("\n" if indent == 0
                                                      else "")
    if isinstance(payload, list):
        for v in payload:
            if isinstance(v, (dict, list)) and not _is_fraction_pair(v):
                lines.append(render_text(v, indent))
            else:
                lines.append(f"{pad}- {_scalar_text(v)}")
        return "\n".join(ln for ln in lines if ln)
    return f"{pad}{_scalar_text(payload)}"


def _is_fraction_pair(v) -> bool:
    return (isinstance(v, list) and len(v) == 2
            and all(isinstance(x, int) and not isinstance(x, bool)
                    for x in v))


def _scalar_text(v) -> str:
    if _is_fraction_pair(v):
        num, den = v
        if den == 1:
            return str(num)
        return f"{num}/{den} (~{num / den:.6g}, approximate)"
    if v is None:
        return "null"
    return str(v)


# -- individual commands ----------------------------------------------------


def cmd_algebra_validate(args) -> int:
    alg = parse_algebra(args.algebra)
    report = alg.validate()
    out = dict(report.as_dict())
    out["metric"] = [[alg.metric[i][j] for j in range(alg.dim)]
                     for i in range(alg.dim)]
    dump_report(out, args.format, args.out)
    return EXIT_OK if report.ok else EXIT_INVARIANT


def cmd_ce_cohomology(args) -> int:
    from .ce import build_ce_module, parse_module_spec

    alg = parse_algebra(args.algebra)
    try:
        module = parse_module_spec(args.module)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cx = build_ce_module(alg, module)
    report: Dict[str, object] = {
        "algebra": alg.name,
        "module": args.module,
        "betti": cx.betti(),
    }
    if args.representatives:
        reps: Dict[int, List[Dict[int, Fraction]]] = {}
        for k in sorted(cx.dims):
            basis = cx.homology(k)
            if basis.representatives:
                reps[k] = basis.representatives
        report["representatives"] = reps
    dump_report(report, args.format, args.out)
    return EXIT_OK


_HOCHSCHILD_CHECKS = ("hkr", "cor", "d0", "at")


def cmd_hochschild_verify(args) -> int:
    from .hochschild import (d0_transport_report,
                             degree_one_representatives_report, verify_at_maps,
                             verify_hkr)

    alg = parse_algebra(args.algebra)
    if args.jets < args.max_len:
        raise UsageError("jets must be >= max-len for the window checks")
    checks = _parse_checks(args.checks, _HOCHSCHILD_CHECKS)
    report: Dict[str, object] = {
        "algebra": alg.name,
        "max_len": args.max_len,
        "jets": args.jets,
    }
    ok = True
    if "hkr" in checks:
        rep = verify_hkr(alg, args.max_len, args.jets)
        passed = bool(rep["chain_map"] and rep["surjective_onto_window_forms"]
                      and rep["les_consistent"] and rep["window_matches"]
                      and rep["window"])
        report["hkr"] = {"status": "pass" if passed else "fail",
                         "timings": None, **rep}
        ok = ok and passed
    if "cor" in checks:
        rep = degree_one_representatives_report(alg, args.max_len, args.jets)
        passed = bool(rep["window_feasible"])
        report["cor"] = {"status": "pass" if passed else "fail",
                         "timings": None, **rep}
        ok = ok and passed
    if "d0" in checks:
        rep = d0_transport_report(alg, args.max_len, args.jets)
        passed = bool(rep["transport_ok"])
        report["d0"] = {"status": "pass" if passed else "fail",
                        "timings": None, **rep}
        ok = ok and passed
    if "at" in checks:
        rep = verify_at_maps(alg, args.max_len)
        passed = bool(rep["first_is_chain_map"]
                      and rep["second_is_chain_map"])
        report["at"] = {"status": "pass" if passed else "fail",
                        "timings": None, **rep}
        ok = ok and passed
    dump_report(report, args.format, args.out)
    return EXIT_OK if ok else EXIT_IDENTITY


def _parse_checks(text: str, allowed: Tuple[str, ...]) -> List[str]:
    if text == "all":
        return list(allowed)
    picked = [c.strip() for c in text.split(",") if c.strip()]
    for c in picked:
        if c not in allowed:
            raise UsageError(
                f"unknown check {c!r}; allowed: {', '.join(allowed)}")
    if not picked:
        raise UsageError("empty check list")
    return picked


def cmd_duflo_char_check(args) -> int:
    from .duflo import (verify_char, verify_character_square,
                        verify_field_oracle)

    alg = parse_algebra(args.algebra)
    rep = verify_char(alg, jets=args.order)
    field = verify_field_oracle(alg, args.order)
    square = verify_character_square(alg, args.order)
    ok = bool(rep["all"] and field["all"] and square["all"])
    report = {
        "status": "pass" if ok else "fail",
        "timings": None,
        "identities": rep,
        "field_oracle": field,
        "character_square": square,
    }
    dump_report(report, args.format, args.out)
    return EXIT_OK if ok else EXIT_IDENTITY


def cmd_duflo_character(args) -> int:
    from .duflo import duflo_character

    alg = parse_algebra(args.algebra)
    char = duflo_character(alg, args.order)
    report = {
        "algebra": alg.name,
        "order": args.order,
        "monomials": {e: v for e, v in sorted(char.items())},
    }
    dump_report(report, args.format, args.out)
    return EXIT_OK


def cmd_duflo_iso_check(args) -> int:
    from .enveloping import verify_duflo_isomorphism

    alg = parse_algebra(args.algebra)
    if args.order is not None and args.degree > args.order:
        raise UsageError("degree must be <= order (the character must cover "
                         "every derivative that can act)")
    rep = verify_duflo_isomorphism(alg, degree=args.degree)
    ok = bool(rep["all"])
    report = {"status": "pass" if ok else "fail", "timings": None, **rep}
    dump_report(report, args.format, args.out)
    return EXIT_OK if ok else EXIT_IDENTITY


def cmd_wilson_unknot(args) -> int:
    from .wilson import parse_invariant_spec, unknot_invariant, unknot_oracle

    alg = parse_algebra(args.algebra)
    try:
        f = parse_invariant_spec(alg, args.f)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    need = 2 * args.h_order + f.degree
    if args.char_order is not None and args.char_order < need:
        raise UsageError(
            f"char-order must be >= 2*h_order + deg f = {need}")
    got = unknot_invariant(alg, f, args.h_order, args.char_order)
    want = unknot_oracle(alg, f, args.h_order)
    match = got == want
    report = {
        "algebra": alg.name,
        "f": args.f,
        "h_order": args.h_order,
        "coeff": got,
        "oracle_match": match,
    }
    dump_report(report, args.format, args.out)
    return EXIT_OK if match else EXIT_IDENTITY


# -- the suite ---------------------------------------------------------------

_SUITE_CHECKS = ("validate", "ce", "hochschild", "duflo", "enveloping",
                 "wilson")


def run_suite(alg: MetricLieAlgebra, checks: List[str], max_len: int,
              jets: int, order: int, degree: int, h_order: int) -> dict:
    """Execute the requested checks in dependency order.

    A structural failure (axioms, squared differential) marks every later
    check as skipped; identity failures let the rest keep running so the
    report localizes the damage.
    """
    report: Dict[str, object] = {
        "tool": "metriclie",
        "version": __version__,
        "config": {
            "algebra": alg.name,
            "metric": [[alg.metric[i][j] for j in range(alg.dim)]
                       for i in range(alg.dim)],
            "checks": list(checks),
            "max_len": max_len,
            "jets": jets,
            "order": order,
            "degree": degree,
            "h_order": h_order,
        },
        "checks": {},
    }
    body: Dict[str, dict] = report["checks"]
    aborted = False
    all_pass = True
    invariant_failed = False
    for name in _SUITE_CHECKS:
        if name not in checks:
            continue
        if aborted:
            body[name] = {"status": "skipped",
                          "reason": "aborted after invariant failure",
                          "timings": None}
            continue
        try:
            passed, detail = _suite_one(name, alg, max_len, jets, order,
                                        degree, h_order)
        except AssertionError as exc:
            body[name] = {"status": "invariant-failure", "error": str(exc),
                          "timings": None}
            aborted = True
            invariant_failed = True
            all_pass = False
            continue
        detail["status"] = "pass" if passed else "fail"
        detail["timings"] = None
        body[name] = detail
        all_pass = all_pass and passed
        if name == "validate" and not passed:
            aborted = True
            invariant_failed = True
    report["all_pass"] = all_pass
    report["invariant_failed"] = invariant_failed
    return report


def _suite_one(name: str, alg: MetricLieAlgebra, max_len: int, jets: int,
               order: int, degree: int, h_order: int
               ) -> Tuple[bool, dict]:
    if name == "validate":
        rep = alg.validate()
        return rep.ok, dict(rep.as_dict())
    if name == "ce":
        from .ce import ce_cohomology, verify_de_rham
        betti = ce_cohomology(alg, "trivial")
        dr = verify_de_rham(alg, jets)
        ok = bool(dr["chain_map_shift_minus_one"] and dr["square_zero"])
        return ok, {"betti_trivial": betti, "de_rham": dr}
    if name == "hochschild":
        from .hochschild import (d0_transport_report,
                                 degree_one_representatives_report,
                                 verify_at_maps, verify_hkr)
        hkr = verify_hkr(alg, max_len, jets)
        cor = degree_one_representatives_report(alg, max_len, jets)
        d0 = d0_transport_report(alg, max_len, jets)
        at = verify_at_maps(alg, max_len)
        ok = bool(hkr["chain_map"] and hkr["surjective_onto_window_forms"]
                  and hkr["les_consistent"] and hkr["window_matches"]
                  and hkr["window"] and cor["window_feasible"]
                  and d0["transport_ok"] and at["first_is_chain_map"]
                  and at["second_is_chain_map"])
        return ok, {"hkr": hkr, "cor": cor, "d0": d0, "at": at}
    if name == "duflo":
        from .duflo import (verify_char, verify_character_square,
                            verify_field_oracle)
        rep = verify_char(alg, jets=order)
        field = verify_field_oracle(alg, order)
        square = verify_character_square(alg, order)
        ok = bool(rep["all"] and field["all"] and square["all"])
        return ok, {"identities": rep, "field_oracle": field,
                    "character_square": square}
    if name == "enveloping":
        from .enveloping import verify_duflo_isomorphism
        rep = verify_duflo_isomorphism(alg, degree=degree)
        return bool(rep["all"]), dict(rep)
    if name == "wilson":
        from .wilson import (parse_invariant_spec, unknot_invariant,
                             unknot_oracle)
        detail: Dict[str, object] = {}
        ok = True
        for spec in ("one", "casimir"):
            f = parse_invariant_spec(alg, spec)
            got = unknot_invariant(alg, f, h_order)
            want = unknot_oracle(alg, f, h_order)
            match = got == want
            detail[spec] = {"coeff": got, "oracle_match": match}
            ok = ok and match
        return ok, detail
    raise UsageError(f"unknown suite check {name!r}")


def _first_divergence(a, b, path: str = "") -> Optional[str]:
    if type(a) is not type(b):
        return path or "<root>"
    if isinstance(a, dict):
        for k in sorted(set(a) | set(b)):
            if k not in a or k not in b:
                return f"{path}.{k}" if path else str(k)
            sub = _first_divergence(a[k], b[k], f"{path}.{k}" if path
                                    else str(k))
            if sub:
                return sub
        return None
    if isinstance(a, list):
        if len(a) != len(b):
            return path or "<root>"
        for i, (x, y) in enumerate(zip(a, b)):
            sub = _first_divergence(x, y, f"{path}[{i}]")
            if sub:
                return sub
        return None
    return None if a == b else (path or "<root>")


def cmd_suite_run(args) -> int:
    alg = parse_algebra(args.algebra)
    checks = _parse_checks(args.checks, _SUITE_CHECKS)
    if args.jets < args.max_len:
        raise UsageError("jets must be >= max-len for the window checks")
    if args.degree > args.order:
        raise UsageError("degree must be <= order")
    report = run_suite(alg, checks, args.max_len, args.jets, args.order,
                       args.degree, args.h_order)
    dump_report(report, args.format, args.out)
    code = EXIT_OK
    if report["invariant_failed"]:
        code = EXIT_INVARIANT
    elif not report["all_pass"]:
        code = EXIT_IDENTITY
    if args.baseline:
        base = args.baseline
        root = os.environ.get("METRICLIE_OUT")
        if root and not os.path.isabs(base):
            base = os.path.join(root, base)
        payload = jsonable(report)
        if not os.path.exists(base):
            os.makedirs(os.path.dirname(base) or ".", exist_ok=True)
            with open(base, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, sort_keys=True, indent=2,
                          separators=(",", ": "))
                fh.write("\n")
            sys.stderr.write(f"baseline created at {base}\n")
        else:
            with open(base, "r", encoding="utf-8") as fh:
                stored = json.load(fh)
            where = _first_divergence(stored, payload)
            if where:
                sys.stderr.write(
                    f"regression drift at key {where}\n")
                return EXIT_IDENTITY
            sys.stderr.write("baseline match\n")
    return code


# -- argument wiring ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="metriclie",
        description="Exact verification of homological identities over "
                    "metric Lie algebras.")
    top.add_argument("--version", action="version",
                     version=f"metriclie {__version__}")
    sub = top.add_subparsers(dest="group", required=True)

    def common(p):
        p.add_argument("--format", "-f", choices=("json", "text"),
                       default="json")
        p.add_argument("--out", "-o", default=None,
                       help="output path; relative paths land under "
                            "METRICLIE_OUT when that is set")

    g_alg = sub.add_parser("algebra", help="algebra ingestion and axioms")
    s_alg = g_alg.add_subparsers(dest="cmd", required=True)
    p = s_alg.add_parser("validate", help="axiom report for a builtin or "
                                          "JSON file")
    p.add_argument("algebra")
    common(p)
    p.set_defaults(func=cmd_algebra_validate)

    g_ce = sub.add_parser("ce", help="dual-exterior cohomology")
    s_ce = g_ce.add_subparsers(dest="cmd", required=True)
    p = s_ce.add_parser("cohomology")
    p.add_argument("--algebra", required=True)
    p.add_argument("--module", default="trivial",
                   help="trivial, jets:N, or uea:D")
    p.add_argument("--representatives", action="store_true")
    common(p)
    p.set_defaults(func=cmd_ce_cohomology)

    g_h = sub.add_parser("hochschild", help="chain-level windows and "
                                            "transport")
    s_h = g_h.add_subparsers(dest="cmd", required=True)
    p = s_h.add_parser("verify")
    p.add_argument("--algebra", required=True)
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--jets", type=int, default=4)
    p.add_argument("--checks", default="all",
                   help="comma list from: " + ",".join(_HOCHSCHILD_CHECKS))
    common(p)
    p.set_defaults(func=cmd_hochschild_verify)

    g_d = sub.add_parser("duflo", help="character series and operator "
                                       "identities")
    s_d = g_d.add_subparsers(dest="cmd", required=True)
    p = s_d.add_parser("char-check")
    p.add_argument("--algebra", required=True)
    p.add_argument("--order", type=int, default=6)
    common(p)
    p.set_defaults(func=cmd_duflo_char_check)
    p = s_d.add_parser("character")
    p.add_argument("--algebra", required=True)
    p.add_argument("--order", type=int, default=6)
    common(p)
    p.set_defaults(func=cmd_duflo_character)
    p = s_d.add_parser("iso-check")
    p.add_argument("--algebra", required=True)
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--order", type=int, default=None,
                   help="character order bound; must be >= degree")
    common(p)
    p.set_defaults(func=cmd_duflo_iso_check)

    g_w = sub.add_parser("wilson", help="loop composition through the "
                                        "envelope")
    s_w = g_w.add_subparsers(dest="cmd", required=True)
    p = s_w.add_parser("unknot")
    p.add_argument("--algebra", required=True)
    p.add_argument("--f", default="one",
                   help="one, casimir, casimir^m, or file:<path>")
    p.add_argument("--h-order", type=int, default=3)
    p.add_argument("--char-order", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_wilson_unknot)

    g_s = sub.add_parser("suite", help="orchestrated regression run")
    s_s = g_s.add_subparsers(dest="cmd", required=True)
    p = s_s.add_parser("run")
    p.add_argument("--algebra", required=True)
    p.add_argument("--checks", default="all",
                   help="comma list from: " + ",".join(_SUITE_CHECKS))
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--jets", type=int, default=4)
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--h-order", type=int, default=2)
    p.add_argument("--baseline", default=None,
                   help="compare against a stored report; created when "
                        "missing")
    common(p)
    p.set_defaults(func=cmd_suite_run)
    return top


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except InvariantError as exc:
        sys.stderr.write(f"invariant failure: {exc}\n")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
