"""Unknot composition: exponential of the quadratic element, observed
through an invariant function and the square-root character.

The pipeline expands exp(h t), t the metric quadratic in the generators,
order by order in h: the h^m coefficient applies the invariant function and
the character as constant-coefficient derivative operators to t^m/m!, then
symmetrizes into the envelope.  The resulting loop element is evaluated by
augmentation (the coefficient of the empty monomial), giving one rational
per power of h.

The h-grading counts the quadratic factors consumed, so the h^m output is
exactly the degree-2m stage of the expansion.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Tuple

from .algebras import MetricLieAlgebra, casimir
from .duflo import duflo_character
from .enveloping import (PBWElement, SymElement, UniversalEnvelope,
                         apply_dual_poly, pbw_symmetrize, sym_mul)

__all__ = [
    "InvariantFunction",
    "coadjoint_defect",
    "casimir_dual",
    "parse_invariant_spec",
    "chain_composition",
    "unknot_invariant",
    "unknot_oracle",
]

ZERO = Fraction(0)
ONE = Fraction(1)

Exps = Tuple[int, ...]


def _acc(dst, key, val) -> None:
    if not val:
        return
    s = dst.get(key, ZERO) + val
    if s:
        dst[key] = s
    else:
        dst.pop(key, None)


def coadjoint_defect(algebra: MetricLieAlgebra, f: Dict[Exps, Fraction]
                     ) -> Optional[Tuple[int, Exps]]:
    """First generator whose coadjoint action fails to kill f, with witness.

    The action on a dual generator is x_i . y^k = -sum_j c_ij^k y^j,
    extended to monomials as a derivation.
    """
    n = algebra.dim
    for i in range(n):
        img: Dict[Exps, Fraction] = {}
        for e, v in f.items():
            for k in range(n):
                if not e[k]:
                    continue
                for j in range(n):
                    c = algebra.c(i, j, k)
                    if not c:
                        continue
                    e2 = list(e)
                    e2[k] -= 1
                    e2[j] += 1
                    _acc(img, tuple(e2), -v * c * e[k])
        if img:
            witness = sorted(img)[0]
            return (i, witness)
    return None


class InvariantFunction:
    """A coadjoint-invariant polynomial in the dual variables."""

    def __init__(self, algebra: MetricLieAlgebra, poly: Dict[Exps, Fraction],
                 name: str = "custom"):
        self.algebra = algebra
        self.poly = {e: Fraction(v) for e, v in poly.items() if v}
        self.name = name
        bad = coadjoint_defect(algebra, self.poly)
        if bad is not None:
            raise ValueError(
                f"function {name!r} is not coadjoint invariant; generator "
                f"{bad[0]} moves it (witness monomial {bad[1]})")

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.poly), default=0)

    def __repr__(self):
        return f"InvariantFunction({self.name})"


def casimir_dual(algebra: MetricLieAlgebra, power: int = 1
                 ) -> Dict[Exps, Fraction]:
    """(sum_ij g_ij y^i y^j)^power, the metric quadratic in dual variables."""
    n = algebra.dim
    quad: Dict[Exps, Fraction] = {}
    for i in range(n):
        for j in range(n):
            v = algebra.metric[i][j]
            if not v:
                continue
            e = [0] * n
            e[i] += 1
            e[j] += 1
            _acc(quad, tuple(e), v)
    out: Dict[Exps, Fraction] = {(0,) * n: ONE}
    for _ in range(power):
        out = sym_mul(out, quad)
    return out


def parse_invariant_spec(algebra: MetricLieAlgebra, spec: str
                         ) -> InvariantFunction:
    """"one", "casimir", "casimir^m", or "file:<path>" (a JSON monomial
    list [[e_1, ..., e_n, num, den], ...])."""
    if spec == "one":
        return InvariantFunction(algebra, {(0,) * algebra.dim: ONE}, "one")
    if spec == "casimir" or spec.startswith("casimir^"):
        power = 1
        if "^" in spec:
            try:
                power = int(spec.split("^", 1)[1])
            except ValueError:
                raise ValueError(f"bad power in {spec!r}") from None
            if power < 0:
                raise ValueError("casimir power must be >= 0")
        return InvariantFunction(algebra, casimir_dual(algebra, power), spec)
    if spec.startswith("file:"):
        path = spec[5:]
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        n = algebra.dim
        poly: Dict[Exps, Fraction] = {}
        for row in data:
            if len(row) != n + 2:
                raise ValueError(
                    f"monomial row needs {n} exponents plus num, den")
            e = tuple(int(x) for x in row[:n])
            _acc(poly, e, Fraction(int(row[n]), int(row[n + 1])))
        return InvariantFunction(algebra, poly, spec)
    raise ValueError(f"unknown invariant function spec {spec!r}")


def chain_composition(algebra: MetricLieAlgebra, f: InvariantFunction,
                      h_order: int, char_order: Optional[int] = None
                      ) -> List[PBWElement]:
    """Envelope-valued h-expansion of the composed unknot loop.

    Entry m is the symmetrized image of j^(1/2)(d) f(d) t^m/m!.  The
    character order must cover every derivative that can act: at least
    2 * h_order + deg f.
    """
    need = 2 * h_order + f.degree
    if char_order is None:
        char_order = need
    if char_order < need:
        raise ValueError(
            f"character order {char_order} below the required {need}")
    env = UniversalEnvelope(algebra)
    t = casimir(algebra)
    j12 = duflo_character(algebra, char_order)
    out: List[PBWElement] = []
    power: SymElement = {(0,) * algebra.dim: ONE}
    for m in range(h_order + 1):
        if m:
            power = sym_mul(power, t)
        staged = {e: v / factorial(m) for e, v in power.items()}
        staged = apply_dual_poly(f.poly, staged)
        staged = apply_dual_poly(j12, staged)
        out.append(pbw_symmetrize(env, staged))
    return out


def unknot_invariant(algebra: MetricLieAlgebra, f: InvariantFunction,
                     h_order: int, char_order: Optional[int] = None
                     ) -> List[Fraction]:
    """h-coefficients of the unknot evaluation, through the envelope."""
    env = UniversalEnvelope(algebra)
    return [env.augmentation(p)
            for p in chain_composition(algebra, f, h_order, char_order)]


def unknot_oracle(algebra: MetricLieAlgebra, f: InvariantFunction,
                  h_order: int) -> List[Fraction]:
    """Same coefficients, pairing inside the symmetric algebra only.

    <f * j^(1/2), exp(h t)> picked apart per h power: apply the product
    polynomial as derivatives to t^m/m! and keep the constant term.  No
    envelope, no symmetrization; an independent route for the tests.
    """
    char_order = 2 * h_order + f.degree
    j12 = duflo_character(algebra, char_order)
    fj = sym_mul(f.poly, j12)
    t = casimir(algebra)
    zero = (0,) * algebra.dim
    out: List[Fraction] = []
    power: SymElement = {zero: ONE}
    for m in range(h_order + 1):
        if m:
            power = sym_mul(power, t)
        staged = {e: v / factorial(m) for e, v in power.items()}
        val = apply_dual_poly(fj, staged).get(zero, ZERO)
        out.append(val)
    return out
