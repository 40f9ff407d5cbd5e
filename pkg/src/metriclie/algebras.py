"""Finite-dimensional metric Lie algebras with exact rational data.

A metric Lie algebra here is a Lie algebra over Q given by structure
constants together with an invariant nondegenerate symmetric bilinear form.
Everything downstream (complexes, operators, enveloping algebra) reads its
input from this module.

Conventions frozen here and relied on by every test value in the repository:

* ``c[i][j][k]`` means [x_i, x_j] = sum_k c[i][j][k] x_k.
* builtin ``sl2``: basis order (h, e, f), [h,e] = 2e, [h,f] = -2f,
  [e,f] = h; metric = scale * Killing form, so <h,h> = 8, <e,f> = 4.
* builtin ``so3``: basis (x1, x2, x3), [x_i, x_j] = eps_ijk x_k;
  metric = scale * identity.
* builtin ``oscillator``: basis (p, q, e, h), [p,q] = e, [h,p] = q,
  [h,q] = -p; metric <p,p> = <q,q> = 1, <e,h> = 1.  Solvable but metric,
  the standard four-dimensional example.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import LinearSolver, SparseMatrix, rank_kernel_image

__all__ = [
    "MetricLieAlgebra",
    "ValidationReport",
    "AdEndomorphism",
    "builtin",
    "abelian",
    "sl2",
    "so3",
    "oscillator",
    "from_json_file",
    "from_json_dict",
    "ad",
    "casimir",
    "killing_form",
]

ZERO = Fraction(0)
ONE = Fraction(1)

Matrix = List[List[Fraction]]


def _frac_table(n: int) -> List[List[Dict[int, Fraction]]]:
    return [[dict() for _ in range(n)] for _ in range(n)]


class ValidationReport:
    """Outcome of the axiom checks, one record per axiom.

    ``checks`` is a list of dicts {name, passed, witness}; ``witness`` is
    None on success, else the first violating index tuple and residual.
    """

    def __init__(self, checks: List[dict]):
        self.checks = checks

    @property
    def ok(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def failed(self) -> List[dict]:
        return [c for c in self.checks if not c["passed"]]

    def as_dict(self) -> dict:
        return {"ok": self.ok, "checks": self.checks}


class MetricLieAlgebra:
    """Structure constants plus invariant metric, exact rationals throughout.

    Immutable after construction.  ``structure[i][j]`` is a sparse map
    k -> c[i][j][k]; ``metric`` and ``metric_inverse`` are dense n x n.
    """

    def __init__(self, name: str, dim: int,
                 bracket: Sequence[Tuple[int, int, int, Fraction]],
                 metric: Matrix):
        self.name = name
        self.dim = dim
        structure = _frac_table(dim)
        for (i, j, k, v) in bracket:
            if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
                raise ValueError(f"bracket index out of range: {(i, j, k)}")
            v = Fraction(v)
            if not v:
                continue
            old = structure[i][j].get(k)
            if old is not None and old != v:
                raise ValueError(f"conflicting bracket entries at {(i, j, k)}")
            structure[i][j][k] = v
            older = structure[j][i].get(k)
            if older is not None and older != -v:
                raise ValueError(f"conflicting bracket entries at {(j, i, k)}")
            structure[j][i][k] = -v
        self.structure = structure
        if len(metric) != dim or any(len(row) != dim for row in metric):
            raise ValueError("metric must be n x n")
        self.metric = [[Fraction(v) for v in row] for row in metric]
        try:
            self._metric_inverse: Optional[Matrix] = _invert(self.metric)
        except ValueError:
            # degenerate metric: reported by validate(), not a crash here
            self._metric_inverse = None

    @property
    def metric_inverse(self) -> Matrix:
        if self._metric_inverse is None:
            raise ValueError(f"metric of {self.name} is degenerate")
        return self._metric_inverse

    # -- basic accessors -------------------------------------------------

    def c(self, i: int, j: int, k: int) -> Fraction:
        return self.structure[i][j].get(k, ZERO)

    def bracket_map(self, i: int, j: int) -> Dict[int, Fraction]:
        """[x_i, x_j] as a sparse coordinate vector."""
        return dict(self.structure[i][j])

    def pairing(self, i: int, j: int) -> Fraction:
        return self.metric[i][j]

    def ad_matrix(self, coeffs: Sequence[Fraction]) -> Matrix:
        """Matrix of ad(sum_i coeffs[i] x_i); row k, column j."""
        n = self.dim
        out = [[ZERO] * n for _ in range(n)]
        for i, lam in enumerate(coeffs):
            lam = Fraction(lam)
            if not lam:
                continue
            for j in range(n):
                for k, v in self.structure[i][j].items():
                    out[k][j] += lam * v
        return out

    # -- validation ------------------------------------------------------

    def validate(self) -> ValidationReport:
        n = self.dim
        checks: List[dict] = []

        def axiom(name, witness):
            checks.append({"name": name, "passed": witness is None,
                           "witness": witness})

        w = None
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.c(i, j, k) + self.c(j, i, k):
                        w = {"indices": [i, j, k],
                             "residual": _pairrepr(
                                 self.c(i, j, k) + self.c(j, i, k))}
                        break
                if w:
                    break
            if w:
                break
        axiom("antisymmetry", w)

        w = None
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        s = ZERO
                        for m in range(n):
                            s += (self.c(i, j, m) * self.c(m, k, l)
                                  + self.c(j, k, m) * self.c(m, i, l)
                                  + self.c(k, i, m) * self.c(m, j, l))
                        if s:
                            w = {"indices": [i, j, k, l],
                                 "residual": _pairrepr(s)}
                            break
                    if w:
                        break
                if w:
                    break
            if w:
                break
        axiom("jacobi", w)

        w = None
        for i in range(n):
            for j in range(n):
                if self.metric[i][j] != self.metric[j][i]:
                    w = {"indices": [i, j],
                         "residual": _pairrepr(
                             self.metric[i][j] - self.metric[j][i])}
                    break
            if w:
                break
        axiom("metric_symmetric", w)

        if self._metric_inverse is not None:
            axiom("metric_nondegenerate", None)
        else:
            axiom("metric_nondegenerate",
                  {"indices": [], "residual": "det = 0"})

        w = None
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    lhs = sum((self.c(i, j, m) * self.metric[m][k]
                               for m in range(n)), ZERO)
                    rhs = sum((self.metric[i][m] * self.c(j, k, m)
                               for m in range(n)), ZERO)
                    if lhs != rhs:
                        w = {"indices": [i, j, k],
                             "residual": _pairrepr(lhs - rhs)}
                        break
                if w:
                    break
            if w:
                break
        axiom("metric_invariant", w)

        # unimodularity is forced by the invariant metric; checked anyway
        w = None
        for i in range(n):
            tr = sum((self.c(i, j, j) for j in range(n)), ZERO)
            if tr:
                w = {"indices": [i], "residual": _pairrepr(tr)}
                break
        axiom("unimodular", w)

        return ValidationReport(checks)

    def __repr__(self):
        return f"MetricLieAlgebra({self.name!r}, dim={self.dim})"


class AdEndomorphism:
    """Adjoint of a fixed element, with its base coefficients remembered."""

    def __init__(self, algebra: MetricLieAlgebra, coeffs: Sequence[Fraction]):
        self.algebra = algebra
        self.base_vector_coeffs = [Fraction(c) for c in coeffs]
        self.matrix = algebra.ad_matrix(self.base_vector_coeffs)

    def g_skew_defect(self) -> Optional[Tuple[int, int]]:
        """First (i, j) where g*ad + (g*ad)^T fails to vanish, if any."""
        g = self.algebra.metric
        n = self.algebra.dim
        gm = [[sum((g[i][k] * self.matrix[k][j] for k in range(n)), ZERO)
               for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(n):
                if gm[i][j] + gm[j][i]:
                    return (i, j)
        return None


def ad(algebra: MetricLieAlgebra, coeffs: Sequence[Fraction]) -> AdEndomorphism:
    return AdEndomorphism(algebra, coeffs)


def casimir(algebra: MetricLieAlgebra) -> Dict[Tuple[int, ...], Fraction]:
    """The quadratic element sum g^{ij} x_i x_j of S^2(g).

    Returned as a polynomial in commuting variables: exponent tuple ->
    coefficient.  With the metric inverse symmetric, off-diagonal pairs
    merge into a single monomial with doubled coefficient.
    """
    n = algebra.dim
    out: Dict[Tuple[int, ...], Fraction] = {}
    for i in range(n):
        for j in range(n):
            v = algebra.metric_inverse[i][j]
            if not v:
                continue
            e = [0] * n
            e[i] += 1
            e[j] += 1
            key = tuple(e)
            s = out.get(key, ZERO) + v
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def killing_form(algebra: MetricLieAlgebra) -> Matrix:
    """Killing form K(x_i, x_j) = Tr(ad x_i ad x_j), computed directly."""
    n = algebra.dim
    mats = []
    for i in range(n):
        coeffs = [ZERO] * n
        coeffs[i] = ONE
        mats.append(algebra.ad_matrix(coeffs))
    out = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            out[i][j] = sum((mats[i][a][b] * mats[j][b][a]
                             for a in range(n) for b in range(n)), ZERO)
    return out


# -- builtins ------------------------------------------------------------


def abelian(n: int, metric: Optional[Matrix] = None) -> MetricLieAlgebra:
    if metric is None:
        metric = [[ONE if i == j else ZERO for j in range(n)]
                  for i in range(n)]
    return MetricLieAlgebra(f"abelian({n})", n, [], metric)


def sl2(scale: Fraction = ONE) -> MetricLieAlgebra:
    scale = Fraction(scale)
    if not scale:
        raise ValueError("scale 0 degenerates the metric")
    bracket = [
        (0, 1, 1, Fraction(2)),    # [h, e] = 2e
        (0, 2, 2, Fraction(-2)),   # [h, f] = -2f
        (1, 2, 0, ONE),            # [e, f] = h
    ]
    killing = [[Fraction(8), ZERO, ZERO],
               [ZERO, ZERO, Fraction(4)],
               [ZERO, Fraction(4), ZERO]]
    metric = [[scale * v for v in row] for row in killing]
    return MetricLieAlgebra("sl2", 3, bracket, metric)


def so3(scale: Fraction = ONE) -> MetricLieAlgebra:
    scale = Fraction(scale)
    if not scale:
        raise ValueError("scale 0 degenerates the metric")
    bracket = [
        (0, 1, 2, ONE),   # [x1, x2] = x3
        (1, 2, 0, ONE),   # [x2, x3] = x1
        (2, 0, 1, ONE),   # [x3, x1] = x2
    ]
    metric = [[scale if i == j else ZERO for j in range(3)]
              for i in range(3)]
    return MetricLieAlgebra("so3", 3, bracket, metric)


def oscillator() -> MetricLieAlgebra:
    bracket = [
        (0, 1, 2, ONE),    # [p, q] = e
        (3, 0, 1, ONE),    # [h, p] = q
        (3, 1, 0, -ONE),   # [h, q] = -p
    ]
    metric = [[ONE, ZERO, ZERO, ZERO],
              [ZERO, ONE, ZERO, ZERO],
              [ZERO, ZERO, ZERO, ONE],
              [ZERO, ZERO, ONE, ZERO]]
    return MetricLieAlgebra("oscillator", 4, bracket, metric)


def builtin(name: str, *params) -> MetricLieAlgebra:
    """Builtin registry: abelian(n[, metric]), sl2([scale]), so3([scale]),
    oscillator."""
    if name == "abelian":
        return abelian(*params)
    if name == "sl2":
        return sl2(*params) if params else sl2()
    if name == "so3":
        return so3(*params) if params else so3()
    if name == "oscillator":
        return oscillator()
    raise ValueError(f"unknown builtin algebra {name!r}")


# -- file ingestion -------------------------------------------------------


def from_json_dict(data: dict) -> MetricLieAlgebra:
    """Build an algebra from the ingestion schema.

    {name, dim, bracket: [[i, j, k, num, den], ...] (i<j entries suffice),
     metric: [[i, j, num, den], ...]}; indices 0-based, omissions are zero.
    """
    try:
        name = str(data["name"])
        dim = int(data["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed algebra file: {exc}") from exc
    if dim <= 0:
        raise ValueError("dim must be positive")
    bracket = []
    for entry in data.get("bracket", []):
        if len(entry) != 5:
            raise ValueError(f"bracket entry must be [i,j,k,num,den]: {entry}")
        i, j, k, num, den = entry
        bracket.append((int(i), int(j), int(k), Fraction(int(num), int(den))))
    metric = [[ZERO] * dim for _ in range(dim)]
    for entry in data.get("metric", []):
        if len(entry) != 4:
            raise ValueError(f"metric entry must be [i,j,num,den]: {entry}")
        i, j, num, den = entry
        i, j = int(i), int(j)
        if not (0 <= i < dim and 0 <= j < dim):
            raise ValueError(f"metric index out of range: {(i, j)}")
        v = Fraction(int(num), int(den))
        metric[i][j] = v
        metric[j][i] = v
    return MetricLieAlgebra(name, dim, bracket, metric)


def from_json_file(path: str) -> MetricLieAlgebra:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("algebra file must contain a JSON object")
    return from_json_dict(data)


# -- helpers ---------------------------------------------------------------


def _invert(m: Matrix) -> Matrix:
    n = len(m)
    ent = {}
    for i in range(n):
        for j in range(n):
            if m[i][j]:
                ent[(i, j)] = m[i][j]
    sm = SparseMatrix(n, n, ent)
    rank, _, _ = rank_kernel_image(sm)
    if rank != n:
        raise ValueError("matrix is singular")
    solver = LinearSolver(sm)
    cols = [solver.solve({j: ONE}) for j in range(n)]
    return [[cols[j].get(i, ZERO) for j in range(n)] for i in range(n)]


def _pairrepr(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"
