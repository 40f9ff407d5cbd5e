"""Truncated differential forms over a metric Lie algebra.

The carrier is Lambda(xi^1..xi^n) tensor Q[y^1..y^n]/(degree > N): odd
generators xi^i of cohomological degree 1 and even jet generators y^i of
degree 0, with total jet degree truncated at N.  Elements are sparse dicts
keyed by (bitmask, exponent tuple).

Sign conventions, frozen repository-wide:

* monomials are written with xi factors in ascending index order, then the
  y part; any product sign is the parity of the transpositions needed to
  reach that normal form (Koszul rule);
* the dual-bracket differential acts on generators by
  d xi^k = - sum_{i<j} c[i][j][k] xi^i xi^j,
  d y^k  = - sum_{i,m} c[i][m][k] xi^i y^m
  and extends as an odd derivation; the y-generator formula is the coadjoint
  action written against ascending xi insertion (d o d = 0 reproves Jacobi);
* the de Rham map sends xi^k to y^k, y^k to 0, again as an odd derivation;
  it lowers the cohomological degree by one and anticommutes with d.

All operations respect the jet truncation: products or raises past degree N
are dropped, which is the quotient by the ideal of high jets.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Tuple

from .algebras import MetricLieAlgebra
from .linalg import FiniteChainComplex, SparseMatrix

__all__ = ["FormSpace", "FormElement", "merge_sign"]

ZERO = Fraction(0)
ONE = Fraction(1)

#: sparse element: (xi bitmask, y exponent tuple) -> coefficient
FormElement = Dict[Tuple[int, Tuple[int, ...]], Fraction]


def merge_sign(mask1: int, mask2: int) -> int:
    """Koszul sign merging xi_{mask1} * xi_{mask2}, or 0 on overlap.

    Each bit j of mask2 jumps over the bits of mask1 above j.
    """
    if mask1 & mask2:
        return 0
    sign = 1
    m2 = mask2
    while m2:
        j = (m2 & -m2).bit_length() - 1
        if bin(mask1 >> (j + 1)).count("1") & 1:
            sign = -sign
        m2 &= m2 - 1
    return sign


def _add(dst: FormElement, key, val: Fraction) -> None:
    s = dst.get(key, ZERO) + val
    if s:
        dst[key] = s
    else:
        dst.pop(key, None)


def _monomials(n: int, max_deg: int) -> List[Tuple[int, ...]]:
    """All exponent tuples with total degree <= max_deg, graded-lex order."""
    out: List[Tuple[int, ...]] = []

    def rec(prefix: List[int], remaining: int, pos: int):
        if pos == n - 1:
            prefix.append(remaining)
            out.append(tuple(prefix))
            prefix.pop()
            return
        for v in range(remaining, -1, -1):
            prefix.append(v)
            rec(prefix, remaining - v, pos + 1)
            prefix.pop()

    result: List[Tuple[int, ...]] = []
    for d in range(max_deg + 1):
        out = []
        if n == 0:
            if d == 0:
                result.append(())
            continue
        rec([], d, 0)
        result.extend(out)
    return result


class FormSpace:
    """The truncated forms algebra of one metric Lie algebra.

    Carries the basis enumeration (global and per exterior degree), the
    multiplication, both differentials, and the packaging of the whole thing
    as a FiniteChainComplex graded by exterior degree.
    """

    def __init__(self, algebra: MetricLieAlgebra, trunc: int):
        if trunc < 0:
            raise ValueError("jet truncation must be >= 0")
        self.algebra = algebra
        self.n = algebra.dim
        self.trunc = trunc
        n = self.n
        jets = _monomials(n, trunc)
        self._jets = jets
        masks_by_degree: List[List[int]] = [[] for _ in range(n + 1)]
        for mask in range(1 << n):
            masks_by_degree[bin(mask).count("1")].append(mask)
        self.basis: List[Tuple[int, Tuple[int, ...]]] = []
        self._degree_offset: List[int] = []
        for deg in range(n + 1):
            self._degree_offset.append(len(self.basis))
            for mask in masks_by_degree[deg]:
                for e in jets:
                    self.basis.append((mask, e))
        self.index = {b: i for i, b in enumerate(self.basis)}
        # generator differentials, precomputed once
        a = algebra
        self._d_xi: List[FormElement] = []
        for k in range(n):
            elt: FormElement = {}
            for i, j in combinations(range(n), 2):
                v = a.c(i, j, k)
                if v:
                    _add(elt, ((1 << i) | (1 << j), self._zero_e()), -v)
            self._d_xi.append(elt)
        self._d_y: List[FormElement] = []
        for k in range(n):
            elt = {}
            for i in range(n):
                for m in range(n):
                    v = a.c(i, m, k)
                    if v:
                        e = self._unit_e(m)
                        _add(elt, (1 << i, e), -v)
            self._d_y.append(elt)

    # -- basis bookkeeping ----------------------------------------------

    def _zero_e(self) -> Tuple[int, ...]:
        return (0,) * self.n

    def _unit_e(self, m: int) -> Tuple[int, ...]:
        e = [0] * self.n
        e[m] = 1
        return tuple(e)

    def dim(self) -> int:
        return len(self.basis)

    def degree_dims(self) -> Dict[int, int]:
        per = len(self._jets)
        from math import comb
        return {k: comb(self.n, k) * per for k in range(self.n + 1)}

    def degree_basis(self, k: int) -> List[Tuple[int, Tuple[int, ...]]]:
        if not 0 <= k <= self.n:
            return []
        start = self._degree_offset[k]
        end = (self._degree_offset[k + 1] if k + 1 <= self.n
               else len(self.basis))
        return self.basis[start:end]

    def local_index(self, key: Tuple[int, Tuple[int, ...]]) -> Tuple[int, int]:
        """(exterior degree, index within that degree block)."""
        gi = self.index[key]
        deg = bin(key[0]).count("1")
        return deg, gi - self._degree_offset[deg]

    def element_degree(self, elt: FormElement) -> Optional[int]:
        degs = {bin(mask).count("1") for (mask, _e) in elt}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs.pop()

    # -- algebra operations ----------------------------------------------

    def mul(self, a: FormElement, b: FormElement) -> FormElement:
        """Product with Koszul signs; jets beyond the truncation drop out."""
        out: FormElement = {}
        cap = self.trunc
        for (m1, e1), v1 in a.items():
            d1 = sum(e1)
            for (m2, e2), v2 in b.items():
                if d1 + sum(e2) > cap:
                    continue
                sgn = merge_sign(m1, m2)
                if not sgn:
                    continue
                e = tuple(x + y for x, y in zip(e1, e2))
                _add(out, (m1 | m2, e), sgn * v1 * v2)
        return out

    def scalar(self, value) -> FormElement:
        v = Fraction(value)
        return {(0, self._zero_e()): v} if v else {}

    def xi(self, k: int) -> FormElement:
        return {(1 << k, self._zero_e()): ONE}

    def y(self, k: int) -> FormElement:
        return {(0, self._unit_e(k)): ONE}

    def partial_xi(self, elt: FormElement, k: int) -> FormElement:
        """Left odd derivative d/dxi^k."""
        out: FormElement = {}
        bit = 1 << k
        for (mask, e), v in elt.items():
            if not mask & bit:
                continue
            below = bin(mask & (bit - 1)).count("1")
            sgn = -ONE if below & 1 else ONE
            _add(out, (mask ^ bit, e), sgn * v)
        return out

    def partial_y(self, elt: FormElement, k: int) -> FormElement:
        out: FormElement = {}
        for (mask, e), v in elt.items():
            if not e[k]:
                continue
            e2 = list(e)
            e2[k] -= 1
            _add(out, (mask, tuple(e2)), e[k] * v)
        return out

    def d(self, elt: FormElement) -> FormElement:
        """The dual-bracket differential, odd derivation on generators."""
        out: FormElement = {}
        for (mask, e), coeff in elt.items():
            # xi part: d xi^k lands in even degree, commutes back freely
            pos = 0
            m = mask
            while m:
                k = (m & -m).bit_length() - 1
                m &= m - 1
                rest = {(mask ^ (1 << k), e): coeff}
                sgn = -ONE if pos & 1 else ONE
                for key, v in self.mul(self._d_xi[k], rest).items():
                    _add(out, key, sgn * v)
                pos += 1
            # y part: d y^k carries one xi, so it crosses the whole xi block
            sgn = -ONE if bin(mask).count("1") & 1 else ONE
            for k in range(self.n):
                if not e[k]:
                    continue
                e2 = list(e)
                e2[k] -= 1
                rest = {(mask, tuple(e2)): coeff * e[k]}
                for key, v in self.mul(rest, self._d_y[k]).items():
                    _add(out, key, sgn * v)
        return out

    def d_de_rham(self, elt: FormElement) -> FormElement:
        """Odd derivation xi^k -> y^k, y^k -> 0; degree -1, jets +1."""
        out: FormElement = {}
        cap = self.trunc
        for (mask, e), coeff in elt.items():
            if sum(e) + 1 > cap:
                continue
            pos = 0
            m = mask
            while m:
                k = (m & -m).bit_length() - 1
                m &= m - 1
                e2 = list(e)
                e2[k] += 1
                sgn = -ONE if pos & 1 else ONE
                _add(out, (mask ^ (1 << k), tuple(e2)), sgn * coeff)
                pos += 1
        return out

    # -- complex packaging -------------------------------------------------

    def to_vector(self, elt: FormElement, degree: int) -> Dict[int, Fraction]:
        """Coordinates of a homogeneous element in its degree block."""
        out: Dict[int, Fraction] = {}
        for key, v in elt.items():
            deg, idx = self.local_index(key)
            if deg != degree:
                raise ValueError(f"element not homogeneous of degree {degree}")
            out[idx] = v
        return out

    def from_vector(self, vec: Dict[int, Fraction], degree: int) -> FormElement:
        basis = self.degree_basis(degree)
        return {basis[i]: v for i, v in vec.items() if v}

    def global_vector(self, elt: FormElement) -> Dict[int, Fraction]:
        return {self.index[key]: v for key, v in elt.items()}

    def complex(self) -> FiniteChainComplex:
        """The forms complex graded by exterior degree, d = dual bracket."""
        dims = self.degree_dims()
        diffs: Dict[int, SparseMatrix] = {}
        for k in range(self.n):
            ent: Dict[Tuple[int, int], Fraction] = {}
            for col, key in enumerate(self.degree_basis(k)):
                img = self.d({key: ONE})
                for ikey, v in img.items():
                    deg, row = self.local_index(ikey)
                    if deg != k + 1:
                        raise AssertionError("differential degree drift")
                    ent[(row, col)] = v
            diffs[k] = SparseMatrix(dims[k + 1], dims[k], ent)
        labels = {k: [self.label(key) for key in self.degree_basis(k)]
                  for k in range(self.n + 1)}
        return FiniteChainComplex(dims, diffs, labels=labels)

    def operator_matrix(self, fn, source_degree: Optional[int] = None
                        ) -> SparseMatrix:
        """Global matrix of a linear operator given as FormElement -> FormElement."""
        ncols = self.dim()
        ent: Dict[Tuple[int, int], Fraction] = {}
        for col, key in enumerate(self.basis):
            if source_degree is not None \
                    and bin(key[0]).count("1") != source_degree:
                continue
            for ikey, v in fn({key: ONE}).items():
                ent[(self.index[ikey], col)] = v
        return SparseMatrix(ncols, ncols, ent)

    def label(self, key: Tuple[int, Tuple[int, ...]]) -> str:
        mask, e = key
        parts = [f"xi{i + 1}" for i in range(self.n) if mask & (1 << i)]
        for i, p in enumerate(e):
            if p == 1:
                parts.append(f"y{i + 1}")
            elif p > 1:
                parts.append(f"y{i + 1}^{p}")
        return "*".join(parts) if parts else "1"

    def jet_degree_filter(self, max_jets: int) -> "FormSpace":
        """A fresh space with a smaller truncation (same algebra)."""
        return FormSpace(self.algebra, max_jets)

    def __repr__(self):
        return (f"FormSpace({self.algebra.name}, trunc={self.trunc}, "
                f"dim={self.dim()})")
