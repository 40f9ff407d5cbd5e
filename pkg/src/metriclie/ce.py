"""Lie algebra cochain complexes with three coefficient choices.

* trivial: the exterior algebra on the dual generators alone
* jets:N   polynomial coefficients truncated at total degree N
* uea:D    the universal envelope through filtration degree D, with the
           adjoint action (bracket against each generator)

The trivial complex is the jets complex at truncation zero.  The envelope
coefficients need no truncation correction: bracketing with a generator
never raises the filtration degree, so the degree bound carves out an exact
subcomplex.

With jet variables assigned degree zero, the jet-substitution map (send
each dual generator to its jet variable) shifts the exterior degree down by
one and anticommutes with the differentials; tests assert exactly that
normalization.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .algebras import MetricLieAlgebra
from .enveloping import PBWElement, UniversalEnvelope
from .forms import FormSpace, merge_sign
from .linalg import FiniteChainComplex, SparseMatrix, is_chain_map

__all__ = [
    "parse_module_spec",
    "build_ce",
    "build_ce_module",
    "de_rham_matrices",
    "verify_de_rham",
    "ce_cohomology",
]

ZERO = Fraction(0)
ONE = Fraction(1)

ModuleSpec = Union[str, Tuple[str, int]]


def parse_module_spec(text: str) -> ModuleSpec:
    """"trivial", "jets:N", or "uea:D" -> structured spec."""
    if text == "trivial":
        return "trivial"
    for tag in ("jets", "uea"):
        if text.startswith(tag + ":"):
            try:
                val = int(text[len(tag) + 1:])
            except ValueError:
                raise ValueError(f"bad module bound in {text!r}") from None
            if val < 0:
                raise ValueError(f"module bound must be >= 0 in {text!r}")
            return (tag, val)
    raise ValueError(f"unknown module spec {text!r}")


def build_ce(algebra: MetricLieAlgebra) -> FiniteChainComplex:
    """Trivial-coefficient complex; jets truncated at zero leave scalars."""
    return FormSpace(algebra, 0).complex()


def _uea_complex(algebra: MetricLieAlgebra, bound: int) -> FiniteChainComplex:
    env = UniversalEnvelope(algebra)
    n = algebra.dim

    def monos_upto(d: int) -> List[Tuple[int, ...]]:
        out: List[Tuple[int, ...]] = []

        def rec(prefix: List[int], budget: int, pos: int) -> None:
            if pos == n:
                out.append(tuple(prefix))
                return
            for v in range(budget + 1):
                rec(prefix + [v], budget - v, pos + 1)

        rec([], d, 0)
        return sorted(out, key=lambda e: (sum(e), e))

    monos = monos_upto(bound)
    mono_index = {m: i for i, m in enumerate(monos)}
    nm = len(monos)
    masks_by_degree: List[List[int]] = [[] for _ in range(n + 1)]
    for mask in range(1 << n):
        masks_by_degree[bin(mask).count("1")].append(mask)
    # basis per degree: (mask, mono), mask-major
    index_by_degree: List[Dict[Tuple[int, Tuple[int, ...]], int]] = []
    basis_by_degree: List[List[Tuple[int, Tuple[int, ...]]]] = []
    for deg in range(n + 1):
        basis = [(mask, m) for mask in masks_by_degree[deg] for m in monos]
        basis_by_degree.append(basis)
        index_by_degree.append({b: i for i, b in enumerate(basis)})

    forms0 = FormSpace(algebra, 0)
    adj_cache: Dict[Tuple[int, Tuple[int, ...]], PBWElement] = {}

    def adj(i: int, mono: Tuple[int, ...]) -> PBWElement:
        key = (i, mono)
        got = adj_cache.get(key)
        if got is None:
            got = env.adjoint_gen(i, {mono: ONE})
            adj_cache[key] = got
        return got

    dims = {k: len(basis_by_degree[k]) for k in range(n + 1)}
    diffs: Dict[int, SparseMatrix] = {}
    for deg in range(n):
        ent: Dict[Tuple[int, int], Fraction] = {}
        tindex = index_by_degree[deg + 1]
        for col, (mask, mono) in enumerate(basis_by_degree[deg]):
            # action term: sum_i (x_i . u) (x) xi^i ^ omega
            for i in range(n):
                if mask & (1 << i):
                    continue
                sgn = merge_sign(1 << i, mask)
                for m2, v in adj(i, mono).items():
                    if sum(m2) > bound:
                        raise AssertionError(
                            "adjoint action raised the filtration degree")
                    row = tindex[((1 << i) | mask, m2)]
                    s = ent.get((row, col), ZERO) + sgn * v
                    if s:
                        ent[(row, col)] = s
                    else:
                        ent.pop((row, col), None)
            # internal term: u (x) d omega
            delt = forms0.d({(mask, forms0._zero_e()): ONE})
            for (m2, _e), v in delt.items():
                row = tindex[(m2, mono)]
                s = ent.get((row, col), ZERO) + v
                if s:
                    ent[(row, col)] = s
                else:
                    ent.pop((row, col), None)
        diffs[deg] = SparseMatrix(dims[deg + 1], dims[deg], ent)
    labels = {
        k: [f"{_mono_label(m)} | {_mask_label(mask, n)}"
            for mask, m in basis_by_degree[k]]
        for k in range(n + 1)}
    return FiniteChainComplex(dims, diffs, labels=labels)


def _mask_label(mask: int, n: int) -> str:
    if not mask:
        return "1"
    return "^".join(f"xi{i + 1}" for i in range(n) if mask & (1 << i))


def _mono_label(e: Tuple[int, ...]) -> str:
    parts = [f"x{i + 1}" + (f"^{p}" if p > 1 else "")
             for i, p in enumerate(e) if p]
    return "*".join(parts) if parts else "1"


def build_ce_module(algebra: MetricLieAlgebra,
                    module: ModuleSpec) -> FiniteChainComplex:
    if module == "trivial":
        return build_ce(algebra)
    tag, bound = module
    if tag == "jets":
        return FormSpace(algebra, bound).complex()
    if tag == "uea":
        return _uea_complex(algebra, bound)
    raise ValueError(f"unknown module spec {module!r}")


def de_rham_matrices(algebra: MetricLieAlgebra, jets: int
                     ) -> Dict[int, SparseMatrix]:
    """Jet-substitution map per degree on FormSpace(algebra, jets)."""
    space = FormSpace(algebra, jets)
    out: Dict[int, SparseMatrix] = {}
    dims = space.degree_dims()
    for k in range(space.n + 1):
        ent: Dict[Tuple[int, int], Fraction] = {}
        rows = dims.get(k - 1, 0)
        for col, key in enumerate(space.degree_basis(k)):
            img = space.d_de_rham({key: ONE})
            for idx, v in space.to_vector(img, k - 1).items():
                ent[(idx, col)] = v
        out[k] = SparseMatrix(rows, dims[k], ent)
    return out


def verify_de_rham(algebra: MetricLieAlgebra, jets: int) -> Dict[str, object]:
    """Chain-map (degree -1, anticommuting) and square-zero checks."""
    space = FormSpace(algebra, jets)
    c = space.complex()
    mats = de_rham_matrices(algebra, jets)
    ok, witness = is_chain_map(mats, c, c, shift=-1)
    sq_zero = True
    for k in range(space.n + 1):
        if k - 1 < 0:
            continue
        prod = mats.get(k - 1, SparseMatrix.zero(0, 0)) @ mats[k]
        if not prod.is_zero():
            sq_zero = False
    return {"chain_map_shift_minus_one": ok, "witness": witness,
            "square_zero": sq_zero}


def ce_cohomology(algebra: MetricLieAlgebra,
                  module: ModuleSpec = "trivial") -> Dict[int, int]:
    return build_ce_module(algebra, module).betti()
