"""Exact sparse linear algebra over the rationals.

Everything downstream rests on this module: kernels and images of sparse
rational matrices, homology of finite cochain complexes, chain-map
verification, and chain-homotopy feasibility.  All arithmetic uses
``fractions.Fraction``; there is no floating point and no tolerance anywhere.

Complexes are stored cohomologically: the differential raises the degree by
one.  Graded maps carry an integer ``shift``; a shift-``s`` map ``f`` is a
chain map when ``d f = (-1)^s f d`` (Koszul rule for odd shifts).

>>> m = SparseMatrix.from_rows([[1, 2], [2, 4]])
>>> rank, ker, im = rank_kernel_image(m)
>>> rank
1
>>> ker == [{0: Fraction(2), 1: Fraction(-1)}] or ker == [{0: Fraction(-2), 1: Fraction(1)}]
True
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

__all__ = [
    "SparseMatrix",
    "Vector",
    "rank_kernel_image",
    "LinearSolver",
    "solve",
    "ComplexError",
    "FiniteChainComplex",
    "HomologyBasis",
    "is_chain_map",
    "find_chain_homotopy",
    "same_class",
]

ZERO = Fraction(0)
ONE = Fraction(1)

#: Sparse coordinate vector: index -> nonzero Fraction.
Vector = Dict[int, Fraction]


def vec_add_scaled(target: Vector, factor: Fraction, source: Vector) -> None:
    """target += factor * source, in place, dropping created zeros."""
    if not factor:
        return
    for i, v in source.items():
        w = target.get(i, ZERO) + factor * v
        if w:
            target[i] = w
        else:
            target.pop(i, None)


def vec_sub(a: Vector, b: Vector) -> Vector:
    out = dict(a)
    vec_add_scaled(out, Fraction(-1), b)
    return out


class SparseMatrix:
    """Sparse matrix over Q.  ``entries`` maps (row, col) to a nonzero value.

    Treated as immutable after construction; all operations return new
    matrices.  Zero entries are never stored.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int,
                 entries: Optional[Mapping[Tuple[int, int], Fraction]] = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix dimensions")
        self.rows = rows
        self.cols = cols
        clean: Dict[Tuple[int, int], Fraction] = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ValueError(
                        f"entry ({r},{c}) outside a {rows}x{cols} matrix")
                v = Fraction(v)
                if v:
                    clean[(r, c)] = v
        self.entries = clean

    @classmethod
    def from_rows(cls, data: Sequence[Sequence]) -> "SparseMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ent = {}
        for r, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for c, v in enumerate(row):
                v = Fraction(v)
                if v:
                    ent[(r, c)] = v
        return cls(rows, cols, ent)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    @classmethod
    def from_columns(cls, cols: Sequence[Vector], nrows: int) -> "SparseMatrix":
        ent = {}
        for j, col in enumerate(cols):
            for i, v in col.items():
                if v:
                    ent[(i, j)] = Fraction(v)
        return cls(nrows, len(cols), ent)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == \
            (other.rows, other.cols, other.entries)

    def __hash__(self):
        raise TypeError("SparseMatrix is unhashable")

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols,
                            {k: -v for k, v in self.entries.items()})

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in matrix addition")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            w = ent.get(k, ZERO) + v
            if w:
                ent[k] = w
            else:
                ent.pop(k, None)
        return SparseMatrix(self.rows, self.cols, ent)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scale(self, factor) -> "SparseMatrix":
        factor = Fraction(factor)
        if not factor:
            return SparseMatrix.zero(self.rows, self.cols)
        return SparseMatrix(self.rows, self.cols,
                            {k: factor * v for k, v in self.entries.items()})

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError(
                f"cannot multiply {self.rows}x{self.cols} by "
                f"{other.rows}x{other.cols}")
        by_col_left: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (i, k), v in self.entries.items():
            by_col_left.setdefault(k, []).append((i, v))
        ent: Dict[Tuple[int, int], Fraction] = {}
        for (k, j), w in other.entries.items():
            hits = by_col_left.get(k)
            if not hits:
                continue
            for i, v in hits:
                key = (i, j)
                s = ent.get(key, ZERO) + v * w
                if s:
                    ent[key] = s
                else:
                    ent.pop(key, None)
        return SparseMatrix(self.rows, other.cols, ent)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows,
                            {(c, r): v for (r, c), v in self.entries.items()})

    def apply(self, v: Vector) -> Vector:
        """Matrix times sparse column vector."""
        out: Vector = {}
        cols: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (i, j), w in self.entries.items():
            cols.setdefault(j, []).append((i, w))
        for j, x in v.items():
            for i, w in cols.get(j, ()):
                s = out.get(i, ZERO) + w * x
                if s:
                    out[i] = s
                else:
                    out.pop(i, None)
        return out

    def column(self, j: int) -> Vector:
        return {r: v for (r, c), v in self.entries.items() if c == j}

    def row_dicts(self) -> List[Dict[int, Fraction]]:
        rows: List[Dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def to_triplets(self) -> List[List[int]]:
        """Deterministic triplet serialization [row, col, num, den]."""
        out = []
        for (r, c) in sorted(self.entries):
            v = self.entries[(r, c)]
            out.append([r, c, v.numerator, v.denominator])
        return out

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


def _echelon(rows: List[Dict[int, Fraction]], eligible: Iterable[int],
             column_order: bool = False) -> List[Tuple[int, int]]:
    """Reduce ``rows`` in place to reduced row echelon form.

    Only columns in ``eligible`` may carry pivots; other columns (augmented
    right-hand sides) just ride along.  Pivots are chosen by the Markowitz
    count (fill-minimizing), ties broken by (column, row) so elimination is
    deterministic.  With ``column_order=True`` pivots are instead taken in
    ascending column order (the pivot columns are then the lexicographically
    earliest independent column set, which basis-selection callers rely on).
    Returns the pivot list [(row, col), ...].
    """
    eligible_set = eligible if isinstance(eligible, range) else set(eligible)
    col_rows: Dict[int, set] = {}   # eligible col -> all rows with an entry
    ncand: Dict[int, int] = {}      # eligible col -> count among active rows
    for r, row in enumerate(rows):
        for c in row:
            if c in eligible_set:
                col_rows.setdefault(c, set()).add(r)
                ncand[c] = ncand.get(c, 0) + 1
    active = set(range(len(rows)))
    pivots: List[Tuple[int, int]] = []

    while True:
        best = None
        for c, cnt in ncand.items():
            if cnt <= 0:
                continue
            for r in col_rows[c]:
                if r not in active:
                    continue
                if column_order:
                    key = (c, len(rows[r]) - 1, r)
                else:
                    key = ((len(rows[r]) - 1) * (cnt - 1), c, r)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        if column_order:
            pc, _, pr = best
        else:
            _, pc, pr = best
        prow = rows[pr]
        inv = ONE / prow[pc]
        if inv != ONE:
            for c in list(prow):
                prow[c] *= inv
        active.discard(pr)
        for c in prow:
            if c in eligible_set:
                ncand[c] -= 1
        # clear column pc everywhere else (full reduction, including
        # earlier pivot rows, so the result is the reduced echelon form)
        for r in sorted(col_rows[pc] - {pr}):
            row = rows[r]
            factor = row.pop(pc)
            col_rows[pc].discard(r)
            r_active = r in active
            if r_active:
                ncand[pc] -= 1
            for c, v in prow.items():
                if c == pc:
                    continue
                old = row.get(c)
                new = (old if old is not None else ZERO) - factor * v
                track = c in eligible_set
                if new:
                    row[c] = new
                    if old is None and track:
                        col_rows.setdefault(c, set()).add(r)
                        if r_active:
                            ncand[c] = ncand.get(c, 0) + 1
                else:
                    if old is not None:
                        del row[c]
                        if track:
                            col_rows[c].discard(r)
                            if r_active:
                                ncand[c] -= 1
        pivots.append((pr, pc))
    return pivots


def rank_kernel_image(m: SparseMatrix
                      ) -> Tuple[int, List[Vector], List[Vector]]:
    """Exact rank, kernel basis and image basis of a sparse matrix.

    The image basis consists of the original matrix columns at the pivot
    positions; the kernel basis is read off the reduced echelon form, one
    vector per free column, ordered by free column index.

    >>> z = SparseMatrix.zero(3, 3)
    >>> rank_kernel_image(z)[0]
    0
    >>> len(rank_kernel_image(z)[1])
    3
    >>> i4 = SparseMatrix.identity(4)
    >>> rank_kernel_image(i4)[0], rank_kernel_image(i4)[1]
    (4, [])
    """
    rows = m.row_dicts()
    pivots = _echelon(rows, range(m.cols))
    pivot_by_col = {c: r for r, c in pivots}
    free_cols = [c for c in range(m.cols) if c not in pivot_by_col]
    kernel: List[Vector] = []
    for f in free_cols:
        v: Vector = {f: ONE}
        for c, r in pivot_by_col.items():
            val = rows[r].get(f)
            if val:
                v[c] = -val
        kernel.append(v)
    image = [m.column(c) for c in sorted(pivot_by_col)]
    return len(pivots), kernel, image


class LinearSolver:
    """Repeated exact solves of A x = b with a single elimination of A.

    Eliminates the augmented block [A | I]; each solve is then a sparse
    matrix-vector product plus a consistency check on the pivot-free rows.
    """

    def __init__(self, a: SparseMatrix):
        self.ncols = a.cols
        self.nrows = a.rows
        rows = a.row_dicts()
        for r in range(a.rows):
            rows[r][a.cols + r] = ONE
        pivots = _echelon(rows, range(a.cols))
        self._pivots = pivots
        pivot_rows = {r for r, _ in pivots}
        # transform columns: original row index j -> [(reduced row, coeff)]
        tcols: Dict[int, List[Tuple[int, Fraction]]] = {}
        for r, row in enumerate(rows):
            for c, v in row.items():
                if c >= a.cols:
                    tcols.setdefault(c - a.cols, []).append((r, v))
        self._tcols = tcols
        self._check_rows = [r for r in range(a.rows) if r not in pivot_rows]

    def solve(self, b: Vector) -> Optional[Vector]:
        """One solution of A x = b (free variables = 0), or None."""
        tb: Vector = {}
        for j, x in b.items():
            if j >= self.nrows:
                raise ValueError("right-hand side outside row space")
            for r, coeff in self._tcols.get(j, ()):
                s = tb.get(r, ZERO) + coeff * x
                if s:
                    tb[r] = s
                else:
                    tb.pop(r, None)
        for r in self._check_rows:
            if tb.get(r):
                return None
        x: Vector = {}
        for r, c in self._pivots:
            v = tb.get(r)
            if v:
                x[c] = v
        return x


def solve(a: SparseMatrix, b: Vector) -> Optional[Vector]:
    """Single exact solve of A x = b; None when inconsistent."""
    return LinearSolver(a).solve(b)


class ComplexError(ValueError):
    """A chain-complex invariant failed; carries degree and witness."""

    def __init__(self, message: str, degree: int, witness=None):
        super().__init__(message)
        self.degree = degree
        self.witness = witness


class HomologyBasis:
    """Homology of one degree: representatives plus class-decomposition data.

    ``representatives`` are cycles, linearly independent modulo boundaries.
    ``class_coords`` writes any cycle as boundary + combination of the
    representatives and returns the combination, so class equality tests
    are exact.
    """

    def __init__(self, degree: int, representatives: List[Vector],
                 boundaries: List[Vector], cycle_matrix: SparseMatrix):
        self.degree = degree
        self.representatives = representatives
        self.dimension = len(representatives)
        self._boundaries = boundaries
        self._cycle_matrix = cycle_matrix  # the outgoing differential
        self._solver: Optional[LinearSolver] = None

    def is_cycle(self, z: Vector) -> bool:
        return not self._cycle_matrix.apply(z)

    def _decomposer(self) -> LinearSolver:
        if self._solver is None:
            cols = list(self._boundaries) + list(self.representatives)
            mat = SparseMatrix.from_columns(cols, self._cycle_matrix.cols)
            self._solver = LinearSolver(mat)
        return self._solver

    def class_coords(self, z: Vector) -> Vector:
        """Coordinates of [z] in the representative basis."""
        if not self.is_cycle(z):
            raise ValueError(f"vector is not a cycle in degree {self.degree}")
        sol = self._decomposer().solve(z)
        if sol is None:
            raise ValueError("cycle outside boundary+representative span; "
                             "homology data is inconsistent")
        nb = len(self._boundaries)
        return {i - nb: v for i, v in sol.items() if i >= nb}

    def same_class(self, z1: Vector, z2: Vector) -> bool:
        return self.class_coords(z1) == self.class_coords(z2)

    def is_boundary(self, z: Vector) -> bool:
        return not self.class_coords(z)


class FiniteChainComplex:
    """Finite cochain complex: d raises the degree by one.

    dims: {degree: dimension} over a contiguous degree range.
    diff: {degree k: SparseMatrix of d_k : C^k -> C^(k+1)}; missing entries
    mean zero maps.  d o d = 0 is verified at construction (exactly) and a
    violation raises ComplexError with the offending degree and a witness
    basis index.
    """

    def __init__(self, dims: Mapping[int, int],
                 diff: Mapping[int, SparseMatrix],
                 labels: Optional[Mapping[int, Sequence[str]]] = None,
                 check: bool = True):
        if not dims:
            raise ValueError("empty complex")
        degs = sorted(dims)
        if degs != list(range(degs[0], degs[-1] + 1)):
            raise ValueError("degrees must be contiguous")
        self.dims = {k: int(dims[k]) for k in degs}
        self.min_degree = degs[0]
        self.max_degree = degs[-1]
        self.labels = dict(labels) if labels else {}
        self._diff: Dict[int, SparseMatrix] = {}
        for k in degs:
            d = diff.get(k)
            target = self.dims.get(k + 1, 0)
            if d is None:
                d = SparseMatrix.zero(target, self.dims[k])
            if d.cols != self.dims[k] or d.rows != target:
                raise ValueError(f"differential shape mismatch at degree {k}")
            self._diff[k] = d
        self._homology: Dict[int, HomologyBasis] = {}
        if check:
            self.validate()

    def validate(self) -> None:
        for k in range(self.min_degree, self.max_degree):
            prod = self.differential(k + 1) @ self.differential(k)
            if not prod.is_zero():
                (r, c), v = sorted(prod.entries.items())[0]
                raise ComplexError(
                    f"d o d != 0 from degree {k}: basis column {c} maps to "
                    f"row {r} with value {v}", degree=k, witness=(c, r, v))

    def degrees(self):
        return range(self.min_degree, self.max_degree + 1)

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def differential(self, k: int) -> SparseMatrix:
        d = self._diff.get(k)
        if d is None:
            d = SparseMatrix.zero(self.dims.get(k + 1, 0), self.dims.get(k, 0))
        return d

    def homology(self, k: int) -> HomologyBasis:
        if k in self._homology:
            return self._homology[k]
        if not (self.min_degree <= k <= self.max_degree):
            basis = HomologyBasis(k, [], [], SparseMatrix.zero(0, 0))
            self._homology[k] = basis
            return basis
        d_out = self.differential(k)
        d_in = self.differential(k - 1)
        _, cycles, _ = rank_kernel_image(d_out)
        _, _, boundaries = rank_kernel_image(d_in)
        # representatives: cycle basis vectors independent modulo boundaries
        cols = list(boundaries) + list(cycles)
        mat = SparseMatrix.from_columns(cols, self.dims[k])
        rows = mat.row_dicts()
        pivots = _echelon(rows, range(mat.cols), column_order=True)
        nb = len(boundaries)
        rep_cols = sorted(c for _, c in pivots if c >= nb)
        reps = [cycles[c - nb] for c in rep_cols]
        basis = HomologyBasis(k, reps, boundaries, d_out)
        self._homology[k] = basis
        return basis

    def betti(self) -> Dict[int, int]:
        out = {k: self.homology(k).dimension for k in self.degrees()}
        # Euler characteristic cross-check: exactness bookkeeping must close.
        lhs = sum((-1) ** k * v for k, v in out.items())
        rhs = sum((-1) ** k * v for k, v in self.dims.items())
        if lhs != rhs:
            raise ComplexError(
                f"Euler characteristic mismatch: homology gives {lhs}, "
                f"dimensions give {rhs}", degree=self.min_degree)
        return out

    def __repr__(self):
        dims = ", ".join(f"{k}:{v}" for k, v in sorted(self.dims.items()))
        return f"FiniteChainComplex({{{dims}}})"


def homology(c: FiniteChainComplex, k: int) -> HomologyBasis:
    return c.homology(k)


def same_class(z1: Vector, z2: Vector, c: FiniteChainComplex, k: int) -> bool:
    return c.homology(k).same_class(z1, z2)


def is_chain_map(f: Mapping[int, SparseMatrix],
                 c: FiniteChainComplex,
                 d: FiniteChainComplex,
                 shift: int = 0):
    """Check d_D o f_k = (-1)^shift f_(k+1) o d_C for all degrees.

    ``f`` maps degree k of C to degree k+shift of D; absent blocks are zero.
    Returns (True, None) or (False, (degree, column, defect vector)).
    """
    sign = Fraction(-1) ** (shift % 2)
    for k in c.degrees():
        fk = f.get(k)
        fk1 = f.get(k + 1)
        nc = c.dim(k)
        if fk is None:
            fk = SparseMatrix.zero(d.dim(k + shift), nc)
        if fk1 is None:
            fk1 = SparseMatrix.zero(d.dim(k + 1 + shift), c.dim(k + 1))
        if fk.cols != nc or fk.rows != d.dim(k + shift):
            raise ValueError(f"map shape mismatch at degree {k}")
        lhs = d.differential(k + shift) @ fk
        rhs = (fk1 @ c.differential(k)).scale(sign)
        defect = lhs - rhs
        if not defect.is_zero():
            bad_col = min(cc for (_, cc) in defect.entries)
            witness = {r: v for (r, cc), v in defect.entries.items()
                       if cc == bad_col}
            return False, (k, bad_col, witness)
    return True, None


def find_chain_homotopy(c: FiniteChainComplex,
                        phi: Mapping[int, SparseMatrix]):
    """Solve d K + K d = phi for degree -2 matrices K, exactly.

    phi is a family of degree -1 maps phi_k : C^k -> C^(k-1).  One sparse
    linear system over all unknown K entries is assembled and eliminated; the
    outcome is ("feasible", {k: SparseMatrix}) or ("infeasible", witness).
    The witness reports a homology obstruction when one exists (a class on
    which phi acts nontrivially), else a generic inconsistency marker.
    """
    var_index: Dict[Tuple[int, int, int], int] = {}
    var_key: List[Tuple[int, int, int]] = []
    for k in c.degrees():
        if c.dim(k) and c.dim(k - 2):
            for i in range(c.dim(k - 2)):
                for j in range(c.dim(k)):
                    var_index[(k, i, j)] = len(var_index)
                    var_key.append((k, i, j))
    nvars = len(var_index)
    rows: List[Dict[int, Fraction]] = []
    rhs_col = nvars  # augmented column; never a pivot
    d_by = {k: c.differential(k) for k in c.degrees()}

    for m in c.degrees():
        if not (c.dim(m) and c.dim(m - 1)):
            continue
        phim = phi.get(m)
        if phim is None:
            phim = SparseMatrix.zero(c.dim(m - 1), c.dim(m))
        if phim.rows != c.dim(m - 1) or phim.cols != c.dim(m):
            raise ValueError(f"phi shape mismatch at degree {m}")
        # equation block (m): d_(m-2) K_m + K_(m+1) d_m = phi_m
        eqs: Dict[Tuple[int, int], Dict[int, Fraction]] = {}

        dm2 = d_by.get(m - 2)
        if dm2 is not None and c.dim(m - 2):
            for (r, s), v in dm2.entries.items():
                for j in range(c.dim(m)):
                    var = var_index.get((m, s, j))
                    if var is None:
                        continue
                    eq = eqs.setdefault((r, j), {})
                    eq[var] = eq.get(var, ZERO) + v
        dm = d_by.get(m)
        if dm is not None and c.dim(m + 1) and c.dim(m - 1):
            for (t, j), v in dm.entries.items():
                for r in range(c.dim(m - 1)):
                    var = var_index.get((m + 1, r, t))
                    if var is None:
                        continue
                    eq = eqs.setdefault((r, j), {})
                    eq[var] = eq.get(var, ZERO) + v
        for (r, j), coeffs in eqs.items():
            row = {k: v for k, v in coeffs.items() if v}
            val = phim.entries.get((r, j), ZERO)
            if val:
                row[rhs_col] = val
            if row:
                rows.append(row)
        # phi entries whose equation row has no variables at all
        covered = set(eqs)
        for (r, j), val in phim.entries.items():
            if (r, j) not in covered:
                rows.append({rhs_col: val})

    pivots = _echelon(rows, range(nvars))
    pivot_rows = {r for r, _ in pivots}
    for ridx, row in enumerate(rows):
        if ridx in pivot_rows:
            continue
        if row.get(rhs_col):
            return "infeasible", _homotopy_obstruction(c, phi)
    solution: Dict[Tuple[int, int, int], Fraction] = {}
    for r, col in pivots:
        v = rows[r].get(rhs_col)
        if v:
            solution[var_key[col]] = v
    blocks: Dict[int, SparseMatrix] = {}
    for k in c.degrees():
        if c.dim(k) and c.dim(k - 2):
            ent = {(i, j): v for (kk, i, j), v in solution.items() if kk == k}
            blocks[k] = SparseMatrix(c.dim(k - 2), c.dim(k), ent)
    return "feasible", blocks


def _homotopy_obstruction(c: FiniteChainComplex, phi):
    """Search for a homology class moved off zero by phi (witness data)."""
    for k in c.degrees():
        phik = phi.get(k)
        if phik is None or phik.is_zero():
            continue
        h = c.homology(k)
        target = c.homology(k - 1)
        for idx, rep in enumerate(h.representatives):
            img = phik.apply(rep)
            if not img:
                continue
            if target.is_cycle(img) and not target.is_boundary(img):
                return {
                    "kind": "homology_obstruction",
                    "degree": k,
                    "class_index": idx,
                    "image_class": {
                        i: [v.numerator, v.denominator]
                        for i, v in sorted(target.class_coords(img).items())},
                }
    return {"kind": "inconsistent_system"}


if __name__ == "__main__":
    import doctest

    doctest.testmod()
