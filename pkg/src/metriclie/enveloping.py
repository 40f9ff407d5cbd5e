"""Universal envelope with an ordered-monomial basis, plus the Duflo map.

Elements are dictionaries from exponent tuples (one slot per generator,
basis order fixed by the algebra) to rationals.  Products straighten words
by adjacent transposition, trading each inversion for a bracket word of
shorter length; the rewriting is memoized per envelope.

>>> from metriclie.algebras import builtin
>>> env = UniversalEnvelope(builtin("sl2"))
>>> env.product({(0, 0, 1): 1}, {(0, 1, 0): 1})  # f then e, as PBW output
{(0, 1, 1): Fraction(1, 1), (1, 0, 0): Fraction(-1, 1)}
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebras import MetricLieAlgebra
from .linalg import SparseMatrix, rank_kernel_image

__all__ = [
    "PBWElement",
    "SymElement",
    "UniversalEnvelope",
    "sym_mul",
    "sym_pow",
    "adjoint_on_symmetric",
    "invariants_basis",
    "apply_dual_poly",
    "pbw_symmetrize",
    "duflo_map",
    "verify_duflo_isomorphism",
]

ZERO = Fraction(0)
ONE = Fraction(1)

Exps = Tuple[int, ...]
PBWElement = Dict[Exps, Fraction]
SymElement = Dict[Exps, Fraction]
Word = Tuple[int, ...]


def _acc(dst, key, val) -> None:
    if not val:
        return
    s = dst.get(key, ZERO) + val
    if s:
        dst[key] = s
    else:
        dst.pop(key, None)


class UniversalEnvelope:
    """Product, commutator, and adjoint action on ordered monomials."""

    def __init__(self, algebra: MetricLieAlgebra):
        self.algebra = algebra
        self.n = algebra.dim
        self._reduced: Dict[Word, PBWElement] = {}

    # -- words <-> exponents ------------------------------------------------

    def word_of(self, exps: Exps) -> Word:
        out: List[int] = []
        for i, e in enumerate(exps):
            out.extend([i] * e)
        return tuple(out)

    def exps_of(self, word: Word) -> Exps:
        e = [0] * self.n
        for i in word:
            e[i] += 1
        return tuple(e)

    def one(self) -> PBWElement:
        return {(0,) * self.n: ONE}

    def generator(self, k: int) -> PBWElement:
        e = [0] * self.n
        e[k] = 1
        return {tuple(e): ONE}

    # -- straightening -------------------------------------------------------

    def reduce_word(self, word: Word) -> PBWElement:
        cached = self._reduced.get(word)
        if cached is not None:
            return cached
        t = -1
        for pos in range(len(word) - 1):
            if word[pos] > word[pos + 1]:
                t = pos
                break
        if t < 0:
            out = {self.exps_of(word): ONE}
            self._reduced[word] = out
            return out
        a, b = word[t], word[t + 1]
        swapped = word[:t] + (b, a) + word[t + 2:]
        out = dict(self.reduce_word(swapped))
        for k in range(self.n):
            v = self.algebra.c(a, b, k)
            if v:
                shorter = word[:t] + (k,) + word[t + 2:]
                for e2, w in self.reduce_word(shorter).items():
                    _acc(out, e2, v * w)
        self._reduced[word] = out
        return out

    def product(self, u: PBWElement, v: PBWElement) -> PBWElement:
        out: PBWElement = {}
        for e1, c1 in u.items():
            w1 = self.word_of(e1)
            for e2, c2 in v.items():
                for e3, c3 in self.reduce_word(w1 + self.word_of(e2)).items():
                    _acc(out, e3, c1 * c2 * c3)
        return out

    def commutator(self, u: PBWElement, v: PBWElement) -> PBWElement:
        out = self.product(u, v)
        for e, c in self.product(v, u).items():
            _acc(out, e, -c)
        return out

    def adjoint_gen(self, k: int, u: PBWElement) -> PBWElement:
        return self.commutator(self.generator(k), u)

    def augmentation(self, u: PBWElement) -> Fraction:
        return u.get((0,) * self.n, ZERO)

    def is_central(self, u: PBWElement) -> bool:
        return all(not self.adjoint_gen(k, u) for k in range(self.n))


# ---------------------------------------------------------------------------
# symmetric algebra helpers
# ---------------------------------------------------------------------------

def sym_mul(a: SymElement, b: SymElement) -> SymElement:
    out: SymElement = {}
    for e1, v1 in a.items():
        for e2, v2 in b.items():
            _acc(out, tuple(x + y for x, y in zip(e1, e2)), v1 * v2)
    return out


def sym_pow(a: SymElement, m: int, n: int) -> SymElement:
    out: SymElement = {(0,) * n: ONE}
    for _ in range(m):
        out = sym_mul(out, a)
    return out


def adjoint_on_symmetric(algebra: MetricLieAlgebra, i: int,
                         s: SymElement) -> SymElement:
    """Generator i acting on polynomials in the generators, by derivation."""
    n = algebra.dim
    out: SymElement = {}
    for e, v in s.items():
        for j in range(n):
            if not e[j]:
                continue
            for t in range(n):
                c = algebra.c(i, j, t)
                if not c:
                    continue
                e2 = list(e)
                e2[j] -= 1
                e2[t] += 1
                _acc(out, tuple(e2), v * c * e[j])
    return out


def _degree_monomials(n: int, d: int) -> List[Exps]:
    out: List[Exps] = []

    def rec(prefix: List[int], remaining: int, pos: int) -> None:
        if pos == n - 1:
            out.append(tuple(prefix + [remaining]))
            return
        for v in range(remaining, -1, -1):
            rec(prefix + [v], remaining - v, pos + 1)

    if n == 0:
        return [()] if d == 0 else []
    rec([], d, 0)
    return out


def invariants_basis(algebra: MetricLieAlgebra, degree: int
                     ) -> List[Tuple[int, SymElement]]:
    """Adjoint invariants of the symmetric algebra, per degree up to bound.

    Returns (degree, element) pairs, ordered by degree then kernel order.
    """
    n = algebra.dim
    found: List[Tuple[int, SymElement]] = []
    for d in range(degree + 1):
        monos = _degree_monomials(n, d)
        index = {m: i for i, m in enumerate(monos)}
        ent: Dict[Tuple[int, int], Fraction] = {}
        for col, mono in enumerate(monos):
            base: SymElement = {mono: ONE}
            for i in range(n):
                img = adjoint_on_symmetric(algebra, i, base)
                for e2, v in img.items():
                    ent[(i * len(monos) + index[e2], col)] = \
                        ent.get((i * len(monos) + index[e2], col), ZERO) + v
        mat = SparseMatrix(n * len(monos), len(monos),
                           {k: v for k, v in ent.items() if v})
        _, kernel, _ = rank_kernel_image(mat)
        for vec in kernel:
            found.append((d, {monos[i]: v for i, v in vec.items()}))
    return found


# ---------------------------------------------------------------------------
# symmetrization and the character twist
# ---------------------------------------------------------------------------

class _Symmetrizer:
    """sym(x^e) = average of all orderings, computed by the recursion
    sym(e) = (1/|e|) sum_k e_k x_k * sym(e - 1_k), memoized on exponents."""

    def __init__(self, env: UniversalEnvelope):
        self.env = env
        self._memo: Dict[Exps, PBWElement] = {}

    def sym(self, e: Exps) -> PBWElement:
        cached = self._memo.get(e)
        if cached is not None:
            return cached
        total = sum(e)
        if total == 0:
            out = self.env.one()
            self._memo[e] = out
            return out
        acc: PBWElement = {}
        for k, ek in enumerate(e):
            if not ek:
                continue
            e2 = list(e)
            e2[k] -= 1
            sub = self.sym(tuple(e2))
            for e3, v in sub.items():
                word = (k,) + self.env.word_of(e3)
                for e4, w in self.env.reduce_word(word).items():
                    _acc(acc, e4, v * w * ek)
        out = {k2: v / total for k2, v in acc.items()}
        self._memo[e] = out
        return out


_symmetrizers: Dict[int, _Symmetrizer] = {}


def _symmetrizer_for(env: UniversalEnvelope) -> _Symmetrizer:
    s = _symmetrizers.get(id(env))
    if s is None or s.env is not env:
        s = _Symmetrizer(env)
        _symmetrizers[id(env)] = s
    return s


def pbw_symmetrize(env: UniversalEnvelope, s: SymElement) -> PBWElement:
    out: PBWElement = {}
    symm = _symmetrizer_for(env)
    for e, v in s.items():
        for e2, w in symm.sym(e).items():
            _acc(out, e2, v * w)
    return out


def apply_dual_poly(f: Dict[Exps, Fraction], s: SymElement) -> SymElement:
    """Act by a polynomial in the dual variables as constant-coefficient
    derivatives: the dual monomial y^a becomes the operator prod d/dx^a.

    The dual basis pairs with the generators directly (y^i picks the x_i
    coordinate), so no metric enters here.
    """
    out: SymElement = {}
    for a, ca in f.items():
        for e, v in s.items():
            coeff = ca * v
            e2 = list(e)
            dead = False
            for i, ai in enumerate(a):
                for _ in range(ai):
                    if e2[i] == 0:
                        dead = True
                        break
                    coeff *= e2[i]
                    e2[i] -= 1
                if dead:
                    break
            if not dead:
                _acc(out, tuple(e2), coeff)
    return out


def duflo_map(env: UniversalEnvelope, s: SymElement,
              char_order: Optional[int] = None) -> PBWElement:
    """Symmetrization twisted by the square-root character.

    The character series is cut at the top degree of the argument; higher
    terms differentiate to zero.
    """
    from .duflo import duflo_character

    if not s:
        return {}
    top = max(sum(e) for e in s)
    order = top if char_order is None else char_order
    j12 = duflo_character(env.algebra, order)
    return pbw_symmetrize(env, apply_dual_poly(j12, s))


def verify_duflo_isomorphism(algebra: MetricLieAlgebra, degree: int = 4
                             ) -> Dict[str, object]:
    """Multiplicativity of the twisted symmetrization on invariants.

    Checks, for all invariant pairs up to the degree bound: the product of
    the images equals the image of the product, every image is central, and
    the untwisted symmetrization fails multiplicativity somewhere (the twist
    is doing real work) whenever the algebra is not abelian.
    """
    env = UniversalEnvelope(algebra)
    invs = invariants_basis(algebra, degree)
    char_order = 2 * degree  # products reach twice the bound
    images = [(d, s, duflo_map(env, s, char_order)) for d, s in invs]
    central = all(env.is_central(u) for _, _, u in images)
    multiplicative = True
    pair_results: List[bool] = []
    naive_defect_found = False
    for d1, s1, u1 in images:
        for d2, s2, u2 in images:
            prod_sym = sym_mul(s1, s2)
            lhs = env.product(u1, u2)
            rhs = duflo_map(env, prod_sym, char_order)
            ok = lhs == rhs
            pair_results.append(ok)
            multiplicative = multiplicative and ok
            if d1 and d2:
                naive = env.product(pbw_symmetrize(env, s1),
                                    pbw_symmetrize(env, s2))
                if naive != pbw_symmetrize(env, prod_sym):
                    naive_defect_found = True
    abelian = all(
        not algebra.c(i, j, k)
        for i in range(algebra.dim)
        for j in range(algebra.dim)
        for k in range(algebra.dim))
    expect_defect = not abelian and any(d >= 2 for d, _ in invs)
    return {
        "algebra": algebra.name,
        "degree": degree,
        "invariant_count": len(invs),
        "invariant_degrees": [d for d, _ in invs],
        "multiplicative": multiplicative,
        "central": central,
        "pairs_checked": len(pair_results),
        "naive_symmetrization_fails": naive_defect_found,
        "all": multiplicative and central and (
            naive_defect_found or not expect_defect),
    }
