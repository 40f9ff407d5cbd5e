"""Exact-arithmetic verification of homological identities over metric Lie
algebras: dual-exterior and reduced Hochschild complexes, the multiplication
map between them, the metric deformation differential, the square-root
character with its chain homotopy, and envelope-valued loop compositions.

Everything is computed over the rationals; every asserted identity is an
exact equality of matrices or coefficient dictionaries.
"""

from .algebras import (MetricLieAlgebra, ValidationReport, abelian, builtin,
                       casimir, from_json_dict, from_json_file, killing_form,
                       oscillator, sl2, so3)
from .forms import FormSpace
from .linalg import (FiniteChainComplex, HomologyBasis, LinearSolver,
                     SparseMatrix, find_chain_homotopy, is_chain_map,
                     rank_kernel_image)

__version__ = "0.1.0"

__all__ = [
    "MetricLieAlgebra",
    "ValidationReport",
    "abelian",
    "builtin",
    "casimir",
    "from_json_dict",
    "from_json_file",
    "killing_form",
    "oscillator",
    "sl2",
    "so3",
    "FormSpace",
    "FiniteChainComplex",
    "HomologyBasis",
    "LinearSolver",
    "SparseMatrix",
    "find_chain_homotopy",
    "is_chain_map",
    "rank_kernel_image",
    "__version__",
]
