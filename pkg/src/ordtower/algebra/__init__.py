"""Exact arithmetic: finite fields, truncation rings, matrices, polynomials, series."""
from .fields import (AlgebraError, ExtensionField, FiniteField, GF, NotInvertibleError,
                     PrimeField, is_prime)
from .rings import PAdicTruncation, QQ, Rationals, TruncatedCyclotomic, make_ring
from .poly import Poly
from .matrix import (DimensionError, ExactMatrix, RankKernelImage, ResidueFieldOnly,
                     charpoly, in_span, mat_rank_kernel_image, poly_eval_matrix, rref,
                     span_basis)
from .series import PrecisionError, TruncatedLaurentSeries
from .newton import NewtonPolygonResult, NormalizationError, newton_unit_root_count

__all__ = [
    "AlgebraError", "ExtensionField", "FiniteField", "GF", "NotInvertibleError", "PrimeField",
    "is_prime", "PAdicTruncation", "QQ", "Rationals", "TruncatedCyclotomic", "make_ring",
    "Poly", "DimensionError", "ExactMatrix", "RankKernelImage", "ResidueFieldOnly", "charpoly",
    "in_span", "mat_rank_kernel_image", "poly_eval_matrix", "rref", "span_basis",
    "PrecisionError", "TruncatedLaurentSeries", "NewtonPolygonResult", "NormalizationError",
    "newton_unit_root_count",
]
