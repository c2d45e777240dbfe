"""Curves over finite fields: differentials, the Cartier operator and Nakajima checks."""
from .ratfunc import RatFunc
from .local import LocalExpansionError, local_cartier, reversion, series_root
from .model import (INF, ArtinSchreierCurve, CurveModel, DifferentialSpace, DivisorData,
                    DivisorError, EllipticCurve, MeroDifferential, Place, ProjectiveLine,
                    UnsupportedCurveError, differentials_with_poles_basis, fiber)
from .cartier import (CartierMismatchError, HasseWittResult, InsufficientPrecisionError,
                      NakajimaResult, UnramifiedCoverError, cartier_apply, cartier_matrix,
                      hasse_witt, nakajima_check, pole_improvement_check, pullback,
                      reduced_pullback, residue_at, residue_sum, trace_pushforward)
from .rosenlicht import CrossedUnion, RosenlichtResult, rosenlicht_sections_simple

__all__ = [
    "RatFunc", "LocalExpansionError", "local_cartier", "reversion", "series_root", "INF",
    "ArtinSchreierCurve", "CurveModel", "DifferentialSpace", "DivisorData", "DivisorError",
    "EllipticCurve", "MeroDifferential", "Place", "ProjectiveLine", "UnsupportedCurveError",
    "differentials_with_poles_basis", "fiber", "CartierMismatchError", "HasseWittResult",
    "InsufficientPrecisionError", "NakajimaResult", "UnramifiedCoverError", "cartier_apply",
    "cartier_matrix", "hasse_witt", "nakajima_check", "pole_improvement_check", "pullback",
    "reduced_pullback", "residue_at", "residue_sum", "trace_pushforward", "CrossedUnion",
    "RosenlichtResult", "rosenlicht_sections_simple",
]
