"""Modular symbols for Gamma_1(M), Hecke operators, ordinary ranks and the d identity."""
from .dims import dim_cusp_forms, genus
from .manin import ModularSymbolSpace, PresentationError
from .hecke import (AtkinLehnerError, AtkinLehnerReport, HeckeCommutationError, HeckeData,
                    atkin_lehner_matrix, hecke_matrix)
from .ordinary import (ConventionError, OrdinaryRankTable, RankMismatchError, ordinary_rank,
                       ordinary_rank_detail, verify_d_identity)
from .supersingular import MassFormulaError, p_rank_oracle, supersingular_count, supersingular_j
from .igusa import IgusaModelError, KummerCurve, hasse_polynomial, igusa_model


def build_space(M: int, k: int) -> ModularSymbolSpace:
    return ModularSymbolSpace(M, k)


__all__ = [
    "dim_cusp_forms", "genus", "ModularSymbolSpace", "PresentationError", "AtkinLehnerError",
    "AtkinLehnerReport", "HeckeCommutationError", "HeckeData", "atkin_lehner_matrix",
    "hecke_matrix", "ConventionError", "OrdinaryRankTable", "RankMismatchError", "ordinary_rank",
    "ordinary_rank_detail", "verify_d_identity", "MassFormulaError", "p_rank_oracle",
    "supersingular_count", "supersingular_j", "IgusaModelError", "KummerCurve",
    "hasse_polynomial", "igusa_model", "build_space",
]
