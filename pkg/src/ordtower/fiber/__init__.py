"""Linear model of the special fiber: components, carriers, U_p, gamma maps and tables."""
from .components import ComponentIndex, check_index, lifts, list_components, reduce_unit, units
from .carrier import (CarrierConfigError, IgusaCarrier, RelationError, free_carrier,
                      modular_carrier, nonfree_carrier, primitive_root, random_seed,
                      singular_frobenius_carrier, synthetic_carrier, validate_relations)
from .sections import (MeroSection, from_vector, gamma_map, iterate, operator_matrix, product_dim,
                       pullback_i_star, residue_sum, section, to_vector, up_apply,
                       up_power_closed_form, upstar_apply, upstar_power_closed_form, zero_section)
from .checks import (ContractionReport, ResidueCheck, SplittingReport, frobenius_splitting_check,
                     ordinary_contraction_check, residue_sum_check)
from .tables import (CrossValidation, OperatorWord, TableError, TableRow, chain_check,
                     compose_rows, cross_validate, degeneracy_description,
                     inertia_composition_check, inertia_description, level_typecheck, table_dump)
from .teichmuller import (TeichmullerDecomposition, TeichmullerError, regular_representation,
                          teichmuller_decompose)

__all__ = [
    "ComponentIndex", "check_index", "lifts", "list_components", "reduce_unit", "units",
    "CarrierConfigError", "IgusaCarrier", "RelationError", "free_carrier", "modular_carrier",
    "nonfree_carrier", "primitive_root", "random_seed", "singular_frobenius_carrier",
    "synthetic_carrier", "validate_relations", "MeroSection", "from_vector", "gamma_map",
    "iterate", "operator_matrix", "product_dim", "pullback_i_star", "residue_sum", "section",
    "to_vector", "up_apply", "up_power_closed_form", "upstar_apply", "upstar_power_closed_form",
    "zero_section", "ContractionReport", "ResidueCheck", "SplittingReport",
    "frobenius_splitting_check", "ordinary_contraction_check", "residue_sum_check",
    "CrossValidation", "OperatorWord", "TableError", "TableRow", "chain_check", "compose_rows",
    "cross_validate", "degeneracy_description", "inertia_composition_check",
    "inertia_description", "level_typecheck", "table_dump", "TeichmullerDecomposition",
    "TeichmullerError", "regular_representation", "teichmuller_decompose",
]
