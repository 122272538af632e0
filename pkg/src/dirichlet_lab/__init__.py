"""Discrete spectral laboratory for derivative decay of Dirichlet semigroups."""

__version__ = "0.1.0"

from .grid import Grid, GridFunction, build_grid, bump_initial_data, lp_norm, multi_indices
from .laplacian import (SpectralDecomposition, assemble_laplacian, compare_spectra,
                        dst_oracle_rectangle, eigendecompose, elliptic_regularity_check)
from .derivatives import (derivative_matrix, gradient_magnitude, gradient_stack_norm, n_ell,
                          sobolev_norm)
from .calculus import (DyadicPartition, SpectralMultiplier, apply_multiplier, dyadic_partition,
                       fractional_semigroup, heat_semigroup, multiplier_from_config,
                       multiplier_matrix, resolvent_power, unitary_group)
from .commutators import (ad, ad1_exponential_identity, check_resolvent_commutator,
                          check_unitary_commutator)
from .cubes import cube_partition, holder_cube_check, l1l2_norm, weighted_operator_norm
from .norms import induced_norm
from .decay import (DecayReport, SpectralLab, fractional_rate_check, heat_rate_check,
                    holder_sweep, i_function, n_ell_study, resolvent_decay_check,
                    weighted_bound_sweep)

__all__ = [
    "Grid", "GridFunction", "build_grid", "bump_initial_data", "lp_norm", "multi_indices",
    "SpectralDecomposition", "assemble_laplacian", "compare_spectra", "dst_oracle_rectangle",
    "eigendecompose", "elliptic_regularity_check", "derivative_matrix", "gradient_magnitude",
    "gradient_stack_norm", "n_ell", "sobolev_norm", "DyadicPartition", "SpectralMultiplier",
    "apply_multiplier", "dyadic_partition", "fractional_semigroup", "heat_semigroup",
    "multiplier_from_config", "multiplier_matrix", "resolvent_power", "unitary_group", "ad",
    "check_resolvent_commutator", "check_unitary_commutator", "ad1_exponential_identity", "cube_partition",
    "holder_cube_check", "l1l2_norm", "weighted_operator_norm", "induced_norm", "DecayReport", "SpectralLab",
    "fractional_rate_check", "heat_rate_check", "holder_sweep", "i_function", "n_ell_study",
    "resolvent_decay_check", "weighted_bound_sweep",
]
