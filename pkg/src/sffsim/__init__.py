"""Spectral form factor simulator for a swap circuit with a boundary impurity.

Exact-diagonalization Monte Carlo for the form factor and its moments,
impurity-gate ensembles (Haar, phase-diagonal T-dual, factorized), large-q
closed-form predictions, and brute-force combinatorial oracles.
"""

__version__ = "0.1.0"

from .circuit import (
    CircuitSpec,
    apply_step,
    build_step_operator,
    circuit_trace_powers,
    step_eigenphases,
    two_body_trace_oracle,
)
from .ensembles import (
    EnsembleSpec,
    PhaseDistribution,
    RealizationSeed,
    characteristic_function,
    sample_factorized_pair,
    sample_haar_unitary,
    sample_impurity,
    sample_tdual_gate,
)
from .errors import BudgetError, CapacityError, DimensionError, UnitarityError
from .linalg import (
    EigenphaseSpectrum,
    eigenphases,
    partial_transpose,
    trace_power,
    trace_powers,
    unitarity_defect,
)
from .predictions import (
    ShiftInvariantGroupSpec,
    count_fixed_point_classes,
    factorized_sff,
    fixed_point_poly,
    haar_moment,
    resonance,
    subfactorial,
    tdual_moment,
    tdual_moment_oracle,
    thouless_bound,
    thouless_estimate,
)
from .spectral import (
    SffConfig,
    SffSeries,
    SpacingHistogram,
    estimate_sff,
    estimate_spacings,
    level_spacings,
    power_law_fit,
    theory_curve,
)

__all__ = [
    "__version__",
    "BudgetError",
    "CapacityError",
    "CircuitSpec",
    "DimensionError",
    "EigenphaseSpectrum",
    "EnsembleSpec",
    "PhaseDistribution",
    "RealizationSeed",
    "SffConfig",
    "SffSeries",
    "ShiftInvariantGroupSpec",
    "SpacingHistogram",
    "UnitarityError",
    "apply_step",
    "build_step_operator",
    "characteristic_function",
    "circuit_trace_powers",
    "count_fixed_point_classes",
    "eigenphases",
    "estimate_sff",
    "estimate_spacings",
    "factorized_sff",
    "fixed_point_poly",
    "haar_moment",
    "level_spacings",
    "partial_transpose",
    "power_law_fit",
    "resonance",
    "sample_factorized_pair",
    "sample_haar_unitary",
    "sample_impurity",
    "sample_tdual_gate",
    "step_eigenphases",
    "subfactorial",
    "tdual_moment",
    "tdual_moment_oracle",
    "theory_curve",
    "thouless_bound",
    "thouless_estimate",
    "trace_power",
    "trace_powers",
    "two_body_trace_oracle",
    "unitarity_defect",
]
