"""Thermalization of a three-level quantum-dot ring coupled to a 1D gas.

Scattering-derived thermal transition rates violate detailed balance and
can drive population oscillations without coherences; this package computes
the rates, classifies the dynamical regime, and propagates populations.
"""

from .errors import (
    VdbThermError,
    DegeneracyError,
    ZeroCouplingError,
    BranchError,
    QuadratureError,
    RangeError,
    DimensionError,
    NoRootError,
    ConditioningError,
    NormalizationError,
    InputError,
    ConfigError,
)
from .model import (
    MINUS,
    ZERO,
    PLUS,
    SystemSpec,
    Spectrum,
    InteractionMatrix,
    System,
    build_system,
    diagonalize_ring,
    interaction_matrix,
    boltzmann_vector,
    vdb_energy_scale,
)
from .scattering import (
    t_denominator,
    t_element_sq,
    microreversibility_defect,
    lippmann_schwinger_t,
)
from .rates import (
    RateSet,
    RateDecomposition,
    transition_rate,
    compute_rate_set,
    momentum_oracle_rate,
    rate_decomposition,
    cycle_affinity,
)
from .spectral import (
    Regime,
    RateMatrix,
    RegimeReport,
    HighTBoundReport,
    build_rate_matrix,
    discriminant_gamma,
    classify_regime,
    regime_report,
    thermalization_residuals,
    oscillation_condition,
    high_T_bound,
    find_T_EP,
    low_T_diagnostics,
)
from .dynamics import (
    PropagatorDecomposition,
    Trajectory,
    decompose,
    propagate,
    exp_oracle,
    observables,
    slowest_timescale,
)

__version__ = "0.1.0"
