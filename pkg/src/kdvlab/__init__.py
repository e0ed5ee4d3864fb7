"""Numerical laboratory for damped-multiplier energies along the quartic
KdV flow: multiplier symbols on zero-sum frequency tuples, modified-energy
tracking with a quintic correction, sublevel-set scaling estimates,
resonance-surface geometry checks, and the rescaling arithmetic that turns
almost-conservation into polynomial-in-time norm control."""

__version__ = "0.1.0"

from .errors import (
    BlowUpError,
    BudgetExceededError,
    ConfigError,
    GridCompatibilityError,
    KdvLabError,
    NewtonDivergenceError,
)
from .fields import (
    FrequencyGrid,
    InitialDataSpec,
    SpectralField,
    hermitian_defect,
    hermitize,
    hs_norm,
    l2_norm,
    make_initial_data,
    rescale,
)
from .multipliers import (
    MultiplierParams,
    SymbolValue,
    bracket,
    m1_symbol,
    m5_prime,
    m_eval,
    on_gamma,
    phi_n,
    pointwise_ratio,
    pointwise_ratio_batch,
    random_gamma_tuples,
)
from .solver import SolverConfig, Trajectory, nonlinear_rhs, run, step
from .energies import (
    CrosscheckResult,
    EnergyRecord,
    SweepResult,
    TrackerConfig,
    almost_conservation_sweep,
    dE1_direct,
    derivative_crosscheck,
    energy_E1,
    quintic_correction,
    track_energies,
    write_energy_csv,
)
from .sublevel import (
    ScalingReport,
    SublevelEstimate,
    SublevelQuery,
    sublevel_integral,
    sweep_sup,
)
from .geometry import (
    MorseResult,
    classify_region,
    jacobian_phi5_phi8,
    morse_check,
    morse_hessian,
    morse_solve,
    order_tuple,
    phi5_octic,
    phi8_octic,
)
from .planner import (
    GrowthBound,
    Plan,
    PlanInput,
    growth_bound,
    make_plan,
    rescaled_smallness_check,
)

__all__ = [
    "__version__",
    "KdvLabError", "ConfigError", "GridCompatibilityError", "BlowUpError",
    "BudgetExceededError", "NewtonDivergenceError",
    "FrequencyGrid", "SpectralField", "InitialDataSpec", "make_initial_data",
    "hermitize", "hermitian_defect", "l2_norm", "hs_norm", "rescale",
    "MultiplierParams", "SymbolValue", "bracket", "m_eval", "phi_n",
    "m1_symbol", "m5_prime", "on_gamma", "pointwise_ratio",
    "pointwise_ratio_batch", "random_gamma_tuples",
    "SolverConfig", "Trajectory", "nonlinear_rhs", "run", "step",
    "TrackerConfig", "EnergyRecord", "CrosscheckResult", "SweepResult",
    "energy_E1", "quintic_correction", "dE1_direct", "track_energies",
    "derivative_crosscheck", "almost_conservation_sweep", "write_energy_csv",
    "SublevelQuery", "SublevelEstimate", "ScalingReport",
    "sublevel_integral", "sweep_sup",
    "classify_region", "order_tuple", "jacobian_phi5_phi8", "phi5_octic",
    "phi8_octic", "MorseResult", "morse_solve", "morse_check", "morse_hessian",
    "PlanInput", "Plan", "GrowthBound", "make_plan", "growth_bound",
    "rescaled_smallness_check",
]
