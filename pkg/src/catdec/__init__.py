"""Thermal decoherence of a free-particle two-packet superposition.

Closed-form densities and attenuation factors, a pluggable general
attenuation formula, and independent numerical cross-checks (spectral
propagation, Maxwell-velocity quadrature, Monte Carlo sampling), plus
curve/sweep analysis and a CSV/JSON command-line front end.
"""

from .analysis import (
    AttenuationCurve,
    DecoherenceReport,
    attenuation_asymptote,
    build_curve,
    decoherence_report,
    decoherence_time,
    default_fit_window,
    literature_decoherence_time,
    log_attenuation_asymptote,
    short_time_fit,
    sweep,
)
from .closedform import (
    WidthPair,
    attenuation,
    evolved_wavefunction,
    initial_wavefunction,
    log_attenuation,
    packet_width_sq,
    probability,
    thermal_probability,
)
from .errors import (
    AliasingError,
    CatdecError,
    DegenerateInputError,
    GridSizeError,
    InterferenceFloorError,
    QuadratureConvergenceError,
    ShortTimeWindowError,
)
from .motion import (
    MotionModel,
    exact_attenuation,
    exact_log_attenuation,
    exact_width_sq,
    free_particle_model,
)
from .numeric import (
    ComplexField,
    Grid1D,
    MonteCarloResult,
    QuadratureSpec,
    RealField,
    build_grid,
    initial_field,
    monte_carlo_thermal_average,
    numeric_attenuation,
    spectral_propagate,
    spectral_thermal_density,
    thermal_average,
)
from .units import (
    CODATA,
    CatParams,
    PhysicalConstants,
    ReducedParams,
    Scales,
    derive_scales,
    from_reduced,
    nondimensionalize,
    redimensionalize,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "AttenuationCurve",
    "CODATA",
    "CatParams",
    "CatdecError",
    "ComplexField",
    "DecoherenceReport",
    "DegenerateInputError",
    "Grid1D",
    "GridSizeError",
    "InterferenceFloorError",
    "MonteCarloResult",
    "MotionModel",
    "PhysicalConstants",
    "QuadratureConvergenceError",
    "QuadratureSpec",
    "RealField",
    "ReducedParams",
    "Scales",
    "ShortTimeWindowError",
    "WidthPair",
    "attenuation",
    "attenuation_asymptote",
    "build_curve",
    "build_grid",
    "decoherence_report",
    "decoherence_time",
    "default_fit_window",
    "derive_scales",
    "evolved_wavefunction",
    "exact_attenuation",
    "exact_log_attenuation",
    "exact_width_sq",
    "free_particle_model",
    "from_reduced",
    "initial_field",
    "initial_wavefunction",
    "literature_decoherence_time",
    "log_attenuation",
    "log_attenuation_asymptote",
    "monte_carlo_thermal_average",
    "nondimensionalize",
    "numeric_attenuation",
    "packet_width_sq",
    "probability",
    "redimensionalize",
    "short_time_fit",
    "spectral_propagate",
    "spectral_thermal_density",
    "sweep",
    "thermal_average",
    "thermal_probability",
]
