"""Wave-controlled bias for varactor-tuned reflective surfaces.

The toolkit models a row of reflective unit cells biased through a
single slow-wave transmission line: a standing wave set up on the
line is peak-rectified at each tap, the resulting dc pattern tunes
each cell's varactor, and the per-cell reflection coefficients form
a far-field array factor.  Steering reduces to choosing the drive
frequency and amplitude of the standing wave.
"""

from .btl import (
    BiasPattern,
    BtlDesign,
    Excitation,
    MicrostripSpec,
    Mode,
    Termination,
    dc_current_estimate,
    effective_permittivity,
    fundamental_frequency,
    input_impedance,
    rectified_bias,
    slowness_factor,
    standing_wave_amplitude,
    standing_wave_voltage,
)
from .cascade import (
    CascadeNetwork,
    CascadeTermination,
    NodeVoltages,
    RectifierSpec,
    build_network,
    rectified_from_phasors,
    solve_taps,
)
from .config import RunConfig, config_from_dict, load_bundled_config, load_config
from .constants import C0, ETA0, MU0
from .errors import (
    ClampWarning,
    ConfigError,
    FitError,
    InputError,
    ParseError,
    SingularInputError,
    SolverError,
    WavectlError,
)
from .numutil import AT_INFINITY, is_at_infinity, parallel, wrap_phase
from .radiation import (
    PatternMetrics,
    PatternRequest,
    RadiationPattern,
    array_factor,
    db_from_linear,
    default_theta_grid,
    ideal_phase_gradient,
    pattern_metrics,
)
from .steering import (
    LargeAngleFrequency,
    MaximizeAt,
    MinimizeSpecular,
    PhaseWrapBudget,
    ScanGrid,
    SearchSpec,
    SteeringSolution,
    evaluate_operating_point,
    large_angle_frequency,
    optimize_single_beam,
    phase_wrap_budget,
    specular_scan,
)
from .unitcell import (
    CellCircuit,
    ImpedanceSamples,
    ReflectionProfile,
    VaractorTable,
    equivalent_impedance,
    fit_circuit_model,
    ingest_impedance,
    linear_ideal_phase,
    reflection_coefficient,
    reflection_profile,
    ris_impedance,
    synthesize_samples,
    varactor_impedance,
    varactor_lookup,
)

__version__ = "0.1.0"

__all__ = [
    "AT_INFINITY",
    "BiasPattern",
    "BtlDesign",
    "C0",
    "CascadeNetwork",
    "CascadeTermination",
    "CellCircuit",
    "ClampWarning",
    "ConfigError",
    "ETA0",
    "Excitation",
    "FitError",
    "ImpedanceSamples",
    "InputError",
    "LargeAngleFrequency",
    "MU0",
    "MaximizeAt",
    "MicrostripSpec",
    "MinimizeSpecular",
    "Mode",
    "NodeVoltages",
    "ParseError",
    "PatternMetrics",
    "PatternRequest",
    "PhaseWrapBudget",
    "RadiationPattern",
    "RectifierSpec",
    "ReflectionProfile",
    "RunConfig",
    "ScanGrid",
    "SearchSpec",
    "SingularInputError",
    "SolverError",
    "SteeringSolution",
    "Termination",
    "VaractorTable",
    "WavectlError",
    "array_factor",
    "build_network",
    "config_from_dict",
    "db_from_linear",
    "dc_current_estimate",
    "default_theta_grid",
    "effective_permittivity",
    "equivalent_impedance",
    "evaluate_operating_point",
    "fit_circuit_model",
    "fundamental_frequency",
    "ideal_phase_gradient",
    "ingest_impedance",
    "input_impedance",
    "is_at_infinity",
    "large_angle_frequency",
    "linear_ideal_phase",
    "load_bundled_config",
    "load_config",
    "optimize_single_beam",
    "parallel",
    "pattern_metrics",
    "phase_wrap_budget",
    "rectified_bias",
    "rectified_from_phasors",
    "reflection_coefficient",
    "reflection_profile",
    "ris_impedance",
    "slowness_factor",
    "solve_taps",
    "specular_scan",
    "standing_wave_amplitude",
    "standing_wave_voltage",
    "synthesize_samples",
    "varactor_impedance",
    "varactor_lookup",
    "wrap_phase",
    "__version__",
]
