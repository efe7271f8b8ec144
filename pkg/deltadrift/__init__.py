#
# deltadrift: transition probability between two channels coupled by a
# moving delta potential, from the time-dependent scaling transform and the
# Green's function reduction of the second channel, checked against a
# numerical two-channel propagator.
#

from deltadrift.core import (
    BoundaryLeak,
    ConfigError,
    ConfigValidationError,
    ConsistencyError,
    DeltaDriftError,
    DomainExceeded,
    InsufficientSamples,
    IntegrityError,
    NonPositiveParameter,
    NonPositiveScale,
    OpenChannel,
    ParameterError,
    ParseError,
    PhysicalParams,
    SolverDiverged,
    UnderResolved,
    validate,
)
from deltadrift.resonance import (
    ResonanceParams,
    ResonancePole,
    ScatteringState,
    amplitude_sq,
    decay_exponent,
    decay_rate,
    effective_strength,
    greens_second_channel,
    lorentzian_approx,
    matched_coupling,
    nonadiabatic_probability,
    resonance_params,
    resonance_pole,
    resonance_wavefunction,
    saturation_probability,
    scattering_state,
    survival_probability,
)
from deltadrift.scaling import (
    RescaledEigenstate,
    ScalingFrame,
    box_eigenstate,
    frame_map,
    free_eigenstate,
    lab_coordinate,
    lab_wavefunction,
    project,
    scale_factor,
    superpose,
    tau_of_t,
)
from deltadrift.tdse import (
    DecayCurve,
    DecaySample,
    Grid,
    Propagator,
    SolverSettings,
    TwoChannelState,
    build_grid,
    coupling_profile,
    fit_decay_line,
    fit_decay_rate,
    initial_state,
    regularization_factor,
    run_oracle,
    step,
    survival_numeric,
    width_convergence,
)

__version__ = "0.1.0"
