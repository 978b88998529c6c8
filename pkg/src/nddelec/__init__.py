"""nddelec: lightcone-delay electrodynamics toolkit.

Piecewise-cubic worldlines, constant-delay scalar DDE/NDDE integration with
breaking-point bookkeeping, advanced/retarded lightcone solving, far-field
evaluation, discontinuity sewing chains, the double-slit momentum-balance
pipeline, and periodic-potential (crystal) Hamiltonian scattering.
"""

__version__ = "0.1.0"

from .trajectory import (
    DomainError,
    DuplicateBreakpointError,
    HistoryFunction,
    PiecewiseTrajectory,
    Segment,
    SpeedLimitError,
    as_vec3,
    from_hermite_samples,
    piecewise_linear,
    ping_pong,
    static_point,
    straight_line,
)
from .delay_core import (
    BreakingPoint,
    IntegrationFailureError,
    ScalarDelayProblem,
    ScalarSolution,
    jump_profile,
    solve,
)
from .lightcone import (
    ConvergenceError,
    LightconeHit,
    SingularityError,
    branch_sign,
    causal_side,
    deviating_derivative,
    solve_lightcone,
)
from .farfield import (
    FieldSample,
    SimulationHorizonError,
    far_fields_pm,
    far_fields_simple,
    lorentz_rhs,
    lowvel_rhs_3body,
    sample_fields,
)
from .sewing import (
    DiscontinuityEvent,
    SewingChain,
    chain_spacings,
    propagate_chain,
)
from .slit_model import (
    HBAR,
    DiscontinuityBalance,
    LocalMomentum,
    SingularConfigurationError,
    SlitConfig,
    balance_residual,
    bragg_directions,
    closest_approach_L,
    de_broglie_length,
    de_broglie_ratio,
    isotope_scaling_check,
    local_momentum,
    recoil_factor,
    slit_separation_estimate,
)
from .crystal import (
    CrystalTrajectory,
    FourierPotential,
    GeneratingCoefficients,
    KickReport,
    KickRun,
    Lattice,
    dressed_launch_momentum,
    first_order_residual,
    generating_coefficients,
    hamiltonian,
    integrate,
    kick_ensemble,
    momentum_kick,
    potential_force,
    resonance_set,
    vonlaue_residual,
    vonlaue_shift,
)

__all__ = [
    "__version__",
    # worldlines
    "DomainError",
    "DuplicateBreakpointError",
    "HistoryFunction",
    "PiecewiseTrajectory",
    "Segment",
    "SpeedLimitError",
    "as_vec3",
    "from_hermite_samples",
    "piecewise_linear",
    "ping_pong",
    "static_point",
    "straight_line",
    # delay integration
    "BreakingPoint",
    "IntegrationFailureError",
    "ScalarDelayProblem",
    "ScalarSolution",
    "jump_profile",
    "solve",
    # lightcone roots
    "ConvergenceError",
    "LightconeHit",
    "SingularityError",
    "branch_sign",
    "causal_side",
    "deviating_derivative",
    "solve_lightcone",
    # far fields
    "FieldSample",
    "SimulationHorizonError",
    "far_fields_pm",
    "far_fields_simple",
    "lorentz_rhs",
    "lowvel_rhs_3body",
    "sample_fields",
    # sewing chains
    "DiscontinuityEvent",
    "SewingChain",
    "chain_spacings",
    "propagate_chain",
    # double slit
    "HBAR",
    "DiscontinuityBalance",
    "LocalMomentum",
    "SingularConfigurationError",
    "SlitConfig",
    "balance_residual",
    "bragg_directions",
    "closest_approach_L",
    "de_broglie_length",
    "de_broglie_ratio",
    "isotope_scaling_check",
    "local_momentum",
    "recoil_factor",
    "slit_separation_estimate",
    # crystal scattering
    "CrystalTrajectory",
    "FourierPotential",
    "GeneratingCoefficients",
    "KickReport",
    "KickRun",
    "Lattice",
    "dressed_launch_momentum",
    "first_order_residual",
    "generating_coefficients",
    "hamiltonian",
    "integrate",
    "kick_ensemble",
    "momentum_kick",
    "potential_force",
    "resonance_set",
    "vonlaue_residual",
    "vonlaue_shift",
]
