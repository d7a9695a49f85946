"""Two-phase melting/evaporation free-boundary solvers with symmetry checks."""

__version__ = "0.1.0"

from .material import (  # noqa: F401
    MaterialSpec,
    TransformedBVP,
    ConstitutiveLawError,
    EnthalpyDomainError,
    BvpConstructionError,
    MaterialConfigError,
    specific_heat,
    kirchhoff_forward,
    kirchhoff_inverse,
    enthalpy_from_heat_capacity,
    build_transformed_bvp,
    load_material,
    aluminium_spec,
    material_path,
)
from .travelling_wave import (  # noqa: F401
    TravellingWaveSolution,
    NoTravellingWaveError,
    SingularResidualError,
    velocity_residual,
    solve_travelling_wave,
    profile_transformed,
    enthalpy_profile,
    profile_physical,
)
from .self_similar import (  # noqa: F401
    SelfSimilarSolution,
    DegenerateDiffusivityError,
    ShootingIntegrationError,
    ShootingConvergenceError,
    ss_rhs,
    shoot_residuals,
    solve_self_similar,
    one_phase_front_coefficient,
)
from .fd_oracle import (  # noqa: F401
    FrontTrackedState,
    CflError,
    FrontCollapseError,
    SurfaceSolveError,
    step,
    run,
    cfl_bound,
    seed_travelling_wave,
    seed_self_similar,
    validate_travelling_wave,
    validate_self_similar,
)
from . import symmetry  # noqa: F401
