"""One-parameter symmetry machinery: actions, invariance checks, catalogs."""

from .actions import (  # noqa: F401
    EPS_GRID,
    FieldMap,
    GroupAction,
    LocalValidityError,
    ProlongationError,
    SolutionField,
    apply,
    conformal,
    heat_kernel,
    inverse_point,
    prolong,
    quadratic_heat_solution,
    scaling,
    scaling_with_shift,
    superposition,
    transform_jet,
    translation,
)
from .checks import (  # noqa: F401
    BOUNDARY_TOL,
    PDE_TOL,
    BoundaryCondition,
    InvarianceReport,
    ItemResult,
    JetContractError,
    ManifoldSamplingError,
    PdeOperator,
    check_boundary_invariance,
    check_infinity_invariance,
    check_pde_invariance,
    diffusion_pde,
    fit_exponential_defect,
)
from .classify import (  # noqa: F401
    PAIR_CASE_IDS,
    PairCaseReport,
    RodClassification,
    StefanClassification,
    apply_equivalence,
    check_rod_action,
    classify_rod_bvp,
    classify_stefan_bvp,
    rod_candidate_actions,
    rod_far_condition,
    rod_far_sequence,
    rod_flux_condition,
    rod_flux_sampler,
    stefan_extended_dilation,
    stefan_far_condition,
    stefan_far_sequence,
    stefan_front_condition,
    stefan_front_sampler,
    stefan_surface_condition,
    stefan_surface_sampler,
    verify_table2_generators,
)
from .jets import (  # noqa: F401
    explicit_jets,
    merge_jets,
    self_similar_jets,
    travelling_wave_jets,
)
