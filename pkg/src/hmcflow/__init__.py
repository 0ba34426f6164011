"""Nonlocal mean-field evolutions on the Heisenberg group (and locally on
the roto-translation group), the 1-D instanton and mobility machinery, and
validation of zero level sets against horizontal mean curvature flow."""

from .geometry import (
    CharacteristicPoint,
    ScalarField,
    UniformGrid3,
    apply_X,
    dilate,
    gauge_norm,
    graph_horizontal_laplacian,
    group_inv,
    group_mul,
    heat_step_bound,
    horizontal_laplacian,
    sample_function,
    taylor_residual,
)
from .kernels import (
    KernelSpec,
    ReducedKernels,
    StabilityViolation,
    SupportUnresolved,
    default_bump_kernel,
    eval_kernel,
    group_convolve,
    heat_kernel,
    heat_semigroup,
    reduce_kernels,
    rescale_kernel,
)
from .profile1d import (
    InstantonProfile,
    Mobility,
    NoTripleRoot,
    Phase1DGrid,
    apply_linearized,
    compute_instanton,
    compute_theta,
    equilibria,
    l2mu_inner,
    solve_corrector,
    triple_root_threshold,
)
from .evolution import (
    BracketViolated,
    EvolutionParams,
    ResolutionTooCoarse,
    Trajectory,
    evolve,
    forcing_bracket,
    init_levelset_field,
    interface_radius,
    shape_policies,
    step,
    x3_intercept,
)
from .se2 import (
    OutsideChart,
    se2_evolve,
    se2_exp,
    se2_frame,
    se2_local_dilate,
    se2_log,
    se2_mul,
    se2_sub_laplacian,
)
from .validation import (
    EmptyCurve,
    Extinct,
    LevelCurve,
    NoZeroSet,
    RegressionFit,
    ball_extinction_time,
    calibrate_theta_cylinder,
    exact_ball_curve,
    extract_profiles,
    extract_zero_levelset,
    hausdorff_distance,
    read_field,
    read_profile_csv,
    validate_gauge_ball,
    write_field,
    write_profile_csv,
)

__version__ = "1.0.0"
