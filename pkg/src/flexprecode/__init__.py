"""Flexible RZF precoding for multi-user movable-antenna systems."""

from .channel import (
    AntennaPositions,
    PathSet,
    PositionGrid,
    angle_manifold,
    build_dictionary,
    channel_matrix,
    position_manifold,
    position_manifold_grad,
    sample_paths,
    trial_seed,
    user_channel,
    wavelength_from_carrier,
)
from .precoding import (
    PrecodingState,
    normalize_precoder,
    regularized_projection,
    rls_fit,
    rzf_dual,
    rzf_objective,
    rzf_primal,
    sinr_per_user,
    sum_rate,
)
from .flex_omp import (
    RefinementParams,
    RegionExhaustedError,
    SupportState,
    antenna_matching,
    flexible_precoding,
    gamma_bisection,
    iter_flexible_precoding,
    refine_position,
    support_confirmation,
)
from .baselines import (
    BaselineKind,
    exhaustive_selection_oracle,
    fast_antenna_selection,
    fixed_array_positions,
)
from .experiments import (
    ExperimentConfig,
    TrialResult,
    cdf_points,
    load_config,
    run_monte_carlo,
    run_trial,
    sweep,
)

__version__ = "0.1.0"
