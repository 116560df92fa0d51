"""Shared-autonomy sandbox: goal inference, mode disambiguation, blending.

The package simulates a 6D point robot reaching for one of several
candidate goals while an operator (simulated or live over WebSocket)
drives it through a modal control interface. A probabilistic belief over
goals feeds a potential-field autonomy whose command is blended with the
operator's, and a forward-projection metric picks the control mode that
would disambiguate the operator's intent fastest.
"""

from .arbitration import (
    BlendingParams,
    PotentialFieldParams,
    all_goal_autonomy,
    blend,
    blending_alpha,
    make_context_builder,
    potential_field_command,
)
from .core import (
    BeliefState,
    Box,
    ControlCommand,
    ControlMode,
    Dim,
    Goal,
    InterfaceSpec,
    Pose,
    Scene,
    default_interface,
    integrate_pose,
    uniform_belief,
    unit_command,
)
from .disambiguation import (
    DisambiguationParams,
    DisambiguationResult,
    dimension_metric,
    feature_gamma,
    feature_lambda,
    feature_omega,
    feature_upsilon,
    forward_project,
    mode_metric,
    select_disambiguation_mode,
)
from .errors import (
    ConfigError,
    DegenerateProjectionError,
    IdsimError,
    InvalidSceneError,
    NumericalError,
    UndefinedAccuracyError,
)
from .inference import (
    BayesParams,
    FieldParams,
    InferenceContext,
    MemoryParams,
    biased_sigmoid,
    compute_xi,
    enforce_simplex,
    memory_based_belief,
    most_confident_goal,
    step_belief_bayes,
    step_belief_field,
)
from .service import ProtocolError, SessionWorld, create_app, replay_session
from .simulation import (
    BenchmarkReport,
    SimulatedHumanParams,
    TrialConfig,
    TrialLog,
    count_events,
    inference_accuracy,
    request_skewness,
    run_benchmark,
    run_trial,
    simulated_human_command,
    step_kinematics,
)

__version__ = "0.1.0"

__all__ = [
    "BayesParams",
    "BeliefState",
    "BenchmarkReport",
    "BlendingParams",
    "Box",
    "ConfigError",
    "ControlCommand",
    "ControlMode",
    "DegenerateProjectionError",
    "Dim",
    "DisambiguationParams",
    "DisambiguationResult",
    "FieldParams",
    "Goal",
    "IdsimError",
    "InferenceContext",
    "InterfaceSpec",
    "InvalidSceneError",
    "MemoryParams",
    "NumericalError",
    "Pose",
    "PotentialFieldParams",
    "ProtocolError",
    "Scene",
    "SessionWorld",
    "SimulatedHumanParams",
    "TrialConfig",
    "TrialLog",
    "UndefinedAccuracyError",
    "all_goal_autonomy",
    "biased_sigmoid",
    "blend",
    "blending_alpha",
    "compute_xi",
    "count_events",
    "create_app",
    "default_interface",
    "dimension_metric",
    "enforce_simplex",
    "feature_gamma",
    "feature_lambda",
    "feature_omega",
    "feature_upsilon",
    "forward_project",
    "inference_accuracy",
    "integrate_pose",
    "make_context_builder",
    "memory_based_belief",
    "mode_metric",
    "most_confident_goal",
    "potential_field_command",
    "replay_session",
    "request_skewness",
    "run_benchmark",
    "run_trial",
    "select_disambiguation_mode",
    "simulated_human_command",
    "step_belief_bayes",
    "step_belief_field",
    "step_kinematics",
    "uniform_belief",
    "unit_command",
]
