"""Second-order consensus of networked mechanical agents under communication delays.

A deterministic fixed-step simulator and analysis toolkit: weighted digraph
Laplacian algebra with a closed-form consensus-velocity predictor, delayed
averaging observers, adaptive tracking control of uncertain manipulators,
and a leader-follower mode, plus a CLI for scenario files, traces and plots.
"""

__version__ = "0.1.0"

from .delayline import DelayLine, delay_steps
from .dynamics import DoubleIntegrator, KinematicModel, ManipulatorParams, TwoLinkManipulator
from .errors import (
    BadGainError,
    ConfigError,
    DelayConsensusError,
    DimensionMismatchError,
    DivergedError,
    IllConditionedError,
    NoSpanningTreeError,
    NonCommensurateDelayError,
    ValidationError,
)
from .graph import (
    Edge,
    LaplacianBundle,
    LeaderLink,
    WeightedDigraph,
    analyze_graph,
    build_laplacian,
    compute_gamma,
    compute_sigma_s,
    has_spanning_tree,
    leader_augmented,
    observer_gamma,
    predict_consensus_velocity,
    root_vertices,
)
from .protocol import (
    ControllerState,
    DoubleIntegratorGains,
    LeaderSpec,
    adaptation_rhs,
    control_torque,
    double_integrator_rhs,
    lyapunov_value,
    observer_rhs,
    reference_acceleration,
    reference_velocity,
    sliding_vector,
)
from .sim import (
    AgentSpec,
    Metrics,
    ScenarioConfig,
    SimTrace,
    ValidationIssue,
    compute_metrics,
    predicted_consensus_velocity,
    run,
    validate,
)

__all__ = [
    "__version__",
    "DelayLine", "delay_steps",
    "DoubleIntegrator", "KinematicModel", "ManipulatorParams", "TwoLinkManipulator",
    "BadGainError", "ConfigError", "DelayConsensusError", "DimensionMismatchError",
    "DivergedError", "IllConditionedError", "NoSpanningTreeError",
    "NonCommensurateDelayError", "ValidationError",
    "Edge", "LaplacianBundle", "LeaderLink", "WeightedDigraph", "analyze_graph",
    "build_laplacian", "compute_gamma", "compute_sigma_s", "has_spanning_tree",
    "leader_augmented", "observer_gamma", "predict_consensus_velocity", "root_vertices",
    "ControllerState", "DoubleIntegratorGains", "LeaderSpec", "adaptation_rhs",
    "control_torque", "double_integrator_rhs", "lyapunov_value", "observer_rhs",
    "reference_acceleration", "reference_velocity", "sliding_vector",
    "AgentSpec", "Metrics", "ScenarioConfig", "SimTrace", "ValidationIssue",
    "compute_metrics", "predicted_consensus_velocity", "run", "validate",
]
