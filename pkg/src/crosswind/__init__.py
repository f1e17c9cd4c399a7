"""Figure-8 crosswind path optimization for a planar sailboat.

Simulates a 2D sailboat analog of an airborne wind energy system flying
waypoint-defined figure-8 laps, scores each lap by average harvested power,
and adapts the figure-8's width/height online with Gaussian-process Bayesian
optimization under expected improvement.
"""

from .bo import BoConfig, BoHistory, expected_improvement, propose_next, run_bo
from .controller import ControllerConfig, TrackingState, advance_target, rudder_command, sail_command
from .dynamics import (
    ApparentWind,
    ControlInput,
    SailboatParams,
    SailboatState,
    WindParams,
    aero_forces,
    apparent_wind,
    derivatives,
    step,
    wind_speed,
)
from .engine import SimConfig, SimResult, compiled_available, default_backend, simulate_path
from .errors import (
    ConfigError,
    CrosswindError,
    DegenerateLapError,
    FactorizationError,
    InvalidBasisError,
    OptimizationAbort,
    SimulationFailure,
)
from .geometry import BasisParams, SearchBox, WaypointPath, validate_basis, waypoints
from .gp import (
    Dataset,
    FittedGp,
    HyperBounds,
    Hyperparams,
    fit_gp,
    fit_hyperparameters,
    log_marginal_likelihood,
    predict,
    se_kernel,
)
from .metric import MetricConfig, TrajectoryLog, evaluate_basis, lap_power

__version__ = "0.1.0"
