"""Physical-layer security for mirror-array assisted visible light links."""

from vlcirs.geometry import (
    DegenerateGeometryError,
    GeometryError,
    MirrorArraySpec,
    MirrorOrientation,
    OrientationGrid,
)
from vlcirs.optimizer import (
    FeasibleBox,
    OptimizationResult,
    PsoParams,
    ReflectedSpot,
    pso_ii,
)
from vlcirs.radiometry import (
    channel_gains,
    irs_gain,
    los_gain,
    orientation_grid_for_spot,
)
from vlcirs.scenario import (
    ChannelGains,
    QuadratureSpec,
    ReceiverSpec,
    RoomSpec,
    Scenario,
    SourceSpec,
    UserSpec,
    ValidationError,
    default_scenario,
)
from vlcirs.secrecy import secrecy_of_spot, secrecy_rate_lb, secrecy_without_irs

__version__ = "0.1.0"

__all__ = [
    "ChannelGains",
    "DegenerateGeometryError",
    "GeometryError",
    "MirrorArraySpec",
    "MirrorOrientation",
    "OrientationGrid",
    "QuadratureSpec",
    "ReceiverSpec",
    "RoomSpec",
    "Scenario",
    "SourceSpec",
    "UserSpec",
    "ValidationError",
    "FeasibleBox",
    "OptimizationResult",
    "PsoParams",
    "ReflectedSpot",
    "channel_gains",
    "irs_gain",
    "los_gain",
    "orientation_grid_for_spot",
    "pso_ii",
    "secrecy_of_spot",
    "secrecy_rate_lb",
    "secrecy_without_irs",
    "default_scenario",
]
