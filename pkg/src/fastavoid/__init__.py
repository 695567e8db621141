"""Reactive obstacle avoidance by velocity modulation.

Core capabilities:
- analytic star-shaped obstacle worlds with exact ray-scaling distance
  surrogates (`obstacles`)
- single-virtual-obstacle modulation for analytic worlds (`analytic`)
- modulation straight from raw range-scan points (`sampled`)
- asynchronous fusion of both descriptions plus moving-obstacle transport
  (`fusion`, `runtime`)
- a deterministic 2D simulator, benchmarks, a batch CLI and a live
  shared-control bridge (`simulator`, `bench`, `cli`, `bridge`)
"""

from .errors import (
    ContactError,
    FastAvoidError,
    GammaSingularityError,
    InsideObstacleError,
    ScenarioError,
    StaleWriteError,
)
from .obstacles import (
    AgentConfig,
    Circle,
    ConvexPolygon,
    Ellipse,
    Region,
    StarObstacle,
    classify,
    rectangle,
)
from .analytic import (
    ModulationFrame,
    ObstacleWeights,
    analytic_frame,
    modulate_analytic,
)
from .sampled import (
    ScanPointSet,
    SampledFrame,
    load_scan,
    missed_edge_margin,
    modulate_sampled,
    sampled_frame,
)
from .fusion import (
    MixedFrame,
    importance_scaling,
    mixed_frame,
    modulate_mixed,
    prune_points,
)

__version__ = "0.1.0"

__all__ = [
    "AgentConfig", "Circle", "ConvexPolygon", "Ellipse", "Region",
    "StarObstacle", "classify", "rectangle",
    "ModulationFrame", "ObstacleWeights", "analytic_frame", "modulate_analytic",
    "ScanPointSet", "SampledFrame", "load_scan", "missed_edge_margin",
    "modulate_sampled", "sampled_frame",
    "MixedFrame", "importance_scaling", "mixed_frame", "modulate_mixed",
    "prune_points",
    "ContactError", "FastAvoidError", "GammaSingularityError",
    "InsideObstacleError", "ScenarioError", "StaleWriteError",
    "__version__",
]
