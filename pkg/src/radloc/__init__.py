"""Range-based 2-D localization through a convex radical-axis cost."""

__version__ = "0.1.0"

from radloc.costs import (
    BaselineCost,
    ConvexCost,
    Quadratic2,
    assemble_quadratic,
    baseline_gradient,
    baseline_value,
    convex_gradient,
    convex_value,
    lipschitz_bound,
)
from radloc.errors import (
    CollinearAnchors,
    ConcentricCircles,
    ConfigError,
    DegenerateCost,
    InvalidScenario,
    LocalizationError,
    NonFinite,
    NonPositiveDistance,
    NonPositiveSignal,
    SourceOnAnchor,
)
from radloc.geometry import (
    Circle,
    RadicalAxis,
    circle_intersections,
    pair_axes,
    radical_axis,
    sequential_axes,
)
from radloc.measurement import RssModel, ShadowingSpec, distance_from_rss, noisy_ranges, rss_at
from radloc.scenario import Scenario
from radloc.solver import SolveResult, SolverConfig, auto_step, descend, descend_batch, solve_direct

__all__ = [
    "BaselineCost",
    "Circle",
    "CollinearAnchors",
    "ConcentricCircles",
    "ConfigError",
    "ConvexCost",
    "DegenerateCost",
    "InvalidScenario",
    "LocalizationError",
    "NonFinite",
    "NonPositiveDistance",
    "NonPositiveSignal",
    "Quadratic2",
    "RadicalAxis",
    "RssModel",
    "Scenario",
    "ShadowingSpec",
    "SolveResult",
    "SolverConfig",
    "SourceOnAnchor",
    "assemble_quadratic",
    "auto_step",
    "baseline_gradient",
    "baseline_value",
    "circle_intersections",
    "convex_gradient",
    "convex_value",
    "descend",
    "descend_batch",
    "distance_from_rss",
    "lipschitz_bound",
    "noisy_ranges",
    "pair_axes",
    "radical_axis",
    "rss_at",
    "sequential_axes",
    "solve_direct",
]
