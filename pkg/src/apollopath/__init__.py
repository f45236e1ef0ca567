"""Apollonian circle packings drawn as one closed non-crossing line.

Build a packing down to a stop radius, trace it (optionally with recursive
nested interiors) into a single stroke, parameterize the stroke by arc
length, and measure how its length scales to estimate a fractal dimension.
"""

from .analysis import (
    AnalysisReport,
    DegenerateFit,
    iter_sweep,
    loglog_fit,
    path_length,
    sweep,
)
from .gasket import (
    CustomSeed,
    Gasket,
    GasketNode,
    InvalidSeed,
    SeedTooSmall,
    complete,
    initial_configuration,
    iter_gaskets,
    nest,
    tangency_map,
)
from .geometry import (
    Circle,
    NegativeDiscriminant,
    NotOnCircle,
    NotTangent,
    NoValidCenter,
    Point,
    angular_position,
    descartes_curvatures,
    normalize_angle,
    solve_tangent_circle,
    tangency_point,
)
from .parametrize import (
    ConvergenceReport,
    SegmentNode,
    address_of,
    convergence_report,
    density_gap,
    hausdorff,
    locate,
    point_at,
    points_at,
    sample_path,
    segment_split,
)
from .tracer import (
    Arc,
    BridgeWall,
    DeltaTooLarge,
    NoInwardAngle,
    TracePath,
    TraceTree,
    UnreachedNodes,
    inward_turn_angle,
    is_eligible,
    is_simple,
    satellite_list,
    trace,
    trace_nested,
)

__version__ = "0.1.0"
