"""Link-, node- and zone-disjoint multi-path routing on sampled Random Waypoint topologies."""

from .errors import DomainError, MpathError, ParameterError, TraceParseError, UndefinedMetric
from .experiment import AggregateResult, ExperimentConfig, run_experiment
from .mobility import MobilityTrace, Point2D, RwpParams, WaypointLeg, generate_trace, position_at, read_trace, write_trace
from .routing import (
    MultiPathSet,
    Path,
    Strategy,
    discover,
    is_link_disjoint,
    is_node_disjoint,
    is_zone_disjoint,
    link_disjoint_set,
    min_hop_path,
    node_disjoint_set,
    zone_disjoint_set,
)
from .session import (
    SessionConfig,
    SessionRecord,
    mean_time_between_discoveries,
    paths_per_discovery,
    simulate_session,
    time_averaged_hop_count,
)
from .topology import SnapshotGraph, build_snapshot, expected_neighborhood_size, path_valid

__version__ = "0.1.0"
