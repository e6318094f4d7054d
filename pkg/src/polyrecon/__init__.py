"""Connected polyomino reconfiguration planning amid obstacles.

A single robot moves one tile at a time, every intermediate configuration
stays 4-connected, and costs are BFS walk distances on the structure.
Provides two greedy local planners (complete component growing and
matching-based expansion), an RRT* over configurations, paper-style
instance generators, a replay validator, and a benchmark CLI.
"""

from .errors import PolyreconError
from .grid import (
    Cell,
    Configuration,
    DistanceField,
    GridMap,
    bfs_free,
    bfs_on_tiles,
    center_of_mass,
    is_connected,
    largest_overlap_component,
    leaf_tiles,
    overlap,
)
from .instances import (
    InstanceSpec,
    gen_c_shape,
    gen_cc_shape,
    gen_obstacle_detour,
    gen_random_map,
    standin_instances,
)
from .maptext import format_map_text, load_map, parse_map_text, save_map
from .matching import (
    DistanceMatrix,
    Matching,
    distance_matrix,
    min_weight_perfect_matching,
    solve_assignment,
)
from .planners import (
    Dropoff,
    PlanStep,
    RobotState,
    apply_dropoff,
    glc_solve,
    glc_step,
    mwpm_expand_solve,
    mwpm_expand_step,
    sequence_costs,
)
from .records import RunRecord
from .rrt import (
    PlannerParams,
    Tree,
    TreeNode,
    dynamic_bias,
    extend,
    heuristic,
    insert_or_update,
    nearest_node,
    plan,
    rewire,
    sample_random_config,
)
from .validate import validate_record, validate_sequence

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "Configuration",
    "DistanceField",
    "DistanceMatrix",
    "Dropoff",
    "GridMap",
    "InstanceSpec",
    "Matching",
    "PlanStep",
    "PlannerParams",
    "PolyreconError",
    "RobotState",
    "RunRecord",
    "Tree",
    "TreeNode",
    "apply_dropoff",
    "bfs_free",
    "bfs_on_tiles",
    "center_of_mass",
    "distance_matrix",
    "dynamic_bias",
    "extend",
    "format_map_text",
    "gen_c_shape",
    "gen_cc_shape",
    "gen_obstacle_detour",
    "gen_random_map",
    "glc_solve",
    "glc_step",
    "heuristic",
    "insert_or_update",
    "is_connected",
    "largest_overlap_component",
    "leaf_tiles",
    "load_map",
    "min_weight_perfect_matching",
    "mwpm_expand_solve",
    "mwpm_expand_step",
    "nearest_node",
    "overlap",
    "parse_map_text",
    "plan",
    "rewire",
    "sample_random_config",
    "save_map",
    "sequence_costs",
    "solve_assignment",
    "standin_instances",
    "validate_record",
    "validate_sequence",
]
