"""Clustering and diversity selection over acyclic join queries.

The join is never materialized: linear-time relational oracles (count,
sample, report, representative over boxes) drive a lazily expanded
randomized box-decomposition tree, on top of which greedy k-center, a
constant-factor k-means/k-median, and approximate farthest-first traversal
run with certified cost bounds.
"""

__version__ = "0.1.0"

from .boxes import Box, Region, decompose_hole, parse_box_literal
from .bruteforce import (
    BruteOracle,
    TwinTracker,
    brute_cost,
    brute_opt,
    chi_square_uniformity,
    gonzalez_cost,
    twin_track,
)
from .clustering import (
    ClusterSolution,
    KMeansSchedule,
    estimate_scale_L,
    kcenter_constant,
    kcenter_fixed_radius,
    kcenter_refined,
    kmeans_constant,
    select_kth_pairwise_distance,
    value_set,
)
from .errors import (
    BoxArityError,
    CyclicQueryError,
    DomainError,
    EmptyActiveSetError,
    EmptyJoinError,
    EmptyRangeError,
    ExpandOnLeafError,
    ForeignSampleError,
    GeometryError,
    InternalGeometryError,
    NoCandidateError,
    NotATreeError,
    ParseError,
    RankError,
    RelClusterError,
    SchemaError,
    TokenError,
    TooLargeError,
)
from .estimators import FarthestFirstSelector, RelationalKCenter, RelationalKMeans, as_instance
from .gonzalez import diversity_solve, diversity_value, farthest_point, gonzalez_approx
from .ingest import load_instance
from .oracles import (
    count_rect,
    filter_by_box,
    region_query,
    report_rect,
    repr_rect,
    sample_rect,
)
from .relational import (
    AttributeId,
    DatabaseInstance,
    JoinTree,
    Relation,
    build_instance,
    build_join_tree,
    count_join,
    enumerate_join,
    semi_join_reduce,
)
from .tree import MidpointBox, RbbdNode, RbbdTree, SamplePolicy, build_root, smallest_midpoint_box

__all__ = [
    "AttributeId",
    "Box",
    "BoxArityError",
    "BruteOracle",
    "ClusterSolution",
    "CyclicQueryError",
    "DatabaseInstance",
    "DomainError",
    "EmptyActiveSetError",
    "EmptyJoinError",
    "EmptyRangeError",
    "ExpandOnLeafError",
    "FarthestFirstSelector",
    "ForeignSampleError",
    "GeometryError",
    "InternalGeometryError",
    "JoinTree",
    "KMeansSchedule",
    "MidpointBox",
    "NoCandidateError",
    "NotATreeError",
    "ParseError",
    "RankError",
    "RbbdNode",
    "RbbdTree",
    "Region",
    "Relation",
    "RelationalKCenter",
    "RelationalKMeans",
    "RelClusterError",
    "SamplePolicy",
    "SchemaError",
    "TokenError",
    "TooLargeError",
    "TwinTracker",
    "as_instance",
    "brute_cost",
    "brute_opt",
    "build_instance",
    "build_join_tree",
    "build_root",
    "chi_square_uniformity",
    "count_join",
    "count_rect",
    "decompose_hole",
    "diversity_solve",
    "diversity_value",
    "enumerate_join",
    "estimate_scale_L",
    "farthest_point",
    "filter_by_box",
    "gonzalez_approx",
    "gonzalez_cost",
    "kcenter_constant",
    "kcenter_fixed_radius",
    "kcenter_refined",
    "kmeans_constant",
    "load_instance",
    "parse_box_literal",
    "region_query",
    "report_rect",
    "repr_rect",
    "sample_rect",
    "select_kth_pairwise_distance",
    "semi_join_reduce",
    "smallest_midpoint_box",
    "twin_track",
    "value_set",
]
