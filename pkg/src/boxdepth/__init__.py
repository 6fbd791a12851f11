"""Depth distribution, Klee's measure and maximum depth of axis-aligned boxes."""

from .adaptive import (
    BoxIntersectionGraph,
    DegeneracyOrdering,
    ProfileReport,
    dd_degeneracy,
    dd_profile,
    degeneracy_ordering,
    graph_to_edge_list,
    intersection_graph,
    klee_degeneracy,
    klee_profile,
    maxdepth_degeneracy,
    maxdepth_profile,
    profile,
)
from .errors import (
    BoxdepthError,
    BudgetExceededError,
    ContractViolationError,
    ParseError,
    ReductionIntegrityError,
    UndefinedResultError,
    UnknownKindError,
)
from .geom import (
    FULL_COVER,
    AxisBox,
    DomainBox,
    Instance,
    clip,
    contains,
    generate,
    intersect,
    read_instance,
    slab_axis,
    volume,
    write_instance,
)
from .measures import (
    DepthDistribution,
    RealPolynomial,
    dd_accumulate,
    dd_intervals_1d,
    dd_slabs,
    dd_to_klee,
    dd_to_maxdepth,
    dd_to_probabilities,
    klee_slabs,
    maxdepth_slabs,
    poly_multiply,
)
from .mmreduce import (
    NonnegativeMatrix,
    build_gadget,
    depth_calibration,
    direct_product,
    product_via_dd,
    read_matrix_csv,
    write_matrix_csv,
)
from .oracle import oracle_dd, oracle_klee, oracle_max_depth
from .sdc import choose_cut, sdc_depth_distribution, sdc_klee, sdc_max_depth, simplify

__version__ = "0.1.0"

__all__ = [
    "AxisBox",
    "BoxIntersectionGraph",
    "BoxdepthError",
    "BudgetExceededError",
    "ContractViolationError",
    "DegeneracyOrdering",
    "DepthDistribution",
    "DomainBox",
    "FULL_COVER",
    "Instance",
    "NonnegativeMatrix",
    "ParseError",
    "ProfileReport",
    "RealPolynomial",
    "ReductionIntegrityError",
    "UndefinedResultError",
    "UnknownKindError",
    "build_gadget",
    "choose_cut",
    "clip",
    "contains",
    "dd_accumulate",
    "dd_degeneracy",
    "dd_intervals_1d",
    "dd_profile",
    "dd_slabs",
    "dd_to_klee",
    "dd_to_maxdepth",
    "dd_to_probabilities",
    "degeneracy_ordering",
    "depth_calibration",
    "direct_product",
    "generate",
    "graph_to_edge_list",
    "intersect",
    "intersection_graph",
    "klee_degeneracy",
    "klee_profile",
    "klee_slabs",
    "maxdepth_degeneracy",
    "maxdepth_profile",
    "maxdepth_slabs",
    "oracle_dd",
    "oracle_klee",
    "oracle_max_depth",
    "poly_multiply",
    "product_via_dd",
    "profile",
    "read_instance",
    "read_matrix_csv",
    "sdc_depth_distribution",
    "sdc_klee",
    "sdc_max_depth",
    "simplify",
    "slab_axis",
    "volume",
    "write_instance",
    "write_matrix_csv",
]
