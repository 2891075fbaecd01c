"""netmine: visual mining of attribute-labeled networks.

The toolkit clusters a network by greedy modularity maximization, checks
partitions and refinements against degree-preserving random rewirings,
overlays per-cluster chi-squared tests and geodesic statistics, and lays
the cluster metagraph out with a deterministic force-directed embedding.
"""

from .clustering import (
    ClusterGraph,
    HierarchyStep,
    Partition,
    build_cluster_graph,
    cluster,
    coarsen,
    delta_q_merge,
    make_partition,
    merge_into_groups,
    modularity,
    refine,
    singleton_partition,
)
from .errors import NetmineError
from .graph import (
    CATEGORICAL,
    INTEGER,
    Edge,
    Network,
    NodeRecord,
    build_network,
    connected_components,
    degree_sequence,
    giant_component,
    induced_subgraph,
)
from .layout import (
    LayoutResult,
    StyledLayout,
    edge_thickness,
    fr_layout,
    style_overlay,
)
from .significance import (
    GateResult,
    NullModelSummary,
    degree_fingerprint,
    gate_refinement,
    is_significant,
    mix_seed,
    null_threshold,
    rewire,
)
from .stats import (
    CategoricalDistribution,
    ClusterTest,
    GeodesicTable,
    TestOverlay,
    YearlyTable,
    attribute_distribution,
    chi_squared_overlay,
    chi_squared_upper_tail,
    geodesic_table_by_attribute,
    geodesic_table_by_groups,
    group_label_map,
    yearly_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "CATEGORICAL",
    "CategoricalDistribution",
    "ClusterGraph",
    "ClusterTest",
    "Edge",
    "GateResult",
    "GeodesicTable",
    "HierarchyStep",
    "INTEGER",
    "LayoutResult",
    "NetmineError",
    "Network",
    "NodeRecord",
    "NullModelSummary",
    "Partition",
    "StyledLayout",
    "TestOverlay",
    "YearlyTable",
    "attribute_distribution",
    "build_cluster_graph",
    "build_network",
    "chi_squared_overlay",
    "chi_squared_upper_tail",
    "cluster",
    "coarsen",
    "connected_components",
    "degree_fingerprint",
    "degree_sequence",
    "delta_q_merge",
    "edge_thickness",
    "fr_layout",
    "gate_refinement",
    "geodesic_table_by_attribute",
    "geodesic_table_by_groups",
    "giant_component",
    "group_label_map",
    "induced_subgraph",
    "is_significant",
    "make_partition",
    "merge_into_groups",
    "mix_seed",
    "modularity",
    "null_threshold",
    "refine",
    "rewire",
    "singleton_partition",
    "style_overlay",
    "yearly_distribution",
    "__version__",
]
