"""Certified counting, sampling, and correlation analysis for the bivariate
hard-core model on unbalanced bipartite graphs.

The partition function Z(G) sums lambda_L^|I n L| * lambda_R^|I n R| over
independent sets I.  Rewriting Z as (1 + lambda_L)^|L| times a polymer
partition function over 2-linked subsets of R turns low right-side activity
into a convergent cluster expansion; truncating that expansion yields a
deterministic approximation scheme, a sampler, decaying joint cumulants, and
a complex zero-free region.  Everything approximate is certified before use
and checked against brute-force oracles in the test suite.
"""

from .clusters import (
    Cluster,
    ClusterEngine,
    ExpansionEstimate,
    enumerate_clusters,
    truncated_expansion,
    ursell,
    ursell_deletion_contraction,
    ursell_edge_subsets,
)
from .conditions import (
    ConditionCheck,
    KPCertificate,
    certify_kp,
    check_complex_region,
    check_corollary,
    check_main_condition,
    in_region,
)
from .counting import CountResult, ZeroProbeReport, approx_log_Z, choose_m, zero_probe
from .cumulants import (
    CumulantQuery,
    DecayRow,
    bell_number,
    cumulant_decay_constant,
    cumulants_from_moments,
    decay_experiment,
    decay_rows_to_csv,
    indicator_cumulant_bound,
    moments_from_cumulants,
    set_partitions,
    straddling_constant,
    straddling_partition_sum,
    truncated_cumulant,
)
from .errors import (
    BipcoreError,
    CertificationError,
    ClusterBudgetError,
    DegenerateGraphError,
    GraphFormatError,
    NotTwoLinkedError,
    SizeCapError,
    StructuralMismatchError,
)
from .graph import (
    BipartiteGraph,
    DegreeProfile,
    complete_bipartite,
    connected_components,
    degree_profile,
    even_cycle,
    generate,
    graph_distance,
    graph_to_text,
    load_graph,
    path,
    random_biregular,
    star_center_L,
    star_center_R,
    steiner_tree_size,
)
from .oracle import (
    exact_cumulant,
    exact_covariance,
    exact_distribution,
    exact_log_Z,
    exact_marginal,
    exact_nu,
    exact_occupancy,
    exact_Xi,
    exact_Z,
    exact_Z_complex,
)
from .polymers import (
    ComplexRegion,
    Fugacities,
    Polymer,
    PolymerSystem,
    all_polymers,
    enumerate_polymers,
    incompatible,
    kp_vertex_sum,
    make_polymer,
    polymer_weight,
    two_linked_adjacency,
)
from .sampler import (
    IndependentSetSampler,
    PolymerConfig,
    extend_to_independent_set,
    sample_independent_set,
    sample_polymer_config,
)

__version__ = "1.0.0"

__all__ = [
    "BipartiteGraph",
    "BipcoreError",
    "CertificationError",
    "Cluster",
    "ClusterBudgetError",
    "ClusterEngine",
    "ComplexRegion",
    "ConditionCheck",
    "CountResult",
    "CumulantQuery",
    "DecayRow",
    "DegenerateGraphError",
    "DegreeProfile",
    "ExpansionEstimate",
    "Fugacities",
    "GraphFormatError",
    "IndependentSetSampler",
    "KPCertificate",
    "NotTwoLinkedError",
    "Polymer",
    "PolymerConfig",
    "PolymerSystem",
    "SizeCapError",
    "StructuralMismatchError",
    "ZeroProbeReport",
    "all_polymers",
    "approx_log_Z",
    "bell_number",
    "certify_kp",
    "check_complex_region",
    "check_corollary",
    "check_main_condition",
    "choose_m",
    "complete_bipartite",
    "connected_components",
    "cumulant_decay_constant",
    "cumulants_from_moments",
    "decay_experiment",
    "decay_rows_to_csv",
    "degree_profile",
    "enumerate_clusters",
    "enumerate_polymers",
    "even_cycle",
    "exact_Xi",
    "exact_Z",
    "exact_Z_complex",
    "exact_covariance",
    "exact_cumulant",
    "exact_distribution",
    "exact_log_Z",
    "exact_marginal",
    "exact_nu",
    "exact_occupancy",
    "extend_to_independent_set",
    "generate",
    "graph_distance",
    "graph_to_text",
    "in_region",
    "incompatible",
    "indicator_cumulant_bound",
    "kp_vertex_sum",
    "load_graph",
    "make_polymer",
    "moments_from_cumulants",
    "path",
    "polymer_weight",
    "random_biregular",
    "sample_independent_set",
    "sample_polymer_config",
    "set_partitions",
    "star_center_L",
    "star_center_R",
    "steiner_tree_size",
    "straddling_constant",
    "straddling_partition_sum",
    "truncated_cumulant",
    "truncated_expansion",
    "two_linked_adjacency",
    "ursell",
    "ursell_deletion_contraction",
    "ursell_edge_subsets",
    "zero_probe",
]
