"""Graph partitioning with random features, an untrained GCN, and
modularity-guided recursive bisection, plus an exact DC-SBM generator."""

__version__ = "0.1.0"

from .features import FeatureKind, gaussian_projection, normalized_adjacency, reduced_modularity
from .gnn import LayerConfig, forward, propagation_matrix
from .graph import (
    DegenerateInputError,
    Graph,
    GraphFormatError,
    Partition,
    load_edge_list,
    load_partition,
    save_edge_list,
    save_partition,
)
from .metrics import adjusted_rand_index, matched_accuracy, modularity, pairwise_prf
from .model_select import ModelSelectConfig, hierarchical_partition, kmeans_two, local_modularity
from .pipeline import RunConfig, run
from .sbm_gen import BenchmarkSpec, SbmParams, build_benchmark_params, range_sum, sample_sbm
