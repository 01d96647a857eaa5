"""End-to-end partitioning: features -> embeddings -> model selection."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .features import FeatureKind, gaussian_projection, structural_matrix
from .gnn import LayerConfig, default_layer_dims, forward
from .graph import Graph, Partition
from .model_select import ModelSelectConfig, hierarchical_partition

VARIANTS = ("raftgp-c", "raftgp-m", "ablate-no-projection", "ablate-no-gnn")
FEATURES = {"c": FeatureKind.NORMALIZED_ADJACENCY, "m": FeatureKind.REDUCED_MODULARITY}


@dataclass(frozen=True)
class RunConfig:
    variant: str = "raftgp-c"
    features: str | None = None  # "c" or "m"; required choice only for ablations
    layer_dims: tuple[int, ...] | None = None
    epsilon: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        implied = {"raftgp-c": "c", "raftgp-m": "m"}.get(self.variant)
        feats = self.features or implied or "c"
        if feats not in FEATURES:
            raise ValueError(f"features must be 'c' or 'm', got {feats!r}")
        if implied and feats != implied:
            raise ValueError(f"variant {self.variant} always uses features {implied!r}")
        object.__setattr__(self, "features", feats)

    @property
    def feature_kind(self) -> FeatureKind:
        return FEATURES[self.features]

    def dims_for(self, num_nodes: int) -> tuple[int, ...]:
        return tuple(self.layer_dims) if self.layer_dims else default_layer_dims(num_nodes)


@dataclass
class RunResult:
    partition: Partition
    timings: dict = field(default_factory=dict)


def run(g: Graph, cfg: RunConfig) -> RunResult:
    dims = cfg.dims_for(g.num_nodes)
    t0 = time.perf_counter()

    x = structural_matrix(g, cfg.feature_kind)
    if cfg.variant == "ablate-no-projection":
        y = x
        dims = (g.num_nodes,) + dims[1:]
    else:
        y = gaussian_projection(x, dims[0], cfg.seed)
    t1 = time.perf_counter()

    if cfg.variant == "ablate-no-gnn":
        z = y
    else:
        z = forward(g, y, LayerConfig(dims, cfg.seed))
    t2 = time.perf_counter()

    part = hierarchical_partition(g, z, ModelSelectConfig(epsilon=cfg.epsilon, seed=cfg.seed))
    t3 = time.perf_counter()

    timings = {
        "feat_seconds": t1 - t0,
        "emb_seconds": t2 - t1,
        "model_seconds": t3 - t2,
        "total_seconds": t3 - t0,
    }
    return RunResult(part, timings)
