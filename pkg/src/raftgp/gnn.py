"""Feedforward pass of an untrained GCN stack.

Each layer computes ``tanh(P @ Z @ W)`` with ``P = D^-1/2 (A + I) D^-1/2``
and a frozen random ``W``, then l2-normalizes every row.  No bias terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import Graph
from .rng import WEIGHTS, substream

# Node-count brackets and layer widths used for the benchmark graphs.
# The first width is the projection dimension, the last the embedding size.
LAYER_TABLE: dict[int, tuple[int, ...]] = {
    1_000: (256, 128, 64),
    5_000: (1024, 512, 256, 128),
    10_000: (4096, 2048, 1024, 512, 256),
    50_000: (4096, 2048, 1024, 512, 256),
    100_000: (4096, 2048, 1024, 512, 256),
    200_000: (4096, 2048, 1024, 512, 256),
}


def default_layer_dims(num_nodes: int) -> tuple[int, ...]:
    """Widths for the bracket nearest to ``num_nodes`` on a log scale."""
    n = max(int(num_nodes), 1)
    bracket = min(LAYER_TABLE, key=lambda b: (abs(math.log(n / b)), b))
    return LAYER_TABLE[bracket]


@dataclass(frozen=True)
class LayerConfig:
    dims: tuple[int, ...]
    seed: int = 0

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2:
            raise ValueError("need at least an input and an output width")
        if min(dims) < 1:
            raise ValueError(f"layer widths must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def num_layers(self) -> int:
        return len(self.dims) - 1

    def with_input_dim(self, width: int) -> "LayerConfig":
        return LayerConfig((width,) + self.dims[1:], self.seed)


def init_weights(cfg: LayerConfig) -> list[np.ndarray]:
    """Layer ``k`` gets an ``L_{k-1} x L_k`` matrix with std ``L_k**-0.5``."""
    weights = []
    for k, (fan_in, fan_out) in enumerate(zip(cfg.dims[:-1], cfg.dims[1:]), start=1):
        w = substream(cfg.seed, WEIGHTS, k).standard_normal((fan_in, fan_out))
        w *= fan_out ** -0.5
        weights.append(w)
    return weights


def propagation_matrix(g: Graph) -> sp.csr_matrix:
    a_hat = g.adjacency() + sp.identity(g.num_nodes, format="csr")
    a_hat = sp.csr_matrix(a_hat)
    a_hat.sort_indices()
    inv_sqrt = 1.0 / np.sqrt(g.degrees.astype(np.float64) + 1.0)
    d = sp.diags(inv_sqrt)
    p = sp.csr_matrix(d @ a_hat @ d)
    p.sort_indices()
    return p


def normalize_rows(z: np.ndarray) -> np.ndarray:
    """In-place row l2 normalization; all-zero rows stay zero."""
    norms = np.sqrt(np.einsum("ij,ij->i", z, z))
    nz = norms > 0
    z[nz] /= norms[nz, None]
    return z


def forward(g: Graph, y, cfg: LayerConfig, weights: list[np.ndarray] | None = None) -> np.ndarray:
    """Run every layer once and return the final normalized embeddings.

    ``y`` may be dense or scipy-sparse (the no-projection ablation feeds the
    raw ``N x N`` statistic).  ``Z @ W`` is formed before propagation because
    widths shrink layer to layer, which keeps the dense product smallest.
    """
    if y.shape[0] != g.num_nodes:
        raise ValueError(f"feature rows {y.shape[0]} != num_nodes {g.num_nodes}")
    if y.shape[1] != cfg.dims[0]:
        raise ValueError(f"feature width {y.shape[1]} != input width {cfg.dims[0]}")
    if weights is None:
        weights = init_weights(cfg)
    p = propagation_matrix(g)
    z = y
    for w in weights:
        h = z @ w
        if sp.issparse(h):
            h = h.toarray()
        z = np.tanh(p @ np.asarray(h))
        normalize_rows(z)
    return np.ascontiguousarray(z)
