"""Objective-derived sparse node statistics and their random projection."""

from __future__ import annotations

import enum

import numpy as np
import scipy.sparse as sp

from .graph import DegenerateInputError, Graph
from .rng import PROJECTION, substream


class FeatureKind(str, enum.Enum):
    NORMALIZED_ADJACENCY = "normalized_adjacency"  # D^-1/2 A D^-1/2, the "-C" variant
    REDUCED_MODULARITY = "reduced_modularity"  # modularity matrix on A's support, the "-M" variant


def _degree_products(g: Graph) -> np.ndarray:
    rows = np.repeat(np.arange(g.num_nodes), g.degrees)
    return g.degrees[rows].astype(np.float64) * g.degrees[g.csr_neighbors]


def _on_support(g: Graph, values: np.ndarray) -> sp.csr_matrix:
    return sp.csr_matrix(
        (values, g.csr_neighbors.copy(), g.csr_offsets.copy()),
        shape=(g.num_nodes, g.num_nodes),
    )


def normalized_adjacency(g: Graph) -> sp.csr_matrix:
    """``1/sqrt(deg_i deg_j)`` on every edge, zero elsewhere.

    Isolated nodes have no stored entries, so their rows are all zero.
    """
    return _on_support(g, 1.0 / np.sqrt(_degree_products(g)))


def reduced_modularity(g: Graph) -> sp.csr_matrix:
    """Modularity matrix ``A - d d^T / 2e`` restricted to the edges of ``A``."""
    if g.num_edges == 0:
        raise DegenerateInputError("reduced modularity needs at least one edge")
    two_e = 2.0 * g.num_edges
    return _on_support(g, 1.0 - _degree_products(g) / two_e)


def structural_matrix(g: Graph, kind: FeatureKind | str) -> sp.csr_matrix:
    kind = FeatureKind(kind)
    if kind is FeatureKind.NORMALIZED_ADJACENCY:
        return normalized_adjacency(g)
    return reduced_modularity(g)


def projection_matrix(num_rows: int, target_dim: int, seed: int) -> np.ndarray:
    """Dense ``num_rows x target_dim`` matrix, i.i.d. N(0, std=target_dim**-0.5)."""
    if target_dim <= 0:
        raise ValueError(f"target_dim must be >= 1, got {target_dim}")
    rng = substream(seed, PROJECTION)
    theta = rng.standard_normal((num_rows, target_dim))
    theta *= target_dim ** -0.5
    return theta


def gaussian_projection(x, target_dim: int, seed: int) -> np.ndarray:
    """Project the rows of ``x`` to ``target_dim`` dimensions.

    ``x`` may be any scipy sparse matrix or a dense array.  The sparse path
    costs ``O(nnz(x) * target_dim)``.
    """
    if target_dim <= 0:
        raise ValueError(f"target_dim must be >= 1, got {target_dim}")
    theta = projection_matrix(x.shape[1], target_dim, seed)
    if sp.issparse(x):
        y = sp.csr_matrix(x) @ theta
    else:
        y = np.asarray(x, dtype=np.float64) @ theta
    return np.ascontiguousarray(y)
