"""Block-count selection by recursive 2-means bisection.

A node set is split in two by k-means on its embeddings.  The split is kept
when both sides are larger than ``epsilon`` nodes and local modularity does
not drop; otherwise the set becomes a final block.

Local modularity can be normalized by the subset's own degree total or by
the whole graph's.  With the subset total, ``m2 - m1 = 2ab - cut/e_U`` for a
split with degree shares ``a + b = 1``, which is positive for a balanced cut
through any block that has outside edges, so true blocks keep getting split
down to ``epsilon``.  Normalizing by ``2|E|`` turns the comparison into the
global modularity gain of the split and stops at true blocks; that is the
default (``lmod_reference="graph"``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graph import DegenerateInputError, Graph, Partition
from .rng import KMEANS, substream

log = logging.getLogger(__name__)


class DegenerateSplit(Exception):
    """k-means could not separate the points into two nonempty groups."""


@dataclass(frozen=True)
class ModelSelectConfig:
    epsilon: int = 5
    kmeans_max_iters: int = 50
    kmeans_tol: float = 1e-6
    kmeans_restarts: int = 4
    seed: int = 0
    lmod_reference: str = "graph"  # or "subset"

    def __post_init__(self):
        if self.lmod_reference not in ("graph", "subset"):
            raise ValueError("lmod_reference must be 'graph' or 'subset'")
        if self.epsilon < 1:
            raise ValueError("epsilon must be >= 1")
        if self.kmeans_max_iters < 1:
            raise ValueError("kmeans_max_iters must be >= 1")
        if self.kmeans_restarts < 1:
            raise ValueError("kmeans_restarts must be >= 1")


@dataclass
class SplitCandidate:
    parent: np.ndarray
    left: np.ndarray
    right: np.ndarray
    lmod_single: float
    lmod_split: float


def _incident_edges(g: Graph, nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Directed (src, dst) pairs for every edge leaving a node in ``nodes``."""
    starts = g.csr_offsets[nodes]
    counts = g.degrees[nodes]
    total = int(counts.sum())
    if total == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    ends = np.cumsum(counts)
    pos = np.arange(total, dtype=np.int64) + np.repeat(starts - (ends - counts), counts)
    return np.repeat(nodes, counts), g.csr_neighbors[pos]


def local_modularity(g: Graph, blocks, total_degree: float | None = None) -> float:
    """Sum over blocks of ``m_r/e - (dbar_r/2e)**2``.

    ``m_r`` counts edges inside block ``r``; ``dbar_r`` sums full-graph
    degrees over the block, so edges leaving the union still count; ``2e``
    is the total of the ``dbar_r`` unless ``total_degree`` overrides it.
    """
    blocks = [np.asarray(b, dtype=np.int64) for b in blocks]
    nodes = np.concatenate(blocks) if blocks else np.empty(0, dtype=np.int64)
    label = np.full(g.num_nodes, -1, dtype=np.int64)
    for r, b in enumerate(blocks):
        label[b] = r
    if np.count_nonzero(label >= 0) != nodes.size:
        raise ValueError("blocks must be disjoint")
    degree_sums = np.array([g.degrees[b].sum() for b in blocks], dtype=np.float64)
    two_e = degree_sums.sum() if total_degree is None else float(total_degree)
    if two_e <= 0:
        raise DegenerateInputError("local modularity needs positive total degree")
    src, dst = _incident_edges(g, nodes)
    same = label[src] == label[dst]
    # each internal edge is seen from both endpoints
    internal = np.bincount(label[src[same]], minlength=len(blocks)) / 2.0
    e = two_e / 2.0
    return float(np.sum(internal / e - (degree_sums / two_e) ** 2))


def _plus_plus_seeds(x: np.ndarray, sq: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    first = int(rng.integers(x.shape[0]))
    d2 = np.maximum(sq - 2.0 * (x @ x[first]) + sq[first], 0.0)
    total = d2.sum()
    if total <= 0:
        second = first
    else:
        second = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
        second = min(second, x.shape[0] - 1)
    return x[[first, second]].astype(np.float64)


def _sq_dists(x: np.ndarray, sq: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = sq[:, None] - 2.0 * (x @ centers.T) + np.einsum("ij,ij->i", centers, centers)[None, :]
    return np.maximum(d, 0.0)


def _lloyd(x: np.ndarray, sq: np.ndarray, centers: np.ndarray, max_iters: int, tol: float):
    for _ in range(max_iters):
        d = _sq_dists(x, sq, centers)
        labels = np.argmin(d, axis=1)
        onehot = np.zeros((x.shape[0], 2))
        onehot[np.arange(x.shape[0]), labels] = 1.0
        counts = onehot.sum(axis=0)
        new = onehot.T @ x
        for c in range(2):
            if counts[c]:
                new[c] /= counts[c]
            else:
                # reseed at the point farthest from the surviving centroid
                new[c] = x[np.argmax(d[:, 1 - c])]
        shift = np.sqrt(np.sum((new - centers) ** 2, axis=1)).max()
        centers = new
        if shift < tol:
            break
    d = _sq_dists(x, sq, centers)
    labels = np.argmin(d, axis=1)
    inertia = float(d[np.arange(x.shape[0]), labels].sum())
    return labels, centers, inertia


def kmeans_two(points: np.ndarray, cfg: ModelSelectConfig, stream: int = 0):
    """2-means with k-means++ seeding; best of ``cfg.kmeans_restarts`` runs.

    Returns ``(first, second)`` row-index arrays into ``points``; ``first``
    is the cluster whose centroid has the smaller norm.  Raises
    :class:`DegenerateSplit` when every restart leaves a cluster empty.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("kmeans_two needs at least two points")
    rng = substream(cfg.seed, KMEANS, stream)
    sq = np.einsum("ij,ij->i", x, x)
    best = None
    for _ in range(cfg.kmeans_restarts):
        seeds = _plus_plus_seeds(x, sq, rng)
        labels, centers, inertia = _lloyd(x, sq, seeds, cfg.kmeans_max_iters, cfg.kmeans_tol)
        if np.all(labels == labels[0]):
            continue
        if best is None or inertia < best[2]:
            best = (labels, centers, inertia)
    if best is None:
        raise DegenerateSplit("all points fall in one cluster")
    labels, centers, _ = best
    norms = np.sum(centers ** 2, axis=1)
    first = 0 if norms[0] <= norms[1] else 1
    idx = np.arange(x.shape[0])
    return idx[labels == first], idx[labels != first]


def hierarchical_partition(
    g: Graph,
    z: np.ndarray,
    cfg: ModelSelectConfig = ModelSelectConfig(),
    trace: list | None = None,
) -> Partition:
    """Recursively bisect ``V``; the number of blocks is discovered, never given.

    Subsets are processed depth-first, smaller-centroid-norm side first, and
    blocks are numbered in the order they are emitted.  Pass a list as
    ``trace`` to collect one :class:`SplitCandidate` per attempted split.
    """
    z = np.asarray(z)
    if z.shape[0] != g.num_nodes:
        raise ValueError(f"embedding rows {z.shape[0]} != num_nodes {g.num_nodes}")
    ref = 2.0 * g.num_edges if cfg.lmod_reference == "graph" else None
    emitted: list[np.ndarray] = []
    stack = [np.arange(g.num_nodes, dtype=np.int64)]
    calls = 0
    while stack:
        u = stack.pop()
        if u.size < 2 or g.degrees[u].sum() == 0:
            emitted.append(u)
            continue
        m1 = local_modularity(g, [u], ref)
        try:
            a, b = kmeans_two(z[u], cfg, stream=calls)
        except DegenerateSplit:
            emitted.append(u)
            continue
        finally:
            calls += 1
        u1, u2 = u[a], u[b]
        m2 = local_modularity(g, [u1, u2], ref)
        if trace is not None:
            trace.append(SplitCandidate(u, u1, u2, m1, m2))
        if min(u1.size, u2.size) <= cfg.epsilon or m1 > m2:
            emitted.append(u)
        else:
            stack.append(u2)
            stack.append(u1)
    log.debug("model selection: %d kmeans calls, %d blocks", calls, len(emitted))
    return Partition.from_blocks(g.num_nodes, emitted)
