"""Graph and partition containers plus their text formats.

Edge lists are whitespace-separated ``u v`` lines with 0-based node ids.  An
optional ``# N <n>`` header fixes the node count so trailing isolated nodes
survive a round trip.  Partitions are ``node_id block_id`` lines.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "Partition",
    "GraphFormatError",
    "DegenerateInputError",
    "load_edge_list",
    "save_edge_list",
    "load_partition",
    "save_partition",
]


class GraphFormatError(ValueError):
    """Malformed edge-list or partition file, or an out-of-range node id."""


class DegenerateInputError(ValueError):
    """Input has no edges (or zero total degree) where some are required."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph in CSR form.

    Neighbor lists are sorted, symmetric, and free of self-loops and
    duplicates.  Build instances with :meth:`from_edges`.
    """

    num_nodes: int
    csr_offsets: np.ndarray
    csr_neighbors: np.ndarray
    degrees: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, num_nodes: int, src, dst) -> "Graph":
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        n = int(num_nodes)
        if n < 0:
            raise ValueError("num_nodes must be non-negative")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise GraphFormatError(f"edge endpoint outside [0, {n})")
        keep = src != dst
        src, dst = src[keep], dst[keep]
        both_src = np.concatenate([src, dst])
        both_dst = np.concatenate([dst, src])
        keys = np.unique(both_src * n + both_dst) if both_src.size else both_src
        rows, cols = np.divmod(keys, n) if n else (keys, keys)
        degrees = np.bincount(rows, minlength=n).astype(np.int64)
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degrees, out=offsets[1:])
        return cls(n, _frozen(offsets), _frozen(cols.astype(np.int64)), _frozen(degrees))

    @property
    def num_edges(self) -> int:
        return int(self.csr_neighbors.size // 2)

    def neighbors(self, i: int) -> np.ndarray:
        return self.csr_neighbors[self.csr_offsets[i]:self.csr_offsets[i + 1]]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Each undirected edge once, as ``(u, v)`` arrays with ``u < v``."""
        src = np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.degrees)
        upper = src < self.csr_neighbors
        return src[upper], self.csr_neighbors[upper]

    def adjacency(self, dtype=np.float64) -> sp.csr_matrix:
        data = np.ones(self.csr_neighbors.size, dtype=dtype)
        return sp.csr_matrix(
            (data, self.csr_neighbors.copy(), self.csr_offsets.copy()),
            shape=(self.num_nodes, self.num_nodes),
        )

    def permute(self, perm) -> "Graph":
        """Relabel node ``i`` as ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        u, v = self.edges()
        return Graph.from_edges(self.num_nodes, perm[u], perm[v])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_nodes == other.num_nodes
            and np.array_equal(self.csr_offsets, other.csr_offsets)
            and np.array_equal(self.csr_neighbors, other.csr_neighbors)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Partition:
    """Block assignment with dense block ids ``0..num_blocks-1``, none empty."""

    assignment: np.ndarray
    num_blocks: int

    def __init__(self, assignment, num_blocks: int | None = None):
        a = np.array(assignment, dtype=np.int64).ravel()
        k = int(a.max()) + 1 if a.size else 0
        if num_blocks is not None and num_blocks != k:
            raise ValueError(f"num_blocks={num_blocks} but labels imply {k}")
        if a.size and a.min() < 0:
            raise ValueError("block ids must be non-negative")
        if np.count_nonzero(np.bincount(a, minlength=k)) != k:
            raise ValueError("block ids must be dense: every id in [0, K) needs a member")
        object.__setattr__(self, "assignment", _frozen(a))
        object.__setattr__(self, "num_blocks", k)

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Compact arbitrary integer labels; label order is preserved."""
        _, dense = np.unique(np.asarray(labels, dtype=np.int64), return_inverse=True)
        return cls(dense)

    @classmethod
    def from_blocks(cls, num_nodes: int, blocks) -> "Partition":
        a = np.full(num_nodes, -1, dtype=np.int64)
        for b, members in enumerate(blocks):
            a[np.asarray(members, dtype=np.int64)] = b
        if (a < 0).any():
            raise ValueError("blocks do not cover every node")
        return cls(a)

    @property
    def num_nodes(self) -> int:
        return int(self.assignment.size)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.num_blocks)

    def blocks(self) -> list[np.ndarray]:
        order = np.argsort(self.assignment, kind="stable")
        return np.split(order, np.cumsum(self.sizes())[:-1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    __hash__ = None


def _parse_pairs(path, what: str):
    declared = None
    first, second = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "N":
                    try:
                        declared = int(parts[1])
                    except ValueError:
                        raise GraphFormatError(f"{path}:{lineno}: bad node-count header {line!r}") from None
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected two integers, got {line!r}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: expected two integers, got {line!r}") from None
            if a < 0 or b < 0:
                raise GraphFormatError(f"{path}:{lineno}: negative {what} id in {line!r}")
            first.append(a)
            second.append(b)
            if declared is not None and (a >= declared or (what == "node" and b >= declared)):
                raise GraphFormatError(f"{path}:{lineno}: node id >= declared N={declared}")
    return declared, np.array(first, dtype=np.int64), np.array(second, dtype=np.int64)


def load_edge_list(path) -> Graph:
    declared, u, v = _parse_pairs(path, "node")
    if declared is not None:
        n = declared
    else:
        n = int(max(u.max(), v.max())) + 1 if u.size else 0
    return Graph.from_edges(n, u, v)


def save_edge_list(g: Graph, path) -> None:
    u, v = g.edges()
    body = "".join(f"{a} {b}\n" for a, b in zip(u.tolist(), v.tolist()))
    implied = int(v.max()) + 1 if v.size else 0
    if implied != g.num_nodes:
        # header only when the edges alone would lose trailing isolated nodes
        body = f"# N {g.num_nodes}\n" + body
    _write_text(path, body)


def load_partition(path) -> Partition:
    _, nodes, blocks = _parse_pairs(path, "block")
    n = nodes.size
    if n == 0:
        raise GraphFormatError(f"{path}: empty partition file")
    if nodes.max() >= n or np.bincount(nodes, minlength=n).max() != 1:
        raise GraphFormatError(f"{path}: node ids must be 0..{n - 1}, each exactly once")
    assignment = np.empty(n, dtype=np.int64)
    assignment[nodes] = blocks
    return Partition.from_labels(assignment)


def save_partition(p: Partition, path) -> None:
    body = "".join(f"{i} {b}\n" for i, b in enumerate(p.assignment.tolist()))
    _write_text(path, body)


def _write_text(path, text: str) -> None:
    path = os.fspath(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
