"""Partition quality metrics.

Accuracy uses the block correspondence that maximizes total overlap.
Precision and recall are pairwise: a node pair is "positive" when both nodes
share a block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import DegenerateInputError, Graph, Partition


def _pairs(x):
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # pred blocks x true blocks

    @classmethod
    def build(cls, pred: Partition, truth: Partition) -> "ContingencyTable":
        if pred.num_nodes != truth.num_nodes:
            raise ValueError(f"partition sizes differ: {pred.num_nodes} vs {truth.num_nodes}")
        flat = pred.assignment * truth.num_blocks + truth.assignment
        counts = np.bincount(flat, minlength=pred.num_blocks * truth.num_blocks)
        return cls(counts.reshape(pred.num_blocks, truth.num_blocks))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def pred_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def true_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def pair_counts(self) -> tuple[int, int, int, int]:
        """(together in both, together in pred, together in truth, all pairs)."""
        return (
            int(_pairs(self.counts).sum()),
            int(_pairs(self.pred_sizes).sum()),
            int(_pairs(self.true_sizes).sum()),
            int(_pairs(self.total)),
        )


def modularity(g: Graph, p: Partition) -> float:
    if p.num_nodes != g.num_nodes:
        raise ValueError("partition does not cover the graph")
    if g.num_edges == 0:
        raise DegenerateInputError("modularity is undefined without edges")
    u, v = g.edges()
    a = p.assignment
    same = a[u] == a[v]
    internal = np.bincount(a[u[same]], minlength=p.num_blocks).astype(np.float64)
    degree_sums = np.bincount(a, weights=g.degrees, minlength=p.num_blocks)
    e = float(g.num_edges)
    return float(np.sum(internal / e - (degree_sums / (2.0 * e)) ** 2))


def adjusted_rand_index(pred: Partition, truth: Partition) -> float:
    both, in_pred, in_truth, total = ContingencyTable.build(pred, truth).pair_counts()
    if total == 0:
        return 1.0
    expected = in_pred * in_truth / total
    max_index = (in_pred + in_truth) / 2.0
    if max_index == expected:
        # both partitions trivial (all-in-one or all-singletons) and identical in kind
        return 1.0
    return float((both - expected) / (max_index - expected))


@dataclass(frozen=True)
class PairwiseScores:
    precision: float
    recall: float
    f1: float
    precision_undefined: bool = False
    recall_undefined: bool = False


def pairwise_prf(pred: Partition, truth: Partition) -> PairwiseScores:
    """Pair-counting precision, recall and F1.

    A side with no co-membership pairs (all singletons) has a zero
    denominator; its ratio is reported as 1.0 and flagged undefined.
    """
    both, in_pred, in_truth, _ = ContingencyTable.build(pred, truth).pair_counts()
    precision = both / in_pred if in_pred else 1.0
    recall = both / in_truth if in_truth else 1.0
    denom = precision + recall
    f1 = 2.0 * precision * recall / denom if denom else 0.0
    return PairwiseScores(precision, recall, f1, in_pred == 0, in_truth == 0)


def matched_accuracy(pred: Partition, truth: Partition) -> float:
    table = ContingencyTable.build(pred, truth)
    rows, cols = linear_sum_assignment(table.counts, maximize=True)
    return float(table.counts[rows, cols].sum() / table.total)


def evaluate(pred: Partition, truth: Partition, g: Graph | None = None, runtime_seconds=None) -> dict:
    """The flat metrics record written by the CLI."""
    prf = pairwise_prf(pred, truth)
    out = {
        "accuracy": matched_accuracy(pred, truth),
        "ari": adjusted_rand_index(pred, truth),
        "precision": prf.precision,
        "recall": prf.recall,
        "f1": prf.f1,
        "modularity": modularity(g, pred) if g is not None and g.num_edges else None,
        "num_blocks_pred": pred.num_blocks,
        "num_blocks_true": truth.num_blocks,
        "runtime_seconds": runtime_seconds,
    }
    return out
