"""Degree-corrected SBM sampling in near-linear time.

For every block pair the candidate node pairs form a virtual table, read
row-major (for a block with itself only cells ``i < j`` are listed).  The
sampler draws ``p ~ U(0, 1]`` and jumps straight to the first cell ``t`` whose
cumulative rate from the current position exceeds ``-log p``.  That cell
carries at least one Poisson event, so its multiplicity is zero-truncated
Poisson.  Because ``lambda_ij = omega_rs * theta_i * theta_j`` factorizes,
cumulative sums over the table need only 1-D prefix sums of ``theta``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .rng import GENERATION, substream

# Block counts of the standard benchmark sizes; floor(N ** 0.35) reproduces every entry and fills gaps.
BLOCKS_BY_NODES = {1_000: 11, 5_000: 19, 10_000: 25, 50_000: 44, 100_000: 56, 200_000: 71}
POWER_LAW_EXPONENT = 2.1
DEFAULT_DEGREE_PROFILE = (21.0, 95.0)


class InfeasibleSpecError(ValueError):
    pass


@dataclass
class SbmParams:
    theta: np.ndarray
    assignment: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        self.assignment = np.asarray(self.assignment, dtype=np.int64)
        self.omega = np.atleast_2d(np.asarray(self.omega, dtype=np.float64))
        k = self.omega.shape[0]
        if self.theta.shape != self.assignment.shape or self.theta.ndim != 1:
            raise ValueError("theta and assignment must be 1-D and the same length")
        if (self.theta <= 0).any() or not np.isfinite(self.theta).all():
            raise ValueError("theta must be positive and finite")
        if self.omega.shape != (k, k) or not np.array_equal(self.omega, self.omega.T):
            raise ValueError("omega must be a symmetric square matrix")
        if (self.omega < 0).any():
            raise ValueError("omega entries must be non-negative")
        if self.assignment.size and (self.assignment.min() < 0 or self.assignment.max() >= k):
            raise ValueError(f"block ids must lie in [0, {k})")
        if np.count_nonzero(np.bincount(self.assignment, minlength=k)) != k:
            raise ValueError("every block needs at least one node")

    @property
    def num_nodes(self) -> int:
        return int(self.theta.size)

    @property
    def num_blocks(self) -> int:
        return int(self.omega.shape[0])

    def members(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.assignment == r) for r in range(self.num_blocks)]

    def rate(self, i: int, j: int) -> float:
        return float(self.theta[i] * self.theta[j] * self.omega[self.assignment[i], self.assignment[j]])

    def to_dict(self) -> dict:
        return {
            "theta": self.theta.tolist(),
            "assignment": self.assignment.tolist(),
            "omega": self.omega.tolist(),
        }


@dataclass(frozen=True)
class BlockPairPrefix:
    """Cumulative ``theta`` sums over the virtual table of a block pair.

    ``row_cum[i]`` is the table mass (before multiplying by omega) of rows
    ``0..i-1``; ``col_prefix[j]`` is ``sum(theta_s[:j])``.  With
    ``same_block`` row ``i`` starts at column ``i + 1``.
    """

    row_theta: np.ndarray
    col_theta: np.ndarray
    col_prefix: np.ndarray
    row_cum: np.ndarray
    cell_offsets: np.ndarray
    same_block: bool

    @classmethod
    def build(cls, theta_r: np.ndarray, theta_s: np.ndarray | None = None) -> "BlockPairPrefix":
        theta_r = np.asarray(theta_r, dtype=np.float64)
        same = theta_s is None
        cols = theta_r if same else np.asarray(theta_s, dtype=np.float64)
        n_r, n_s = theta_r.size, cols.size
        col_prefix = np.zeros(n_s + 1)
        np.cumsum(cols, out=col_prefix[1:])
        row_cum = np.zeros(n_r + 1)
        if same:
            np.cumsum(theta_r * (col_prefix[-1] - col_prefix[1:]), out=row_cum[1:])
            widths = np.arange(n_r - 1, -1, -1, dtype=np.int64)
        else:
            np.cumsum(theta_r * col_prefix[-1], out=row_cum[1:])
            widths = np.full(n_r, n_s, dtype=np.int64)
        offsets = np.zeros(n_r + 1, dtype=np.int64)
        np.cumsum(widths, out=offsets[1:])
        return cls(theta_r, cols, col_prefix, row_cum, offsets, same)

    @property
    def num_cells(self) -> int:
        return int(self.cell_offsets[-1])

    def row_start(self, i: int) -> int:
        return i + 1 if self.same_block else 0

    def cell(self, t: int) -> tuple[int, int]:
        """Row and column of the 0-based cell index ``t``."""
        i = int(np.searchsorted(self.cell_offsets, t, side="right")) - 1
        return i, self.row_start(i) + int(t - self.cell_offsets[i])


def range_sum(prefix: BlockPairPrefix, omega_rs: float, x: int, y: int) -> float:
    """Sum of rates over table cells ``x..y`` (1-based, inclusive) in O(1).

    Partial first and last rows come from column prefixes; whole rows in
    between come from ``row_cum``.
    """
    if not 1 <= x <= y <= prefix.num_cells:
        raise ValueError(f"need 1 <= x <= y <= {prefix.num_cells}, got x={x}, y={y}")
    i0, j0 = prefix.cell(x - 1)
    i1, j1 = prefix.cell(y - 1)
    q, th = prefix.col_prefix, prefix.row_theta
    if i0 == i1:
        total = th[i0] * (q[j1 + 1] - q[j0])
    else:
        first = th[i0] * (q[-1] - q[j0])
        middle = prefix.row_cum[i1] - prefix.row_cum[i0 + 1]
        last = th[i1] * (q[j1 + 1] - q[prefix.row_start(i1)])
        total = first + middle + last
    return float(omega_rs * total)


class _UniformStream:
    """Batched ``U(0, 1]`` draws; ``1 - random()`` keeps ``log`` finite."""

    def __init__(self, rng: np.random.Generator, batch: int = 1024):
        self._rng = rng
        self._batch = batch
        self._buf: list[float] = []

    def next(self) -> float:
        if not self._buf:
            self._buf = (1.0 - self._rng.random(self._batch))[::-1].tolist()
        return self._buf.pop()


def zero_truncated_poisson(lam: float, u: float) -> int:
    """Inverse-CDF draw of Poisson(lam) conditioned on >= 1, from uniform ``u``."""
    if lam <= 0:
        raise ValueError("rate must be positive")
    norm = -math.expm1(-lam)
    k = 1
    pk = lam * math.exp(-lam) / norm
    cdf = pk
    while u > cdf and pk > 0:
        k += 1
        pk *= lam / k
        cdf += pk
    return k


def _sample_pair(prefix: BlockPairPrefix, omega_rs: float, uniforms: _UniformStream):
    """Yield ``(i, j, weight)`` table coordinates of every nonzero cell."""
    row_cum = prefix.row_cum.tolist()
    q = prefix.col_prefix.tolist()
    th = prefix.row_theta.tolist()
    tc = prefix.col_theta.tolist()
    offsets = prefix.cell_offsets
    n_cols = len(q) - 1
    num_cells = prefix.num_cells
    total = row_cum[-1]
    same = prefix.same_block
    done = 0.0  # table mass (over omega) of all cells before the search start
    m = 0  # first cell still open, 0-based
    while m < num_cells:
        target = done - math.log(uniforms.next()) / omega_rs
        if target >= total:
            return
        i = bisect.bisect_right(row_cum, target) - 1
        start = i + 1 if same else 0
        j = bisect.bisect_right(q, q[start] + (target - row_cum[i]) / th[i]) - 1
        j = min(max(j, start), n_cols - 1)
        t = int(offsets[i]) + j - start
        if t < m:
            # rounding in the two-level lookup may land before the open range
            t = m
            i, j = prefix.cell(t)
            start = i + 1 if same else 0
        yield i, j, zero_truncated_poisson(omega_rs * th[i] * tc[j], uniforms.next())
        done = row_cum[i] + th[i] * (q[j + 1] - q[start])
        m = t + 1


def sample_sbm_edges(params: SbmParams, seed: int):
    """Raw sampled multigraph as ``(u, v, weight)`` arrays with ``u < v``."""
    members = params.members()
    us, vs, ws = [], [], []
    for r in range(params.num_blocks):
        for s in range(r, params.num_blocks):
            omega = float(params.omega[r, s])
            if omega == 0.0:
                continue
            if r == s:
                if members[r].size < 2:
                    continue
                prefix = BlockPairPrefix.build(params.theta[members[r]])
            else:
                prefix = BlockPairPrefix.build(params.theta[members[r]], params.theta[members[s]])
            uniforms = _UniformStream(substream(seed, GENERATION, "pair", r, s))
            rows_r, rows_s = members[r], members[s]
            for i, j, w in _sample_pair(prefix, omega, uniforms):
                us.append(rows_r[i])
                vs.append(rows_s[j])
                ws.append(w)
    u = np.array(us, dtype=np.int64)
    v = np.array(vs, dtype=np.int64)
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    return lo, hi, np.array(ws, dtype=np.int64)


def sample_sbm(params: SbmParams, seed: int) -> Graph:
    """Sample a simple graph: any nonzero multiplicity becomes one edge."""
    u, v, _ = sample_sbm_edges(params, seed)
    return Graph.from_edges(params.num_nodes, u, v)


def expected_edge_counts(params: SbmParams) -> tuple[float, float]:
    """Closed-form expected (within-block, between-block) edge multiplicity sums."""
    k = params.num_blocks
    theta_sum = np.bincount(params.assignment, weights=params.theta, minlength=k)
    theta_sq = np.bincount(params.assignment, weights=params.theta ** 2, minlength=k)
    within = float(np.sum(np.diag(params.omega) * (theta_sum ** 2 - theta_sq)) / 2.0)
    cross = params.omega * np.outer(theta_sum, theta_sum)
    between = float((cross.sum() - np.trace(cross)) / 2.0)
    return within, between


def default_num_blocks(num_nodes: int) -> int:
    if num_nodes in BLOCKS_BY_NODES:
        return BLOCKS_BY_NODES[num_nodes]
    return max(1, int(math.floor(num_nodes ** 0.35)))


@dataclass(frozen=True)
class BenchmarkSpec:
    num_nodes: int
    seed: int = 0
    within_between_ratio: float = 2.5
    size_heterogeneity: float = 3.0
    target_num_blocks: int | None = None
    degree_profile: tuple[float, float] | None = None  # None: DEFAULT_DEGREE_PROFILE fitted to N

    def __post_init__(self):
        if self.num_nodes < 2:
            raise InfeasibleSpecError("need at least two nodes")
        if not self.within_between_ratio > 0:
            raise InfeasibleSpecError("within/between ratio must be positive")
        if not self.size_heterogeneity >= 1:
            raise InfeasibleSpecError("size heterogeneity must be >= 1")

    @property
    def profile(self) -> tuple[float, float]:
        """Degree range in use; the default shrinks proportionally when N - 1 < 95."""
        if self.degree_profile is not None:
            return tuple(float(d) for d in self.degree_profile)
        lo, hi = DEFAULT_DEGREE_PROFILE
        scale = min(1.0, (self.num_nodes - 1) / hi)
        return lo * scale, hi * scale

    @property
    def num_blocks(self) -> int:
        return self.target_num_blocks if self.target_num_blocks is not None else default_num_blocks(self.num_nodes)

    def to_dict(self) -> dict:
        return {
            "num_nodes": self.num_nodes,
            "seed": self.seed,
            "within_between_ratio": self.within_between_ratio,
            "size_heterogeneity": self.size_heterogeneity,
            "num_blocks": self.num_blocks,
            "degree_profile": list(self.profile),
        }


def _block_sizes(n: int, k: int, heterogeneity: float, rng: np.random.Generator) -> np.ndarray:
    if k == 1:
        return np.array([n])
    u = rng.random(k)
    u[np.argmin(u)], u[np.argmax(u)] = 0.0, 1.0
    share = heterogeneity ** u
    raw = n * share / share.sum()
    sizes = np.floor(raw).astype(np.int64)
    # largest remainder; ties broken by block index
    order = np.lexsort((np.arange(k), -(raw - sizes)))
    sizes[order[: n - sizes.sum()]] += 1
    while (sizes == 0).any():
        sizes[np.argmin(sizes)] += 1
        sizes[np.argmax(sizes)] -= 1
    return sizes


def power_law_mean(lo: float, hi: float, exponent: float = POWER_LAW_EXPONENT) -> float:
    """Mean of the density ``x**-exponent`` truncated to ``[lo, hi]``."""
    if lo == hi:
        return float(lo)
    a, b = 1.0 - exponent, 2.0 - exponent
    return ((hi ** b - lo ** b) / b) / ((hi ** a - lo ** a) / a)


def _power_law_degrees(count: int, lo: float, hi: float, rng: np.random.Generator) -> np.ndarray:
    a = 1.0 - POWER_LAW_EXPONENT
    u = rng.random(count)
    d = (lo ** a + u * (hi ** a - lo ** a)) ** (1.0 / a)
    # pin the sample mean to the distribution mean so edge totals don't drift by seed
    return d * (power_law_mean(lo, hi) / d.mean())


def build_benchmark_params(spec: BenchmarkSpec) -> SbmParams:
    """Planted-partition DC-SBM hitting the knobs of a BenchmarkSpec.

    Block sizes span a ``size_heterogeneity`` max/min ratio.  Target degrees
    follow a power law truncated to ``degree_profile``; ``theta`` is the target
    degree over its block's degree total.  Between-block rates are
    ``beta * D_r * D_s / D``, and ``beta`` is solved in closed form so that
    expected within/between edge counts equal ``within_between_ratio``.  The
    diagonal is set so each node's expected degree matches its target.
    """
    n, k = spec.num_nodes, spec.num_blocks
    lo, hi = spec.profile
    if k < 1 or k > n:
        raise InfeasibleSpecError(f"cannot place {k} nonempty blocks on {n} nodes")
    if not 0 < lo <= hi:
        raise InfeasibleSpecError(f"degree profile {spec.profile} is not a valid range")
    if hi > n - 1:
        raise InfeasibleSpecError(f"max degree {hi} exceeds n - 1 = {n - 1}")
    rng = substream(spec.seed, GENERATION, "params")
    sizes = _block_sizes(n, k, spec.size_heterogeneity, rng)
    assignment = rng.permutation(np.repeat(np.arange(k, dtype=np.int64), sizes))
    target = _power_law_degrees(n, lo, hi, rng)
    block_deg = np.bincount(assignment, weights=target, minlength=k)
    theta = target / block_deg[assignment]
    total = block_deg.sum()
    if k == 1:
        return SbmParams(theta, assignment, np.array([[total]]))
    self_share = 1.0 - np.bincount(assignment, weights=theta ** 2, minlength=k)
    cross_mass = (total ** 2 - np.sum(block_deg ** 2)) / (2.0 * total)
    leak = block_deg * (total - block_deg) / total
    beta = np.sum(block_deg * self_share) / (
        2.0 * spec.within_between_ratio * cross_mass + np.sum(leak * self_share)
    )
    diag = block_deg - beta * leak
    if (diag < 0).any():
        raise InfeasibleSpecError(
            f"within/between ratio {spec.within_between_ratio} is too low for {k} blocks"
        )
    omega = beta * np.outer(block_deg, block_deg) / total
    np.fill_diagonal(omega, diag)
    omega = (omega + omega.T) / 2.0
    return SbmParams(theta, assignment, omega)
