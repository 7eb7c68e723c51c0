"""Domain types and incremental cluster statistics.

Feature vectors are plain 1-D float64 arrays; a dataset is an (M, N) array
with one example per row. Cluster statistics (mean and scatter matrix) are
maintained by a single-pass rank-1 update so that admission tests never need
a batch pass over the members.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def as_feature_array(x, n_dims: int | None = None) -> np.ndarray:
    """Validate and convert one example to a 1-D float64 array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"feature vector must be 1-D and non-empty, got shape {arr.shape}")
    if n_dims is not None and arr.size != n_dims:
        raise ValueError(f"feature vector has dimension {arr.size}, expected {n_dims}")
    if not np.isfinite(arr).all():
        raise ValueError("feature vector contains non-finite entries")
    return arr


def as_feature_matrix(data) -> np.ndarray:
    """Validate and convert a dataset to an (M, N) float64 array."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"dataset must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("dataset contains non-finite entries")
    return arr


@dataclass
class Cluster:
    """Running statistics of one cluster.

    `scatter` is the sum of outer products of member deviations from the
    mean, so the (population) covariance is ``scatter / count``.
    """

    id: int
    count: int
    mean: np.ndarray
    scatter: np.ndarray
    members: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class LearnerConfig:
    """Run parameters for the online learner.

    chebyshev_param is the admission threshold on the squared Mahalanobis
    deviation; ridge regularizes the covariance before inversion; seed
    drives the permutation generator (and, when enabled, the noisy cluster
    selection variant that picks uniformly among qualifying clusters).
    """

    chebyshev_param: float
    ridge: float = 1e-6
    seed: int = 0
    noisy_selection: bool = False

    def __post_init__(self):
        if not (self.chebyshev_param > 0 and np.isfinite(self.chebyshev_param)):
            raise ValueError("chebyshev_param must be a positive finite real")
        if not (self.ridge >= 0 and np.isfinite(self.ridge)):
            raise ValueError("ridge must be a non-negative finite real")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")

    def is_vacuous_for(self, n_dims: int) -> bool:
        """True when the admission bound 1 - n_dims/chebyshev_param is <= 0."""
        return self.chebyshev_param <= n_dims


@dataclass
class RunResult:
    """Outcome of clustering one full example sequence.

    err1_series holds (examples_processed, error_rate) pairs sampled once
    per processed example; err2_series holds (cluster_count, error_rate)
    pairs sampled at each cluster formation.  total_reconstruction_error is
    the mean per-example L2 deviation from the assigned cluster mean on the
    0-255 intensity scale.  cluster_count_upper_bound (floor(M/2) + 1,
    from pair-founded clusters) and err1_bound_diagnostic are reported as
    diagnostics only.
    """

    assignments: np.ndarray
    err1_series: list[tuple[int, float]]
    err2_series: list[tuple[int, float]]
    cluster_count: int
    total_reconstruction_error: float
    lower_bound_confidence: float
    cluster_means: np.ndarray
    cum_err_val: float
    vacuous_bound: bool
    cluster_count_upper_bound: float
    err1_bound_diagnostic: float


def update_statistics(cluster: Cluster, x, index: int) -> Cluster:
    """Return a new cluster with `x` (the example at `index`) appended.

    Mean and scatter are updated in O(N^2) with the centered rank-1 scheme;
    the result matches a batch recomputation over all members to within
    floating-point roundoff.
    """
    if cluster.count < 1:
        raise ValueError("cluster must have at least one member")
    x = as_feature_array(x, cluster.mean.size)
    old_count = cluster.count
    new_count = old_count + 1
    delta = x - cluster.mean
    mean = cluster.mean + delta / new_count
    # x - mean equals delta * old/new exactly, so the rank-1 increment is
    # symmetric by construction.
    scatter = cluster.scatter + np.outer(delta, delta) * (old_count / new_count)
    return Cluster(
        id=cluster.id,
        count=new_count,
        mean=mean,
        scatter=scatter,
        members=cluster.members + [int(index)],
    )


def covariance(cluster: Cluster) -> np.ndarray:
    """Population covariance of the cluster: scatter / count."""
    if cluster.count < 1:
        raise ValueError("cluster must have at least one member")
    return cluster.scatter / cluster.count


def cluster_from_examples(cluster_id: int, points, indices) -> Cluster:
    """Build a cluster directly from its member examples (batch statistics)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[0] == 0:
        raise ValueError("a cluster needs at least one member")
    members = [int(i) for i in indices]
    if len(members) != pts.shape[0]:
        raise ValueError("indices and points disagree in length")
    mean = pts.mean(axis=0)
    dev = pts - mean
    return Cluster(
        id=int(cluster_id),
        count=pts.shape[0],
        mean=mean,
        scatter=dev.T @ dev,
        members=members,
    )
