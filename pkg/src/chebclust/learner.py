"""The online clustering loop.

Examples arrive in a caller-supplied random order.  Each one is admitted
into the existing cluster with the lowest deviation among those passing
the Chebyshev test, or, when no cluster qualifies, founds a new cluster
together with its nearest unprocessed neighbour.  Cluster statistics
update incrementally and the Cholesky factor of each regularized
covariance is cached, refreshed only when its cluster changes, so one
step costs O(K * N^2) against K clusters instead of a factorization per
cluster per step.

The loop is strictly sequential by design; parallelism lives one level
up, across independent orderings (see the sampler module).
"""

from __future__ import annotations

import numpy as np

from .chebyshev import (
    SingularCovarianceError,
    depths_against_factors,
    lower_bound_confidence,
)
from .core import (
    LearnerConfig,
    Cluster,
    RunResult,
    as_feature_array,
    as_feature_matrix,
    cluster_from_examples,
)

_INITIAL_CAPACITY = 8

# Relative slack when picking an argmin.  A mathematically tied pair of
# distances (common on quantized pixel lattices) computes to floats a
# few ulps apart, and which lands lower depends on the data's absolute
# scale; anything inside this band counts as tied and the lowest index
# wins.  Genuinely distinct 8-bit distances sit >= ~5e-6 apart in
# relative terms, so the band never merges them.
_TIE_REL = 1e-9


class LearnerState:
    """Mutable state of one run.

    Cluster statistics live in packed arrays indexed by cluster id
    (mean, scatter, cached factor, member count, within-cluster error)
    so the per-step deviation pass is a single vectorized computation.
    ``cluster(q)`` materializes an immutable Cluster snapshot on demand.
    """

    __slots__ = (
        "example_count",
        "n_dims",
        "processed_count",
        "assignments",
        "err1_series",
        "err2_series",
        "cum_err_val",
        "noise_rng",
        "_k",
        "_means",
        "_scatters",
        "_factors",
        "_counts",
        "_errors",
        "_members",
        "_unprocessed",
        "_unprocessed_count",
    )

    def __init__(self, example_count: int, n_dims: int):
        if example_count < 1:
            raise ValueError("example_count must be at least 1")
        if n_dims < 1:
            raise ValueError("n_dims must be at least 1")
        self.example_count = int(example_count)
        self.n_dims = int(n_dims)
        self.processed_count = 0
        self.assignments = np.full(self.example_count, -1, dtype=np.int64)
        self.err1_series: list[tuple[int, float]] = []
        self.err2_series: list[tuple[int, float]] = []
        self.cum_err_val = 0.0
        self.noise_rng = None
        self._k = 0
        cap = _INITIAL_CAPACITY
        self._means = np.zeros((cap, n_dims))
        self._scatters = np.zeros((cap, n_dims, n_dims))
        self._factors = np.zeros((cap, n_dims, n_dims))
        self._counts = np.zeros(cap, dtype=np.int64)
        self._errors = np.zeros(cap)
        self._members: list[list[int]] = []
        self._unprocessed = np.ones(self.example_count, dtype=bool)
        self._unprocessed_count = self.example_count

    @property
    def cluster_count(self) -> int:
        return self._k

    @property
    def unprocessed(self) -> set:
        """Indices not yet assigned, as a plain set."""
        return {int(i) for i in np.flatnonzero(self._unprocessed)}

    def is_unprocessed(self, i: int) -> bool:
        return bool(self._unprocessed[i])

    def cluster(self, q: int) -> Cluster:
        """Snapshot of cluster q (copies, safe to hold across steps)."""
        if not 0 <= q < self._k:
            raise IndexError(f"no cluster with id {q}")
        return Cluster(
            id=q,
            count=int(self._counts[q]),
            mean=self._means[q].copy(),
            scatter=self._scatters[q].copy(),
            members=list(self._members[q]),
        )

    @property
    def clusters(self) -> list:
        return [self.cluster(q) for q in range(self._k)]

    def total_error(self) -> float:
        """Sum over clusters of summed member-to-mean L2 distances."""
        return float(self._errors[: self._k].sum())

    def _grow(self) -> None:
        cap = 2 * self._counts.shape[0]
        for name in ("_means", "_scatters", "_factors", "_counts", "_errors"):
            old = getattr(self, name)
            new = np.zeros((cap,) + old.shape[1:], dtype=old.dtype)
            new[: old.shape[0]] = old
            setattr(self, name, new)


def select_cluster(x, state: LearnerState, config: LearnerConfig):
    """Id of the qualifying cluster with the lowest deviation, or None.

    Qualifying means deviation strictly below the admission threshold;
    ties break to the lowest cluster id.  With ``noisy_selection`` the
    choice is instead uniform over the qualifying set (off by default).
    """
    k = state.cluster_count
    if k == 0:
        return None
    x = np.asarray(x, dtype=np.float64)
    depths = depths_against_factors(x, state._means[:k], state._factors[:k])
    qualifying = depths < config.chebyshev_param
    if not qualifying.any():
        return None
    if config.noisy_selection:
        if state.noise_rng is None:
            state.noise_rng = np.random.Generator(np.random.PCG64(config.seed).jumped())
        return int(state.noise_rng.choice(np.flatnonzero(qualifying)))
    masked = np.where(qualifying, depths, np.inf)
    best = float(masked.min())
    return int(np.flatnonzero(masked <= best * (1.0 + _TIE_REL))[0])


def nearest_unprocessed(x, state: LearnerState, data):
    """Index of the unprocessed example closest to x (Euclidean).

    Ties break to the lowest index.  Returns None when nothing is left
    unprocessed; the caller then forms a singleton cluster.
    """
    candidates = np.flatnonzero(state._unprocessed)
    if candidates.size == 0:
        return None
    diff = data[candidates] - x
    dist_sq = np.einsum("ij,ij->i", diff, diff)
    best = float(dist_sq.min())
    return int(candidates[np.flatnonzero(dist_sq <= best * (1.0 + _TIE_REL))[0]])


def _refresh_factor(state: LearnerState, q: int, ridge: float) -> None:
    # Same operation sequence as mahalanobis_depth so cached-factor and
    # single-shot deviations agree bit for bit.
    cov = state._scatters[q] / state._counts[q]
    if ridge:
        cov = cov + ridge * np.eye(state.n_dims)
    try:
        state._factors[q] = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise SingularCovarianceError(
            f"covariance of cluster {q} is singular (ridge={ridge})"
        ) from exc


def _refresh_error(state: LearnerState, q: int, data) -> None:
    members = np.asarray(state._members[q], dtype=np.int64)
    diff = data[members] - state._means[q]
    state._errors[q] = np.sqrt(np.einsum("ij,ij->i", diff, diff)).sum()


def _admit(state: LearnerState, q: int, x, i: int, data, config: LearnerConfig) -> None:
    old_count = int(state._counts[q])
    new_count = old_count + 1
    delta = x - state._means[q]
    state._means[q] = state._means[q] + delta / new_count
    state._scatters[q] = state._scatters[q] + np.outer(delta, delta) * (old_count / new_count)
    state._counts[q] = new_count
    state._members[q].append(i)
    state.assignments[i] = q
    _refresh_factor(state, q, config.ridge)
    _refresh_error(state, q, data)


def _found_cluster(state: LearnerState, indices, data, config: LearnerConfig) -> int:
    cid = state._k
    if cid == state._counts.shape[0]:
        state._grow()
    snapshot = cluster_from_examples(cid, data[np.asarray(indices, dtype=np.int64)], indices)
    state._means[cid] = snapshot.mean
    state._scatters[cid] = snapshot.scatter
    state._counts[cid] = snapshot.count
    state._members.append(list(indices))
    for idx in indices:
        state.assignments[idx] = cid
    state._k = cid + 1
    _refresh_factor(state, cid, config.ridge)
    _refresh_error(state, cid, data)
    return cid


def process_example(i: int, state: LearnerState, data, config: LearnerConfig) -> LearnerState:
    """Place example i and record error samples.

    Admits i into the best qualifying cluster when one exists; otherwise
    founds a new cluster from i and its nearest unprocessed neighbour
    (or from i alone when no neighbour remains).  Appends one sample to
    err1_series on every call and one to err2_series on cluster
    formation, both computed after the placement.  Mutates and returns
    the same state object.
    """
    i = int(i)
    if not 0 <= i < state.example_count:
        raise ValueError(f"example index {i} out of range")
    if not state._unprocessed[i]:
        raise ValueError(f"example {i} is not unprocessed")
    x = data[i]
    state._unprocessed[i] = False
    state._unprocessed_count -= 1

    q = select_cluster(x, state, config)
    founded = q is None
    if q is not None:
        _admit(state, q, x, i, data, config)
        state.processed_count += 1
    else:
        j = nearest_unprocessed(x, state, data)
        if j is None:
            _found_cluster(state, [i], data, config)
            state.processed_count += 1
        else:
            state._unprocessed[j] = False
            state._unprocessed_count -= 1
            _found_cluster(state, [i, j], data, config)
            state.processed_count += 2

    total = state.total_error()
    if founded:
        state.err2_series.append((state.cluster_count, total / state.processed_count))
    state.err1_series.append((state.processed_count, total / state.processed_count))
    state.cum_err_val += total
    return state


def compute_err_val(state: LearnerState, data) -> float:
    """Total within-cluster deviation, recomputed from scratch.

    Sum over clusters of the summed L2 distances of members to their
    cluster mean.  The loop tracks the same quantity incrementally; this
    is the reference form.
    """
    if state.cluster_count < 1:
        raise ValueError("need at least one cluster")
    total = 0.0
    for q in range(state.cluster_count):
        members = np.asarray(state._members[q], dtype=np.int64)
        diff = data[members] - state._means[q]
        total += float(np.sqrt(np.einsum("ij,ij->i", diff, diff)).sum())
    return total


def run_sequence(data, permutation, config: LearnerConfig) -> RunResult:
    """Process every example in the given order and summarize the run.

    ``permutation`` must be a bijection on 0..M-1 with M >= 2.  Indices
    already consumed as nearest-neighbour partners are skipped when
    their turn comes.  Deterministic: equal inputs give bit-identical
    results.
    """
    data = as_feature_matrix(data)
    m, n_dims = data.shape
    if m < 2:
        raise ValueError("need at least 2 examples")
    perm = np.asarray(permutation, dtype=np.int64)
    if perm.shape != (m,) or not np.array_equal(np.sort(perm), np.arange(m)):
        raise ValueError("permutation must be a bijection on 0..M-1")

    state = LearnerState(m, n_dims)
    for i in perm:
        if not state._unprocessed[i]:
            continue
        process_example(int(i), state, data, config)
    return finalize_result(state, data, config)


def finalize_result(state: LearnerState, data, config: LearnerConfig) -> RunResult:
    """Freeze a finished state into a RunResult."""
    k = state.cluster_count
    if k < 1:
        raise ValueError("run produced no clusters")
    m = state.example_count
    total = state.total_error()

    # Diagnostic only: threshold divided by the smallest determinant of
    # the inverse regularized covariances, an upper-bound heuristic on
    # the per-example error.  Reported, never asserted.
    factor_diags = np.diagonal(state._factors[:k], axis1=1, axis2=2)
    cov_dets = factor_diags.prod(axis=1) ** 2
    with np.errstate(divide="ignore"):
        inverse_dets = 1.0 / cov_dets
    diagnostic = config.chebyshev_param / inverse_dets.min() if np.all(cov_dets > 0) else 0.0

    return RunResult(
        assignments=state.assignments.copy(),
        err1_series=list(state.err1_series),
        err2_series=list(state.err2_series),
        cluster_count=k,
        total_reconstruction_error=255.0 * total / m,
        lower_bound_confidence=lower_bound_confidence(config, state.n_dims),
        cluster_means=state._means[:k].copy(),
        cum_err_val=state.cum_err_val,
        vacuous_bound=config.is_vacuous_for(state.n_dims),
        cluster_count_upper_bound=m // 2 + 1,
        err1_bound_diagnostic=diagnostic,
    )
