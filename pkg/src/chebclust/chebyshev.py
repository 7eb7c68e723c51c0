"""Mahalanobis-type deviation and the Chebyshev admission test.

The deviation of an example x from a cluster with mean m and covariance S is
the quadratic form (x - m)^T (S + ridge*I)^(-1) (x - m), evaluated by
Cholesky factor-and-solve rather than explicit inversion.  An example is
admitted when the deviation falls strictly below the Chebyshev parameter,
which carries the probabilistic lower bound 1 - N/chebyshev_param.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Cluster, LearnerConfig, as_feature_array, covariance


class SingularCovarianceError(ArithmeticError):
    """Covariance matrix could not be factored (singular and ridge too small)."""


@dataclass(frozen=True)
class DeviationResult:
    """Deviation of one example from one cluster, with the admission verdict."""

    depth: float
    cluster_id: int
    admitted: bool


def solve_lower_triangular(factors: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Forward substitution for a stack of lower-triangular systems.

    factors has shape (K, N, N), rhs (K, N); returns z with L_k z_k = rhs_k.
    """
    n = rhs.shape[1]
    z = np.empty_like(rhs)
    for r in range(n):
        acc = rhs[:, r].copy()
        for c in range(r):
            acc -= factors[:, r, c] * z[:, c]
        z[:, r] = acc / factors[:, r, r]
    return z


def depths_against_factors(x: np.ndarray, means: np.ndarray, factors: np.ndarray) -> np.ndarray:
    """Deviation of x against K clusters given Cholesky factors of their covariances.

    Returns a length-K array of quadratic-form values; each is a sum of
    squares, so the result is non-negative by construction.
    """
    z = solve_lower_triangular(factors, x[np.newaxis, :] - means)
    return (z * z).sum(axis=1)


def mahalanobis_depth(x, cluster: Cluster, ridge: float) -> float:
    """Quadratic-form deviation of x from the cluster mean.

    The covariance is regularized to S + ridge*I before factoring; with
    ridge = 0 a singular covariance raises SingularCovarianceError.
    """
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    x = as_feature_array(x, cluster.mean.size)
    cov = covariance(cluster)
    if ridge:
        cov = cov + ridge * np.eye(cov.shape[0])
    try:
        factor = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise SingularCovarianceError(
            f"covariance of cluster {cluster.id} is singular (ridge={ridge})"
        ) from exc
    depth = depths_against_factors(x, cluster.mean[np.newaxis, :], factor[np.newaxis, :, :])[0]
    if not np.isfinite(depth):
        raise SingularCovarianceError(
            f"non-finite deviation for cluster {cluster.id} (ridge={ridge})"
        )
    return float(depth)


def admits(depth: float, config: LearnerConfig) -> bool:
    """Admission test: strictly below the Chebyshev parameter."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    return depth < config.chebyshev_param


def lower_bound_confidence(config: LearnerConfig, n_dims: int) -> float:
    """Chebyshev lower bound 1 - n_dims/chebyshev_param on the admission event.

    Negative values mean the bound is vacuous (chebyshev_param < n_dims).
    """
    if n_dims < 1:
        raise ValueError("n_dims must be at least 1")
    return 1.0 - n_dims / config.chebyshev_param


def evaluate_deviation(x, cluster: Cluster, config: LearnerConfig) -> DeviationResult:
    """Compute the deviation of x from one cluster and apply the admission test."""
    depth = mahalanobis_depth(x, cluster, config.ridge)
    return DeviationResult(depth=depth, cluster_id=cluster.id, admitted=admits(depth, config))
