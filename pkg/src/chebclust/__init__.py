"""Online clustering with a Chebyshev-inequality admission test.

Examples stream in random order; each is admitted to the cluster whose
regularized Mahalanobis deviation passes the admission threshold, or
founds a new cluster with its nearest unprocessed neighbour.  Because
the outcome depends on the ordering, the package also ships a seeded
resampling harness and density-based estimation of the stable cluster
count and reconstruction error, plus PPM image plumbing and a CLI.
"""

from ._version import __version__
from .chebyshev import (
    DeviationResult,
    SingularCovarianceError,
    admits,
    evaluate_deviation,
    lower_bound_confidence,
    mahalanobis_depth,
)
from .core import (
    Cluster,
    LearnerConfig,
    RunResult,
    cluster_from_examples,
    covariance,
    update_statistics,
)
from .density import (
    DensityEstimate,
    SweepRow,
    converged_estimates,
    count_histogram_mode,
    kde,
    sweep,
)
from .learner import (
    LearnerState,
    compute_err_val,
    nearest_unprocessed,
    process_example,
    run_sequence,
    select_cluster,
)
from .ppm import (
    AssignmentMismatchError,
    Image,
    PpmFormatError,
    Reconstruction,
    load,
    read_ppm,
    reconstruct,
    save,
    to_features,
    write_ppm,
)
from .sampler import SampleSummary, permutation, run_with_seed, sample_runs

__all__ = [
    "__version__",
    "AssignmentMismatchError",
    "Cluster",
    "DensityEstimate",
    "DeviationResult",
    "Image",
    "LearnerConfig",
    "LearnerState",
    "PpmFormatError",
    "Reconstruction",
    "RunResult",
    "SampleSummary",
    "SingularCovarianceError",
    "SweepRow",
    "admits",
    "cluster_from_examples",
    "compute_err_val",
    "converged_estimates",
    "count_histogram_mode",
    "covariance",
    "evaluate_deviation",
    "kde",
    "load",
    "lower_bound_confidence",
    "mahalanobis_depth",
    "nearest_unprocessed",
    "permutation",
    "process_example",
    "read_ppm",
    "reconstruct",
    "run_sequence",
    "run_with_seed",
    "sample_runs",
    "save",
    "select_cluster",
    "sweep",
    "to_features",
    "update_statistics",
    "write_ppm",
]
