"""Behavioral tests for the online clustering loop.

The heavy lifting is checking invariants that hold for every ordering:
partitions stay consistent, error series shapes line up with what the
loop did, small constructed datasets land in provable outcomes.
"""

from itertools import permutations as all_orderings

import numpy as np
import pytest

from chebclust.core import LearnerConfig
from chebclust.learner import (
    LearnerState,
    compute_err_val,
    nearest_unprocessed,
    process_example,
    run_sequence,
)
from chebclust.ppm import to_features
from chebclust.sampler import permutation
from chebclust.synth import textured_image, two_color_image
from helpers import check_partition, err_val_direct


@pytest.fixture(scope="module")
def small_features():
    return to_features(textured_image(16, 16, seed=2))


def test_two_color_image_always_two_clusters():
    """Every ordering of a 6-pixel two-tone image gives exactly 2 clusters.

    The tones are so far apart that cross-admission is impossible while
    same-tone copies sit at zero deviation, so the outcome is invariant
    to the ordering; this exercises founding, admission, and the
    consumed-partner skip in one sweep.
    """
    features = to_features(two_color_image(3, 2))
    config = LearnerConfig(chebyshev_param=7.0)
    for order in all_orderings(range(6)):
        result = run_sequence(features, np.array(order), config)
        assert result.cluster_count == 2
        check_partition(result, features)
        # tone groups must not mix
        assert len(set(result.assignments[features[:, 0] < 0.5])) == 1
        assert len(set(result.assignments[features[:, 0] > 0.5])) == 1


def test_partition_and_error_accounting(small_features):
    config = LearnerConfig(chebyshev_param=7.0)
    result = run_sequence(small_features, permutation(256, 9), config)
    check_partition(result, small_features)

    # the incremental total matches a from-scratch recomputation
    want_total = err_val_direct(small_features, result.assignments)
    assert result.total_reconstruction_error == pytest.approx(
        255.0 * want_total / 256, rel=1e-9
    )
    # final err1 sample is the same quantity scaled by M
    processed, rate = result.err1_series[-1]
    assert processed == 256
    assert rate == pytest.approx(want_total / 256, rel=1e-9)


def test_error_series_shapes(small_features):
    config = LearnerConfig(chebyshev_param=7.0)
    result = run_sequence(small_features, permutation(256, 4), config)

    processed = np.array([p for p, _ in result.err1_series])
    rates = np.array([v for _, v in result.err1_series])
    assert (np.diff(processed) >= 1).all()
    assert processed[-1] == 256
    assert (rates >= 0).all()

    # one err2 sample per founded cluster, labelled 1..K in order
    counts = [k for k, _ in result.err2_series]
    assert counts == list(range(1, result.cluster_count + 1))

    # err1 samples: one per loop step; pair foundings consume two examples
    pair_foundings = 256 - len(result.err1_series)
    assert 0 <= pair_foundings <= result.cluster_count


def test_cum_err_val_accumulates_the_series(small_features):
    config = LearnerConfig(chebyshev_param=7.0)
    result = run_sequence(small_features, permutation(256, 4), config)
    want = sum(p * v for p, v in result.err1_series)
    assert result.cum_err_val == pytest.approx(want, rel=1e-12)


def test_run_sequence_deterministic(small_features):
    config = LearnerConfig(chebyshev_param=7.0)
    order = permutation(256, 13)
    a = run_sequence(small_features, order, config)
    b = run_sequence(small_features, order, config)
    assert np.array_equal(a.assignments, b.assignments)
    assert a.err1_series == b.err1_series
    assert a.err2_series == b.err2_series
    assert a.total_reconstruction_error == b.total_reconstruction_error
    assert a.cum_err_val == b.cum_err_val


def test_permutation_validation(small_features):
    config = LearnerConfig(chebyshev_param=7.0)
    with pytest.raises(ValueError):
        run_sequence(small_features, np.arange(10), config)
    bad = np.arange(256)
    bad[0] = 1  # duplicate
    with pytest.raises(ValueError):
        run_sequence(small_features, bad, config)
    with pytest.raises(ValueError):
        run_sequence(small_features[:1], np.array([0]), config)


def test_singleton_cluster_when_nothing_is_left():
    """An outlier whose turn comes last founds alone."""
    data = np.array([[0.0], [0.05], [100.0]])
    config = LearnerConfig(chebyshev_param=3.0)
    result = run_sequence(data, np.array([0, 1, 2]), config)
    # 0 pairs with 1; the far point can't be admitted and has no partner
    assert result.cluster_count == 2
    assert result.assignments[2] != result.assignments[0]
    sizes = np.bincount(result.assignments)
    assert sorted(sizes.tolist()) == [1, 2]


def test_nearest_neighbour_tie_breaks_to_lowest_index():
    data = np.array([[0.0], [1.0], [-1.0]])
    config = LearnerConfig(chebyshev_param=0.5)
    result = run_sequence(data, np.array([0, 1, 2]), config)
    # indices 1 and 2 are equidistant from 0; the pair must take index 1
    assert result.assignments[0] == result.assignments[1]
    assert result.assignments[2] != result.assignments[0]


def test_nearest_unprocessed_empty_returns_none():
    state = LearnerState(2, 1)
    state._unprocessed[:] = False
    assert nearest_unprocessed(np.array([0.0]), state, np.zeros((2, 1))) is None


def test_process_example_rejects_bad_indices(small_features):
    state = LearnerState(256, 3)
    config = LearnerConfig(chebyshev_param=7.0)
    with pytest.raises(ValueError):
        process_example(256, state, small_features, config)
    process_example(0, state, small_features, config)
    with pytest.raises(ValueError):
        process_example(0, state, small_features, config)


def test_compute_err_val_matches_running_total(small_features):
    config = LearnerConfig(chebyshev_param=7.0)
    state = LearnerState(256, 3)
    for i in permutation(256, 21):
        if state.is_unprocessed(int(i)):
            process_example(int(i), state, small_features, config)
    assert compute_err_val(state, small_features) == pytest.approx(
        state.total_error(), rel=1e-9, abs=1e-12
    )


def test_cluster_snapshots_are_copies(small_features):
    config = LearnerConfig(chebyshev_param=7.0)
    state = LearnerState(256, 3)
    for i in range(8):
        process_example(i, state, small_features, config)
    snap = state.cluster(0)
    snap.mean[:] = 99.0
    snap.members.append(123)
    assert state.cluster(0).mean.max() < 2.0
    assert 123 not in state.cluster(0).members
    with pytest.raises(IndexError):
        state.cluster(state.cluster_count)


def test_vacuous_bound_flag(small_features):
    order = permutation(256, 0)
    tight = run_sequence(small_features, order, LearnerConfig(chebyshev_param=2.5))
    loose = run_sequence(small_features, order, LearnerConfig(chebyshev_param=9.0))
    assert tight.vacuous_bound and tight.lower_bound_confidence < 0
    assert not loose.vacuous_bound
    assert loose.lower_bound_confidence == pytest.approx(1 - 3 / 9.0)


def test_count_bound_and_diagnostic(small_features):
    config = LearnerConfig(chebyshev_param=5.0)
    result = run_sequence(small_features, permutation(256, 3), config)
    assert result.cluster_count_upper_bound == 129
    assert result.cluster_count <= 129
    assert result.err1_bound_diagnostic > 0


def test_noisy_selection_is_reproducible(small_features):
    config = LearnerConfig(chebyshev_param=9.0, seed=17, noisy_selection=True)
    order = permutation(256, 17)
    a = run_sequence(small_features, order, config)
    b = run_sequence(small_features, order, config)
    assert np.array_equal(a.assignments, b.assignments)
    check_partition(a, small_features)


def test_scale_invariance_single_image(small_features):
    base = run_sequence(
        small_features, permutation(256, 5), LearnerConfig(chebyshev_param=7.0)
    )
    scaled = run_sequence(
        small_features * 255.0,
        permutation(256, 5),
        LearnerConfig(chebyshev_param=7.0, ridge=1e-6 * 255.0**2),
    )
    assert np.array_equal(base.assignments, scaled.assignments)
