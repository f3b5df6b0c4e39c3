"""End-to-end smoke tests for the Python bindings: every exposed operation
runs once on small data and returns sane values."""

import numpy as np
import pytest

import robustlsq as rl


def make_batches(p=5, n=80, m=6, gamma=0.2, sigma=0.0, seed=3):
    spec = rl.SynthSpec(p=p, n=n, m=m, gamma=gamma, sigma=sigma, seed=seed)
    return rl.generate(spec)


def test_generate_shapes_and_determinism():
    truth, batches = make_batches()
    assert len(batches) == 6
    assert batches[0].x.shape == (5, 80)
    assert batches[0].y.shape == (80,)
    assert [b.id for b in batches] == list(range(6))
    assert truth.beta_star.vec.shape == (5,)
    assert len(truth.uncorrupted_sets) == 6

    truth2, batches2 = make_batches()
    np.testing.assert_array_equal(batches[0].y, batches2[0].y)
    np.testing.assert_array_equal(truth.beta_star.vec, truth2.beta_star.vec)


def test_hrr_fit_recovers_noiseless_batch():
    truth, batches = make_batches()
    result = rl.hrr_fit(batches[0])
    assert result.converged
    assert rl.l2_error(result.beta, truth.beta_star) < 1e-8
    clean = truth.uncorrupted_sets[0]
    assert all(i in clean for i in result.uncorrupted.indices)


def test_drlr_fit_consolidates():
    truth, batches = make_batches()
    report = rl.drlr_fit(batches)
    assert rl.l2_error(report.consolidated, truth.beta_star) < 1e-8
    assert len(report.pool) == 6
    assert report.failed_batch_ids == []
    assert len(report.dominating.members) == 4  # floor(6/2) + 1
    assert report.dominating.pivot in report.dominating


def test_orlr_stream_matches_truth():
    truth, batches = make_batches(m=8)
    result = rl.orlr_init(batches[:4], capacity=4)
    for batch in batches[4:]:
        result = rl.orlr_update(result.state, batch)
    assert rl.l2_error(result.consolidated, truth.beta_star) < 1e-8
    assert result.state.next_batch_id == 8
    assert len(result.state.pool) == 4  # capacity bound holds


def test_admit_estimate_swaps_into_pool():
    _, batches = make_batches(m=5)
    result = rl.orlr_init(batches, capacity=5)
    incoming = rl.Coefficients(np.full(5, 100.0))
    updated = rl.admit_estimate(result.state, incoming)
    assert len(updated.state.pool) == 5
    ids = [updated.state.pool.batch_id(i) for i in range(5)]
    assert max(ids) == 5  # the admitted estimate took the next stream id


def test_consolidate_ignores_outlier_estimates():
    rng = np.random.default_rng(0)
    center = rng.normal(size=4)
    pool = rl.EstimatePool(7)
    for i in range(7):
        offset = rng.normal(size=4) * (1e-3 if i < 5 else 1e4)
        pool.append(i, rl.Coefficients(center + offset))
    estimate, dominating = rl.consolidate(pool)
    assert np.linalg.norm(estimate.vec - center) < 0.01
    assert len(dominating.members) == 4
    assert all(member < 5 for member in dominating.members)


def test_geometric_median_minimizes_distance_sum():
    points = [rl.Coefficients(np.array([x, 0.0])) for x in (-1.0, 0.0, 1.0, 0.2)]
    median = rl.geometric_median(points)
    objective = sum(np.linalg.norm(median.vec - p.vec) for p in points)
    for p in points:
        competing = sum(np.linalg.norm(p.vec - q.vec) for q in points)
        assert objective <= competing + 1e-9


def test_inject_corruption_touches_requested_fraction():
    y = np.linspace(1.0, 2.0, 100)
    corrupted, positions = rl.inject_corruption(y, ratio=0.3, seed=11)
    assert len(positions) == 30
    changed = np.flatnonzero(corrupted != y)
    assert set(changed) <= set(positions.indices)
    untouched = sorted(set(range(100)) - set(positions.indices))
    np.testing.assert_array_equal(corrupted[untouched], y[untouched])


def test_metrics_and_baselines():
    truth, batches = make_batches(sigma=0.1, seed=9)
    pred = rl.predict(batches[0], truth.beta_star)
    assert rl.mae(pred, pred) == 0.0
    ols = rl.baseline_ols_avg(batches)
    hrr = rl.baseline_hrr_avg(batches)
    drlr = rl.drlr_fit(batches).consolidated
    assert rl.l2_error(drlr, truth.beta_star) <= rl.l2_error(ols, truth.beta_star)
    assert rl.l2_error(hrr, truth.beta_star) < 1.0


def test_k_heavy_layout_round_trip():
    layout = rl.KHeavyLayout(k=2)
    gamma = rl.k_heavy_gamma(layout, n=100, m=5)
    spec = rl.SynthSpec(p=3, n=100, m=5, gamma=gamma, sigma=0.0, layout=layout, seed=4)
    truth, batches = rl.generate(spec)
    heavy = sum(1 for s in truth.uncorrupted_sets if len(s) <= 100 - 90)
    assert heavy == 2
    assert isinstance(spec.layout, rl.KHeavyLayout)


def test_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        rl.Coefficients(np.array([1.0, np.nan]))
    with pytest.raises(rl.NumericalError):
        rl.baseline_ols_avg(
            [rl.MiniBatch(np.zeros((3, 8)), np.ones(8), 0)]
        )
    with pytest.raises(ValueError):
        rl.generate(rl.SynthSpec(p=0))
