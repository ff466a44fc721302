import numpy as np
import pytest

import simspace


def euclidean(points):
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def test_pava_pools_violators():
    fitted, sse = simspace.pava([3.0, 1.0, 2.0])
    assert fitted == pytest.approx([2.0, 2.0, 2.0])
    assert sse == pytest.approx(2.0)


def test_pava_weighted():
    fitted, _ = simspace.pava([2.0, 0.0], weights=[3.0, 1.0])
    assert fitted == pytest.approx([1.5, 1.5])


def test_correlations():
    x = [1.0, 2.0, 3.0, 4.0]
    assert simspace.pearson(x, [2 * v + 1 for v in x]) == pytest.approx(1.0)
    assert simspace.spearman(x, [v**3 for v in x]) == pytest.approx(1.0)
    assert simspace.fractional_ranks([5.0, 1.0, 5.0]) == pytest.approx([2.5, 1.0, 2.5])


def test_mds_recovers_planar_points():
    rng = np.random.default_rng(3)
    delta = euclidean(rng.uniform(-1, 1, size=(10, 2)))
    fit = simspace.fit_mds(delta, mode="metric", dims=2, restarts=8, seed=1)
    assert fit["coords"].shape == (10, 2)
    assert fit["stress"] < 1e-3
    assert fit["stress"] == pytest.approx(min(fit["restart_stresses"]))
    again = simspace.evaluate_stress(fit["coords"], delta, mode="metric")
    assert again == pytest.approx(fit["stress"], abs=1e-12)


def test_mds_is_deterministic():
    rng = np.random.default_rng(4)
    delta = euclidean(rng.uniform(size=(8, 3)))
    a = simspace.fit_mds(delta, mode="nonmetric", dims=2, restarts=4, seed=9)
    b = simspace.fit_mds(delta, mode="nonmetric", dims=2, restarts=4, seed=9)
    np.testing.assert_array_equal(a["coords"], b["coords"])


def test_dimension_sweep_rows():
    rng = np.random.default_rng(5)
    delta = euclidean(rng.uniform(size=(9, 3)))
    rows = simspace.dimension_sweep(delta, 1, 3, restarts=4, seed=2)
    assert [r["dims"] for r in rows] == [1, 2, 3]
    assert all(r["nonmetric_stress"] == r["stress"] for r in rows)


def test_pairwise_distances_and_shift():
    rows = np.array([[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]])
    matrix, shift = simspace.pairwise_distances(rows)
    assert matrix[0, 1] == pytest.approx(5.0)
    assert shift == 0.0
    matrix, shift = simspace.pairwise_distances(rows, metric="inner_product")
    assert (matrix >= 0).all()
    assert shift == pytest.approx(7.0)


def test_correlation_analysis_self():
    rng = np.random.default_rng(6)
    rows = rng.uniform(size=(8, 3))
    report = simspace.correlation_analysis(rows, euclidean(rows), metric="euclidean", weighting="none")
    assert report["pearson_r"] == pytest.approx(1.0)
    assert report["n_pairs"] == 28


def test_nnls_clips_negative_direction():
    x, residual = simspace.nnls(np.eye(2), np.array([1.0, -1.0]))
    assert x == pytest.approx([1.0, 0.0])
    assert residual == pytest.approx(1.0)


def test_block_downscale():
    image = np.array([[0.0, 0.2, 1.0, 1.0],
                      [0.4, 0.2, 1.0, 1.0]])
    assert simspace.block_downscale(image, 2, "max") == pytest.approx([0.4, 1.0])
    assert simspace.block_downscale(image, 2, "mean") == pytest.approx([0.2, 1.0])


def test_fit_linear_exact():
    x = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = 2.0 * x + 1.0
    intercept, weights = simspace.fit_linear(x, y)
    assert intercept == pytest.approx([1.0])
    assert weights[0, 0] == pytest.approx(2.0)
    metrics = simspace.evaluate(y, y)
    assert metrics["mse"] == 0.0 and metrics["r_squared"] == 1.0


def test_lasso_shrinks():
    x = np.array([[0.0], [1.0], [2.0], [3.0]])
    _, w0 = simspace.fit_lasso(x, 2.0 * x, 0.0)
    _, w1 = simspace.fit_lasso(x, 2.0 * x, 1.0)
    assert abs(w1[0, 0]) < abs(w0[0, 0])


def test_normalize_configuration():
    coords = simspace.normalize_configuration(np.array([[0.0, 0.0], [2.0, 0.0], [4.0, 6.0]]))
    assert coords.mean(axis=0) == pytest.approx([0.0, 0.0])


def test_cross_validation_correct_beats_shuffled():
    rng = np.random.default_rng(7)
    groups, reps = 16, 3
    points = {f"g{i}": rng.normal(size=2) for i in range(groups)}
    mix = rng.normal(size=(2, 5))
    ids, rows = [], []
    for g, p in points.items():
        for _ in range(reps):
            ids.append(g)
            rows.append(p @ mix + 0.01 * rng.normal(size=5))
    features = np.array(rows)
    good = simspace.grouped_cross_validation(features, ids, points, folds=4, seed=1)
    bad = simspace.grouped_cross_validation(features, ids, points, folds=4, seed=1, shuffle_seed=11)
    assert good["test"]["r_squared"] > 0.95
    assert bad["shuffled"] and bad["test"]["r_squared"] < good["test"]["r_squared"]
    assert good["predictions"].shape == (groups * reps, 2)


def test_errors_are_raised():
    with pytest.raises(simspace.SimspaceError):
        simspace.pava([])
    with pytest.raises(simspace.SimspaceError):
        simspace.fit_mds(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError):
        simspace.block_downscale(np.zeros((4, 4)), 5, "mean")
