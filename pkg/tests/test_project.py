import numpy as np
import pytest

from granttopics.project import (
    CalibrationError,
    ProjectionError,
    TsneConfig,
    calibrate_affinities,
    kl_divergence,
    kl_gradient,
    pca_init,
    tsne_project,
    write_kl_log,
    write_projection_csv,
)


class TestCalibrateAffinities:
    def test_three_equidistant_points_uniform_rows(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
        p, _ = calibrate_affinities(points, 2.0)
        # each conditional row is (1/2, 1/2); the symmetrized joint is 1/6 off-diagonal
        off = p[~np.eye(3, dtype=bool)]
        np.testing.assert_allclose(off, 1.0 / 6.0, rtol=1e-12)

    def test_symmetric_nonnegative_sums_to_one(self):
        rng = np.random.default_rng(0)
        points = rng.standard_normal((40, 5))
        p, _ = calibrate_affinities(points, 10.0)
        assert (p == p.T).all()
        assert (p >= 0).all()
        assert abs(p.sum() - 1.0) <= 1e-9

    def test_row_entropy_hits_target(self):
        rng = np.random.default_rng(1)
        points = rng.standard_normal((100, 10))
        perplexity = 30.0
        _, sigmas = calibrate_affinities(points, perplexity)
        # recompute each conditional row from the returned sigma
        d2 = ((points[:, None, :] - points[None, :, :]) ** 2).sum(-1)
        for i in range(100):
            beta = 1.0 / (2.0 * sigmas[i] ** 2)
            row = np.delete(d2[i], i)
            w = np.exp(-beta * (row - row.min()))
            prob = w / w.sum()
            entropy = -(prob * np.log2(prob)).sum()
            assert abs(entropy - np.log2(perplexity)) <= 1e-3

    def test_unreachable_perplexity_errors_with_row(self):
        points = np.array([[0.0], [0.0], [0.0], [1.0]])
        # rows of duplicated points have constant entropy; target can't be met
        with pytest.raises((CalibrationError, ValueError)):
            calibrate_affinities(points, 2.5)

    def test_perplexity_bounds(self):
        points = np.zeros((5, 2))
        with pytest.raises(ValueError):
            calibrate_affinities(points, 1.0)
        with pytest.raises(ValueError):
            calibrate_affinities(points, 10.0)


class TestGradient:
    def test_matches_central_finite_differences(self):
        rng = np.random.default_rng(2)
        for trial in range(3):
            points = rng.standard_normal((10, 4))
            p, _ = calibrate_affinities(points, 3.0)
            y = rng.standard_normal((10, 2))
            grad = kl_gradient(p, y)
            fd = np.zeros_like(y)
            h = 1e-6
            for i in range(10):
                for j in range(2):
                    up = y.copy()
                    up[i, j] += h
                    down = y.copy()
                    down[i, j] -= h
                    fd[i, j] = (kl_divergence(p, up) - kl_divergence(p, down)) / (2 * h)
            rel = np.linalg.norm(fd - grad) / np.linalg.norm(fd)
            assert rel <= 1e-4


class TestTsneProject:
    def test_bitwise_deterministic(self):
        rng = np.random.default_rng(3)
        points = rng.standard_normal((30, 6))
        config = TsneConfig(perplexity=8.0, iterations=120)
        a = tsne_project(points, config)
        b = tsne_project(points, config)
        assert (a.points == b.points).all()
        assert a.final_kl == b.final_kl

    def test_kl_improves_after_exaggeration(self):
        rng = np.random.default_rng(4)
        points = rng.standard_normal((60, 8))
        proj = tsne_project(points, TsneConfig(perplexity=15.0, iterations=1000))
        checkpoints = dict(proj.kl_trace)
        assert checkpoints[1000] < checkpoints[250]

    def test_two_blobs_separate(self):
        rng = np.random.default_rng(5)
        blobs = np.vstack(
            [rng.standard_normal((50, 8)) + 12.0, rng.standard_normal((50, 8)) - 12.0]
        )
        proj = tsne_project(blobs, TsneConfig(perplexity=30.0, iterations=1000))
        a, b = proj.points[:50], proj.points[50:]
        separation = np.linalg.norm(a.mean(axis=0) - b.mean(axis=0))
        spread = (
            np.linalg.norm(a - a.mean(axis=0), axis=1).mean()
            + np.linalg.norm(b - b.mean(axis=0), axis=1).mean()
        ) / 2
        assert separation > 5.0 * spread

    def test_row_count_and_alignment(self):
        rng = np.random.default_rng(6)
        points = rng.standard_normal((25, 5))
        proj = tsne_project(points, TsneConfig(perplexity=5.0, iterations=60))
        assert proj.points.shape == (25, 2)
        assert np.isfinite(proj.points).all()
        # output centered at the origin
        np.testing.assert_allclose(proj.points.mean(axis=0), 0.0, atol=1e-9)

    def test_nan_overflow_reports_iteration(self):
        rng = np.random.default_rng(7)
        points = rng.standard_normal((20, 4))
        with pytest.raises(ProjectionError) as err:
            tsne_project(points, TsneConfig(perplexity=5.0, iterations=300, learning_rate=1e300))
        assert err.value.iteration >= 1

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TsneConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            TsneConfig(perplexity=1.0)
        rng = np.random.default_rng(8)
        with pytest.raises(ValueError, match="n/3"):
            tsne_project(rng.standard_normal((12, 3)), TsneConfig(perplexity=6.0))


class TestPcaInit:
    def test_first_column_std_scaled(self):
        rng = np.random.default_rng(9)
        points = rng.standard_normal((50, 10))
        init = pca_init(points)
        assert init.shape == (50, 2)
        assert np.std(init[:, 0]) == pytest.approx(1e-4, rel=1e-9)

    def test_degenerate_input_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            pca_init(np.ones((10, 3)))


def test_projection_csv_and_kl_log(tmp_path):
    rng = np.random.default_rng(10)
    points = rng.standard_normal((12, 4))
    proj = tsne_project(points, TsneConfig(perplexity=3.0, iterations=60))
    ids = [f"r{i}" for i in range(12)]
    labels = np.arange(12) % 3
    write_projection_csv(tmp_path / "p.csv", ids, proj, labels)
    lines = (tmp_path / "p.csv").read_text().strip().splitlines()
    assert lines[0] == "record_id,x,y,cluster_label"
    assert len(lines) == 13
    first = lines[1].split(",")
    assert first[0] == "r0"
    assert float(first[1]) == proj.points[0, 0]  # shortest round-trip repr
    write_kl_log(tmp_path / "kl.csv", proj)
    assert (tmp_path / "kl.csv").read_text().startswith("iteration,kl")
