import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from audiorep.metrics import (
    EmbeddingSet,
    GaussianStats,
    KernelParams,
    ProbMatrix,
    fad,
    frechet_distance,
    gaussian_stats,
    imq_kernel,
    inception_score,
    kid,
    mmd2_unbiased,
)
from helpers import diagonal_frechet, naive_mmd2, two_pass_stats


def embedding(rows) -> EmbeddingSet:
    return EmbeddingSet(np.asarray(rows, dtype=np.float64))


class TestImqKernel:
    def test_identical_points(self):
        x = np.arange(8.0)
        assert imq_kernel(x, x) == 1.0

    def test_known_value(self):
        x = np.zeros(4)
        y = np.array([2.0, 2.0, 2.0, 2.0])  # squared distance 16, gamma_sq 8
        assert imq_kernel(x, y) == pytest.approx(0.5, abs=1e-15)

    def test_monotone_decay_to_zero(self):
        x = np.zeros(2)
        values = [imq_kernel(x, np.array([d, 0.0])) for d in (1.0, 10.0, 100.0, 1000.0)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-4

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            imq_kernel(np.zeros(3), np.zeros(4))

    @given(
        st.lists(st.floats(-100, 100), min_size=1, max_size=8),
        st.lists(st.floats(-100, 100), min_size=1, max_size=8),
    )
    def test_range(self, a, b):
        n = min(len(a), len(b))
        value = imq_kernel(np.array(a[:n]), np.array(b[:n]))
        assert 0.0 < value <= 1.0

    def test_gram_positive_definite(self):
        rng = np.random.default_rng(0)
        pts = rng.standard_normal((20, 6))
        gram = np.array([[imq_kernel(a, b) for b in pts] for a in pts])
        assert np.linalg.eigvalsh(gram).min() >= -1e-8


class TestMmd2:
    def test_identical_points_give_zero(self):
        a = np.array([1.0, 2.0, 3.0])
        assert mmd2_unbiased(embedding([a, a]), embedding([a, a])) == pytest.approx(0.0, abs=1e-15)

    def test_two_point_hand_expansion(self):
        a, b = np.zeros(3), np.array([1.0, 2.0, 2.0])  # squared distance 9
        k_ab = 1.0 / (1.0 + 9.0 / 16.0)
        got = mmd2_unbiased(embedding([a, b]), embedding([a, b]))
        assert got == pytest.approx(k_ab - 1.0, abs=1e-15)
        assert got < 0

    def test_matches_triple_loop_oracle(self):
        rng = np.random.default_rng(1)
        for trial in range(5):
            x = rng.standard_normal((50, 8))
            y = x[rng.permutation(50)]
            expected = naive_mmd2(x, y)
            got = mmd2_unbiased(embedding(x), embedding(y))
            assert abs(got - expected) <= 1e-12

    def test_rejects_single_sample(self):
        with pytest.raises(ValueError):
            mmd2_unbiased(embedding([[1.0, 2.0]]), embedding([[1.0, 2.0], [3.0, 4.0]]))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mmd2_unbiased(embedding(np.zeros((3, 2))), embedding(np.zeros((3, 4))))

    def test_disjoint_halves_within_bootstrap_band(self):
        # sanity: same-distribution MMD is statistically indistinguishable from 0
        rng = np.random.default_rng(2)
        pool = rng.standard_normal((200, 8))
        observed = mmd2_unbiased(embedding(pool[:100]), embedding(pool[100:]))
        resampled = []
        for _ in range(200):
            perm = rng.permutation(200)
            resampled.append(
                mmd2_unbiased(embedding(pool[perm[:100]]), embedding(pool[perm[100:]]))
            )
        assert abs(observed) < 3.0 * np.std(resampled) + 1e-12


class TestKid:
    def test_same_set_nonpositive(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((40, 8))
        assert kid(embedding(x), embedding(x)) <= 0.0

    def test_separated_gaussians_positive(self):
        rng = np.random.default_rng(4)
        real = rng.standard_normal((200, 8))
        gen = rng.standard_normal((200, 8)) + 5.0
        assert kid(embedding(real), embedding(gen)) > 0.1

    def test_exact_symmetry(self):
        rng = np.random.default_rng(5)
        a = embedding(rng.standard_normal((37, 8)))
        b = embedding(rng.standard_normal((53, 8)))
        assert kid(a, b) == kid(b, a)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((30, 4))
        y = rng.standard_normal((30, 4))
        base = kid(embedding(x), embedding(y))
        shuffled = kid(embedding(x[rng.permutation(30)]), embedding(y[rng.permutation(30)]))
        assert abs(base - shuffled) <= 1e-12


class TestInceptionScore:
    def test_uniform_rows_give_one(self):
        probs = ProbMatrix(np.full((10, 5), 0.2))
        assert inception_score(probs) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("n_classes", [2, 5, 27])
    def test_balanced_one_hot_gives_class_count(self, n_classes):
        probs = ProbMatrix(np.eye(n_classes))
        assert inception_score(probs) == pytest.approx(n_classes, abs=1e-9)

    def test_invalid_row_sum_rejected(self):
        with pytest.raises(ValueError):
            ProbMatrix(np.full((3, 4), 0.125))

    def test_single_class_matrix_rejected(self):
        with pytest.raises(ValueError):
            ProbMatrix(np.ones((3, 1)))

    @settings(max_examples=25)
    @given(st.integers(2, 30), st.integers(1, 40), st.integers(0, 2**31))
    def test_bounds(self, n_classes, n_rows, seed):
        rng = np.random.default_rng(seed)
        raw = rng.random((n_rows, n_classes)) + 1e-9
        probs = ProbMatrix(raw / raw.sum(axis=1, keepdims=True))
        score = inception_score(probs)
        assert 1.0 <= score <= n_classes

    def test_equals_one_iff_rows_match_marginal(self):
        row = np.array([0.5, 0.3, 0.2])
        probs = ProbMatrix(np.tile(row, (7, 1)))
        assert inception_score(probs) == pytest.approx(1.0, abs=1e-12)
        skewed = ProbMatrix(np.array([[0.9, 0.05, 0.05], [0.1, 0.45, 0.45]]))
        assert inception_score(skewed) > 1.0 + 1e-6


class TestGaussianStats:
    def test_antipodal_pair(self):
        stats = gaussian_stats(embedding([[1.0], [-1.0]]))
        assert stats.mu[0] == pytest.approx(0.0)
        assert stats.sigma[0, 0] == pytest.approx(2.0)

    def test_repeated_vector_zero_covariance(self):
        v = np.array([3.0, -1.0, 2.0])
        stats = gaussian_stats(embedding([v] * 5))
        assert np.allclose(stats.sigma, 0.0)

    def test_matches_two_pass_oracle(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((100, 4))
        mu, sigma = two_pass_stats(x)
        stats = gaussian_stats(embedding(x))
        assert np.max(np.abs(stats.mu - mu)) <= 1e-12
        assert np.max(np.abs(stats.sigma - sigma)) <= 1e-12

    def test_rejects_single_sample(self):
        with pytest.raises(ValueError):
            gaussian_stats(embedding([[1.0, 2.0]]))


class TestFrechetDistance:
    def test_identical_stats_zero(self):
        stats = GaussianStats(np.array([1.0, 2.0]), np.array([[2.0, 0.3], [0.3, 1.0]]))
        assert frechet_distance(stats, stats) == pytest.approx(0.0, abs=1e-12)

    def test_scalar_hand_value(self):
        r = GaussianStats(np.array([0.0]), np.array([[1.0]]))
        g = GaussianStats(np.array([1.0]), np.array([[4.0]]))
        assert frechet_distance(r, g) == pytest.approx(2.0, abs=1e-12)

    def test_diagonal_closed_form(self):
        rng = np.random.default_rng(8)
        mu_r, mu_g = rng.standard_normal((2, 8))
        var_r, var_g = rng.uniform(0.5, 3.0, (2, 8))
        r = GaussianStats(mu_r, np.diag(var_r))
        g = GaussianStats(mu_g, np.diag(var_g))
        expected = diagonal_frechet(mu_r, var_r, mu_g, var_g)
        assert frechet_distance(r, g) == pytest.approx(expected, abs=1e-9)

    def test_symmetry(self):
        rng = np.random.default_rng(9)
        a_raw = rng.standard_normal((30, 5))
        b_raw = rng.standard_normal((40, 5)) * 2 + 1
        a = gaussian_stats(embedding(a_raw))
        b = gaussian_stats(embedding(b_raw))
        assert frechet_distance(a, b) == pytest.approx(frechet_distance(b, a), abs=1e-9)

    def test_positive_when_stats_differ(self):
        a = GaussianStats(np.zeros(3), np.eye(3))
        b = GaussianStats(np.zeros(3), 2 * np.eye(3))
        assert frechet_distance(a, b) > 1e-3

    def test_rejects_asymmetric_sigma(self):
        with pytest.raises(ValueError):
            GaussianStats(np.zeros(2), np.array([[1.0, 0.5], [0.1, 1.0]]))

    def test_rejects_indefinite_sigma(self):
        with pytest.raises(ValueError, match="PSD"):
            GaussianStats(np.zeros(2), np.array([[1.0, 0.0], [0.0, -0.5]]))

    def test_rejects_dimension_mismatch(self):
        a = GaussianStats(np.zeros(2), np.eye(2))
        b = GaussianStats(np.zeros(3), np.eye(3))
        with pytest.raises(ValueError):
            frechet_distance(a, b)


class TestFad:
    def test_identical_sets_zero(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((50, 6))
        assert fad(embedding(x), embedding(x)) == pytest.approx(0.0, abs=1e-9)

    def test_sampled_gaussians_match_analytic(self):
        rng = np.random.default_rng(11)
        mu_r = np.zeros(4)
        mu_g = np.array([1.0, 0.5, -0.5, 0.25])
        var_r = np.array([1.0, 2.0, 0.5, 1.0])
        var_g = np.array([2.0, 1.0, 1.0, 0.5])
        x = rng.standard_normal((5000, 4)) * np.sqrt(var_r) + mu_r
        y = rng.standard_normal((5000, 4)) * np.sqrt(var_g) + mu_g
        expected = diagonal_frechet(mu_r, var_r, mu_g, var_g)
        got = fad(embedding(x), embedding(y))
        assert abs(got - expected) <= 0.05 * expected

    def test_orthogonal_invariance(self):
        rng = np.random.default_rng(12)
        x = rng.standard_normal((80, 6))
        y = rng.standard_normal((70, 6)) + 0.5
        rotation, _ = np.linalg.qr(rng.standard_normal((6, 6)))
        base = fad(embedding(x), embedding(y))
        rotated = fad(embedding(x @ rotation), embedding(y @ rotation))
        assert abs(base - rotated) <= 1e-6 * base


class TestKernelParams:
    def test_rejects_nonpositive_gamma(self):
        with pytest.raises(ValueError):
            KernelParams(0.0)

    def test_default_matches_spec(self):
        assert KernelParams().gamma_sq == 8.0
