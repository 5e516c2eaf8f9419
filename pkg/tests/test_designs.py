import numpy as np
import pytest

from puffer.core import orthonormality_error
from puffer.designs import (
    DesignKind,
    DesignSpec,
    ic_violating_covariance,
    orthonormal_design,
    sample_beta_star,
    sample_design,
    sample_noise,
    sample_stiefel_uniform,
    symmetric_sqrt,
)
from puffer.diagnostics import ic_score, pairwise_correlation_sample
from puffer.errors import InvalidSpec


class TestDesignSpec:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(kind="iid_gaussian", n=0, p=3),
            dict(kind="constant_correlation", n=3, p=3, rho=1.0),
            dict(kind="constant_correlation", n=3, p=3, rho=-0.1),
            dict(kind="stiefel_uniform", n=5, p=3),
            dict(kind="covariance", n=3, p=2),
            dict(kind="covariance", n=3, p=2, sigma_matrix=np.array([[1.0, 2.0], [2.0, 1.0]])),
            dict(kind="covariance", n=3, p=2, sigma_matrix=np.array([[1.0, 0.5], [0.4, 1.0]])),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidSpec):
            DesignSpec(**kwargs)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            DesignSpec("banana", 3, 3)


class TestSampleDesign:
    def test_deterministic(self):
        spec = DesignSpec(DesignKind.CONSTANT_CORRELATION, 20, 30, 7, rho=0.4)
        np.testing.assert_array_equal(sample_design(spec), sample_design(spec))
        assert not np.array_equal(sample_design(spec), sample_design(spec.with_seed(8)))

    def test_rho_zero(self):
        n = 400
        X = sample_design(DesignSpec(DesignKind.CONSTANT_CORRELATION, n, 10, 1, rho=0.0))
        assert np.max(np.abs(X.mean(axis=0))) < 5 / np.sqrt(n)
        assert np.max(np.abs(X.var(axis=0) - 1)) < 5 / np.sqrt(n)

    def test_rho_09_large_p(self):
        X = sample_design(DesignSpec(DesignKind.CONSTANT_CORRELATION, 200, 10_000, 3, rho=0.9))
        assert abs(pairwise_correlation_sample(X, 10_000, 0).mean() - 0.9) < 0.03

    def test_constant_correlation_gram(self):
        n, rho = 2000, 0.5
        X = sample_design(DesignSpec(DesignKind.CONSTANT_CORRELATION, n, 30, 2, rho=rho))
        G = X.T @ X / n
        off = G[~np.eye(30, dtype=bool)]
        assert np.max(np.abs(np.diag(G) - 1)) < 5 / np.sqrt(n)
        assert abs(off.mean() - rho) < 5 / np.sqrt(n)

    def test_covariance_kind(self):
        X = sample_design(DesignSpec(DesignKind.COVARIANCE, 500, 2, 4, sigma_matrix=np.diag([4.0, 1.0])))
        np.testing.assert_allclose(X.var(axis=0), [4.0, 1.0], rtol=0.2)

    def test_symmetric_sqrt(self, rng):
        A = rng.standard_normal((5, 5))
        S = A @ A.T + np.eye(5)
        R = symmetric_sqrt(S)
        np.testing.assert_allclose(R, R.T, atol=1e-12)
        np.testing.assert_allclose(R @ R, S, atol=1e-10)


class TestStiefel:
    def test_square_is_orthogonal(self):
        V = sample_stiefel_uniform(6, 6, 1)
        assert np.max(np.abs(V.T @ V - np.eye(6))) < 1e-8
        assert np.max(np.abs(V @ V.T - np.eye(6))) < 1e-8

    def test_small_manifold_membership(self):
        V = sample_stiefel_uniform(2, 5, 3)
        np.testing.assert_allclose(np.linalg.norm(V, axis=1), 1.0, atol=1e-10)
        assert abs(V[0] @ V[1]) < 1e-10

    def test_every_draw_on_manifold(self):
        for seed in range(50):
            assert orthonormality_error(sample_stiefel_uniform(7, 19, seed)) < 1e-8

    def test_coherence_rate(self):
        n, p = 100, 2000
        V = sample_stiefel_uniform(n, p, 11)
        r = np.random.default_rng(0)
        j, k = r.choice(p, 1000), r.choice(p, 1000)
        keep = j != k
        inner = np.abs(np.einsum("ij,ij->j", V[:, j[keep]], V[:, k[keep]]))
        assert np.mean(inner < 5 * n**0.75 / p) >= 0.99

    def test_rejects_tall(self):
        with pytest.raises(InvalidSpec):
            sample_stiefel_uniform(5, 3)

    def test_permutation_invariance_smoke(self):
        perm = np.random.default_rng(0).permutation(8)
        a, b = [], []
        for seed in range(200):
            V = sample_stiefel_uniform(3, 8, seed)
            a.append(V[:, 0])
            b.append(V[:, perm][:, 0])
        a, b = np.concatenate(a), np.concatenate(b)
        se = np.sqrt(2 * 3 / 8 / a.size)
        assert abs(a.mean() - b.mean()) < 5 * se
        assert abs(a.var() - b.var()) < 0.05
        assert a.var() == pytest.approx(1 / 8, rel=0.15)


class TestBetaAndNoise:
    def test_beta_examples(self):
        np.testing.assert_array_equal(sample_beta_star(5, 2, 10), [10, 10, 0, 0, 0])
        assert not np.any(sample_beta_star(5, 0))
        np.testing.assert_array_equal(sample_beta_star(4, 4, 2.5), [2.5] * 4)

    def test_beta_randomized(self):
        b = sample_beta_star(100, 10, 3, seed=5, randomize=True)
        assert np.count_nonzero(b) == 10 and set(np.abs(b[b != 0])) == {3.0}
        np.testing.assert_array_equal(b, sample_beta_star(100, 10, 3, seed=5, randomize=True))

    def test_beta_invalid(self):
        with pytest.raises(InvalidSpec):
            sample_beta_star(3, 4)

    def test_noise(self):
        assert not np.any(sample_noise(7, 0.0, 1))
        e = sample_noise(100_000, 1.0, 2)
        assert abs(e.var() - 1) < 0.02
        np.testing.assert_array_equal(sample_noise(10, 2.0, 3), sample_noise(10, 2.0, 3))
        with pytest.raises(InvalidSpec):
            sample_noise(3, -1.0)


class TestHelpers:
    def test_ic_violating_covariance(self):
        S = ic_violating_covariance(50, 5, 0.3, 0.5)
        assert np.linalg.eigvalsh(S)[0] > 0
        assert ic_score(symmetric_sqrt(S), list(range(5))) == pytest.approx(1.5, abs=1e-10)

    def test_ic_violating_covariance_invalid(self):
        with pytest.raises(InvalidSpec):
            ic_violating_covariance(50, 10, 0.3, 0.5)

    def test_orthonormal_design(self):
        Q = orthonormal_design(30, 8, 1)
        assert orthonormality_error(Q) < 1e-12
        with pytest.raises(InvalidSpec):
            orthonormal_design(3, 8)
