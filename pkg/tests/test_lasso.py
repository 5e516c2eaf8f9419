import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import orthonormal_columns
from puffer.designs import DesignKind, DesignSpec, sample_design
from puffer.diagnostics import kkt_check
from puffer.errors import DimensionMismatch, InvalidSpec, MaxIterationsExceeded
from puffer.lasso import (
    lambda_grid,
    lambda_max,
    lasso_objective,
    lasso_path,
    orthonormal_lasso,
    soft_threshold,
    solve_lasso,
)


class TestSoftThreshold:
    @pytest.mark.parametrize("z,lam,want", [(3, 1, 2), (-0.5, 1, 0), (-3, 1, -2), (1, 1, 0)])
    def test_values(self, z, lam, want):
        assert soft_threshold(z, lam) == want

    def test_vectorized(self):
        np.testing.assert_array_equal(soft_threshold(np.array([3.0, -0.5, -3.0]), 1.0), [2, 0, -2])


class TestLambdaMax:
    def test_identity(self):
        assert lambda_max(np.eye(2), np.array([3.0, -1.0])) == 3.0

    def test_zero_response(self, rng):
        assert lambda_max(rng.standard_normal((5, 3)), np.zeros(5)) == 0.0

    def test_zero_solution_above(self, rng):
        X, Y = rng.standard_normal((10, 4)), rng.standard_normal(10)
        sol = solve_lasso(X, Y, lambda_max(X, Y) * 1.0001)
        assert np.all(sol.beta_hat == 0) and sol.active_count == 0

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            lambda_max(np.eye(2), np.ones(3))


class TestSolveLasso:
    def test_hand_example(self):
        sol = solve_lasso(np.eye(2), np.array([3.0, -1.0]), 1.0)
        np.testing.assert_allclose(sol.beta_hat, [2.0, 0.0])
        assert sol.active_count == 1

    def test_huge_lambda_exact_zero(self, rng):
        X, Y = rng.standard_normal((30, 8)), rng.standard_normal(30)
        sol = solve_lasso(X, Y, 1e9)
        assert np.all(sol.beta_hat == 0)

    def test_orthonormal_oracle(self, rng):
        for _ in range(20):
            X = orthonormal_columns(rng, 40, 12)
            Y = rng.standard_normal(40) * 3
            lam = rng.uniform(0.1, 2.0)
            sol = solve_lasso(X, Y, lam)
            assert np.max(np.abs(sol.beta_hat - orthonormal_lasso(X, Y, lam))) < 1e-6

    def test_kkt_certificate(self, rng):
        X = rng.standard_normal((30, 60))
        Y = X[:, :3] @ [3.0, -2.0, 1.0] + rng.standard_normal(30)
        lam = 0.1 * lambda_max(X, Y)
        sol = solve_lasso(X, Y, lam)
        assert sol.converged and sol.kkt_residual <= 1e-7
        assert kkt_check(X, Y, sol.beta_hat, lam) <= 1e-6
        assert sol.active_count == np.count_nonzero(sol.beta_hat)

    def test_warm_start_same_answer(self, rng):
        X, Y = rng.standard_normal((25, 10)), rng.standard_normal(25)
        lam = 0.2 * lambda_max(X, Y)
        cold = solve_lasso(X, Y, lam, tol=1e-10)
        warm = solve_lasso(X, Y, lam, tol=1e-10, warm_start=rng.standard_normal(10))
        np.testing.assert_allclose(cold.beta_hat, warm.beta_hat, atol=1e-7)

    def test_max_iter_flag_and_raise(self, rng):
        X = rng.standard_normal((20, 40))
        X[:, 1] = X[:, 0] + 1e-3 * X[:, 1]
        Y = rng.standard_normal(20)
        lam = 1e-3 * lambda_max(X, Y)
        zero = np.zeros(40)  # an explicit start skips the homotopy
        with pytest.warns(RuntimeWarning):
            sol = solve_lasso(X, Y, lam, max_iter=2, warm_start=zero)
        assert not sol.converged
        with pytest.raises(MaxIterationsExceeded):
            solve_lasso(X, Y, lam, max_iter=2, warm_start=zero, raise_on_fail=True)

    def test_cold_start_far_below_lambda_max(self):
        # plain cold-start descent stalls here within this budget
        X = sample_design(DesignSpec(DesignKind.CONSTANT_CORRELATION, 100, 300, 0, rho=0.8))
        Y = X[:, :5] @ np.full(5, 10.0) + np.random.default_rng(0).standard_normal(100)
        lam = 1.25e-4 * lambda_max(X, Y)
        sol = solve_lasso(X, Y, lam, max_iter=3000)
        assert sol.converged
        assert kkt_check(X, Y, sol.beta_hat, lam) <= 1e-6

    def test_objective_nonincreasing_across_sweeps(self, rng):
        X = rng.standard_normal((40, 30)) + 0.8 * rng.standard_normal((40, 1))
        Y = X[:, :4] @ [2.0, 2.0, -1.0, 1.0] + rng.standard_normal(40)
        lam = 0.05 * lambda_max(X, Y)
        values = []
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            for k in range(1, 40):
                values.append(lasso_objective(X, Y, solve_lasso(X, Y, lam, max_iter=k).beta_hat, lam))
        assert np.all(np.diff(values) <= 1e-9 * abs(values[0]))

    @pytest.mark.parametrize("lam,tol", [(0.0, 1e-7), (-1.0, 1e-7), (1.0, 0.0)])
    def test_bad_inputs(self, lam, tol):
        with pytest.raises(InvalidSpec):
            solve_lasso(np.eye(2), np.ones(2), lam, tol=tol)

    def test_warm_start_shape(self):
        with pytest.raises(DimensionMismatch):
            solve_lasso(np.eye(2), np.ones(2), 0.1, warm_start=np.zeros(3))

    @given(st.integers(5, 25), st.integers(1, 15), st.floats(0.01, 0.9), st.integers(0, 2**31 - 1))
    def test_kkt_property(self, n, p, frac, seed):
        r = np.random.default_rng(seed)
        X, Y = r.standard_normal((n, p)), r.standard_normal(n)
        lam = frac * lambda_max(X, Y)
        sol = solve_lasso(X, Y, lam)
        assert kkt_check(X, Y, sol.beta_hat, lam) <= 1e-6
        assert lasso_objective(X, Y, sol.beta_hat, lam) <= lasso_objective(X, Y, np.zeros(p), lam) + 1e-12


class TestPath:
    def test_grid(self):
        g = lambda_grid(10.0, 5, 1e-2)
        assert g[0] == 10.0 and np.isclose(g[-1], 0.1) and np.all(np.diff(g) < 0)
        with pytest.raises(InvalidSpec):
            lambda_grid(1.0, 1, 0.1)
        with pytest.raises(InvalidSpec):
            lambda_grid(1.0, 5, 1.0)

    def test_zero_response(self, rng):
        path = lasso_path(rng.standard_normal((10, 4)), np.zeros(10), grid_size=10)
        assert len(path) == 10 and np.all(path.coefs == 0)

    def test_path_invariants(self, rng):
        X, Y = rng.standard_normal((30, 50)), rng.standard_normal(30)
        path = lasso_path(X, Y, grid_size=30)
        assert np.all(np.diff(path.lambdas) < 0)
        assert path.solutions[0].active_count == 0
        assert path.lambdas[0] == path.lambda_max
        for sol in path:
            assert kkt_check(X, Y, sol.beta_hat, sol.lam) <= 1e-6
            assert lasso_objective(X, Y, sol.beta_hat, sol.lam) <= lasso_objective(X, Y, np.zeros(50), sol.lam)

    def test_orthonormal_oracle_along_grid(self, rng):
        X = orthonormal_columns(rng, 50, 15)
        Y = X @ rng.normal(0, 3, 15) + rng.standard_normal(50)
        path = lasso_path(X, Y, grid_size=40)
        for sol in path:
            assert np.max(np.abs(sol.beta_hat - orthonormal_lasso(X, Y, sol.lam))) < 1e-6

    def test_small_lambda_matches_ols_support(self, rng):
        X, Y = rng.standard_normal((20, 5)), rng.standard_normal(20)
        path = lasso_path(X, Y)
        ols = np.linalg.lstsq(X, Y, rcond=None)[0]
        assert path.solutions[-1].active_count == np.count_nonzero(np.abs(ols) > 1e-8)

    def test_max_active_truncates(self, rng):
        X, Y = rng.standard_normal((30, 80)), rng.standard_normal(30)
        path = lasso_path(X, Y, max_active=5)
        assert path.active_counts[-1] > 5
        assert np.all(path.active_counts[:-1] <= 5)


@pytest.mark.parametrize("seed", range(5))
def test_support_reduction_keeps_fit_and_l1(seed):
    from puffer.lasso import _reduce_support

    r = np.random.default_rng(seed)
    X = r.standard_normal((10, 30))
    b = r.standard_normal(30)
    b[r.choice(30, 8, replace=False)] = 0.0
    reduced = b.copy()
    A = _reduce_support(X, reduced)
    assert A.size <= 10
    assert np.linalg.matrix_rank(X[:, A]) == A.size
    np.testing.assert_allclose(X @ reduced, X @ b, atol=1e-9)
    assert np.abs(reduced).sum() <= np.abs(b).sum() + 1e-12
    # no sign flips, only zeros
    assert np.all(np.sign(reduced)[A] == np.sign(b)[A])


def test_tail_of_p_greater_than_n_path_certifies():
    r = np.random.default_rng(0)
    X = r.standard_normal((100, 300))
    Y = X[:, :5] @ np.full(5, 3.0) + r.standard_normal(100)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        path = lasso_path(X, Y)
    worst = max(kkt_check(X, Y, s.beta_hat, s.lam) for s in path.solutions)
    assert worst < 1e-6
