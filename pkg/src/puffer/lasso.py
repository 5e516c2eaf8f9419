"""Lasso solver: cyclic coordinate descent, regularization paths, closed forms.

Objective (no intercept, no internal standardization)::

    0.5 * ||Y - X b||^2 + lam * ||b||_1
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, InvalidSpec, MaxIterationsExceeded

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 10_000
DEFAULT_GRID_SIZE = 100
# Sweeps of coordinate descent between attempts at an exact active-set solve.
POLISH_EVERY = 50
POLISH_COND_LIMIT = 1e12
HOMOTOPY_RATIO = 0.05
HOMOTOPY_STEPS_PER_DECADE = 10


@dataclass(frozen=True)
class LassoSolution:
    lam: float
    beta_hat: np.ndarray
    active_count: int
    kkt_residual: float
    iterations: int
    converged: bool = True

    def support(self, zero_tol: float = 0.0) -> np.ndarray:
        return np.flatnonzero(np.abs(self.beta_hat) > zero_tol)


@dataclass(frozen=True)
class LassoPath:
    solutions: List[LassoSolution]
    lambda_max: float
    grid_size: int

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([s.lam for s in self.solutions])

    @property
    def active_counts(self) -> np.ndarray:
        return np.array([s.active_count for s in self.solutions], dtype=np.int64)

    @property
    def coefs(self) -> np.ndarray:
        """Coefficients stacked as (grid point, p)."""
        return np.vstack([s.beta_hat for s in self.solutions])

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)


def soft_threshold(z, lam):
    """``sign(z) * max(|z| - lam, 0)``, elementwise for arrays."""
    return np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)


def _check_xy(X, Y):
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 1 or X.shape[0] != Y.shape[0]:
        raise DimensionMismatch(f"incompatible shapes X{X.shape}, Y{Y.shape}")
    return X, Y


def lambda_max(X, Y) -> float:
    """Smallest lambda whose Lasso solution is identically zero: ``||X^T Y||_inf``."""
    X, Y = _check_xy(X, Y)
    if X.shape[1] == 0:
        return 0.0
    return float(np.max(np.abs(X.T @ Y)))


def lasso_objective(X, Y, beta, lam) -> float:
    r = Y - X @ beta
    return 0.5 * float(r @ r) + lam * float(np.sum(np.abs(beta)))


class _Prepared:
    """Column-major copy of X plus squared column norms, reused along a path."""

    def __init__(self, X, Y):
        self.X = np.asfortranarray(X)
        self.Y = Y
        self.col_sq = np.einsum("ij,ij->j", self.X, self.X)
        self.lam_max = float(np.max(np.abs(self.X.T @ Y))) if self.X.shape[1] else 0.0


def _solve(prep, lam, tol, max_iter, warm_start, backend, raise_on_fail):
    p = prep.X.shape[1]
    if lam >= prep.lam_max:
        # zero is optimal; short-circuit so rounding in the kernel cannot leave dust
        return LassoSolution(float(lam), np.zeros(p), 0, 0.0, 0)
    if warm_start is None:
        beta = np.zeros(p)
        r = prep.Y.copy()
    else:
        beta = np.array(warm_start, dtype=np.float64)
        if beta.shape != (p,):
            raise DimensionMismatch(f"warm_start has shape {beta.shape}, expected ({p},)")
        r = prep.Y - prep.X @ beta
    it, kkt = 0, _kernels.kkt_residual(prep.X, r, beta, lam)
    while it < max_iter:
        chunk = min(POLISH_EVERY, max_iter - it)
        done, kkt = _kernels.cd_solve(prep.X, r, beta, lam, prep.col_sq, tol, chunk, backend)
        it += done
        if kkt <= tol:
            break
        polished = _polish(prep, beta, lam, tol)
        if polished is not None:
            beta, r, kkt = polished
            break
        if done == 0:
            break
    converged = kkt <= tol
    if not converged:
        msg = f"coordinate descent hit max_iter={max_iter} at lambda={lam:.4g} (kkt residual {kkt:.3g})"
        if raise_on_fail:
            raise MaxIterationsExceeded(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
    return LassoSolution(
        lam=float(lam),
        beta_hat=beta,
        active_count=int(np.count_nonzero(beta)),
        kkt_residual=kkt,
        iterations=it,
        converged=converged,
    )


def _reduce_support(X, b):
    """Support of a point with the same fit, no larger L1 norm and independent columns.

    While ``X_A`` has a null vector ``v`` the fit is constant along ``v``; step
    in the direction that does not grow ``|b|_1`` until a coordinate hits zero.
    """
    A = np.flatnonzero(b)
    while A.size:
        # full V only when there are more columns than rows; U stays small either way
        _, sv, Vt = np.linalg.svd(X[:, A], full_matrices=A.size > X.shape[0])
        if A.size <= sv.size and sv[-1] > sv[0] * 1e-10:
            break
        v = Vt[-1]
        sA = np.sign(b[A])
        if sA @ v > 0:
            v = -v
        shrinking = sA * v < 0
        if not shrinking.any():
            v, shrinking = -v, sA * v > 0
        t = np.abs(b[A][shrinking] / v[shrinking])
        k = np.flatnonzero(shrinking)[np.argmin(t)]
        b[A] += t.min() * v
        b[A[k]] = 0.0
        A = np.flatnonzero(b)
    return A


def _polish(prep, beta, lam, tol):
    """Exact solve on the current active set and signs, kept only if it certifies.

    Coordinate descent is slow when the active columns are nearly collinear
    (typically p > n near the bottom of a path), but it finds the right active
    set and signs long before the coefficients settle.  With A and s fixed the
    stationarity condition is linear, ``X_A' X_A b_A = X_A' Y - lam s``.
    When more than n coordinates are active the support is first reduced.
    """
    A = _reduce_support(prep.X, beta.copy())
    if A.size == 0:
        return None
    XA = prep.X[:, A]
    G = XA.T @ XA
    w = np.linalg.eigvalsh(G)
    if w[0] <= 0 or w[-1] / w[0] > POLISH_COND_LIMIT:
        return None
    s = np.sign(beta[A])
    bA = np.linalg.solve(G, XA.T @ prep.Y - lam * s)
    if not np.array_equal(np.sign(bA), s):
        return None
    new = np.zeros_like(beta)
    new[A] = bA
    r = prep.Y - XA @ bA
    kkt = _kernels.kkt_residual(prep.X, r, new, lam)
    if kkt > tol:
        return None
    return new, r, kkt


def solve_lasso(
    X,
    Y,
    lam: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    warm_start=None,
    backend: Optional[str] = None,
    raise_on_fail: bool = False,
) -> LassoSolution:
    """Minimize ``0.5||Y - Xb||^2 + lam ||b||_1`` by cyclic coordinate descent.

    Iterates until the lambda-relative KKT residual is at most ``tol``.  When
    ``max_iter`` sweeps are exhausted the last iterate is returned with
    ``converged=False`` and a ``RuntimeWarning``; pass ``raise_on_fail=True``
    to get :class:`MaxIterationsExceeded` instead.

    Without ``warm_start``, a ``lam`` below ``HOMOTOPY_RATIO * lambda_max`` is
    reached through warm-started intermediate values; ``max_iter`` then applies
    to each of them and ``iterations`` reports the total.
    """
    X, Y = _check_xy(X, Y)
    if not lam > 0:
        raise InvalidSpec(f"lambda must be positive, got {lam}")
    if not tol > 0:
        raise InvalidSpec(f"tol must be positive, got {tol}")
    prep = _Prepared(X, Y)
    if warm_start is None and lam < HOMOTOPY_RATIO * prep.lam_max:
        return _solve_from_lambda_max(prep, lam, tol, max_iter, backend, raise_on_fail)
    return _solve(prep, lam, tol, max_iter, warm_start, backend, raise_on_fail)


def _solve_from_lambda_max(prep, lam, tol, max_iter, backend, raise_on_fail):
    """Cold starts far below lambda_max are slow; walk down a geometric grid instead."""
    steps = math.ceil(HOMOTOPY_STEPS_PER_DECADE * math.log10(prep.lam_max / lam))
    beta, spent = None, 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for mid in np.geomspace(prep.lam_max, lam, steps + 1)[1:-1]:
            sol = _solve(prep, mid, tol, max_iter, beta, backend, raise_on_fail=False)
            beta, spent = sol.beta_hat, spent + sol.iterations
    sol = _solve(prep, lam, tol, max_iter, beta, backend, raise_on_fail)
    return replace(sol, iterations=sol.iterations + spent)


def lambda_grid(lam_max: float, grid_size: int, lambda_min_ratio: float) -> np.ndarray:
    if grid_size < 2:
        raise InvalidSpec("grid_size must be at least 2")
    if not 0 < lambda_min_ratio < 1:
        raise InvalidSpec("lambda_min_ratio must lie in (0, 1)")
    return lam_max * np.geomspace(1.0, lambda_min_ratio, grid_size)


def default_lambda_min_ratio(n: int, p: int) -> float:
    return 1e-4 if n > p else 1e-3


def lasso_path(
    X,
    Y,
    grid_size: int = DEFAULT_GRID_SIZE,
    lambda_min_ratio: Optional[float] = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    max_active: Optional[int] = None,
    backend: Optional[str] = None,
) -> LassoPath:
    """Warm-started solutions on a geometric grid from ``lambda_max`` downward.

    ``max_active`` truncates the path after the first solution with more than
    that many nonzero coefficients, which is all the selection rules need.
    A grid point that fails to converge is kept (flagged) and the path goes on.
    """
    X, Y = _check_xy(X, Y)
    n, p = X.shape
    if lambda_min_ratio is None:
        lambda_min_ratio = default_lambda_min_ratio(n, p)
    prep = _Prepared(X, Y)
    lam_max = prep.lam_max
    solutions = []
    if lam_max == 0:
        # Y orthogonal to every column: the zero vector is optimal for all lambda.
        for lam in np.geomspace(1.0, lambda_min_ratio, grid_size):
            solutions.append(LassoSolution(float(lam), np.zeros(p), 0, 0.0, 0))
        return LassoPath(solutions, 0.0, grid_size)
    beta = None
    for lam in lambda_grid(lam_max, grid_size, lambda_min_ratio):
        sol = _solve(prep, lam, tol, max_iter, beta, backend, raise_on_fail=False)
        solutions.append(sol)
        beta = sol.beta_hat
        if max_active is not None and sol.active_count > max_active:
            break
    log.debug("lasso path: %d grid points, final df %d", len(solutions), solutions[-1].active_count)
    return LassoPath(solutions, lam_max, grid_size)


def orthonormal_lasso(X, Y, lam) -> np.ndarray:
    """Closed form when ``X^T X = I``: soft-threshold ``X^T Y`` at ``lam``."""
    X, Y = _check_xy(X, Y)
    return soft_threshold(X.T @ Y, lam)
