"""Cyclic coordinate descent kernels for the Lasso.

Two implementations of the same fixed-point iteration live here: an explicit
loop version compiled with numba and a numpy version that vectorizes the
inner products.  ``cd_solve`` dispatches on ``_accel.USE_NUMBA``; both are
importable directly for benchmarking and cross-checking.

State convention: ``beta`` and the residual ``r = y - X beta`` are updated in
place.  ``X`` should be Fortran-ordered so that columns are contiguous.
The KKT residual is normalized by lambda: zero coordinates contribute
``max(|x_j'r| - lam, 0) / lam`` and nonzero ones ``|x_j'r - lam*sign(b_j)| / lam``.
"""
import numpy as np

from . import _accel
from ._accel import njit


# ---------------------------------------------------------------- numba path


@njit(cache=True, nogil=True)
def _dot_col(X, j, r):
    acc = 0.0
    for i in range(X.shape[0]):
        acc += X[i, j] * r[i]
    return acc


@njit(cache=True, nogil=True)
def _update_coord(X, j, r, beta, lam, col_sq):
    nj = col_sq[j]
    if nj == 0.0:
        return 0.0
    old = beta[j]
    z = _dot_col(X, j, r) + nj * old
    if z > lam:
        new = (z - lam) / nj
    elif z < -lam:
        new = (z + lam) / nj
    else:
        new = 0.0
    delta = new - old
    if delta != 0.0:
        for i in range(X.shape[0]):
            r[i] -= delta * X[i, j]
        beta[j] = new
    return delta


@njit(cache=True, nogil=True)
def _coord_violation(g, b, lam):
    if b > 0.0:
        return abs(g - lam) / lam
    if b < 0.0:
        return abs(g + lam) / lam
    v = (abs(g) - lam) / lam
    return v if v > 0.0 else 0.0


@njit(cache=True, nogil=True)
def _kkt_numba(X, r, beta, lam):
    worst = 0.0
    for j in range(X.shape[1]):
        v = _coord_violation(_dot_col(X, j, r), beta[j], lam)
        if v > worst:
            worst = v
    return worst


@njit(cache=True, nogil=True)
def _cd_solve_numba(X, r, beta, lam, col_sq, tol, max_iter):
    p = X.shape[1]
    it = 0
    kkt = _kkt_numba(X, r, beta, lam)
    if kkt <= tol:
        return it, kkt
    active = np.empty(p, dtype=np.int64)
    while it < max_iter:
        for j in range(p):
            _update_coord(X, j, r, beta, lam, col_sq)
        it += 1
        m = 0
        for j in range(p):
            if beta[j] != 0.0:
                active[m] = j
                m += 1
        while m > 0 and it < max_iter:
            for k in range(m):
                _update_coord(X, active[k], r, beta, lam, col_sq)
            it += 1
            worst = 0.0
            for k in range(m):
                j = active[k]
                v = _coord_violation(_dot_col(X, j, r), beta[j], lam)
                if v > worst:
                    worst = v
            if worst <= 0.5 * tol:
                break
        kkt = _kkt_numba(X, r, beta, lam)
        if kkt <= tol:
            break
    return it, kkt


# ---------------------------------------------------------------- numpy path


def _kkt_numpy(X, r, beta, lam):
    g = X.T @ r
    viol = np.where(
        beta > 0,
        np.abs(g - lam),
        np.where(beta < 0, np.abs(g + lam), np.maximum(np.abs(g) - lam, 0.0)),
    )
    return float(viol.max() / lam) if viol.size else 0.0


def _sweep_numpy(X, r, beta, lam, col_sq, idx):
    for j in idx:
        nj = col_sq[j]
        if nj == 0.0:
            continue
        xj = X[:, j]
        old = beta[j]
        z = xj @ r + nj * old
        new = np.sign(z) * max(abs(z) - lam, 0.0) / nj
        if new != old:
            r -= (new - old) * xj
            beta[j] = new


def _cd_solve_numpy(X, r, beta, lam, col_sq, tol, max_iter):
    p = X.shape[1]
    it = 0
    kkt = _kkt_numpy(X, r, beta, lam)
    if kkt <= tol:
        return it, kkt
    full = range(p)
    while it < max_iter:
        _sweep_numpy(X, r, beta, lam, col_sq, full)
        it += 1
        active = np.flatnonzero(beta)
        while active.size and it < max_iter:
            _sweep_numpy(X, r, beta, lam, col_sq, active)
            it += 1
            if _kkt_numpy(X[:, active], r, beta[active], lam) <= 0.5 * tol:
                break
        kkt = _kkt_numpy(X, r, beta, lam)
        if kkt <= tol:
            break
    return it, kkt


# ---------------------------------------------------------------- dispatch


def cd_solve(X, r, beta, lam, col_sq, tol, max_iter, backend=None):
    """Run coordinate descent in place; return ``(sweeps, kkt_residual)``."""
    backend = backend or _accel.BACKEND
    if backend == "numba":
        if not _accel.HAS_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        it, kkt = _cd_solve_numba(X, r, beta, float(lam), col_sq, float(tol), int(max_iter))
        return int(it), float(kkt)
    return _cd_solve_numpy(X, r, beta, float(lam), col_sq, float(tol), int(max_iter))


def kkt_residual(X, r, beta, lam):
    return _kkt_numpy(X, r, beta, lam)
