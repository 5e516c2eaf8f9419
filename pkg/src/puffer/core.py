"""Domain types and the Puffer preconditioner.

The preconditioner is built from the thin SVD ``X = U diag(D) V^T`` as
``F = U diag(1/D) U^T``.  Applying it to both sides of ``Y = X beta + eps``
sets every nonzero singular value of the design to one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import AllZeroMatrix, DimensionMismatch, InvalidSpec, NonFiniteInput

DEFAULT_RANK_TOLERANCE = 1e-10
# Above this many rows the dense n x n preconditioner is never formed.
DENSE_F_LIMIT = 1000


def _as_matrix(X, name="X"):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteInput(f"{name} contains non-finite entries")
    return X


def _as_vector(v, name="v"):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput(f"{name} contains non-finite entries")
    return v


@dataclass(frozen=True)
class RegressionProblem:
    """A design ``X`` (n x p), response ``Y`` and optional simulation truth."""

    X: np.ndarray
    Y: np.ndarray
    beta_star: Optional[np.ndarray] = None
    sigma2: Optional[float] = None

    def __post_init__(self):
        X = _as_matrix(self.X)
        Y = _as_vector(self.Y, "Y")
        if X.shape[0] != Y.shape[0]:
            raise DimensionMismatch(f"X has {X.shape[0]} rows but Y has length {Y.shape[0]}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        if self.beta_star is not None:
            b = _as_vector(self.beta_star, "beta_star")
            if b.shape[0] != X.shape[1]:
                raise DimensionMismatch(
                    f"beta_star has length {b.shape[0]}, expected p = {X.shape[1]}"
                )
            object.__setattr__(self, "beta_star", b)
        if self.sigma2 is not None:
            if not (np.isfinite(self.sigma2) and self.sigma2 >= 0):
                raise InvalidSpec(f"sigma2 must be a nonnegative real, got {self.sigma2}")
            object.__setattr__(self, "sigma2", float(self.sigma2))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def support(self) -> "SupportSet":
        if self.beta_star is None:
            raise InvalidSpec("problem has no beta_star")
        return SupportSet.from_beta(self.beta_star)

    @property
    def epsilon(self) -> np.ndarray:
        """Realized noise ``Y - X beta_star``."""
        if self.beta_star is None:
            raise InvalidSpec("problem has no beta_star")
        return self.Y - self.X @ self.beta_star


@dataclass(frozen=True)
class SupportSet:
    """Column indices (0-based, strictly increasing) and their signs.

    The command line speaks 1-based indices; conversion happens there.
    """

    indices: np.ndarray
    signs: np.ndarray = None

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1)
        if idx.size and np.any(np.diff(idx) <= 0):
            raise InvalidSpec("support indices must be strictly increasing")
        if idx.size and idx[0] < 0:
            raise InvalidSpec("support indices must be nonnegative")
        if self.signs is None:
            signs = np.ones(idx.size)
        else:
            signs = np.asarray(self.signs, dtype=np.float64).reshape(-1)
        if signs.size != idx.size:
            raise InvalidSpec("signs length must equal indices length")
        if not np.all(np.abs(signs) == 1):
            raise InvalidSpec("signs must be +1 or -1")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def from_beta(cls, beta, zero_tol=0.0) -> "SupportSet":
        beta = np.asarray(beta, dtype=np.float64)
        idx = np.flatnonzero(np.abs(beta) > zero_tol)
        return cls(idx, np.sign(beta[idx]))

    @classmethod
    def leading(cls, s: int) -> "SupportSet":
        """``{0, ..., s-1}`` with all-positive signs."""
        return cls(np.arange(s))

    def __len__(self):
        return int(self.indices.size)

    def complement(self, p: int) -> np.ndarray:
        mask = np.ones(p, dtype=bool)
        mask[self.indices] = False
        return np.flatnonzero(mask)

    def check_within(self, p: int):
        if len(self) and self.indices[-1] >= p:
            raise InvalidSpec(f"support index {self.indices[-1]} out of range for p = {p}")


@dataclass(frozen=True)
class PufferDecomposition:
    U: np.ndarray
    D: np.ndarray
    V: np.ndarray
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE
    tikhonov_delta: float = 0.0

    @property
    def d(self) -> int:
        return int(self.D.size)

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def p(self) -> int:
        return self.V.shape[0]

    @property
    def inverse_factors(self) -> np.ndarray:
        """Diagonal of the preconditioner in the U basis: ``1/D`` or ``D/(D^2+delta)``."""
        if self.tikhonov_delta == 0:
            return 1.0 / self.D
        return self.D / (self.D**2 + self.tikhonov_delta)

    def preconditioner(self) -> np.ndarray:
        """Dense ``F``. Refused for n above ``DENSE_F_LIMIT``; use :func:`apply_preconditioner`."""
        if self.n > DENSE_F_LIMIT:
            raise MemoryError(
                f"refusing to materialize a {self.n}x{self.n} preconditioner; "
                "use apply_preconditioner"
            )
        return (self.U * self.inverse_factors) @ self.U.T

    def noise_covariance(self, sigma2: float = 1.0) -> np.ndarray:
        """Covariance of the transformed noise, ``sigma2 * U diag(g^2) U^T``."""
        g = self.inverse_factors
        return sigma2 * (self.U * g**2) @ self.U.T


@dataclass(frozen=True)
class TransformedProblem:
    X_tilde: np.ndarray
    Y_tilde: np.ndarray
    source: RegressionProblem = field(repr=False)
    decomposition: PufferDecomposition = field(repr=False)

    def as_problem(self) -> RegressionProblem:
        return RegressionProblem(self.X_tilde, self.Y_tilde, self.source.beta_star, self.source.sigma2)

    def orthonormality_error(self) -> float:
        """Max deviation of ``X~^T X~`` (n >= p) or ``X~ X~^T`` (n < p) from identity."""
        return orthonormality_error(self.X_tilde)


def orthonormality_error(M) -> float:
    n, p = M.shape
    if n >= p:
        G = M.T @ M
    else:
        G = M @ M.T
    return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def thin_svd(X, rank_tolerance: float = DEFAULT_RANK_TOLERANCE) -> PufferDecomposition:
    """Thin SVD with singular values below ``rank_tolerance * max(D)`` dropped."""
    X = _as_matrix(X)
    if rank_tolerance <= 0:
        raise InvalidSpec("rank_tolerance must be positive")
    if X.size == 0:
        raise AllZeroMatrix("X is empty")
    U, D, Vt = np.linalg.svd(X, full_matrices=False)
    if D[0] == 0:
        raise AllZeroMatrix("largest singular value is zero")
    d = int(np.count_nonzero(D > rank_tolerance * D[0]))
    return PufferDecomposition(
        U=np.ascontiguousarray(U[:, :d]),
        D=D[:d].copy(),
        V=np.ascontiguousarray(Vt[:d].T),
        rank_tolerance=rank_tolerance,
    )


def apply_preconditioner(decomposition: PufferDecomposition, v) -> np.ndarray:
    """``F v`` (or ``F M`` for a matrix with n rows) without forming ``F``."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape[0] != decomposition.n:
        raise DimensionMismatch(
            f"vector has length {v.shape[0]}, preconditioner expects {decomposition.n}"
        )
    U = decomposition.U
    g = decomposition.inverse_factors
    coef = U.T @ v
    if coef.ndim == 1:
        return U @ (g * coef)
    return U @ (g[:, None] * coef)


def puffer_transform(
    problem: RegressionProblem,
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
    tikhonov_delta: float = 0.0,
) -> TransformedProblem:
    """Left-multiply ``X`` and ``Y`` by the Puffer preconditioner.

    With ``tikhonov_delta = 0`` the transformed design is exactly ``U V^T``.
    A positive delta replaces ``1/D_i`` by ``D_i / (D_i^2 + delta)``.
    """
    if tikhonov_delta < 0 or not np.isfinite(tikhonov_delta):
        raise InvalidSpec("tikhonov_delta must be a nonnegative real")
    dec = thin_svd(problem.X, rank_tolerance)
    if tikhonov_delta:
        dec = PufferDecomposition(dec.U, dec.D, dec.V, rank_tolerance, float(tikhonov_delta))
        # F X = U diag(g * D) V^T
        X_tilde = (dec.U * (dec.inverse_factors * dec.D)) @ dec.V.T
    else:
        X_tilde = dec.U @ dec.V.T
    Y_tilde = apply_preconditioner(dec, problem.Y)
    return TransformedProblem(X_tilde, Y_tilde, problem, dec)


def transform_design(X, rank_tolerance: float = DEFAULT_RANK_TOLERANCE) -> np.ndarray:
    """``F X`` alone, for callers with no response."""
    dec = thin_svd(X, rank_tolerance)
    return dec.U @ dec.V.T


def as_support(support, p: Optional[int] = None) -> SupportSet:
    if isinstance(support, SupportSet):
        s = support
    else:
        s = SupportSet(np.asarray(sorted(support), dtype=np.int64))
    if p is not None:
        s.check_within(p)
    return s


__all__: Sequence[str] = [
    "RegressionProblem",
    "SupportSet",
    "PufferDecomposition",
    "TransformedProblem",
    "thin_svd",
    "puffer_transform",
    "apply_preconditioner",
    "transform_design",
    "orthonormality_error",
    "as_support",
]
