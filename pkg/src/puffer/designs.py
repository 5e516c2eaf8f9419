"""Seeded random designs, coefficient vectors and noise.

Every generator is a pure function of its arguments: the same seed always
yields the same array.  Seeds may be ints or ``numpy.random.SeedSequence``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import transform_design
from .errors import InvalidSpec


class DesignKind(str, enum.Enum):
    IID_GAUSSIAN = "iid_gaussian"
    CONSTANT_CORRELATION = "constant_correlation"
    COVARIANCE = "covariance"
    STIEFEL_UNIFORM = "stiefel_uniform"


@dataclass(frozen=True)
class DesignSpec:
    kind: DesignKind
    n: int
    p: int
    seed: object = 0
    rho: float = 0.0
    sigma_matrix: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", DesignKind(self.kind))
        if self.n < 1 or self.p < 1:
            raise InvalidSpec(f"n and p must be positive, got n={self.n}, p={self.p}")
        if self.kind is DesignKind.CONSTANT_CORRELATION and not 0 <= self.rho < 1:
            raise InvalidSpec(f"rho must lie in [0, 1), got {self.rho}")
        if self.kind is DesignKind.STIEFEL_UNIFORM and self.n > self.p:
            raise InvalidSpec("uniform Stiefel designs need n <= p")
        if self.kind is DesignKind.COVARIANCE:
            if self.sigma_matrix is None:
                raise InvalidSpec("covariance designs need sigma_matrix")
            S = np.asarray(self.sigma_matrix, dtype=np.float64)
            if S.shape != (self.p, self.p) or not np.allclose(S, S.T):
                raise InvalidSpec("sigma_matrix must be a symmetric p x p matrix")
            if np.linalg.eigvalsh(S)[0] <= 0:
                raise InvalidSpec("sigma_matrix must be positive definite")
            object.__setattr__(self, "sigma_matrix", S)

    def with_seed(self, seed) -> "DesignSpec":
        return DesignSpec(self.kind, self.n, self.p, seed, self.rho, self.sigma_matrix)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def symmetric_sqrt(S) -> np.ndarray:
    w, Q = np.linalg.eigh(S)
    return (Q * np.sqrt(np.clip(w, 0, None))) @ Q.T


def constant_correlation_rows(n, p, rho, rng) -> np.ndarray:
    """One-factor construction: ``sqrt(rho) g_i + sqrt(1 - rho) z_ij``."""
    g = rng.standard_normal(n)
    Z = rng.standard_normal((n, p))
    Z *= np.sqrt(1.0 - rho)
    Z += np.sqrt(rho) * g[:, None]
    return Z


def sample_design(spec: DesignSpec) -> np.ndarray:
    rng = _rng(spec.seed)
    if spec.kind is DesignKind.IID_GAUSSIAN:
        return rng.standard_normal((spec.n, spec.p))
    if spec.kind is DesignKind.CONSTANT_CORRELATION:
        return constant_correlation_rows(spec.n, spec.p, spec.rho, rng)
    if spec.kind is DesignKind.COVARIANCE:
        return rng.standard_normal((spec.n, spec.p)) @ symmetric_sqrt(spec.sigma_matrix)
    return transform_design(rng.standard_normal((spec.n, spec.p)))


def sample_stiefel_uniform(n: int, p: int, seed=0) -> np.ndarray:
    """A uniform draw from ``{V : V V^T = I_n}``: the preconditioned iid Gaussian matrix."""
    if n > p:
        raise InvalidSpec("uniform Stiefel sampling needs n <= p")
    return sample_design(DesignSpec(DesignKind.STIEFEL_UNIFORM, n, p, seed))


def sample_beta_star(p: int, s: int, magnitude: float = 10.0, seed=0, randomize: bool = False) -> np.ndarray:
    """``s`` nonzeros of size ``magnitude``, leading positions and positive by default.

    With ``randomize`` the positions are a uniform subset and signs are random.
    """
    if not 0 <= s <= p:
        raise InvalidSpec(f"need 0 <= s <= p, got s={s}, p={p}")
    beta = np.zeros(p)
    if not randomize:
        beta[:s] = magnitude
        return beta
    rng = _rng(seed)
    idx = np.sort(rng.choice(p, size=s, replace=False))
    beta[idx] = magnitude * rng.choice([-1.0, 1.0], size=s)
    return beta


def sample_noise(n: int, sigma2: float, seed=0) -> np.ndarray:
    if sigma2 < 0:
        raise InvalidSpec("sigma2 must be nonnegative")
    if sigma2 == 0:
        return np.zeros(n)
    return np.sqrt(sigma2) * _rng(seed).standard_normal(n)


def ic_violating_covariance(p: int, s: int, cross: float = 0.3, within: float = 0.5) -> np.ndarray:
    """Unit-diagonal covariance whose population IC score is ``s * cross``.

    Support columns are mutually uncorrelated, every null column has
    correlation ``cross`` with each support column and ``within`` with the
    other null columns.  Positive definite when ``s * cross**2 <= within < 1``.
    """
    if not (s * cross**2 < within < 1):
        raise InvalidSpec("need s * cross^2 < within < 1 for positive definiteness")
    S = np.full((p, p), within)
    S[:s, :s] = 0.0
    S[:s, s:] = cross
    S[s:, :s] = cross
    np.fill_diagonal(S, 1.0)
    return S


def orthonormal_design(n: int, p: int, seed=0) -> np.ndarray:
    """n x p with orthonormal columns (n >= p), via QR of a Gaussian matrix."""
    if n < p:
        raise InvalidSpec("orthonormal columns need n >= p")
    Q, R = np.linalg.qr(_rng(seed).standard_normal((n, p)))
    return Q * np.sign(np.diag(R))
