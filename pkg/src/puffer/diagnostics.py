"""Irrepresentable-condition diagnostics, exact-recovery certificates and bounds.

Support Gram matrices ``G = X(S)^T X(S)`` are inverted through a Cholesky
factorization; a Gram whose condition number exceeds ``GRAM_COND_LIMIT`` is
declared singular.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from .core import SupportSet, as_support, thin_svd
from .errors import DimensionMismatch, EmptySupport, InvalidSpec, SingularGram, ZeroVarianceColumn

GRAM_COND_LIMIT = 1e12


@dataclass(frozen=True)
class SignReport:
    false_positives: int
    false_negatives: int
    sign_match: bool
    l2_error: float


@dataclass(frozen=True)
class DiagnosticsReport:
    ic_score: float
    eta: float
    c_min: float
    c_min_scaled: float
    d_min_proxy: float
    m_beta: float
    psi: float
    prob_bound: float

    def to_dict(self):
        return asdict(self)


class _SupportGram:
    """Cholesky factor of ``X(S)^T X(S)`` with a conditioning check."""

    def __init__(self, X, support: SupportSet):
        if len(support) == 0:
            raise EmptySupport("support is empty")
        self.XS = X[:, support.indices]
        G = self.XS.T @ self.XS
        eig = np.linalg.eigvalsh(G)
        if eig[0] <= 0 or eig[-1] / eig[0] > GRAM_COND_LIMIT:
            raise SingularGram(
                f"support Gram is numerically singular (eigenvalues {eig[0]:.3g}..{eig[-1]:.3g})"
            )
        self.eigenvalues = eig
        self.cho = linalg.cho_factor(G, lower=True)

    def solve(self, b):
        return linalg.cho_solve(self.cho, b)

    @property
    def c_min(self) -> float:
        return float(self.eigenvalues[0])


def _prepare(X, support, signs=None):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch("X must be a matrix")
    S = as_support(support, X.shape[1])
    b = S.signs if signs is None else np.asarray(signs, dtype=np.float64)
    if b.shape != (len(S),):
        raise DimensionMismatch("sign vector length must equal support size")
    return X, S, b


def irrepresentable_vector(X, support, signs=None) -> np.ndarray:
    """``X(S^c)^T X(S) (X(S)^T X(S))^{-1} b`` over the complement columns."""
    X, S, b = _prepare(X, support, signs)
    gram = _SupportGram(X, S)
    w = gram.XS @ gram.solve(b)
    return X[:, S.complement(X.shape[1])].T @ w


def ic_score(X, support, signs=None) -> float:
    """Sup-norm of the irrepresentable vector; the condition holds iff < 1.

    Signs default to the support's own (all +1 for a bare index list).
    """
    v = irrepresentable_vector(X, support, signs)
    return float(np.max(np.abs(v))) if v.size else 0.0


def c_min(X, support) -> float:
    """Smallest eigenvalue of the support Gram."""
    X, S, _ = _prepare(X, support)
    return _SupportGram(X, S).c_min


def psi_bound(X, support, lam: float, eta: float, signs=None) -> float:
    """``lam * (eta / sqrt(C_min) + ||G^{-1} b||_inf)``; recovery needs min|beta*_S| above it."""
    X, S, b = _prepare(X, support, signs)
    gram = _SupportGram(X, S)
    return float(lam * (eta / math.sqrt(gram.c_min) + np.max(np.abs(gram.solve(b)))))


def recovery_conditions(X, support, lam: float, epsilon, beta_star):
    """Evaluate the two exact-recovery conditions for one noise realization.

    Returns ``(r1_margin, r2)`` where ``r1_margin = lam - max_j |...|`` over the
    complement (positive means the first condition holds strictly) and ``r2``
    says whether the restricted estimate keeps the signs of ``beta_star``.
    """
    X = np.asarray(X, dtype=np.float64)
    epsilon = np.asarray(epsilon, dtype=np.float64)
    beta_star = np.asarray(beta_star, dtype=np.float64)
    S = as_support(support, X.shape[1])
    b = np.sign(beta_star[S.indices])
    if np.any(b == 0):
        raise InvalidSpec("beta_star must be nonzero on the support")
    gram = _SupportGram(X, S)
    inner = gram.XS.T @ epsilon - lam * b
    shift = gram.solve(inner)
    Sc = S.complement(X.shape[1])
    if Sc.size:
        Xc = X[:, Sc]
        lhs = Xc.T @ (gram.XS @ shift) - Xc.T @ epsilon
        r1_margin = float(lam - np.max(np.abs(lhs)))
    else:
        r1_margin = float(lam)
    restricted = beta_star[S.indices] + shift
    r2 = bool(np.array_equal(np.sign(restricted), b))
    return r1_margin, r2


def kkt_recovery_check(problem, support, lam: float, epsilon=None) -> bool:
    """True iff the first condition holds strictly and the second holds.

    In that case the Lasso at ``lam`` has a unique solution with the signs of
    ``beta_star``.  ``epsilon`` defaults to ``Y - X beta_star``.
    """
    if problem.beta_star is None:
        raise InvalidSpec("kkt_recovery_check needs problem.beta_star")
    eps = problem.epsilon if epsilon is None else epsilon
    margin, r2 = recovery_conditions(problem.X, support, lam, eps, problem.beta_star)
    return margin > 0 and r2


def kkt_check(X, Y, beta, lam: float) -> float:
    """Lambda-relative worst violation of the Lasso subgradient conditions.

    Computed from scratch (dense gradient), independent of the solver state.
    """
    X = np.asarray(X, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    g = X.T @ (np.asarray(Y, dtype=np.float64) - X @ beta)
    nz = beta != 0
    viol = np.zeros_like(g)
    viol[nz] = np.abs(g[nz] - lam * np.sign(beta[nz]))
    viol[~nz] = np.maximum(np.abs(g[~nz]) - lam, 0.0)
    return float(viol.max() / lam) if viol.size else 0.0


def recovery_probability(p: int, lam: float, eta: float, noise_max_eig: float) -> float:
    """``1 - 2p exp(-lam^2 eta^2 / (2 Lambda_max(Sigma_eps)))``."""
    return 1.0 - 2.0 * p * math.exp(-(lam**2) * eta**2 / (2.0 * noise_max_eig))


def theorem1_bound(n: int, p: int, lam: float, sigma2: float, c_min_scaled: float) -> float:
    """Low-dimensional recovery probability ``1 - 2p exp(-n lam^2 C / (2 sigma^2))``."""
    return 1.0 - 2.0 * p * math.exp(-n * lam**2 * c_min_scaled / (2.0 * sigma2))


def theorem3_bound(n: int, p: int, lam: float, sigma2: float, eta: float, d_min: float) -> float:
    """High-dimensional recovery probability ``1 - 2p exp(-p lam^2 eta^2 d_min / (2 sigma^2))``.

    ``n`` does not enter the displayed bound; it is accepted for a uniform
    signature with :func:`theorem1_bound`.
    """
    return 1.0 - 2.0 * p * math.exp(-p * lam**2 * eta**2 * d_min / (2.0 * sigma2))


def high_dim_lambda(n: int, p: int, s: int) -> float:
    """Tuning choice with ``lam^2 = sqrt(n log p / (s p^2))``."""
    return (n * math.log(p) / (s * p**2)) ** 0.25


def low_dim_lambda(n: int) -> float:
    """``sqrt(log n / n)``, a rate that sends lam to 0 while n lam^2 grows."""
    return math.sqrt(math.log(n) / n)


def sign_report(beta_hat, beta_star, zero_tol: float = 0.0) -> SignReport:
    beta_hat = np.asarray(beta_hat, dtype=np.float64)
    beta_star = np.asarray(beta_star, dtype=np.float64)
    if beta_hat.shape != beta_star.shape:
        raise DimensionMismatch(f"shapes differ: {beta_hat.shape} vs {beta_star.shape}")
    selected = np.abs(beta_hat) > zero_tol
    true = beta_star != 0
    fp = int(np.count_nonzero(selected & ~true))
    fn = int(np.count_nonzero(~selected & true))
    both = selected & true
    signs_agree = bool(np.all(np.sign(beta_hat[both]) == np.sign(beta_star[both])))
    return SignReport(
        false_positives=fp,
        false_negatives=fn,
        sign_match=fp == 0 and fn == 0 and signs_agree,
        l2_error=float(np.linalg.norm(beta_hat - beta_star)),
    )


def center_and_scale(X) -> np.ndarray:
    """Columns to mean 0 and population (divide-by-n) standard deviation 1."""
    X = np.asarray(X, dtype=np.float64)
    Xc = X - X.mean(axis=0)
    sd = np.sqrt(np.mean(Xc**2, axis=0))
    bad = np.flatnonzero(sd <= 1e-14 * np.maximum(1.0, np.abs(X).max(axis=0)))
    if bad.size:
        raise ZeroVarianceColumn(f"column(s) {bad[:5].tolist()} have zero variance")
    return Xc / sd


def _unrank_pairs(k, p):
    # Pair ranks enumerate (i, j), i < j, row by row: row i holds p-1-i pairs.
    k = np.asarray(k, dtype=np.int64)
    start = lambda i: i * (2 * p - i - 1) // 2  # noqa: E731
    i = np.floor(((2 * p - 1) - np.sqrt((2 * p - 1) ** 2 - 8.0 * k)) / 2).astype(np.int64)
    # repair floating-point misplacement at row boundaries
    i = np.where(start(i) > k, i - 1, i)
    i = np.where(start(i + 1) <= k, i + 1, i)
    j = k - start(i) + i + 1
    return i, j


def sample_pairs(p: int, num_pairs: int, seed) -> np.ndarray:
    """``num_pairs`` distinct unordered column pairs, uniformly without replacement."""
    total = p * (p - 1) // 2
    if p < 2:
        raise InvalidSpec("need at least two columns")
    if num_pairs > total:
        raise InvalidSpec(f"requested {num_pairs} pairs but only {total} exist")
    rng = np.random.default_rng(seed)
    ranks = rng.choice(total, size=num_pairs, replace=False)
    i, j = _unrank_pairs(ranks, p)
    return np.column_stack([i, j])


def pairwise_correlation_sample(X, num_pairs: int, seed=0) -> np.ndarray:
    """Pearson correlations of randomly sampled distinct column pairs."""
    X = np.asarray(X, dtype=np.float64)
    pairs = sample_pairs(X.shape[1], num_pairs, seed)
    cols = np.unique(pairs)
    Xc = X[:, cols] - X[:, cols].mean(axis=0)
    norms = np.sqrt(np.einsum("ij,ij->j", Xc, Xc))
    if np.any(norms == 0):
        raise ZeroVarianceColumn("a sampled column has zero variance")
    Z = Xc / norms
    pos = np.searchsorted(cols, pairs)
    return np.einsum("ij,ij->j", Z[:, pos[:, 0]], Z[:, pos[:, 1]])


def diagnose(
    X,
    support,
    lam: float,
    sigma2: float = 1.0,
    beta_star=None,
    signs=None,
    noise_max_eig: Optional[float] = None,
) -> DiagnosticsReport:
    """Collect IC score, eigenvalue constants, Psi and the recovery probability bound.

    ``noise_max_eig`` is the top eigenvalue of the noise covariance (``sigma2``
    for untransformed data).  ``m_beta`` is 0 when ``beta_star`` is absent.
    """
    X, S, b = _prepare(X, support, signs)
    n, p = X.shape
    score = ic_score(X, S, b)
    eta = 1.0 - score
    gram = _SupportGram(X, S)
    D = thin_svd(X).D
    m_beta = float(np.min(np.abs(np.asarray(beta_star)[S.indices]))) if beta_star is not None else 0.0
    psi = lam * (max(eta, 0.0) / math.sqrt(gram.c_min) + float(np.max(np.abs(gram.solve(b)))))
    lam_max_eig = sigma2 if noise_max_eig is None else noise_max_eig
    prob = recovery_probability(p, lam, max(eta, 0.0), lam_max_eig) if lam_max_eig > 0 else 1.0
    return DiagnosticsReport(
        ic_score=score,
        eta=eta,
        c_min=gram.c_min,
        c_min_scaled=gram.c_min / n,
        d_min_proxy=float(np.min(D) ** 2 / p),
        m_beta=m_beta,
        psi=float(psi),
        prob_bound=float(prob),
    )
