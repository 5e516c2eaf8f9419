"""Tuning-parameter selection along a Lasso path.

Two rules:

* OLS-BIC: for each model size ``df = 1..df_max`` take the first path model
  of exactly that size, refit least squares on the *original* data, and keep
  the size with the smallest BIC.
* first-with-df: the first path model with at least ``k`` predictors.
"""
from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .errors import NoSuchModel, SingularGram
from .lasso import LassoPath

log = logging.getLogger(__name__)

REFIT_COND_LIMIT = 1e12


class SelectionRule(str, enum.Enum):
    OLS_BIC = "ols-bic"
    FIRST_WITH_DF = "first-df"


@dataclass(frozen=True)
class SelectionResult:
    chosen_lambda: float
    chosen_support: np.ndarray
    df: int
    rule: SelectionRule
    beta_hat: np.ndarray = field(repr=False)
    bic_scores: Optional[Dict[int, float]] = None
    path_index: int = 0

    def to_dict(self):
        out = {
            "rule": self.rule.value,
            "chosen_lambda": self.chosen_lambda,
            "df": self.df,
            "chosen_support": [int(j) for j in self.chosen_support],
            "path_index": self.path_index,
        }
        if self.bic_scores is not None:
            out["bic_scores"] = {str(k): v for k, v in self.bic_scores.items()}
        return out


def _result(path, index, rule, bic=None):
    sol = path.solutions[index]
    support = np.flatnonzero(sol.beta_hat)
    return SelectionResult(
        chosen_lambda=sol.lam,
        chosen_support=support,
        df=int(support.size),
        rule=rule,
        beta_hat=sol.beta_hat,
        bic_scores=bic,
        path_index=index,
    )


def first_with_df(path: LassoPath, k: int) -> SelectionResult:
    """First model, in decreasing-lambda order, with at least ``k`` nonzeros.

    When no model has exactly ``k`` predictors this is the next bigger one.
    """
    for i, sol in enumerate(path.solutions):
        if sol.active_count >= k:
            return _result(path, i, SelectionRule.FIRST_WITH_DF)
    raise NoSuchModel(f"no path model reaches {k} predictors (max {path.active_counts.max()})")


def ols_refit(X, Y, support, intercept: bool = True):
    """Least squares on ``X[:, support]`` (plus an intercept column by default).

    Returns ``(coef, rss)``; with an intercept, ``coef[0]`` is the intercept.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    cols = [X[:, np.asarray(support, dtype=np.int64)]]
    if intercept:
        cols.insert(0, np.ones((X.shape[0], 1)))
    A = np.hstack(cols)
    if A.shape[1] == 0:
        return np.zeros(0), float(Y @ Y)
    if A.shape[1] > A.shape[0]:
        raise SingularGram(f"{A.shape[1]} parameters but only {A.shape[0]} observations")
    Q, R = np.linalg.qr(A)
    dg = np.abs(np.diag(R))
    sv = np.linalg.svd(R, compute_uv=False)
    if dg.min() == 0 or sv[0] / sv[-1] > REFIT_COND_LIMIT:
        raise SingularGram("refit design is rank deficient")
    coef = np.linalg.solve(R, Q.T @ Y)
    resid = Y - A @ coef
    return coef, float(resid @ resid)


def gaussian_bic(rss: float, n: int, k_params: int) -> float:
    """BIC of a Gaussian linear model with the variance estimated by ``rss/n``.

    ``k_params`` should count the variance as a parameter.
    """
    if rss <= 0:
        return -math.inf
    return n * math.log(2 * math.pi * rss / n) + n + k_params * math.log(n)


def ols_bic_select(
    path: LassoPath,
    X_orig,
    Y_orig,
    df_max: int = 40,
    intercept: bool = True,
) -> SelectionResult:
    """Pick the path model whose OLS refit on the original data has the lowest BIC."""
    n = len(Y_orig)
    counts = path.active_counts
    bic: Dict[int, float] = {}
    index_of: Dict[int, int] = {}
    for df in range(1, df_max + 1):
        hits = np.flatnonzero(counts == df)
        if hits.size == 0:
            continue
        i = int(hits[0])
        support = np.flatnonzero(path.solutions[i].beta_hat)
        try:
            _, rss = ols_refit(X_orig, Y_orig, support, intercept)
        except SingularGram as exc:
            warnings.warn(f"skipping df={df}: {exc}", RuntimeWarning, stacklevel=2)
            continue
        k = df + int(intercept) + 1
        bic[df] = gaussian_bic(rss, n, k)
        index_of[df] = i
    if not bic:
        raise NoSuchModel(f"no path model with 1..{df_max} predictors could be scored")
    best = min(bic, key=lambda d: (bic[d], d))
    log.debug("ols-bic scored df %s, chose %d", sorted(bic), best)
    return _result(path, index_of[best], SelectionRule.OLS_BIC, bic)
