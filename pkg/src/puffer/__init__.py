"""Puffer-preconditioned Lasso: transform, solver, diagnostics and studies."""
from ._accel import BACKEND, HAS_NUMBA
from .core import (
    PufferDecomposition,
    RegressionProblem,
    SupportSet,
    TransformedProblem,
    apply_preconditioner,
    orthonormality_error,
    puffer_transform,
    thin_svd,
    transform_design,
)
from .designs import (
    DesignKind,
    DesignSpec,
    ic_violating_covariance,
    sample_beta_star,
    sample_design,
    sample_noise,
    sample_stiefel_uniform,
)
from .diagnostics import (
    DiagnosticsReport,
    SignReport,
    c_min,
    center_and_scale,
    high_dim_lambda,
    diagnose,
    ic_score,
    kkt_check,
    kkt_recovery_check,
    recovery_probability,
    pairwise_correlation_sample,
    psi_bound,
    sign_report,
    theorem1_bound,
    theorem3_bound,
)
from .errors import *  # noqa: F401,F403
from .experiments import ExperimentConfig, ExperimentResult, Study, run_experiment
from .lasso import LassoPath, LassoSolution, lambda_max, lasso_path, soft_threshold, solve_lasso
from .selection import SelectionResult, first_with_df, ols_bic_select

__version__ = "0.1.0"
