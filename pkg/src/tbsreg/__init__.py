"""Bayesian variable selection for skewed heteroscedastic responses via
transform-both-sides median regression, with frequentist baselines, a
replicated simulation harness and a numerical posterior-consistency lab."""

from .baselines import (
    ConvergenceError,
    cv_select,
    lambda_max,
    lasso_fit,
    pinball_loss,
    quantile_lasso_fit,
)
from .consistency import (
    AltDesign,
    bound_check_upper,
    consistency_curve,
    lemma1_check,
    log_marginal_closed_form,
    marginal_likelihood_quad,
    support_posterior,
)
from .estimators import LassoRegressor, QuantileLassoRegressor, TbsRegressor
from .io import ingest_csv, read_chain_jsonl, write_chain_jsonl
from .metrics import l_ratio, ppl, selection_metrics
from .model import Dataset, PriorHyper, Variant
from .samplers import ChainOutput, McmcConfig, McmcDivergenceError, run_chain, select_support
from .simlab import Scenario, generate, preset, preset_ids, run_study
from .transform import TransformDomainError, gpow, gpow_deriv, gpow_inv, log_jacobian

__version__ = "0.1.0"

__all__ = [
    "AltDesign",
    "ChainOutput",
    "ConvergenceError",
    "Dataset",
    "LassoRegressor",
    "McmcConfig",
    "McmcDivergenceError",
    "PriorHyper",
    "QuantileLassoRegressor",
    "Scenario",
    "TbsRegressor",
    "TransformDomainError",
    "Variant",
    "bound_check_upper",
    "consistency_curve",
    "cv_select",
    "generate",
    "gpow",
    "gpow_deriv",
    "gpow_inv",
    "ingest_csv",
    "l_ratio",
    "lambda_max",
    "lasso_fit",
    "lemma1_check",
    "log_jacobian",
    "log_marginal_closed_form",
    "marginal_likelihood_quad",
    "pinball_loss",
    "ppl",
    "preset",
    "preset_ids",
    "quantile_lasso_fit",
    "read_chain_jsonl",
    "run_chain",
    "run_study",
    "select_support",
    "selection_metrics",
    "support_posterior",
    "write_chain_jsonl",
]
