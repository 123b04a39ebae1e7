"""scikit-learn style estimators wrapping the samplers and baselines, so
the models compose with pipelines, grid search and the usual tooling."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import baselines, samplers
from . import model as mdl
from .model import Dataset, Variant
from .transform import gpow, gpow_inv


class TbsRegressor(BaseEstimator, RegressorMixin):
    """Bayesian transform-both-sides median regression with spike-and-slab
    variable selection.

    Parameters
    ----------
    variant : one of "tbs", "tbso", "tbst", "tbss", "tbscn".
    n_iter, burn_in, thin, seed, adapt : MCMC settings.
    threshold : marginal inclusion probability cutoff (strict) for the
        selected support.
    prior : optional PriorHyper overriding the defaults.
    """

    def __init__(self, variant="tbs", n_iter=20000, burn_in=10000, thin=5,
                 seed=0, adapt=True, threshold=0.5, prior=None):
        self.variant = variant
        self.n_iter = n_iter
        self.burn_in = burn_in
        self.thin = thin
        self.seed = seed
        self.adapt = adapt
        self.threshold = threshold
        self.prior = prior

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        data = Dataset(X=X, y=y)
        variant = Variant(self.variant)
        config = samplers.McmcConfig(n_iter=self.n_iter, burn_in=self.burn_in,
                                     thin=self.thin, seed=self.seed,
                                     adapt=self.adapt)
        hyper = self.prior or mdl.PriorHyper()
        self.chain_ = samplers.run_chain(data, variant, hyper=hyper,
                                         config=config)
        self.summary_ = samplers.select_support(self.chain_, self.threshold)
        self.coef_ = np.where(
            np.isin(np.arange(data.p), self.summary_.selected),
            self.summary_.beta_mean, 0.0)
        self.support_ = list(self.summary_.selected)
        self.inclusion_prob_ = self.summary_.inclusion_prob
        self.eta_ = float(np.mean(self.chain_.draws["eta"]))
        self.sigma2_ = float(np.mean(self.chain_.draws["sigma2"]))
        self.nu_ = float(np.mean(self.chain_.draws["nu"]))
        self.rho_ = float(np.mean(self.chain_.draws["rho"]))
        self.n_features_in_ = data.p
        return self

    def predict(self, X):
        """Posterior median prediction x' beta_hat."""
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return X @ self.coef_

    def predict_quantile(self, X, alpha):
        """Fitted alpha-quantile of the response at each row of X."""
        check_is_fitted(self, "coef_")
        X = check_array(X)
        med = X @ self.coef_
        if alpha == 0.5:
            return med
        variant = Variant(self.variant)
        zstar = mdl.error_quantile(alpha, variant, self.sigma2_,
                                   self.nu_, self.rho_)
        return gpow_inv(gpow(med, self.eta_) + zstar, self.eta_)


class LassoRegressor(BaseEstimator, RegressorMixin):
    """L1-penalized least squares via coordinate descent; the penalty is
    cross-validated when not given."""

    def __init__(self, lam=None, folds=5, grid=None, seed=0):
        self.lam = lam
        self.folds = folds
        self.grid = grid
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        lam = self.lam
        if lam is None:
            lam, self.cv_path_ = baselines.cv_select(
                X, y, "lasso", folds=self.folds, grid=self.grid,
                seed=self.seed)
        fit = baselines.lasso_fit(X, y, lam)
        self.lam_ = lam
        self.coef_ = fit.beta
        self.intercept_ = fit.intercept
        self.support_ = fit.support
        self.kkt_residual_ = fit.kkt_residual
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return self.intercept_ + X @ self.coef_


class QuantileLassoRegressor(BaseEstimator, RegressorMixin):
    """L1-penalized quantile regression via smoothed pinball loss."""

    def __init__(self, tau=0.5, lam=None, folds=5, grid=None, seed=0):
        self.tau = tau
        self.lam = lam
        self.folds = folds
        self.grid = grid
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        lam = self.lam
        if lam is None:
            lam, self.cv_path_ = baselines.cv_select(
                X, y, "quantile", folds=self.folds, grid=self.grid,
                tau=self.tau, seed=self.seed)
        fit = baselines.quantile_lasso_fit(X, y, self.tau, lam)
        self.lam_ = lam
        self.coef_ = fit.beta
        self.intercept_ = fit.intercept
        self.support_ = fit.support
        self.smoothing_ = fit.smoothing
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return self.intercept_ + X @ self.coef_
