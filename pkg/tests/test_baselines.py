"""Unit tests for the frequentist comparators."""

import itertools

import numpy as np
import pytest

from tbsreg import baselines as bl


def toy_data(seed=0, n=30, p=3, beta=(2.0, 0.0, -1.0), sigma=0.1):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = X @ np.asarray(beta) + sigma * rng.standard_normal(n)
    return X, y


# lasso -------------------------------------------------------------------

def test_lasso_zero_penalty_matches_ols():
    X, y = toy_data()
    fit = bl.lasso_fit(X, y, 0.0)
    Xa = np.c_[np.ones(len(y)), X]
    coef = np.linalg.lstsq(Xa, y, rcond=None)[0]
    assert fit.intercept == pytest.approx(coef[0], abs=1e-8)
    assert np.allclose(fit.beta, coef[1:], atol=1e-8)


def test_lasso_lambda_max_zeroes_everything():
    X, y = toy_data()
    lmax = bl.lambda_max(X, y)
    fit = bl.lasso_fit(X, y, lmax * 1.0000001)
    assert np.all(fit.beta == 0.0)
    assert fit.intercept == pytest.approx(np.mean(y), abs=1e-10)


def test_lasso_matches_brute_force_grid():
    # p=2 toy problem against exhaustive grid minimization of the objective
    rng = np.random.default_rng(4)
    X = rng.standard_normal((20, 2))
    y = 1.5 * X[:, 0] - 0.5 * X[:, 1] + 0.05 * rng.standard_normal(20)
    lam = 0.1
    fit = bl.lasso_fit(X, y, lam)
    obj_fit = bl.lasso_objective(X, y, fit.beta, fit.intercept, lam)
    grid = np.linspace(-2.0, 2.0, 161)  # step 0.025
    best = np.inf
    for b1, b2 in itertools.product(grid, grid):
        beta = np.array([b1, b2])
        b0 = float(np.mean(y - X @ beta))
        best = min(best, bl.lasso_objective(X, y, beta, b0, lam))
    # the solver must be at least as good as the grid optimum (up to its
    # resolution) and the grid must not beat the solver by more than 1e-6
    assert obj_fit <= best + 1e-6


def test_lasso_kkt_conditions():
    X, y = toy_data(seed=1, n=50, p=5, beta=(3.0, 0.0, 0.0, 1.0, 0.0))
    for lam in (0.01, 0.1, 0.5):
        fit = bl.lasso_fit(X, y, lam)
        assert fit.kkt_residual <= 1e-8
        r = y - fit.intercept - X @ fit.beta
        grad = X.T @ r / len(y)
        for j in range(5):
            if fit.beta[j] == 0.0:
                assert abs(grad[j]) <= lam + 1e-8
            else:
                assert grad[j] == pytest.approx(lam * np.sign(fit.beta[j]),
                                                abs=1e-8)


def test_lasso_rejects_negative_penalty():
    X, y = toy_data()
    with pytest.raises(ValueError):
        bl.lasso_fit(X, y, -0.1)


# quantile lasso ----------------------------------------------------------

def test_quantile_median_sign_balance():
    # tau=0.5, lam=0, single covariate: residual-sign imbalance within 1
    rng = np.random.default_rng(6)
    X = rng.standard_normal((41, 1))
    y = 2.0 * X[:, 0] + rng.standard_normal(41)
    fit = bl.quantile_lasso_fit(X, y, 0.5, 0.0)
    r = y - fit.intercept - X @ fit.beta
    imbalance = abs(int(np.sum(r > 1e-8)) - int(np.sum(r < -1e-8)))
    assert imbalance <= 1
    assert fit.smoothing <= 1e-6


def test_quantile_huge_penalty_gives_quantile_intercept():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((60, 2))
    y = X[:, 0] + rng.standard_normal(60)
    for tau in (0.25, 0.5, 0.75):
        fit = bl.quantile_lasso_fit(X, y, tau, 100.0)
        assert np.all(fit.beta == 0.0)
        assert fit.intercept == pytest.approx(np.quantile(y, tau), abs=0.05)


def test_quantile_matches_brute_force_grid():
    rng = np.random.default_rng(10)
    X = rng.standard_normal((20, 2))
    y = X[:, 0] - 0.5 * X[:, 1] + 0.2 * rng.standard_normal(20)
    tau, lam = 0.5, 0.05
    fit = bl.quantile_lasso_fit(X, y, tau, lam)
    grid0 = np.linspace(-0.5, 0.5, 41)
    grid = np.linspace(-1.5, 1.5, 61)
    best = np.inf
    for b0 in grid0:
        for b1 in grid:
            for b2 in grid:
                best = min(best, bl.quantile_objective(
                    X, y, np.array([b1, b2]), b0, tau, lam))
    assert fit.objective <= best + 1e-4


def test_quantile_smoothing_gap_bound():
    rng = np.random.default_rng(12)
    r = rng.standard_normal(100)
    for tau in (0.3, 0.5, 0.8):
        for h in (1e-1, 1e-3):
            gap = np.abs(bl.pinball_loss(r, tau) - bl.smoothed_pinball(r, tau, h))
            assert np.all(gap <= h * max(tau, 1.0 - tau) + 1e-12)


def test_quantile_rejects_bad_tau():
    X, y = toy_data()
    with pytest.raises(ValueError):
        bl.quantile_lasso_fit(X, y, 1.5, 0.1)


# cross-validation --------------------------------------------------------

def test_cv_single_point_grid():
    X, y = toy_data()
    lam, path = bl.cv_select(X, y, "lasso", grid=[0.123])
    assert lam == 0.123
    assert len(path["cv_loss"]) == 1


def test_cv_tie_breaks_toward_larger_penalty():
    # constant response: every penalty above 0 gives the null model and an
    # identical CV loss; the larger penalty must win
    X = np.eye(6)
    y = np.full(6, 2.0)
    lam, _ = bl.cv_select(X, y, "lasso", folds=3, grid=[0.5, 1.0, 2.0])
    assert lam == 2.0


def test_cv_recovers_support_on_noiseless_data():
    rng = np.random.default_rng(14)
    X = rng.standard_normal((60, 4))
    beta0 = np.array([3.0, 0.0, 2.0, 0.0])
    y = X @ beta0
    lam, _ = bl.cv_select(X, y, "lasso", seed=3)
    fit = bl.lasso_fit(X, y, lam)
    assert fit.support == [0, 2]


def test_cv_deterministic():
    X, y = toy_data(seed=2)
    a = bl.cv_select(X, y, "lasso", seed=11)
    b = bl.cv_select(X, y, "lasso", seed=11)
    assert a[0] == b[0]
    assert np.array_equal(a[1]["cv_loss"], b[1]["cv_loss"])


def test_cv_validates_input():
    X, y = toy_data(n=4)
    with pytest.raises(ValueError):
        bl.cv_select(X, y, folds=1)
    with pytest.raises(ValueError):
        bl.cv_select(X, y, grid=[])
    with pytest.raises(ValueError):
        bl.cv_select(X, y, method="ridge", grid=[0.1])
