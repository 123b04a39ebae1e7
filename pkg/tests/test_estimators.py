"""Unit tests for the scikit-learn estimator wrappers."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.utils.validation import check_is_fitted

from tbsreg import LassoRegressor, QuantileLassoRegressor, TbsRegressor
from tbsreg import simlab
from tbsreg import samplers as smp


def p3_data(seed=0):
    sc = simlab.Scenario(n=50, p=3, beta0=np.array([3.0, 0.0, 2.0]),
                         eta0=1.0, sigma0=0.3, seed=seed, name="p3")
    data, truth = simlab.generate(sc, smp.rng_for(seed, 1))
    return data.X, data.y, truth


def test_tbs_regressor_recovers_support():
    X, y, truth = p3_data()
    est = TbsRegressor(n_iter=2000, burn_in=1000, thin=2, seed=4)
    est.fit(X, y)
    assert est.support_ == [0, 2]
    assert est.coef_[1] == 0.0
    assert est.coef_[0] == pytest.approx(3.0, abs=0.3)
    pred = est.predict(X[:5])
    assert np.allclose(pred, X[:5] @ est.coef_)


def test_tbs_regressor_quantiles_bracket_median():
    X, y, _ = p3_data(seed=1)
    est = TbsRegressor(n_iter=1000, burn_in=500, seed=5)
    est.fit(X, y)
    Xq = np.abs(X[:4]) + 0.5
    q25 = est.predict_quantile(Xq, 0.25)
    q50 = est.predict_quantile(Xq, 0.5)
    q75 = est.predict_quantile(Xq, 0.75)
    assert np.all(q25 < q50) and np.all(q50 < q75)
    assert np.allclose(q50, est.predict(Xq))


def test_tbs_regressor_sklearn_clone_and_params():
    est = TbsRegressor(variant="tbst", n_iter=100, burn_in=50, seed=1)
    cl = clone(est)
    assert cl.get_params()["variant"] == "tbst"
    with pytest.raises(Exception):
        check_is_fitted(cl, "coef_")


def test_lasso_regressor_fixed_penalty():
    X, y, _ = p3_data(seed=2)
    est = LassoRegressor(lam=0.01).fit(X, y)
    assert 0 in est.support_ and 2 in est.support_
    assert est.kkt_residual_ <= 1e-8
    assert est.predict(X).shape == y.shape


def test_lasso_regressor_cv_path():
    X, y, _ = p3_data(seed=3)
    est = LassoRegressor().fit(X, y)
    assert est.lam_ > 0
    assert len(est.cv_path_["cv_loss"]) == len(est.cv_path_["grid"])


def test_quantile_regressor_fits():
    X, y, _ = p3_data(seed=4)
    est = QuantileLassoRegressor(tau=0.5, lam=0.01).fit(X, y)
    assert 0 in est.support_
    assert est.smoothing_ <= 1e-6
    assert est.predict(X).shape == y.shape


def test_estimators_deterministic():
    X, y, _ = p3_data(seed=5)
    a = TbsRegressor(n_iter=400, burn_in=200, seed=7).fit(X, y)
    b = TbsRegressor(n_iter=400, burn_in=200, seed=7).fit(X, y)
    assert np.array_equal(a.coef_, b.coef_)
    assert a.eta_ == b.eta_
