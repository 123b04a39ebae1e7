"""Unit tests for the evaluation metrics and table emission."""

import numpy as np
import pytest

from tbsreg import metrics
from tbsreg import samplers as smp
from tbsreg.model import Dataset, Variant
from tbsreg.transform import gpow

BETA0 = np.array([3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0])


# selection metrics -------------------------------------------------------

def test_exact_support_is_perfect():
    m = metrics.selection_metrics(BETA0, [{0, 1, 4}])
    assert (m.masking, m.swamping, m.joint_detection) == (0.0, 0.0, 1.0)
    assert m.n_selected == 3.0


def test_one_extra_selection():
    # true support {0,1,4}; selected {0,1,4,6} -> S = 1/5, JD = 1
    m = metrics.selection_metrics(BETA0, [{0, 1, 4, 6}])
    assert m.masking == 0.0
    assert m.swamping == pytest.approx(0.2)
    assert m.joint_detection == 1.0


def test_missed_signal():
    m = metrics.selection_metrics(BETA0, [{0, 1}])
    assert m.masking == pytest.approx(1.0 / 3.0)
    assert m.swamping == 0.0
    assert m.joint_detection == 0.0


def test_replication_averaging_and_permutation_invariance():
    reps = [{0, 1, 4}, {0, 1}, {0, 1, 4, 6}]
    a = metrics.selection_metrics(BETA0, reps)
    b = metrics.selection_metrics(BETA0, reps[::-1])
    assert (a.masking, a.swamping, a.joint_detection, a.n_selected) == \
        (b.masking, b.swamping, b.joint_detection, b.n_selected)
    assert a.joint_detection == pytest.approx(2.0 / 3.0)
    # JD = 1 - fraction of replications with masking > 0, exactly
    frac_masked = np.mean([1.0, 0.0, 0.0][::-1])  # one rep missed a signal
    assert a.joint_detection == pytest.approx(1.0 - 1.0 / 3.0)


def test_all_zero_truth_rejected():
    with pytest.raises(ValueError):
        metrics.selection_metrics(np.zeros(4), [set()])


# influence ratio ---------------------------------------------------------

def make_data(seed=0, n=30):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, len(BETA0)))
    from tbsreg.transform import gpow_inv
    t = gpow(X @ BETA0, 1.5) + 0.5 * rng.standard_normal(n)
    return Dataset(X=X, y=gpow_inv(t, 1.5))


def test_l_ratio_zero_at_truth():
    data = make_data()
    assert metrics.l_ratio(BETA0, data, BETA0, 1.5, 0.5) == 0.0


def test_l_ratio_moves_off_truth():
    data = make_data()
    est = BETA0.copy()
    est[0] = 2.0
    assert metrics.l_ratio(est, data, BETA0, 1.5, 0.5) != 0.0


def test_log_influence_formula():
    data = make_data(seed=1, n=10)
    est = BETA0.copy()
    eta0, sigma0 = 1.5, 0.5
    resid = gpow(data.y, eta0) - gpow(data.X @ est, eta0)
    expected = (np.sum(resid ** 2) / (2 * sigma0 ** 2)
                - 0.5 * data.n * np.log(2 * np.pi * sigma0 ** 2)
                + (eta0 - 1.0) * np.sum(np.log(np.abs(data.y))))
    assert metrics.log_influence(est, data, eta0, sigma0) == \
        pytest.approx(expected, rel=1e-12)


# posterior predictive loss ----------------------------------------------

def chain_of(draws_list, n=2, p=1):
    k = len(draws_list)
    draws = {
        "eta": np.array([d["eta"] for d in draws_list]),
        "sigma2": np.ones(k),
        "theta": np.array([d["theta"] for d in draws_list]),
        "z": np.array([d["z"] for d in draws_list], dtype=int),
        "pi0": np.full(k, 0.5), "sigma_beta2": np.ones(k),
        "gamma": np.array([d.get("gamma", np.zeros(n)) for d in draws_list]),
        "zg": np.zeros((k, n), dtype=int),
        "pi_gamma": np.full(k, 0.9), "u": np.ones((k, n)),
        "nu": np.full(k, 4.0), "rho": np.full(k, 0.5),
    }
    return smp.ChainOutput(variant=Variant.TBS_SG, draws=draws,
                           acceptance_rates={}, seed=0,
                           config=smp.McmcConfig(n_iter=2, burn_in=1))


def test_ppl_zero_residuals():
    data = Dataset(X=np.array([[1.0], [1.0]]), y=np.array([2.0, 2.0]))
    chain = chain_of([{"eta": 1.0, "theta": [1.0], "z": [1]}])
    assert metrics.ppl(chain, data, Variant.TBS_SG) == pytest.approx(0.0, abs=1e-20)


def test_ppl_arithmetic_mean():
    # residual sums of squares 4 and 6 across two draws -> 5
    data = Dataset(X=np.array([[1.0], [1.0]]), y=np.array([2.0, 2.0]))
    # draw 1: beta such that residual sqrt(2) each -> ssr 4
    d1 = {"eta": 1.0, "theta": [1.0 - np.sqrt(2.0)], "z": [1]}
    # draw 2: residual sqrt(3) each -> ssr 6
    d2 = {"eta": 1.0, "theta": [1.0 - np.sqrt(3.0)], "z": [1]}
    chain = chain_of([d1, d2])
    assert metrics.ppl(chain, data, Variant.TBS_SG) == pytest.approx(5.0, rel=1e-10)


def test_ppl_tbso_gamma_absorbs():
    data = Dataset(X=np.array([[1.0], [1.0]]), y=np.array([3.0, 4.0]))
    resid = gpow(data.y, 1.0) - gpow(np.array([1.0, 1.0]), 1.0)
    chain = chain_of([{"eta": 1.0, "theta": [0.0], "z": [1], "gamma": resid}])
    assert metrics.ppl(chain, data, Variant.TBSO_SG) == pytest.approx(0.0, abs=1e-20)


def test_ppl_empty_chain_raises():
    data = Dataset(X=np.array([[1.0], [1.0]]), y=np.array([2.0, 2.0]))
    chain = chain_of([])
    chain.draws["eta"] = np.empty(0)
    with pytest.raises(ValueError):
        metrics.ppl(chain, data, Variant.TBS_SG)


# residual and quantile tables -------------------------------------------

def test_residual_table_single_row_quantile():
    data = Dataset(X=np.array([[1.0], [1.0]]), y=np.array([2.0, 3.0]))
    rows = metrics.residual_table(data, np.array([2.0]), "raw")
    assert len(rows) == 2
    # plotting positions (i - 0.5)/n at n=2: Phi^{-1}(0.25), Phi^{-1}(0.75)
    assert rows[0][1] == pytest.approx(-rows[1][1])
    assert rows[0][0] <= rows[1][0]


def test_residual_table_qq_slope_near_one():
    rng = np.random.default_rng(44)
    n = 1000
    X = np.ones((n, 1))
    resid = rng.standard_normal(n)
    y = 5.0 + resid
    data = Dataset(X=X, y=y)
    rows = metrics.residual_table(data, np.array([5.0]), "raw")
    r = np.array([a for a, _ in rows])
    q = np.array([b for _, b in rows])
    slope = np.polyfit(q, r, 1)[0]
    assert 0.9 <= slope <= 1.1


def test_residual_table_needs_eta_for_transformed():
    data = Dataset(X=np.array([[1.0], [1.0]]), y=np.array([2.0, 3.0]))
    with pytest.raises(ValueError):
        metrics.residual_table(data, np.array([2.0]), "transformed")
    with pytest.raises(ValueError):
        metrics.residual_table(data, np.array([2.0]), "weird")


def test_quantile_curve_table_brackets_median():
    data = Dataset(X=np.abs(np.random.default_rng(3).standard_normal((5, 1))) + 1.0,
                   y=np.array([2.0, 3.0, 1.5, 2.5, 4.0]))
    chain = chain_of([{"eta": 1.0, "theta": [1.0], "z": [1]}] * 3, n=5)
    rows = metrics.quantile_curve_table(chain, data, [0.25, 0.5, 0.75])
    for med, q25, q50, q75 in rows:
        assert q25 < q50 < q75
        assert q50 == pytest.approx(med, rel=1e-9)


def test_quantile_curve_rejects_bad_alpha():
    data = Dataset(X=np.ones((2, 1)), y=np.array([2.0, 3.0]))
    chain = chain_of([{"eta": 1.0, "theta": [1.0], "z": [1]}])
    with pytest.raises(ValueError):
        metrics.quantile_curve_table(chain, data, [0.0, 0.5])


# CSV emission ------------------------------------------------------------

def test_write_csv_round_trip_formatting(tmp_path):
    path = tmp_path / "t.csv"
    metrics.write_csv(path, ["a", "b", "c", "d"],
                      [(1, 0.1, True, "x"), (20, 1.0 / 3.0, False, "y")])
    text = path.read_text()
    lines = text.split("\n")
    assert lines[0] == "a,b,c,d"
    assert lines[1] == "1,0.1,True,x"
    assert lines[2] == f"20,{1.0 / 3.0!r},False,y"
    # ints stay integral, floats are shortest round-trip decimals
    assert "20.0" not in text
    assert float(lines[2].split(",")[1]) == 1.0 / 3.0
