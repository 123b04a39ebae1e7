"""Unit tests for the consistency lab: design, marginal likelihoods,
support posteriors, trend curve plumbing and the quadratic-form bound."""

import numpy as np
import pytest

from tbsreg import consistency as cs
from tbsreg import samplers as smp
from tbsreg.model import Dataset, PriorHyper
from tbsreg.transform import gpow

HYPER = PriorHyper(a=2.0, b=2.0)


def alt_data(n=20, p=2, beta01=3.0, eta0=1.2, sigma0=1.0, seed=0, stream=1):
    return cs.simulate_alt_data(n, p, beta01, eta0, sigma0,
                                smp.rng_for(seed, stream))


# design ------------------------------------------------------------------

def test_alt_design_matrix():
    d = cs.AltDesign(6, 3)
    X = d.matrix()
    assert np.array_equal(X[:, 0], [1, -1, 1, -1, 1, -1])
    assert np.all(X[:, 1:] == 1.0)


def test_alt_design_validation():
    with pytest.raises(ValueError):
        cs.AltDesign(5, 2)          # odd n
    with pytest.raises(ValueError):
        cs.AltDesign(20, 15)        # p > n / log 4
    assert cs.max_p(20) == 14
    cs.AltDesign(20, 14)


# marginal likelihoods ----------------------------------------------------

def test_empty_support_quadrature_is_closed_form():
    data = alt_data()
    log_m, err = cs.marginal_likelihood_quad(data, (), 1.2, HYPER, 1.0)
    closed = cs.log_marginal_closed_form(data, (), 1.2, HYPER, 1.0)
    assert log_m == pytest.approx(closed, abs=1e-12)
    assert err == 0.0


@pytest.mark.parametrize("support", [(0,), (1,)])
@pytest.mark.parametrize("eta", [0.8, 1.2, 1.8])
def test_flat_slab_quadrature_matches_closed_form(support, eta):
    # the printed single-coefficient forms are the flat-slab limit; at
    # sigma_beta2 = 1e10 the finite-slab correction is far below 1e-8
    data = alt_data(eta0=eta, seed=3)
    log_m, err = cs.marginal_likelihood_quad(data, support, eta, HYPER,
                                             sigma_beta2=1e10)
    closed = cs.log_marginal_closed_form(data, support, eta, HYPER, 1e10)
    assert abs(log_m - closed) <= 1e-8
    assert err <= 1e-4


def test_slab_scale_monotone_for_tail_supports():
    # shrinking the slab concentrates mass near beta = 1 (t = 0); for data
    # needing a far-out coefficient the marginal falls as the slab widens
    # past the peak, and moves continuously in between
    data = alt_data(beta01=5.0, eta0=1.2, seed=5)
    vals = [cs.marginal_likelihood_quad(data, (0,), 1.2, HYPER, s)[0]
            for s in (1.0, 10.0, 100.0, 1000.0)]
    diffs = np.diff(vals)
    assert np.all(np.abs(diffs) < 10.0)      # continuous, no jumps
    assert vals[1] > vals[2] > vals[3]       # decreasing once the peak is in


def test_quadrature_rejects_large_support():
    data = alt_data()
    with pytest.raises(ValueError):
        cs.marginal_likelihood_quad(data, (0, 1, 2), 1.2, HYPER)


def test_closed_form_rejects_pairs():
    data = alt_data()
    with pytest.raises(ValueError):
        cs.log_marginal_closed_form(data, (0, 1), 1.2, HYPER, 1.0)


# support posteriors ------------------------------------------------------

def test_posterior_sums_to_one():
    data = alt_data(n=20, p=5, seed=7)
    post = cs.support_posterior(data, 1.2, 0.9, HYPER)
    total = sum(c.posterior for c in post.classes)
    assert total == pytest.approx(1.0, abs=1e-6)
    assert post.truncated
    assert 0.0 <= post.truncation_estimate < 1.0


def test_posterior_noise_prefers_empty_support():
    rng = smp.rng_for(11, 1)
    design = cs.AltDesign(40, 5)
    t = -1.0 / 1.2 + 1.0 * rng.standard_normal(40)   # beta0 = 0 truth
    from tbsreg.transform import gpow_inv
    y = gpow_inv(t, 1.2)
    data = Dataset(X=design.matrix(), y=y)
    post = cs.support_posterior(data, 1.2, 0.9, HYPER)
    best = max(post.classes, key=lambda c: c.posterior)
    assert best.representative == ()


def test_posterior_strong_signal_finds_true_support():
    data = alt_data(n=100, p=5, beta01=3.0, eta0=1.8, seed=13)
    post = cs.support_posterior(data, 1.8, 0.9, HYPER)
    assert post.prob((0,)) > 0.9


def test_posterior_class_multiplicities():
    data = alt_data(n=20, p=5, seed=17)
    post = cs.support_posterior(data, 1.2, 0.9, HYPER)
    mult = {c.representative: c.multiplicity for c in post.classes}
    assert mult[()] == 1 and mult[(0,)] == 1
    assert mult[(1,)] == 4          # four exchangeable ones-columns
    assert mult[(0, 1)] == 4
    assert mult[(1, 2)] == 6
    # individual supports in a class share the class mass equally
    cls = next(c for c in post.classes if c.representative == (1, 2))
    assert post.prob((2, 3)) == pytest.approx(cls.posterior / 6.0)


def test_posterior_validates_pi0():
    data = alt_data()
    with pytest.raises(ValueError):
        cs.support_posterior(data, 1.2, 1.5, HYPER)


# trend curve -------------------------------------------------------------

def test_curve_requires_increasing_grid():
    with pytest.raises(ValueError):
        cs.consistency_curve(1.2, 0.9, [20, 20], replications=1)


def test_curve_high_snr_saturates():
    # slab wide enough to cover t = g(10) ~ 12.4, else the prior penalty
    # on the huge signal coefficient cancels its fit advantage
    rows = cs.consistency_curve(1.2, 0.9, [20], replications=2,
                                beta01=10.0, sigma0=0.1, sigma_beta2=100.0,
                                seed=0)
    (n, p, prob), = rows
    assert (n, p) == (20, 14)
    assert prob > 0.99


def test_curve_two_point_shape():
    rows = cs.consistency_curve(1.2, 0.9, [20, 40], replications=2, seed=1)
    assert [r[0] for r in rows] == [20, 40]
    assert all(0.0 <= r[2] <= 1.0 for r in rows)


# quadratic-form lower bound ---------------------------------------------

def test_lemma_bound_hand_case():
    # eta = 1, k = 2, z = (0, 0), beta = (1, 1):
    # means are g(2) = 1 and g(0) = -1, so LHS = 1 + 1 = 2
    holds, slack = cs.lemma1_check([0.0, 0.0], [1.0, 1.0], 1.0)
    assert holds
    z = np.array([0.0, 0.0])
    m_plus, m_minus = gpow(2.0, 1.0), gpow(0.0, 1.0)
    lhs = (0 - m_plus) ** 2 + (0 - m_minus) ** 2
    assert lhs == pytest.approx(2.0)
    # T_i = 0 at z = 0 and the cross term vanishes, leaving n t'At <= 0
    assert slack >= 0.0


def test_lemma_bound_zero_beta_vector_rejected_small_k():
    with pytest.raises(ValueError):
        cs.lemma1_check([1.0, -1.0], [2.0], 1.0)


def test_lemma_bound_fuzz_sample():
    rng = np.random.default_rng(101)
    for _ in range(2000):
        k = int(rng.choice([2, 3, 5]))
        n = 2 * int(rng.integers(1, 8))
        eta = float(rng.uniform(0.1, 1.9))
        z = rng.standard_normal(n) * rng.uniform(0.5, 5.0)
        beta = rng.standard_normal(k) * rng.uniform(0.5, 5.0)
        holds, slack = cs.lemma1_check(z, beta, eta)
        assert holds, (z.tolist(), beta.tolist(), eta, slack)


def test_upper_bound_vacuous_on_model_data():
    # for model-generated data the bound denominator goes negative (the
    # linear part of T_i dominates), so the check reports vacuity
    data = alt_data(n=20, p=2, eta0=1.2, seed=19)
    status, ratio = cs.bound_check_upper(data, 1.2, HYPER)
    assert status == "vacuous"
    assert np.isnan(ratio)


def test_upper_bound_holds_when_not_vacuous():
    # one huge transformed observation among tiny ones makes sum z^2
    # dominate sum |z|, so the denominator is positive and the bound binds
    from tbsreg.transform import gpow_inv
    eta = 1.2
    t = np.full(20, 0.01)
    t[0] = 400.0
    y = gpow_inv(t - 0.0, eta)
    data = Dataset(X=cs.AltDesign(20, 2).matrix(), y=y)
    status, ratio = cs.bound_check_upper(data, eta, HYPER)
    assert status == "holds"
    assert ratio > 0.0


def test_upper_bound_needs_two_columns():
    data = alt_data(n=20, p=3)
    with pytest.raises(ValueError):
        cs.bound_check_upper(data, 1.2, HYPER)
