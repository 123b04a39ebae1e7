"""Evaluation quantities for the simulation studies and data analyses:
masking/swamping/joint-detection, the L/L*-1 influence measure, posterior
predictive loss, Q-Q residual tables and quantile-curve tables.

All tables are emitted as UTF-8 CSV with LF line endings, headers, and
shortest round-trip float formatting.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import model as mdl
from .model import Variant
from .transform import gpow, log_jacobian


@dataclass
class SelectionMetrics:
    masking: float
    swamping: float
    n_selected: float
    joint_detection: float


def selection_metrics(true_beta, selected_per_rep):
    """Replication-averaged masking, swamping and joint-detection.

    selected_per_rep: iterable of index collections, one per replication.
    """
    true_beta = np.asarray(true_beta, dtype=float)
    true_support = set(np.nonzero(true_beta != 0.0)[0].tolist())
    true_zero = set(np.nonzero(true_beta == 0.0)[0].tolist())
    if not true_support:
        raise ValueError("masking undefined when the true coefficient vector is all zero")
    ms, ss, jds, counts = [], [], [], []
    for sel in selected_per_rep:
        sel = set(int(j) for j in sel)
        missed = len(true_support - sel)
        wrong = len(sel & true_zero)
        m = missed / len(true_support)
        s = wrong / len(true_zero) if true_zero else 0.0
        ms.append(m)
        ss.append(s)
        jds.append(1.0 if m == 0.0 else 0.0)
        counts.append(len(sel))
    return SelectionMetrics(
        masking=float(np.mean(ms)),
        swamping=float(np.mean(ss)),
        n_selected=float(np.mean(counts)),
        joint_detection=float(np.mean(jds)),
    )


def log_influence(est_beta, data, eta0, sigma0):
    """The printed influence formula evaluated at an estimate: quadratic
    term plus constant plus transform Jacobian.  (Implemented verbatim,
    including its sign convention.)"""
    est_beta = np.asarray(est_beta, dtype=float)
    resid = gpow(data.y, eta0) - gpow(data.X @ est_beta, eta0)
    n = data.n
    return float(np.sum(resid ** 2) / (2.0 * sigma0 ** 2)
                 - 0.5 * n * np.log(2.0 * np.pi * sigma0 ** 2)
                 + log_jacobian(data.y, eta0))


def l_ratio(est_beta, data, beta0, eta0, sigma0):
    """L/L* - 1 with L at the estimate and L* at the truth."""
    l_est = log_influence(est_beta, data, eta0, sigma0)
    l_true = log_influence(beta0, data, eta0, sigma0)
    if l_true == 0.0:
        raise ZeroDivisionError("reference influence value is zero")
    return float(l_est / l_true - 1.0)


def ppl(chain, data, variant, plug_in_eta=None):
    """Posterior predictive loss: MCMC average of the summed squared
    transformed residuals (shift-corrected for the location-shift variant).

    With plug_in_eta set, every draw is evaluated at that fixed transform
    power instead of its own.
    """
    if chain.n_draws == 0:
        raise ValueError("empty chain")
    total = 0.0
    betas = chain.beta_draws()
    for k in range(chain.n_draws):
        eta = plug_in_eta if plug_in_eta is not None else float(chain.draws["eta"][k])
        r = gpow(data.y, eta) - gpow(data.X @ betas[k], eta)
        if variant is Variant.TBSO_SG:
            r = r - chain.draws["gamma"][k]
        total += float(np.sum(r * r))
    return total / chain.n_draws


def point_estimates(chain, threshold=0.5):
    """Thresholded posterior-mean coefficient vector plus posterior means of
    eta and the shifts, matching the support-selection rule."""
    from .samplers import select_support

    summ = select_support(chain, threshold)
    beta_hat = np.zeros_like(summ.beta_mean)
    for j in summ.selected:
        beta_hat[j] = summ.beta_mean[j]
    eta_hat = float(np.mean(chain.draws["eta"]))
    gamma_hat = np.mean(chain.draws["gamma"], axis=0)
    sigma2_hat = float(np.mean(chain.draws["sigma2"]))
    return beta_hat, eta_hat, gamma_hat, sigma2_hat


def residual_table(data, beta_hat, kind="raw", eta_hat=None, gamma_hat=None):
    """Sorted residuals paired with standard-normal plotting quantiles."""
    if kind == "raw":
        resid = data.y - data.X @ beta_hat
    elif kind == "transformed":
        if eta_hat is None:
            raise ValueError("transformed residuals need eta_hat")
        resid = gpow(data.y, eta_hat) - gpow(data.X @ beta_hat, eta_hat)
        if gamma_hat is not None:
            resid = resid - gamma_hat
    else:
        raise ValueError(f"unknown residual kind {kind!r}")
    resid = np.sort(np.asarray(resid, dtype=float))
    n = len(resid)
    qn = stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    return [(float(r), float(q)) for r, q in zip(resid, qn)]


def quantile_curve_table(chain, data, alphas, variant=Variant.TBS_SG,
                         threshold=0.5):
    """Rows of (fitted median, per-alpha fitted quantiles), one per
    observation, from the posterior point estimates."""
    alphas = [float(a) for a in alphas]
    if any(not 0.0 < a < 1.0 for a in alphas):
        raise ValueError("alphas must lie in (0, 1)")
    beta_hat, eta_hat, _, sigma2_hat = point_estimates(chain, threshold)
    nu_hat = float(np.mean(chain.draws["nu"]))
    rho_hat = float(np.mean(chain.draws["rho"]))
    med = data.X @ beta_hat
    zstars = {a: (0.0 if a == 0.5 else
                  mdl.error_quantile(a, variant, sigma2_hat, nu_hat, rho_hat))
              for a in alphas}
    rows = []
    from .transform import gpow_inv

    for i in range(data.n):
        row = [float(med[i])]
        gm = gpow(med[i], eta_hat)
        for a in alphas:
            row.append(float(gpow_inv(gm + zstars[a], eta_hat)))
        rows.append(tuple(row))
    return rows


# CSV emission -----------------------------------------------------------

def format_float(x):
    return repr(float(x))


def write_csv(path, header, rows):
    """Plot-ready CSV: header row, shortest round-trip decimals, LF."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for v in row:
                if isinstance(v, bool):
                    cells.append(str(v))
                elif isinstance(v, (int, np.integer)):
                    cells.append(str(int(v)))
                elif isinstance(v, (float, np.floating)):
                    cells.append(format_float(v))
                else:
                    cells.append(str(v))
            fh.write(",".join(cells) + "\n")
