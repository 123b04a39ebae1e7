"""Numerical laboratory for the selection-consistency theory: the
alternating/ones design, marginal likelihoods of small supports by analytic
sigma^2 integration plus adaptive quadrature over the transformed
coefficients, exhaustive (equivalence-classed) support posteriors, trend
curves in n, and fuzzable quadratic-form lower bounds.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.special import gammaln, logsumexp

from .model import Dataset, PriorHyper
from .transform import check_eta, gpow, gpow_inv


@dataclass(frozen=True)
class AltDesign:
    """First column alternates +1/-1; the remaining p-1 columns are all
    ones, so only the first coefficient is identified."""

    n: int
    p: int

    def __post_init__(self):
        if self.n % 2 != 0 or self.n < 2:
            raise ValueError("n must be even and >= 2")
        if not 1 <= self.p <= self.n / math.log(4.0):
            raise ValueError(f"need 1 <= p <= n/log(4) = {self.n / math.log(4.0):.2f}")

    def matrix(self):
        X = np.ones((self.n, self.p))
        X[1::2, 0] = -1.0
        return X


def max_p(n):
    return int(math.floor(n / math.log(4.0)))


# marginal likelihoods ---------------------------------------------------

def _log_cn(y, eta, hyper):
    """Data-dependent constant: normal normalizers, transform Jacobian of
    the observations, and the inverse-gamma prior constant."""
    n = len(y)
    return (-0.5 * n * np.log(2.0 * np.pi)
            + (eta - 1.0) * float(np.sum(np.log(np.abs(y))))
            + hyper.a * np.log(hyper.b) - gammaln(hyper.a))


def _mean_for_support(design, support, eta, t):
    """Transformed-scale mean vector g(x_S' beta_S) on the alternating
    design, as a function of the transformed coefficients t."""
    beta = gpow_inv(np.asarray(t, dtype=float), eta)
    total = float(np.sum(beta))
    if 0 in support:
        b1 = beta[support.index(0)]
        rest = total - b1
        m_odd = gpow(b1 + rest, eta)
        m_even = gpow(-b1 + rest, eta)
        mean = np.empty(design.n)
        mean[0::2] = m_odd
        mean[1::2] = m_even
        return mean
    return np.full(design.n, gpow(total, eta))


def _log_kernel(z, mean, hyper):
    """log of Gamma(n/2+a) / (SSR/2 + b)^(n/2+a), the sigma^2-integrated
    likelihood kernel."""
    n = len(z)
    ssr = float(np.sum((z - mean) ** 2))
    return float(gammaln(0.5 * n + hyper.a)
                 - (0.5 * n + hyper.a) * np.log(0.5 * ssr + hyper.b))


def log_marginal_closed_form(data, support, eta, hyper, sigma_beta2):
    """Appendix closed forms (flat-slab normalization) for the empty
    support, the alternating column alone, and a single ones-column."""
    eta = check_eta(eta)
    z = gpow(data.y, eta)
    n = data.n
    lc = _log_cn(data.y, eta, hyper)
    support = tuple(sorted(support))
    if support == ():
        q = 0.5 * float(np.sum((z + 1.0 / eta) ** 2)) + hyper.b
        return lc + float(gammaln(0.5 * n + hyper.a)) \
            - (0.5 * n + hyper.a) * np.log(q)
    if len(support) != 1:
        raise ValueError("closed forms exist only for supports of size <= 1")
    head = (lc - 0.5 * np.log(n) - 0.5 * np.log(sigma_beta2)
            + float(gammaln(0.5 * (n - 1) + hyper.a)))
    if support == (0,):
        zo, ze = z[0::2], z[1::2]
        q = (0.5 * float(np.sum(zo ** 2))
             + 0.5 * float(np.sum((ze + 2.0 / eta) ** 2))
             - (float(np.sum(zo) - np.sum(ze)) - n / eta) ** 2 / (2.0 * n)
             + hyper.b)
    else:
        zbar = float(np.mean(z))
        q = 0.5 * float(np.sum(z ** 2)) - 0.5 * n * zbar ** 2 + hyper.b
    return head - (0.5 * (n - 1) + hyper.a) * np.log(q)


@functools.lru_cache(maxsize=None)
def _leggauss(order):
    return np.polynomial.legendre.leggauss(order)


def _panel_nodes(cuts, order):
    """Composite Gauss-Legendre nodes and weights over the given panel
    boundaries."""
    x, w = _leggauss(order)
    nodes, weights = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid, hw = 0.5 * (a + b), 0.5 * (b - a)
        nodes.append(mid + hw * x)
        weights.append(hw * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _find_peak(h, dim, extra_starts=()):
    best_x, best_v = np.zeros(dim), -np.inf
    starts = [np.zeros(dim)]
    for s in (-2.0, -0.5, 0.5, 2.0):
        starts.append(np.full(dim, s))
    starts.extend(np.asarray(x0, dtype=float) for x0 in extra_starts)
    for x0 in starts:
        res = optimize.minimize(lambda t: -h(t), x0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12,
                                         "maxiter": 2000})
        if -res.fun > best_v:
            best_v, best_x = -res.fun, res.x
    return best_x, best_v


def marginal_likelihood_quad(data, support, eta, hyper=None, sigma_beta2=1.0,
                             design=None):
    """log m_S(Y) with sigma^2 integrated analytically and the remaining
    |S|-dimensional integral over t_j = g(beta_j) done by adaptive
    quadrature against the Gaussian slab.  Returns (log_m, abs log error).
    """
    hyper = hyper or PriorHyper()
    eta = check_eta(eta)
    support = tuple(sorted(int(j) for j in support))
    if len(support) > 2:
        raise ValueError("quadrature is implemented for supports of size <= 2")
    design = design or AltDesign(data.n, data.p)
    z = gpow(data.y, eta)
    lc = _log_cn(data.y, eta, hyper)
    if not support:
        return log_marginal_closed_form(data, (), eta, hyper, sigma_beta2), 0.0

    sb = np.sqrt(sigma_beta2)
    dim = len(support)
    prior_const = -0.5 * np.log(2.0 * np.pi * sigma_beta2)

    # the kernel depends on t only through the odd-row and even-row means,
    # so it reduces to sufficient statistics and vectorizes over node grids
    zo, ze = z[0::2], z[1::2]
    so, se = float(np.sum(zo)), float(np.sum(ze))
    qo, qe = float(np.sum(zo ** 2)), float(np.sum(ze ** 2))
    no, ne = len(zo), len(ze)
    shape = 0.5 * data.n + hyper.a

    def h_vec(*ts):
        beta = [gpow_inv(t, eta) for t in ts]
        total = sum(beta)
        if 0 in support:
            b1 = beta[support.index(0)]
            mo = gpow(b1 + (total - b1), eta)
            me = gpow(-b1 + (total - b1), eta)
        else:
            mo = me = gpow(total, eta)
        ssr = (qo - 2.0 * mo * so + no * mo ** 2
               + qe - 2.0 * me * se + ne * me ** 2)
        prior = sum(t ** 2 for t in ts)
        return (gammaln(shape) - shape * np.log(0.5 * ssr + hyper.b)
                + dim * prior_const - 0.5 * prior / sigma_beta2)

    def h(t):
        t = np.atleast_1d(t)
        return float(h_vec(*t))

    # moment-matched start: invert the odd/even row means back to the
    # coefficient scale so strong signals far from t = 0 are still found
    mo_hat, me_hat = so / no, se / ne
    bo, be = gpow_inv(mo_hat, eta), gpow_inv(me_hat, eta)
    extra = []
    if 0 in support:
        b1_hat, rest_hat = 0.5 * (bo - be), 0.5 * (bo + be)
        if dim == 1:
            extra.append([gpow(b1_hat, eta)])
        else:
            t_pair = [gpow(b1_hat, eta), gpow(rest_hat, eta)]
            extra.append(t_pair if support[0] == 0 else t_pair[::-1])
    else:
        total_hat = gpow_inv(0.5 * (mo_hat + me_hat), eta)
        if dim == 1:
            extra.append([gpow(total_hat, eta)])
        else:
            extra.append([gpow(0.5 * total_hat, eta)] * 2)

    peak, hmax = _find_peak(h, dim, extra_starts=extra)
    kink = -1.0 / eta
    # the integrand's width is set by the narrower of the slab and the
    # sigma^2-integrated kernel, whose tails are Student-like with scale
    # sqrt((SSR + 2b) / n); a window of 30 widths loses negligible mass
    mean_pk = _mean_for_support(design, list(support), eta, peak)
    ssr_pk = float(np.sum((z - mean_pk) ** 2))
    s_kernel = np.sqrt((ssr_pk + 2.0 * hyper.b) / data.n)
    w = min(sb, s_kernel)
    half = 30.0 * w + 2.0 + abs(kink)

    def local_width(axis):
        # distance along this axis at which the log-integrand drops by 2;
        # peaks pinned to the kink by the non-local prior can be far
        # narrower than the kernel scale suggests
        for d in np.geomspace(1e-6, half, 40):
            for sign in (1.0, -1.0):
                t = peak.copy()
                t[axis] += sign * d
                if hmax - h(t) >= 2.0:
                    return float(d)
        return float(w)

    def breaks(center, wi):
        lo, hi = center - half, center + half
        cuts = {lo, hi}
        for x in (kink, 0.0):
            if lo < x < hi:
                cuts.add(float(x))
        d = wi
        while d < half:
            for x in (center - d, center + d):
                if lo < x < hi:
                    cuts.add(float(x))
            d *= 3.0
        cuts.add(float(center))
        return sorted(cuts)

    widths = [local_width(i) for i in range(dim)]

    def value(order):
        if dim == 1:
            x1, w1 = _panel_nodes(breaks(float(peak[0]), widths[0]), order)
            return float(np.sum(w1 * np.exp(h_vec(x1) - hmax)))
        # the mean kinks where the summed coefficient changes sign, a curve
        # in (t1, t2); cut the inner panels at that curve row by row
        x1, w1 = _panel_nodes(breaks(float(peak[0]), widths[0]), order)
        base2 = breaks(float(peak[1]), widths[1])
        lo2, hi2 = base2[0], base2[-1]
        total = 0.0
        for t1, wt1 in zip(x1, w1):
            b1 = gpow_inv(t1, eta)
            cuts = set(base2)
            for c in (gpow(-b1, eta), float(t1)):
                if lo2 < c < hi2:
                    cuts.add(float(c))
            x2, w2 = _panel_nodes(sorted(cuts), order)
            total += wt1 * float(w2 @ np.exp(h_vec(t1, x2) - hmax))
        return total

    val, err = np.nan, np.inf
    coarse = value(24)
    for order in (48, 96, 192):
        fine = value(order)
        val, err = fine, abs(fine - coarse)
        if val > 0.0 and err / val <= 1e-5:
            break
        coarse = fine
    if val <= 0.0:
        raise FloatingPointError("quadrature for the marginal likelihood collapsed")
    log_m = lc + hmax + np.log(val)
    log_err = err / val
    if log_err > 1e-4:
        raise FloatingPointError(
            f"quadrature error {log_err:.2e} exceeds the 1e-4 log tolerance")
    return float(log_m), float(log_err)


# support posteriors -----------------------------------------------------

@dataclass
class SupportClass:
    """Equivalence class of supports with identical marginal likelihood
    (the ones-columns are exchangeable on this design)."""

    representative: tuple
    multiplicity: int
    log_marginal: float
    log_prior: float          # per individual support in the class
    log_error: float = 0.0
    posterior: float = 0.0    # total mass of the class


@dataclass
class SupportPosterior:
    classes: list
    log_norm: float
    truncation_estimate: float
    truncated: bool

    def prob(self, support):
        """Posterior probability of one individual support."""
        support = tuple(sorted(support))
        key = self._class_key(support)
        for cls in self.classes:
            if self._class_key(cls.representative) == key:
                return cls.posterior / cls.multiplicity
        raise KeyError(f"support {support} not enumerated")

    @staticmethod
    def _class_key(support):
        has_alt = 0 in support
        n_ones = len([j for j in support if j != 0])
        return (has_alt, n_ones)


def _log_prior_support(size, p, pi0):
    """Independent-inclusion prior: each coefficient is active with
    probability 1 - pi0."""
    return size * np.log1p(-pi0) + (p - size) * np.log(pi0)


def support_posterior(data, eta, pi0, hyper=None, sigma_beta2=1.0,
                      max_support_size=2):
    """Posterior over supports of size <= max_support_size, exploiting the
    exchangeability of the ones-columns; a heuristic truncation estimate
    bounds the unenumerated mass."""
    hyper = hyper or PriorHyper()
    if not 0.0 < pi0 < 1.0:
        raise ValueError("pi0 must lie in (0, 1)")
    if max_support_size > 2:
        raise ValueError("enumeration is limited to supports of size <= 2")
    p = data.p
    design = AltDesign(data.n, data.p)

    specs = [((), 1)]
    if max_support_size >= 1:
        specs.append(((0,), 1))
        if p > 1:
            specs.append(((1,), p - 1))
    if max_support_size >= 2 and p > 1:
        specs.append(((0, 1), p - 1))
        if p > 2:
            specs.append(((1, 2), (p - 1) * (p - 2) // 2))

    classes = []
    for rep, mult in specs:
        log_m, err = marginal_likelihood_quad(data, rep, eta, hyper,
                                              sigma_beta2, design=design)
        classes.append(SupportClass(
            representative=rep, multiplicity=mult, log_marginal=log_m,
            log_prior=float(_log_prior_support(len(rep), p, pi0)),
            log_error=err))

    log_terms = [c.log_marginal + c.log_prior + np.log(c.multiplicity)
                 for c in classes]
    log_norm = float(logsumexp(log_terms))
    for c, lt in zip(classes, log_terms):
        c.posterior = float(np.exp(lt - log_norm))

    truncated = p > max_support_size
    trunc = 0.0
    if truncated:
        # heuristic tail: unenumerated supports are extrapolated from the
        # size-2 classes with the observed per-spurious-column Bayes factor
        # (clipped at 1), separately for supports containing the alternating
        # column and for ones-only supports
        lm = {c.representative: c.log_marginal for c in classes}
        tail = []

        def log_binom(m, k):
            return float(gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1))

        families = []
        if (0, 1) in lm:
            families.append((lm[(0, 1)], min(0.0, lm[(0, 1)] - lm[(0,)]), 1))
        if (1, 2) in lm:
            families.append((lm[(1, 2)], min(0.0, lm[(1, 2)] - lm[(1,)]), 0))
        for base, log_r, extra in families:
            for k in range(max_support_size + 1, p + 1):
                n_ones = k - extra
                if n_ones > p - 1:
                    continue
                tail.append(base + (k - max_support_size) * log_r
                            + _log_prior_support(k, p, pi0)
                            + log_binom(p - 1, n_ones))
        if tail:
            log_tail = float(logsumexp(tail))
            trunc = float(np.exp(log_tail - logsumexp([log_tail, log_norm])))
        else:
            trunc = 1.0
    return SupportPosterior(classes=classes, log_norm=log_norm,
                            truncation_estimate=trunc, truncated=truncated)


# theorem-trend curve ----------------------------------------------------

def simulate_alt_data(n, p, beta01, eta0, sigma0, rng):
    design = AltDesign(n, p)
    X = design.matrix()
    beta0 = np.zeros(p)
    beta0[0] = beta01
    t = gpow(X @ beta0, eta0) + sigma0 * rng.standard_normal(n)
    y = gpow_inv(t, eta0)
    if not np.all(np.isfinite(y)) or np.any(y == 0.0):
        raise FloatingPointError("alternating-design simulation degenerate")
    return Dataset(X=X, y=y)


def consistency_curve(eta, pi0, n_grid, replications=20, beta01=3.0,
                      sigma0=1.0, hyper=None, sigma_beta2=1.0, seed=0):
    """Mean posterior probability of the true support {first column} as n
    grows with p = floor(n / log 4).  Returns rows of (n, p, mean prob)."""
    from .samplers import rng_for

    hyper = hyper or PriorHyper()
    n_grid = list(n_grid)
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be increasing")
    rows = []
    for ni, n in enumerate(n_grid):
        p = max_p(n)
        probs = []
        for rep in range(replications):
            rng = rng_for(seed, stream=1000 * ni + rep)
            data = simulate_alt_data(n, p, beta01, eta, sigma0, rng)
            post = support_posterior(data, eta, pi0, hyper, sigma_beta2)
            probs.append(post.prob((0,)))
        rows.append((n, p, float(np.mean(probs))))
    return rows


# quadratic-form lower bound (fuzzable) ----------------------------------

def lemma1_bound_terms(z, beta, eta):
    """The lower-bound pieces for the sum of squares around the signed-sum
    means: per-observation terms T_i, the rank-one quadratic form, and the
    cross term picking out the largest coefficient."""
    z = np.asarray(z, dtype=float)
    beta = np.asarray(beta, dtype=float)
    k = len(beta)
    if k < 2:
        raise ValueError("need at least two coefficients")
    eta = check_eta(eta)
    t = gpow(beta, eta)
    const = 2.0 * k ** eta  # equals 2**(eta+1) at k = 2
    T = z ** 2 - (const + 2.0) * np.abs(z) / eta
    j = int(np.argmax(np.abs(beta)))          # 0-based index of max |beta|
    A = np.zeros((k, k))
    A[k - 1 - j, k - 1 - j] = -1.0
    b = np.zeros(k)
    b[j] = -1.0 if t[j] >= 0 else 1.0
    return T, A, b, t, const


def lemma1_check(z, beta, eta):
    """Evaluate both sides of the bound; returns (holds, slack)."""
    z = np.asarray(z, dtype=float)
    beta = np.asarray(beta, dtype=float)
    n = len(z)
    T, A, b, t, const = lemma1_bound_terms(z, beta, eta)
    rest = float(np.sum(beta[1:]))
    m_plus = gpow(beta[0] + rest, eta)
    m_minus = gpow(-beta[0] + rest, eta)
    lhs = float(np.sum((z[0::2] - m_plus) ** 2) + np.sum((z[1::2] - m_minus) ** 2))
    rhs = float(np.sum(T) + n * t @ A @ t + const * np.sum(np.abs(z)) * (b @ t))
    slack = lhs - rhs
    return slack >= -1e-9 * max(1.0, abs(lhs), abs(rhs)), slack


def bound_check_upper(data, eta, hyper=None, sigma_beta2=1.0):
    """Compare quadrature m_S for the two-column support against the printed
    analytic upper bound.  Returns (status, log_ratio) with status one of
    'holds', 'violated', 'vacuous'."""
    hyper = hyper or PriorHyper()
    eta = check_eta(eta)
    if data.p != 2:
        raise ValueError("the analyzed case has exactly two columns")
    z = gpow(data.y, eta)
    n = data.n
    T = z ** 2 - (2.0 ** (eta + 1.0) + 2.0) * np.abs(z) / eta
    zplus_sq = float(np.sum(np.abs(z))) ** 2 / n
    denom = 0.5 * float(np.sum(T)) - 2.0 ** (2.0 * eta - 1.0) * zplus_sq + hyper.b
    if denom <= 0.0:
        return "vacuous", float("nan")
    log_bound = (np.log(6.0) + _log_cn(data.y, eta, hyper)
                 - 0.5 * np.log(n) - 0.5 * np.log(sigma_beta2)
                 + float(gammaln(0.5 * (n - 1) + hyper.a))
                 - (0.5 * (n - 1) + hyper.a) * np.log(denom))
    log_m, _ = marginal_likelihood_quad(data, (0, 1), eta, hyper, sigma_beta2)
    ratio = log_bound - log_m
    return ("holds" if ratio >= 0 else "violated"), float(ratio)
