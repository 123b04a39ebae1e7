"""Frequentist comparators: L1-penalized least squares via cyclic
coordinate descent, and L1-penalized quantile regression via a smoothed
(huberized) pinball loss with continuation and FISTA inner solves.

The intercept is never penalized.
"""

from dataclasses import dataclass

import numpy as np


class ConvergenceError(RuntimeError):
    pass


@dataclass
class LassoFit:
    beta: np.ndarray
    intercept: float
    lam: float
    kkt_residual: float
    n_sweeps: int = 0

    @property
    def support(self):
        return [int(j) for j in np.nonzero(self.beta != 0.0)[0]]


@dataclass
class QuantileFit:
    beta: np.ndarray
    intercept: float
    tau: float
    lam: float
    smoothing: float
    objective: float = 0.0

    @property
    def support(self):
        return [int(j) for j in np.nonzero(self.beta != 0.0)[0]]


def _soft(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def lasso_objective(X, y, beta, intercept, lam):
    r = y - intercept - X @ beta
    n = len(y)
    return 0.5 * np.sum(r * r) / n + lam * np.sum(np.abs(beta))


def lasso_fit(X, y, lam, tol=1e-10, max_sweeps=10000, beta0=None):
    """Minimize (1/2n)||y - b0 - X beta||^2 + lam ||beta||_1 by cyclic
    coordinate descent with soft-thresholding."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, p = X.shape
    if lam < 0:
        raise ValueError("lam must be non-negative")
    col_sq = np.sum(X * X, axis=0) / n
    beta = np.zeros(p) if beta0 is None else beta0.copy()
    intercept = float(np.mean(y - X @ beta))
    r = y - intercept - X @ beta
    prev_obj = lasso_objective(X, y, beta, intercept, lam)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        max_change = 0.0
        for j in range(p):
            if col_sq[j] == 0.0:
                continue
            old = beta[j]
            rho = old * col_sq[j] + X[:, j] @ r / n
            new = _soft(rho, lam) / col_sq[j]
            if new != old:
                r -= X[:, j] * (new - old)
                beta[j] = new
                max_change = max(max_change, abs(new - old))
        new_intercept = intercept + float(np.mean(r))
        if new_intercept != intercept:
            r -= new_intercept - intercept
            max_change = max(max_change, abs(new_intercept - intercept))
            intercept = new_intercept
        obj = lasso_objective(X, y, beta, intercept, lam)
        if obj > prev_obj + 1e-12 * max(1.0, abs(prev_obj)):
            raise ConvergenceError("coordinate-descent sweep increased the objective")
        prev_obj = obj
        if max_change < tol:
            break
    else:
        raise ConvergenceError(
            f"lasso did not converge in {max_sweeps} sweeps "
            f"(last max coefficient change {max_change:.3e})")
    grad = X.T @ r / n
    active = beta != 0.0
    kkt = 0.0
    if np.any(~active):
        kkt = float(np.max(np.abs(grad[~active])) - lam)
    if np.any(active):
        kkt = max(kkt, float(np.max(np.abs(grad[active] - lam * np.sign(beta[active])))))
    return LassoFit(beta=beta, intercept=intercept, lam=float(lam),
                    kkt_residual=max(kkt, 0.0), n_sweeps=sweeps)


def lambda_max(X, y):
    """Smallest penalty that zeroes every coefficient."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    return float(np.max(np.abs(X.T @ (y - np.mean(y)))) / len(y))


def pinball_loss(r, tau):
    return np.where(r >= 0, tau * r, (tau - 1.0) * r)


def smoothed_pinball(r, tau, h):
    """Huberized pinball; |rho - rho_h| <= h * max(tau, 1-tau)."""
    quad = r * r / (2.0 * h)
    lin = np.abs(r) - 0.5 * h
    psi = np.where(np.abs(r) <= h, quad, lin)
    return np.where(r >= 0, tau * psi, (1.0 - tau) * psi)


def smoothed_pinball_grad(r, tau, h):
    inner = np.clip(r / h, -1.0, 1.0)
    core = np.where(np.abs(r) <= h, inner, np.sign(r))
    return np.where(r >= 0, tau * core, (1.0 - tau) * core)


def quantile_objective(X, y, beta, intercept, tau, lam):
    r = y - intercept - X @ beta
    return float(np.mean(pinball_loss(r, tau)) + lam * np.sum(np.abs(beta)))


def _fista(X, y, tau, lam, h, beta, intercept, max_iter=2000, tol=1e-10):
    n, p = X.shape
    # Lipschitz constant of the smoothed loss gradient over (intercept, beta)
    aug = np.c_[np.ones(n), X]
    smax = np.linalg.norm(aug, 2)
    L = max(tau, 1.0 - tau) / h * smax ** 2 / n
    step = 1.0 / L
    xk = np.concatenate([[intercept], beta])
    vk = xk.copy()
    tk = 1.0
    obj = np.mean(smoothed_pinball(y - aug @ xk, tau, h)) + lam * np.sum(np.abs(xk[1:]))
    for _ in range(max_iter):
        r = y - aug @ vk
        grad = -aug.T @ smoothed_pinball_grad(r, tau, h) / n
        xn = vk - step * grad
        xn[1:] = _soft(xn[1:], step * lam)
        tn = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * tk * tk))
        vk = xn + (tk - 1.0) / tn * (xn - xk)
        new_obj = np.mean(smoothed_pinball(y - aug @ xn, tau, h)) \
            + lam * np.sum(np.abs(xn[1:]))
        if new_obj > obj:      # restart on non-monotone step
            vk = xn.copy()
            tn = 1.0
        delta = np.max(np.abs(xn - xk))
        xk, tk, obj = xn, tn, new_obj
        if delta < tol:
            break
    return xk[0], xk[1:], obj


def quantile_lasso_fit(X, y, tau, lam, h_init=1e-1, h_final=1e-6,
                       max_iter=2000):
    """Minimize (1/n) sum rho_tau(y - b0 - x'beta) + lam ||beta||_1 by
    smoothing continuation: huberization width halved from h_init until it
    falls at or below h_final."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    p = X.shape[1]
    beta = np.zeros(p)
    intercept = float(np.quantile(y, tau))
    h = h_init
    obj = np.inf
    while True:
        intercept, beta, obj = _fista(X, y, tau, lam, h, beta, intercept,
                                      max_iter=max_iter)
        if h <= h_final:
            break
        h = h / 2.0
    if not np.all(np.isfinite(beta)):
        raise ConvergenceError("quantile lasso diverged")
    # exact zeros come from the prox; clean up round-off stragglers
    beta[np.abs(beta) < 1e-10] = 0.0
    return QuantileFit(beta=beta, intercept=float(intercept), tau=float(tau),
                       lam=float(lam), smoothing=float(h),
                       objective=quantile_objective(X, y, beta, intercept, tau, lam))


def default_grid(X, y, n_lambdas=30, ratio=1e-3):
    lmax = max(lambda_max(X, y), 1e-12)
    return np.geomspace(lmax, lmax * ratio, n_lambdas)


def cv_select(X, y, method="lasso", folds=5, grid=None, tau=0.5, seed=0):
    """5-fold cross-validated penalty choice.  Deterministic fold assignment
    from the seed; squared-error loss for the lasso, pinball for quantile
    regression; ties break toward the larger (sparser) penalty.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n = len(y)
    if folds < 2 or n < folds:
        raise ValueError("need folds >= 2 and n >= folds")
    if grid is None:
        grid = default_grid(X, y)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty penalty grid")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, 977))))
    assignment = rng.permutation(n) % folds
    losses = np.zeros(grid.size)
    for f in range(folds):
        test = assignment == f
        Xtr, ytr = X[~test], y[~test]
        Xte, yte = X[test], y[test]
        for gi, lam in enumerate(grid):
            if method == "lasso":
                fit = lasso_fit(Xtr, ytr, lam)
                pred = fit.intercept + Xte @ fit.beta
                losses[gi] += float(np.sum((yte - pred) ** 2))
            elif method == "quantile":
                fit = quantile_lasso_fit(Xtr, ytr, tau, lam, max_iter=400)
                pred = fit.intercept + Xte @ fit.beta
                losses[gi] += float(np.sum(pinball_loss(yte - pred, tau)))
            else:
                raise ValueError(f"unknown method {method!r}")
    losses /= n
    best = np.min(losses)
    # ties toward the larger penalty
    candidates = np.nonzero(losses <= best + 1e-12)[0]
    best_idx = candidates[np.argmax(grid[candidates])]
    return float(grid[best_idx]), {"grid": grid, "cv_loss": losses}
