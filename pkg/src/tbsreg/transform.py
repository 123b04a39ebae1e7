"""Signed power transform used on both sides of the regression model.

g(y) = (y * |y|**(eta - 1) - 1) / eta is monotone increasing on all of R for
eta in (0, 2), with g(1) = 0 and g(0) = -1/eta.  Everything downstream
(likelihoods, samplers, marginal likelihoods) goes through these four
functions.
"""

import numpy as np

# Open-interval guard: |y|**(eta-1) must stay finite in floating point.
ETA_EPS = 1e-6


class TransformDomainError(ValueError):
    pass


def check_eta(eta):
    """Validate the power parameter; returns it as a float."""
    eta = float(eta)
    if not np.isfinite(eta) or eta < ETA_EPS or eta > 2.0 - ETA_EPS:
        raise TransformDomainError(
            f"transform power must lie in ({ETA_EPS}, {2 - ETA_EPS}), got {eta}"
        )
    return eta


def gpow(y, eta):
    """Signed power transform, elementwise over y."""
    eta = check_eta(eta)
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise TransformDomainError("non-finite input to gpow")
    out = (np.sign(y) * np.abs(y) ** eta - 1.0) / eta
    return out if out.ndim else float(out)


def gpow_inv(t, eta):
    """Inverse of gpow: sign(eta*t + 1) * |eta*t + 1|**(1/eta)."""
    eta = check_eta(eta)
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise TransformDomainError("non-finite input to gpow_inv")
    s = eta * t + 1.0
    out = np.sign(s) * np.abs(s) ** (1.0 / eta)
    return out if out.ndim else float(out)


def gpow_deriv(y, eta):
    """Derivative |y|**(eta-1); +inf at y=0 when eta < 1 (not an error)."""
    eta = check_eta(eta)
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.abs(y) ** (eta - 1.0)
    return out if out.ndim else float(out)


def log_jacobian(y, eta):
    """(eta - 1) * sum(log|y_i|); rejects exact zeros."""
    eta = check_eta(eta)
    y = np.asarray(y, dtype=float)
    zero = np.nonzero(y == 0.0)[0]
    if zero.size:
        raise TransformDomainError(
            f"log-Jacobian undefined: y[{zero[0]}] is exactly zero"
        )
    return (eta - 1.0) * float(np.sum(np.log(np.abs(y))))
