"""(Semi)parametric single-index fits whose coefficient ratios are compared
with the nonparametric relative-effect estimate.

All three models treat "risk 1 attained the minimum" as the event and
everything else as right censoring, deliberately ignoring the dependence
between the risks - that misspecified censoring mechanism is exactly what
the comparison probes.

* ``fit_cox`` - Cox partial likelihood, Breslow tie handling, damped Newton.
* ``fit_weibull_aft`` - right-censored Weibull maximum likelihood on the
  log-time scale (parameters: intercept, beta_x, beta_y, log scale).
* ``fit_po`` - proportional odds via log-logistic AFT maximum likelihood;
  a log-logistic AFT is a PO model and the coefficient ratio beta_x/beta_y
  is identical across the two parameterisations.

Sign convention: the AFT fits report log-time-scale coefficients (positive
coefficient = longer survival), the Cox fit reports hazard-scale ones.  The
ratio ``beta_x / beta_y`` is invariant to either convention, which is all
the comparison consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from .errors import EstimationError

__all__ = ["RegressionFit", "fit_cox", "fit_weibull_aft", "fit_po", "coeff_ratio"]

_GTOL = 1e-8
_MAX_ITER = 100
_MAX_HALVINGS = 30
_SEPARATION_NORM = 50.0


@dataclass(frozen=True)
class RegressionFit:
    beta_x: float
    beta_y: float
    nuisance: Dict[str, float] = field(default_factory=dict)
    converged: bool = False
    iterations: int = 0
    loglik: float = float("nan")
    model: str = ""


def coeff_ratio(fit: RegressionFit) -> float:
    """beta_x / beta_y of a converged fit."""
    if not fit.converged:
        raise EstimationError(f"coeff_ratio of a non-converged {fit.model} fit")
    if abs(fit.beta_y) < 1e-12:
        raise EstimationError(f"coeff_ratio undefined: |beta_y| = {abs(fit.beta_y):.3e} < 1e-12")
    return fit.beta_x / fit.beta_y


def _validate(times, events, xs, ys):
    times = np.asarray(times, dtype=float)
    events = np.asarray(events).astype(bool)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if not (times.shape == events.shape == xs.shape == ys.shape):
        raise ValueError("times, events, xs, ys must have equal shape")
    if int(events.sum()) < 2:
        raise EstimationError("need at least 2 events to fit")
    return times, events, xs, ys


def _newton(theta0, objective):
    """Damped Newton ascent on a log-likelihood.

    ``objective(theta)`` returns (loglik, gradient, hessian).  When the
    Newton direction is not an ascent direction (the surface need not be
    concave far from the optimum) the Hessian is Levenberg-shifted until it
    is; steps are then halved until the log-likelihood strictly improves
    (Armijo), so accepted steps are monotone.  Convergence is gradient norm
    <= 1e-8.
    """
    theta = np.asarray(theta0, dtype=float)
    ll, grad, hess = objective(theta)
    lam = 0.0
    eye = np.eye(theta.size)
    for it in range(1, _MAX_ITER + 1):
        if np.linalg.norm(grad) <= _GTOL:
            return theta, ll, True, it - 1
        try:
            step = np.linalg.solve(hess - lam * eye, -grad)
        except np.linalg.LinAlgError:
            lam = max(10.0 * lam, 1e-4)
            continue
        slope = float(grad @ step)
        if not np.all(np.isfinite(step)) or slope <= 0.0:
            lam = max(10.0 * lam, 1e-4)
            continue
        if np.linalg.norm(grad) <= 1e-3:
            # quadratic-convergence region: log-likelihood gains are below
            # float resolution here, so accept on gradient-norm decrease
            cand = theta + step
            ll_new, grad_new, hess_new = objective(cand)
            if np.all(np.isfinite(grad_new)) and np.linalg.norm(grad_new) < np.linalg.norm(grad):
                theta, ll, grad, hess = cand, ll_new, grad_new, hess_new
                lam *= 0.1
                continue
        scale = 1.0
        accepted = False
        for _ in range(_MAX_HALVINGS):
            cand = theta + scale * step
            ll_new, grad_new, hess_new = objective(cand)
            if np.isfinite(ll_new) and ll_new >= ll + 1e-4 * scale * slope:
                accepted = True
                break
            scale *= 0.5
        if not accepted:
            lam = max(10.0 * lam, 1e-4)
            continue
        theta, ll, grad, hess = cand, ll_new, grad_new, hess_new
        lam *= 0.1
        if np.linalg.norm(theta) > _SEPARATION_NORM:
            return theta, ll, False, it
    converged = bool(np.linalg.norm(grad) <= _GTOL)
    return theta, ll, converged, _MAX_ITER


def _cox_objective_factory(times, events, xs, ys):
    """Breslow partial log-likelihood with analytic gradient and Hessian."""
    n = times.size
    order = np.argsort(times, kind="stable")
    t_s = times[order]
    d_s = events[order]
    X = np.column_stack((xs, ys))[order]
    # tie groups share their risk set {j : t_j >= t_i}
    _, starts_idx = np.unique(t_s, return_index=True)
    group_of = np.searchsorted(starts_idx, np.arange(n), side="right") - 1
    risk_start = starts_idx[group_of]  # first sorted index of each obs's tie group

    ev = np.flatnonzero(d_s)
    X_ev = X[ev]
    rs_ev = risk_start[ev]

    def objective(beta):
        eta = X @ beta
        m = float(np.max(eta))
        e = np.exp(eta - m)
        # suffix cumulative sums over the sorted sample
        c0 = np.cumsum(e[::-1])[::-1]
        c1 = np.cumsum((e[:, None] * X)[::-1], axis=0)[::-1]
        exx = e * X[:, 0] * X[:, 0]
        exy = e * X[:, 0] * X[:, 1]
        eyy = e * X[:, 1] * X[:, 1]
        c2 = np.cumsum(np.column_stack((exx, exy, eyy))[::-1], axis=0)[::-1]
        s0 = c0[rs_ev]
        s1 = c1[rs_ev]
        s2 = c2[rs_ev]
        ll = float(np.sum(eta[ev]) - np.sum(np.log(s0)) - ev.size * m)
        mu = s1 / s0[:, None]
        grad = np.sum(X_ev - mu, axis=0)
        hxx = np.sum(s2[:, 0] / s0 - mu[:, 0] ** 2)
        hxy = np.sum(s2[:, 1] / s0 - mu[:, 0] * mu[:, 1])
        hyy = np.sum(s2[:, 2] / s0 - mu[:, 1] ** 2)
        hess = -np.array([[hxx, hxy], [hxy, hyy]])
        return ll, grad, hess

    return objective


def fit_cox(times, events, xs, ys) -> RegressionFit:
    """Cox proportional hazards via the partial likelihood (Breslow ties).

    The event indicator marks observations whose minimum came from risk 1;
    all others are treated as censored at their observed time.
    """
    times, events, xs, ys = _validate(times, events, xs, ys)
    objective = _cox_objective_factory(times, events, xs, ys)
    beta, ll, ok, iters = _newton(np.zeros(2), objective)
    return RegressionFit(beta_x=float(beta[0]), beta_y=float(beta[1]), nuisance={},
                         converged=ok, iterations=iters, loglik=ll, model="cox")


def _aft_objective_factory(times, events, xs, ys, kind: str):
    """Censored location-scale likelihood on log time.

    z = (log t - mu - bx x - by y) / sigma, sigma = exp(s).
    Weibull ('extreme'): event log-density -log sigma - log t + z - e^z,
    censored log-survival -e^z.  Log-logistic ('logistic'): event
    -log sigma - log t + z - 2 log(1 + e^z), censored -log(1 + e^z).
    """
    logt = np.log(times)
    d = events.astype(float)
    U = np.column_stack((np.ones_like(logt), xs, ys))
    n_events = float(d.sum())
    logt_ev_sum = float(logt[events].sum())

    def objective(theta):
        # extreme line-search candidates can overflow harmlessly; they are
        # rejected on non-finite log-likelihood / gradient
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return _objective_impl(theta)

    def _objective_impl(theta):
        mu_beta = theta[:3]
        s = theta[3]
        sigma = np.exp(s)
        z = np.clip((logt - U @ mu_beta) / sigma, -500.0, 500.0)
        if kind == "extreme":
            ez = np.exp(z)
            ll = float(np.sum(d * z) - np.sum(ez)) - n_events * s - logt_ev_sum
            g = d - ez  # d loglik_i / d z
            w = ez  # -d g / d z
        else:
            p = 1.0 / (1.0 + np.exp(-z))
            # log(1 + e^z) = max(z, 0) + log1p(exp(-|z|)), numerically stable
            ll = float(np.sum(d * z) - np.sum((1.0 + d) * (np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z))))))
            ll -= n_events * s + logt_ev_sum
            g = d - (1.0 + d) * p
            w = (1.0 + d) * p * (1.0 - p)
        grad_beta = -(U.T @ g) / sigma
        grad_s = -float(np.sum(g * z)) - n_events
        grad = np.append(grad_beta, grad_s)
        h_bb = -(U.T * w) @ U / sigma**2
        h_bs = (U.T @ (g - w * z)) / sigma
        h_ss = float(np.sum(g * z) - np.sum(w * z * z))
        hess = np.zeros((4, 4))
        hess[:3, :3] = h_bb
        hess[:3, 3] = h_bs
        hess[3, :3] = h_bs
        hess[3, 3] = h_ss
        return ll, grad, hess

    return objective


def _fit_aft(times, events, xs, ys, kind: str, model: str) -> RegressionFit:
    times, events, xs, ys = _validate(times, events, xs, ys)
    if np.any(times <= 0):
        raise ValueError("AFT fitting requires strictly positive times")
    logt_ev = np.log(times[events])
    spread = float(np.std(logt_ev))
    if kind == "extreme":
        sigma0 = max(spread * np.sqrt(6.0) / np.pi, 1e-2)
        mu0 = float(np.mean(logt_ev)) + 0.5772156649015329 * sigma0
    else:
        sigma0 = max(spread * np.sqrt(3.0) / np.pi, 1e-2)
        mu0 = float(np.mean(logt_ev))
    theta0 = np.array([mu0, 0.0, 0.0, np.log(sigma0)])
    objective = _aft_objective_factory(times, events, xs, ys, kind)
    theta, ll, ok, iters = _newton(theta0, objective)
    sigma = float(np.exp(theta[3]))
    return RegressionFit(beta_x=float(theta[1]), beta_y=float(theta[2]),
                         nuisance={"intercept": float(theta[0]), "scale": sigma},
                         converged=ok, iterations=iters, loglik=ll, model=model)


def fit_weibull_aft(times, events, xs, ys) -> RegressionFit:
    """Right-censored Weibull maximum likelihood (AFT scale)."""
    return _fit_aft(times, events, xs, ys, "extreme", "weibull_aft")


def fit_po(times, events, xs, ys) -> RegressionFit:
    """Proportional odds via log-logistic AFT maximum likelihood."""
    return _fit_aft(times, events, xs, ys, "logistic", "po")
