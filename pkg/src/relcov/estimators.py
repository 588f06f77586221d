"""Nonparametric estimators of the relative covariate effect.

All estimators consume only (times, xs, ys); the latent risk label never
enters.  Building blocks:

* ``conditional_hazard`` - kernel-weighted hazard with exact-match numerator
  indicator, evaluated at observed times;
* ``nelson_aalen`` - cumulative hazard summing the hazard over distinct
  observed times up to t;
* ``survival_nw`` - kernel-weighted survivor share, whose quotient-rule
  partial derivatives ``survival_deriv_x`` / ``survival_deriv_y`` follow the
  printed display;
* ``nelson_aalen_deriv_x`` / ``_y`` - term-wise quotient-rule derivative of
  the Nelson-Aalen sum;
* ``nw_mean`` and its partial derivatives - Nadaraya-Watson conditional mean
  machinery.

On top of these sit the four ratio estimators: grid averages
``eta_pi_bar`` and ``eta_lambda_bar`` with trimming, the pointwise
``eta_m_at``, and the ratio-of-sums ``eta_bar``.

Points where a required denominator vanishes are "undefined": pointwise
functions return NaN, grid/sample aggregates drop the point, count it, and
never impute.  Summation order is fixed (x-sorted for the global sums,
t-sorted for the hazard sums) so repeated runs are bitwise identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ._fast import local_sums
from .errors import ConfigurationError, EstimationError
from .kernels import KernelConfig, scaled_weight, scaled_weight_deriv_x, scaled_weight_deriv_y

__all__ = [
    "GridSpec",
    "TrimConfig",
    "EtaEstimate",
    "conditional_hazard",
    "nelson_aalen",
    "survival_nw",
    "survival_deriv_x",
    "survival_deriv_y",
    "nelson_aalen_deriv_x",
    "nelson_aalen_deriv_y",
    "nw_mean",
    "nw_mean_deriv_x",
    "nw_mean_deriv_y",
    "nw_mean_at",
    "eta_pi_bar",
    "eta_lambda_bar",
    "eta_m_at",
    "eta_m_at_means",
    "eta_bar",
]

TRIM_MODES = ("none", "boundary", "boundary+denom")


@dataclass(frozen=True)
class GridSpec:
    """Equidistant t-grid for the grid-averaged ratio estimators."""

    t_min: float = 0.04
    t_max: float = 3.55
    points: int = 500

    def __post_init__(self):
        if not (0 < self.t_min < self.t_max):
            raise ConfigurationError(f"grid requires 0 < t_min < t_max, got [{self.t_min}, {self.t_max}]")
        if self.points < 2:
            raise ConfigurationError("grid needs at least 2 points")

    def values(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.points)


@dataclass(frozen=True)
class TrimConfig:
    """Trimming rules for the grid-averaged ratios.

    ``boundary`` keeps grid points with t_lo <= t <= t_hi; ``boundary+denom``
    additionally drops grid points whose y-derivative denominator has
    magnitude below ``denom_floor``.
    """

    mode: str = "none"
    t_lo: float = 0.0
    t_hi: float = np.inf
    denom_floor: float = 0.1

    def __post_init__(self):
        if self.mode not in TRIM_MODES:
            raise ConfigurationError(f"trim mode must be one of {TRIM_MODES}, got {self.mode!r}")
        if self.mode != "none" and not self.t_lo < self.t_hi:
            raise ConfigurationError(f"boundary trimming requires t_lo < t_hi, got [{self.t_lo}, {self.t_hi}]")
        if self.denom_floor < 0:
            raise ConfigurationError("denom_floor must be nonnegative")


@dataclass(frozen=True)
class EtaEstimate:
    """A point estimate of an eta-type ratio plus bookkeeping.

    ``n_used`` counts the grid points (grid-averaged kinds) or sample points
    (eta_bar) that entered the estimate after dropping undefined points and
    applying trimming; ``n_dropped`` counts the rest.
    """

    value: float
    kind: str
    eval_point: Optional[Tuple[float, float]]
    n_used: int
    n_dropped: int = 0


def _weights(times, xs, ys, x, y, kernel: KernelConfig):
    w = scaled_weight(kernel, x - xs, y - ys)
    return np.asarray(w, dtype=float)


def conditional_hazard(times, xs, ys, t, x, y, kernel: KernelConfig) -> float:
    """Kernel-weighted hazard at an observed time t:
    sum 1(t_i = t) w_i / sum 1(t_i > t) w_i.

    Returns 0.0 when the numerator is empty and NaN (undefined) when the
    denominator is 0; callers decide how to trim undefined points.
    """
    w = _weights(times, xs, ys, x, y, kernel)
    den = float(np.sum(w[times > t]))
    if den == 0.0:
        return float("nan")
    num = float(np.sum(w[times == t]))
    return num / den


def nelson_aalen(times, xs, ys, t, x, y, kernel: KernelConfig) -> float:
    """Nelson-Aalen type estimator: sum of the conditional hazard over
    distinct observed times <= t.  Undefined terms (zero denominator) are
    skipped; the empty sum is 0."""
    w = _weights(times, xs, ys, x, y, kernel)
    lam, _, tj = _hazard_terms(times, w)
    keep = (tj <= t) & ~np.isnan(lam)
    return float(np.sum(lam[keep]))


def survival_nw(times, xs, ys, t, x, y, kernel: KernelConfig) -> float:
    """Kernel-weighted survivor share sum 1(t_i > t) w_i / sum w_i in [0, 1]."""
    w = _weights(times, xs, ys, x, y, kernel)
    den = float(np.sum(w))
    if den == 0.0:
        return float("nan")
    return float(np.sum(w[times > t])) / den


def _survival_deriv(times, xs, ys, t, x, y, kernel, axis: str) -> float:
    w = _weights(times, xs, ys, x, y, kernel)
    dfun = scaled_weight_deriv_x if axis == "x" else scaled_weight_deriv_y
    wd = np.asarray(dfun(kernel, x - xs, y - ys), dtype=float)
    s = float(np.sum(w))
    if s == 0.0:
        return float("nan")
    gt = times > t
    return (float(np.sum(wd[gt])) * s - float(np.sum(wd)) * float(np.sum(w[gt]))) / (s * s)


def survival_deriv_x(times, xs, ys, t, x, y, kernel: KernelConfig) -> float:
    """x-partial of the survivor share by the quotient rule (the printed
    kernel-derivative display)."""
    return _survival_deriv(times, xs, ys, t, x, y, kernel, "x")


def survival_deriv_y(times, xs, ys, t, x, y, kernel: KernelConfig) -> float:
    return _survival_deriv(times, xs, ys, t, x, y, kernel, "y")


def _hazard_terms(times, w, wd=None):
    """Per-distinct-time hazard (and optionally its derivative terms).

    Returns (lam, dlam, t_unique); entries are NaN where the at-risk
    denominator vanishes.
    """
    order = np.argsort(times, kind="stable")
    ts = np.asarray(times, dtype=float)[order]
    ws = np.asarray(w, dtype=float)[order]
    t_unique, starts = np.unique(ts, return_index=True)
    ends = np.append(starts[1:], len(ts)) - 1
    csum = np.cumsum(ws)
    n_group = np.add.reduceat(ws, starts)
    d_group = csum[-1] - csum[ends]  # sum of w over t_i > t_j
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(d_group > 0, n_group / np.where(d_group == 0, 1.0, d_group), np.nan)
    lam[d_group == 0.0] = np.nan
    if wd is None:
        return lam, None, t_unique
    wds = np.asarray(wd, dtype=float)[order]
    csum_d = np.cumsum(wds)
    nd_group = np.add.reduceat(wds, starts)
    dd_group = csum_d[-1] - csum_d[ends]
    with np.errstate(divide="ignore", invalid="ignore"):
        dlam = (nd_group * d_group - n_group * dd_group) / np.where(d_group == 0, 1.0, d_group) ** 2
    dlam[d_group == 0.0] = np.nan
    return lam, dlam, t_unique


def _nelson_aalen_deriv(times, xs, ys, t, x, y, kernel, axis: str) -> float:
    w = _weights(times, xs, ys, x, y, kernel)
    dfun = scaled_weight_deriv_x if axis == "x" else scaled_weight_deriv_y
    wd = np.asarray(dfun(kernel, x - xs, y - ys), dtype=float)
    _, dlam, tj = _hazard_terms(times, w, wd)
    keep = (tj <= t) & ~np.isnan(dlam)
    return float(np.sum(dlam[keep]))


def nelson_aalen_deriv_x(times, xs, ys, t, x, y, kernel: KernelConfig) -> float:
    """Term-wise x-derivative of the Nelson-Aalen sum: each hazard term is
    differentiated by the quotient rule; undefined terms are skipped."""
    return _nelson_aalen_deriv(times, xs, ys, t, x, y, kernel, "x")


def nelson_aalen_deriv_y(times, xs, ys, t, x, y, kernel: KernelConfig) -> float:
    return _nelson_aalen_deriv(times, xs, ys, t, x, y, kernel, "y")


def nw_mean(times, xs, ys, x, y, kernel: KernelConfig) -> float:
    """Nadaraya-Watson conditional mean sum t_i w_i / sum w_i."""
    w = _weights(times, xs, ys, x, y, kernel)
    den = float(np.sum(w))
    if den == 0.0:
        return float("nan")
    return float(np.sum(np.asarray(times, dtype=float) * w)) / den


def _nw_mean_deriv(times, xs, ys, x, y, kernel, axis: str) -> float:
    w = _weights(times, xs, ys, x, y, kernel)
    dfun = scaled_weight_deriv_x if axis == "x" else scaled_weight_deriv_y
    wd = np.asarray(dfun(kernel, x - xs, y - ys), dtype=float)
    s = float(np.sum(w))
    if s == 0.0:
        return float("nan")
    t = np.asarray(times, dtype=float)
    return (float(np.sum(t * wd)) * s - float(np.sum(t * w)) * float(np.sum(wd))) / (s * s)


def nw_mean_deriv_x(times, xs, ys, x, y, kernel: KernelConfig) -> float:
    """Quotient-rule x-partial of the Nadaraya-Watson mean:
    (S_tdx * S - S_t * S_dx) / S^2."""
    return _nw_mean_deriv(times, xs, ys, x, y, kernel, "x")


def nw_mean_deriv_y(times, xs, ys, x, y, kernel: KernelConfig) -> float:
    return _nw_mean_deriv(times, xs, ys, x, y, kernel, "y")


def nw_mean_at(times, xs, ys, ex, ey, kernel: KernelConfig) -> np.ndarray:
    """Vectorised Nadaraya-Watson mean at many evaluation points (NaN where
    no kernel mass)."""
    sums = local_sums(xs, ys, times, np.asarray(ex, float), np.asarray(ey, float), kernel.h_x, kernel.h_y)
    s, st = sums[0], sums[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(s > 0, st / np.where(s == 0, 1.0, s), np.nan)
    return out


def _grid_ratio(kind, num_g, den_g, grid_t, trim: TrimConfig, eval_point) -> EtaEstimate:
    """Average num/den over grid points, dropping undefined points and
    applying the trimming rules."""
    keep = np.isfinite(num_g) & np.isfinite(den_g) & (den_g != 0.0)
    if trim.mode in ("boundary", "boundary+denom"):
        keep &= (grid_t >= trim.t_lo) & (grid_t <= trim.t_hi)
    if trim.mode == "boundary+denom":
        keep &= np.abs(den_g) >= trim.denom_floor
    n_used = int(np.sum(keep))
    if n_used == 0:
        raise EstimationError(
            f"{kind}: every grid point was undefined or trimmed "
            f"(grid size {grid_t.size}, trim mode {trim.mode!r})"
        )
    value = float(np.mean(num_g[keep] / den_g[keep]))
    return EtaEstimate(value=value, kind=kind, eval_point=eval_point,
                       n_used=n_used, n_dropped=int(grid_t.size - n_used))


def _grid_weights(times, xs, ys, kernel):
    xbar = float(np.mean(xs))
    ybar = float(np.mean(ys))
    w = _weights(times, xs, ys, xbar, ybar, kernel)
    wdx = np.asarray(scaled_weight_deriv_x(kernel, xbar - xs, ybar - ys), dtype=float)
    wdy = np.asarray(scaled_weight_deriv_y(kernel, xbar - xs, ybar - ys), dtype=float)
    return xbar, ybar, w, wdx, wdy


def eta_pi_bar(times, xs, ys, grid: GridSpec, trim: TrimConfig, kernel: KernelConfig) -> EtaEstimate:
    """Grid average of the survivor-share derivative ratio at the covariate
    means: G^-1 sum_g pi'_x(t_g | xbar, ybar) / pi'_y(t_g | xbar, ybar)."""
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise EstimationError("eta_pi_bar needs a nonempty sample")
    xbar, ybar, w, wdx, wdy = _grid_weights(times, xs, ys, kernel)
    grid_t = grid.values()
    order = np.argsort(times, kind="stable")
    ts = times[order]
    # suffix sums: sum over t_i > t of each weight stream; index 0 holds the
    # full-sample totals, so grid points below min(t_i) give exact zeros.
    sw = np.concatenate((np.cumsum(w[order][::-1])[::-1], [0.0]))
    swdx = np.concatenate((np.cumsum(wdx[order][::-1])[::-1], [0.0]))
    swdy = np.concatenate((np.cumsum(wdy[order][::-1])[::-1], [0.0]))
    s = float(sw[0])
    if s == 0.0:
        raise EstimationError("eta_pi_bar: no kernel mass at the covariate means")
    pos = np.searchsorted(ts, grid_t, side="right")
    num_g = (swdx[pos] * s - swdx[0] * sw[pos]) / (s * s)
    den_g = (swdy[pos] * s - swdy[0] * sw[pos]) / (s * s)
    return _grid_ratio("eta_pi", num_g, den_g, grid_t, trim, (xbar, ybar))


def eta_lambda_bar(times, xs, ys, grid: GridSpec, trim: TrimConfig, kernel: KernelConfig) -> EtaEstimate:
    """Grid average of the Nelson-Aalen derivative ratio at the covariate
    means, with term-wise quotient-rule derivatives."""
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise EstimationError("eta_lambda_bar needs a nonempty sample")
    xbar, ybar, w, wdx, wdy = _grid_weights(times, xs, ys, kernel)
    _, dlam_x, tj = _hazard_terms(times, w, wdx)
    _, dlam_y, _ = _hazard_terms(times, w, wdy)
    ok = ~np.isnan(dlam_x)  # same at-risk denominator for both axes
    cum_x = np.cumsum(np.where(ok, dlam_x, 0.0))
    cum_y = np.cumsum(np.where(ok, dlam_y, 0.0))
    grid_t = grid.values()
    pos = np.searchsorted(tj, grid_t, side="right") - 1
    num_g = np.where(pos >= 0, cum_x[np.maximum(pos, 0)], 0.0)
    den_g = np.where(pos >= 0, cum_y[np.maximum(pos, 0)], 0.0)
    return _grid_ratio("eta_lambda", num_g, den_g, grid_t, trim, (xbar, ybar))


def eta_m_at(times, xs, ys, x, y, kernel: KernelConfig) -> EtaEstimate:
    """Pointwise ratio of the Nadaraya-Watson mean derivatives at (x, y)."""
    num = nw_mean_deriv_x(times, xs, ys, x, y, kernel)
    den = nw_mean_deriv_y(times, xs, ys, x, y, kernel)
    if np.isnan(num) or np.isnan(den) or den == 0.0:
        raise EstimationError(f"eta_m undefined at ({x}, {y}): derivative denominator vanishes")
    return EtaEstimate(value=num / den, kind="eta_m", eval_point=(float(x), float(y)), n_used=1)


def eta_m_at_means(times, xs, ys, kernel: KernelConfig) -> EtaEstimate:
    """eta_m evaluated at the covariate sample means."""
    return eta_m_at(times, xs, ys, float(np.mean(xs)), float(np.mean(ys)), kernel)


def eta_bar(times, xs, ys, kernel: KernelConfig) -> EtaEstimate:
    """Ratio of sums of per-observation mean-derivative estimates:
    sum_i m'_x(x_i, y_i) / sum_i m'_y(x_i, y_i).

    Sample points where the kernel mass vanishes are excluded from both
    sums symmetrically and counted in ``n_dropped``.
    """
    times = np.asarray(times, dtype=float)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if times.size == 0:
        raise EstimationError("eta_bar needs a nonempty sample")
    s, st, sdx, stdx, sdy, stdy = local_sums(xs, ys, times, xs, ys, kernel.h_x, kernel.h_y)
    defined = s > 0.0
    n_used = int(np.sum(defined))
    if n_used == 0:
        raise EstimationError("eta_bar: kernel mass vanished at every sample point")
    s2 = s[defined] ** 2
    num = float(np.sum((stdx[defined] * s[defined] - st[defined] * sdx[defined]) / s2))
    den = float(np.sum((stdy[defined] * s[defined] - st[defined] * sdy[defined]) / s2))
    if abs(den) < 1e-300:
        raise EstimationError("eta_bar: denominator sum vanished")
    return EtaEstimate(value=num / den, kind="eta_bar", eval_point=None,
                       n_used=n_used, n_dropped=int(times.size - n_used))
