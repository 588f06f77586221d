"""Bandwidth selection by k-fold cross-validation and the bootstrap
specification test comparing the nonparametric relative effect with a
(semi)parametric coefficient ratio.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from . import baselines
from .errors import ConfigurationError, EstimationError
from .estimators import eta_bar
from ._fast import local_sums
from .kernels import KernelConfig

__all__ = ["CVConfig", "CVResult", "cv_bandwidth", "TestResult", "bootstrap_spec_test", "MODEL_FITTERS"]

MODEL_FITTERS = {
    "cox": baselines.fit_cox,
    "aft": baselines.fit_weibull_aft,
    "po": baselines.fit_po,
}


@dataclass(frozen=True)
class CVConfig:
    """k-fold cross-validation settings for bandwidth selection.

    The candidate grid is applied as h_x = h_y = h.  10 folds for
    simulations, 5 for data applications.
    """

    grid: Sequence[float]
    folds: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.folds < 2:
            raise ConfigurationError("cross-validation needs folds >= 2")
        if len(self.grid) == 0:
            raise ConfigurationError("cross-validation needs a nonempty bandwidth grid")
        if any(h <= 0 for h in self.grid):
            raise ConfigurationError("all candidate bandwidths must be positive")


@dataclass(frozen=True)
class CVResult:
    bandwidth: float
    scores: Dict[float, float]
    n_undefined: Dict[float, int]
    folds: int
    seed: int


def cv_bandwidth(times, xs, ys, config: CVConfig) -> CVResult:
    """Pick the grid bandwidth minimising out-of-fold squared prediction
    error of the Nadaraya-Watson mean of t given (x, y).

    Fold assignment is a seeded permutation.  Held-out points with no
    in-bandwidth training mass are penalised with the variance of the
    held-out fold's response (so vanishing bandwidths cannot win through
    undefinedness).  Ties break toward the smaller bandwidth.
    """
    times = np.asarray(times, dtype=float)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n = times.size
    if n < config.folds:
        raise ConfigurationError(f"need at least folds={config.folds} observations, got {n}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed)))
    fold_id = np.empty(n, dtype=np.int64)
    fold_id[rng.permutation(n)] = np.arange(n) % config.folds

    grid = sorted(float(h) for h in config.grid)
    total_sq = {h: 0.0 for h in grid}
    undef = {h: 0 for h in grid}
    for f in range(config.folds):
        test = fold_id == f
        train = ~test
        t_out = times[test]
        penalty = float(np.var(t_out))
        for h in grid:
            sums = local_sums(xs[train], ys[train], times[train], xs[test], ys[test], h, h)
            s, st = sums[0], sums[1]
            ok = s > 0.0
            pred = np.where(ok, st / np.where(ok, s, 1.0), 0.0)
            total_sq[h] += float(np.sum((t_out[ok] - pred[ok]) ** 2)) + penalty * int(np.sum(~ok))
            undef[h] += int(np.sum(~ok))
    if all(undef[h] == n for h in grid):
        raise EstimationError(
            "cv_bandwidth: every candidate produced no defined prediction; "
            + "; ".join(f"h={h}: {undef[h]}/{n} undefined" for h in grid)
        )
    scores = {h: total_sq[h] / n for h in grid}
    best = min(grid, key=lambda h: (scores[h], h))
    return CVResult(bandwidth=best, scores=scores, n_undefined=undef, folds=config.folds, seed=config.seed)


@dataclass(frozen=True)
class TestResult:
    """Outcome of the bootstrap specification test."""

    statistic: float  # eta_hat - model coefficient ratio on the original data
    p_value: float
    replicates: int  # successful replicates
    requested: int
    failures: int
    boot_stats: List[float]
    model: str
    eta: float
    model_ratio: float
    bandwidth: float
    seed: int
    convention: str = "centered"

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.__dict__, fh, indent=2)


def _p_value(boot: np.ndarray, delta_hat: float, convention: str) -> float:
    if convention == "centered":
        return float(np.mean(np.abs(boot - delta_hat) >= abs(delta_hat)))
    if convention == "percentile":
        lo = float(np.mean(boot <= 0.0))
        hi = float(np.mean(boot >= 0.0))
        return min(1.0, 2.0 * min(lo, hi))
    raise ConfigurationError(f"unknown p-value convention {convention!r}")


def bootstrap_spec_test(times, delta, xs, ys, model: str, kernel: KernelConfig,
                        *, B: int = 400, seed: int = 0,
                        convention: str = "centered") -> TestResult:
    """Bootstrap test of H0: the single-index model holds, via the contrast
    between the nonparametric ratio-of-sums estimate and the model's
    coefficient ratio.

    Rows (t, delta, x, y) are resampled jointly with replacement; both
    estimates are recomputed on each resample with the same bandwidth.  The
    default p-value is the centered symmetric percentile
    ``mean(|D*_b - D| >= |D|)`` over successful replicates; the
    "percentile" convention (does the bootstrap distribution of D* straddle
    zero) is available for sensitivity analysis.
    """
    if model not in MODEL_FITTERS:
        raise ConfigurationError(f"unknown model {model!r}; expected one of {sorted(MODEL_FITTERS)}")
    times = np.asarray(times, dtype=float)
    delta = np.asarray(delta)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    events = delta == 1
    fitter = MODEL_FITTERS[model]

    fit = fitter(times, events, xs, ys)
    if not fit.converged:
        raise EstimationError(f"{model} fit did not converge on the original data")
    ratio = baselines.coeff_ratio(fit)
    eta = eta_bar(times, xs, ys, kernel).value
    delta_hat = eta - ratio

    n = times.size
    boot: List[float] = []
    failures = 0
    for b in range(B):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(b,))))
        idx = rng.integers(0, n, size=n)
        try:
            fit_b = fitter(times[idx], events[idx], xs[idx], ys[idx])
            if not fit_b.converged:
                raise EstimationError("replicate fit did not converge")
            boot.append(eta_bar(times[idx], xs[idx], ys[idx], kernel).value
                        - baselines.coeff_ratio(fit_b))
        except EstimationError:
            failures += 1
    if failures > 0.1 * B:
        raise EstimationError(
            f"bootstrap_spec_test: {failures}/{B} replicates failed (> 10%); "
            f"model={model}, h=({kernel.h_x}, {kernel.h_y})"
        )
    boot_arr = np.asarray(boot, dtype=float)
    p = _p_value(boot_arr, delta_hat, convention)
    return TestResult(statistic=delta_hat, p_value=p, replicates=len(boot), requested=B,
                      failures=failures, boot_stats=[float(v) for v in boot],
                      model=model, eta=float(eta), model_ratio=float(ratio),
                      bandwidth=float(kernel.h_x), seed=seed, convention=convention)
