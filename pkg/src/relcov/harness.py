"""Orchestration: configuration parsing, dataset ingestion, seeded Monte
Carlo campaigns, estimation/test runs on user data, and table emission.

Campaigns are reproducible by construction: every run derives its own
generator from ``SeedSequence(master_seed, spawn_key=(run_index,))``, so the
results are identical for any worker count, and runs are reduced in run
order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import yaml

from . import baselines
from .copulas import CopulaModel
from .datagen import (Dataset, SingleIndexDGP, TwoHazardsDGP, WeibullMargin,
                      sample_single_index, sample_two_hazards, risk_share)
from .errors import ConfigurationError, DataFormatError, EstimationError
from .estimators import GridSpec, TrimConfig, eta_bar, eta_lambda_bar, eta_m_at_means, eta_pi_bar
from .inference import CVConfig, bootstrap_spec_test, cv_bandwidth
from .kernels import KernelConfig

__all__ = [
    "CampaignConfig",
    "CampaignResult",
    "run_campaign",
    "estimate_file",
    "emit_table",
    "parse_summary_csv",
    "load_dataset",
    "DEFAULT_CV_GRID",
    "BOUNDARY_TRIM",
]

ESTIMATOR_KEYS = ("eta", "eta_pi", "eta_lambda", "eta_m", "cox", "aft", "po")

DEFAULT_CV_GRID = (0.15, 0.2, 0.3, 0.45, 0.6)

# boundary-trim windows used in the simulations, per copula family
BOUNDARY_TRIM = {"gumbel": (0.05, 2.5), "clayton": (0.05, 0.5)}


# ---------------------------------------------------------------------------
# configuration


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigurationError(f"missing required key {key!r} in {where}")
    return d[key]


def _copula_from_dict(d: dict) -> CopulaModel:
    family = str(_require(d, "family", "dgp.copula")).lower()
    if ("tau" in d) == ("theta" in d):
        raise ConfigurationError("dgp.copula needs exactly one of 'tau' or 'theta'")
    if "tau" in d:
        return CopulaModel.from_tau(family, float(d["tau"]))
    return CopulaModel(family=family, theta=float(d["theta"]))


def _dgp_from_dict(d: dict):
    kind = str(_require(d, "kind", "dgp")).lower()
    copula = _copula_from_dict(_require(d, "copula", "dgp"))
    beta = d.get("beta", {})
    bx = float(beta.get("x", 1.0))
    by = float(beta.get("y", 1.0))
    if kind == "single_index":
        m = d.get("margins", {})
        return SingleIndexDGP(
            margin1=WeibullMargin(float(m.get("lambda1", 0.5)), float(m.get("k1", 1.0))),
            margin2=WeibullMargin(float(m.get("lambda2", 1.0)), float(m.get("k2", 1.0))),
            beta_x=bx, beta_y=by, beta_x2=float(beta.get("x2", 0.0)), copula=copula)
    if kind == "two_hazards":
        p = d.get("params", {})
        return TwoHazardsDGP(
            a1=float(p.get("a1", 1.0)), b1=float(p.get("b1", 0.5)),
            a2=float(p.get("a2", 1.0)), b2=float(p.get("b2", 1.0)),
            beta_x=bx, beta_y=by, copula=copula)
    raise ConfigurationError(f"unknown dgp.kind {kind!r}; expected single_index or two_hazards")


@dataclass(frozen=True)
class CampaignConfig:
    """A seeded Monte Carlo campaign: DGP, sample size, runs, bandwidth
    policy, estimator set, grid/trim settings, master seed."""

    dgp: object
    n: int
    runs: int
    estimators: Sequence[str]
    bandwidth_mode: str = "fixed"  # "fixed" | "cv"
    h: float = 0.2
    cv_grid: Sequence[float] = DEFAULT_CV_GRID
    cv_folds: int = 10
    grid: GridSpec = field(default_factory=GridSpec)
    trim: Optional[TrimConfig] = None
    seed: int = 0
    threads: int = 1
    out: Optional[str] = None

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigurationError("runs must be >= 1")
        if self.n < 1:
            raise ConfigurationError("n must be >= 1")
        bad = [e for e in self.estimators if e not in ESTIMATOR_KEYS]
        if bad:
            raise ConfigurationError(f"unknown estimators {bad}; choose from {ESTIMATOR_KEYS}")
        if self.bandwidth_mode not in ("fixed", "cv"):
            raise ConfigurationError("bandwidth.mode must be 'fixed' or 'cv'")
        if self.bandwidth_mode == "fixed" and self.h <= 0:
            raise ConfigurationError("fixed bandwidth must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        dgp = _dgp_from_dict(_require(d, "dgp", "config"))
        bw = d.get("bandwidth", {"mode": "fixed", "h": 0.2})
        mode = str(bw.get("mode", "fixed"))
        grid_d = d.get("grid", {})
        grid = GridSpec(t_min=float(grid_d.get("t_min", 0.04)),
                        t_max=float(grid_d.get("t_max", 3.55)),
                        points=int(grid_d.get("points", 500)))
        trim_d = d.get("trim")
        if trim_d is None:
            lo, hi = BOUNDARY_TRIM[dgp.copula.family]
            trim = TrimConfig(mode="boundary+denom", t_lo=lo, t_hi=hi, denom_floor=0.1)
        else:
            mode_t = str(trim_d.get("mode", "boundary+denom"))
            if mode_t == "none":
                trim = TrimConfig(mode="none")
            else:
                lo_d, hi_d = BOUNDARY_TRIM[dgp.copula.family]
                trim = TrimConfig(mode=mode_t,
                                  t_lo=float(trim_d.get("t_lo", lo_d)),
                                  t_hi=float(trim_d.get("t_hi", hi_d)),
                                  denom_floor=float(trim_d.get("denom_floor", 0.1)))
        return cls(
            dgp=dgp,
            n=int(_require(d, "n", "config")),
            runs=int(_require(d, "runs", "config")),
            estimators=tuple(d.get("estimators", ("eta",))),
            bandwidth_mode=mode,
            h=float(bw.get("h", 0.2)),
            cv_grid=tuple(float(h) for h in bw.get("grid", DEFAULT_CV_GRID)),
            cv_folds=int(bw.get("folds", 10)),
            grid=grid,
            trim=trim,
            seed=int(d.get("seed", 0)),
            threads=int(d.get("threads", 1)),
            out=d.get("out"),
        )

    @classmethod
    def from_yaml(cls, path) -> "CampaignConfig":
        with open(path) as fh:
            d = yaml.safe_load(fh)
        if not isinstance(d, dict):
            raise ConfigurationError(f"config file {path} does not hold a mapping")
        return cls.from_dict(d)

    def resolved(self) -> dict:
        """Plain-dict echo of the fully resolved configuration."""
        dgp = self.dgp
        d: Dict = {"n": self.n, "runs": self.runs, "seed": self.seed, "threads": self.threads,
                   "estimators": list(self.estimators)}
        if isinstance(dgp, SingleIndexDGP):
            d["dgp"] = {"kind": "single_index",
                        "margins": {"lambda1": dgp.margin1.rate, "k1": dgp.margin1.shape,
                                    "lambda2": dgp.margin2.rate, "k2": dgp.margin2.shape},
                        "beta": {"x": dgp.beta_x, "y": dgp.beta_y, "x2": dgp.beta_x2},
                        "copula": {"family": dgp.copula.family, "theta": dgp.copula.theta}}
        else:
            d["dgp"] = {"kind": "two_hazards",
                        "params": {"a1": dgp.a1, "b1": dgp.b1, "a2": dgp.a2, "b2": dgp.b2},
                        "beta": {"x": dgp.beta_x, "y": dgp.beta_y},
                        "copula": {"family": dgp.copula.family, "theta": dgp.copula.theta}}
        if self.bandwidth_mode == "fixed":
            d["bandwidth"] = {"mode": "fixed", "h": self.h}
        else:
            d["bandwidth"] = {"mode": "cv", "grid": list(self.cv_grid), "folds": self.cv_folds}
        d["grid"] = {"t_min": self.grid.t_min, "t_max": self.grid.t_max, "points": self.grid.points}
        d["trim"] = asdict(self.trim) if self.trim else None
        d["percentiles"] = "nearest-rank"
        return d


# ---------------------------------------------------------------------------
# campaign execution


def _sample(dgp, n: int, seed: int) -> Dataset:
    if isinstance(dgp, SingleIndexDGP):
        return sample_single_index(dgp, n, seed)
    return sample_two_hazards(dgp, n, seed)


def _run_seed(master_seed: int, run_index: int) -> int:
    # run-index-keyed derivation: independent of worker scheduling
    ss = np.random.SeedSequence(master_seed, spawn_key=(run_index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0] % (2**63))


def _one_run(config: CampaignConfig, r: int) -> dict:
    seed = _run_seed(config.seed, r)
    data = _sample(config.dgp, config.n, seed)
    record: Dict = {"run": r, "seed": seed, "risk1_share": risk_share(data),
                    "values": {}, "failures": {}}
    if config.bandwidth_mode == "cv":
        cv = cv_bandwidth(data.t, data.x, data.y,
                          CVConfig(grid=config.cv_grid, folds=config.cv_folds, seed=seed))
        h = cv.bandwidth
    else:
        h = config.h
    record["h"] = h
    kernel = KernelConfig.of(h)
    events = data.delta == 1
    for key in config.estimators:
        try:
            if key == "eta":
                record["values"][key] = eta_bar(data.t, data.x, data.y, kernel).value
            elif key == "eta_pi":
                record["values"][key] = eta_pi_bar(data.t, data.x, data.y,
                                                   config.grid, config.trim, kernel).value
            elif key == "eta_lambda":
                record["values"][key] = eta_lambda_bar(data.t, data.x, data.y,
                                                       config.grid, config.trim, kernel).value
            elif key == "eta_m":
                record["values"][key] = eta_m_at_means(data.t, data.x, data.y, kernel).value
            else:
                fitter = {"cox": baselines.fit_cox, "aft": baselines.fit_weibull_aft,
                          "po": baselines.fit_po}[key]
                record["values"][key] = baselines.coeff_ratio(fitter(data.t, events, data.x, data.y))
        except EstimationError as exc:
            record["failures"][key] = str(exc)
    return record


def _nearest_rank(sorted_vals: np.ndarray, p: float) -> float:
    rank = max(1, math.ceil(p / 100.0 * sorted_vals.size))
    return float(sorted_vals[rank - 1])


def summarize(records: List[dict], estimators: Sequence[str]) -> dict:
    summary = {}
    for key in estimators:
        vals = np.sort(np.array([r["values"][key] for r in records if key in r["values"]]))
        if vals.size == 0:
            summary[key] = {"mean": float("nan"), "p5": float("nan"), "p95": float("nan"), "n_ok": 0}
        else:
            summary[key] = {"mean": float(np.mean(vals)),
                            "p5": _nearest_rank(vals, 5.0),
                            "p95": _nearest_rank(vals, 95.0),
                            "n_ok": int(vals.size)}
    return summary


@dataclass
class CampaignResult:
    config: dict
    records: List[dict]
    summary: dict
    elapsed_s: float
    degraded: bool
    failed_runs: int

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.__dict__, fh, indent=2)

    @classmethod
    def from_json(cls, path) -> "CampaignResult":
        with open(path) as fh:
            d = json.load(fh)
        return cls(**d)


def run_campaign(config: CampaignConfig) -> CampaignResult:
    """Execute all runs (optionally on a process pool), gather records in
    run order, and summarize.  Per-run estimator failures are recorded and
    the campaign continues; more than 20% failed runs marks it degraded."""
    t0 = time.time()
    indices = list(range(config.runs))
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            records = list(pool.map(_one_run, [config] * len(indices), indices))
    else:
        records = [_one_run(config, r) for r in indices]
    records.sort(key=lambda r: r["run"])
    failed = sum(1 for r in records if r["failures"])
    result = CampaignResult(
        config=config.resolved(),
        records=records,
        summary=summarize(records, config.estimators),
        elapsed_s=time.time() - t0,
        degraded=failed > 0.2 * config.runs,
        failed_runs=failed,
    )
    if config.out:
        result.to_json(config.out)
    return result


# ---------------------------------------------------------------------------
# dataset ingestion


def load_dataset(path) -> Dataset:
    """Read a CSV with header ``t,delta,x,y`` (``delta`` optional).

    Malformed rows raise with their 1-based line number; nonpositive
    durations are validation errors.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        cols = [c.strip().lower() for c in header]
        allowed = {"t", "delta", "x", "y"}
        if not set(cols) <= allowed or len(set(cols)) != len(cols):
            raise DataFormatError(f"{path}: header must name columns t,delta,x,y (delta optional), got {header}")
        for need in ("t", "x", "y"):
            if need not in cols:
                raise DataFormatError(f"{path}: missing required column {need!r}")
        has_delta = "delta" in cols
        idx = {c: cols.index(c) for c in cols}
        t, delta, xs, ys = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(cols):
                raise DataFormatError(f"{path}: line {lineno}: expected {len(cols)} fields, got {len(row)}")
            try:
                ti = float(row[idx["t"]])
                xi = float(row[idx["x"]])
                yi = float(row[idx["y"]])
            except ValueError as exc:
                raise DataFormatError(f"{path}: line {lineno}: {exc}") from None
            if not (np.isfinite(ti) and np.isfinite(xi) and np.isfinite(yi)):
                raise DataFormatError(f"{path}: line {lineno}: non-finite value")
            if ti <= 0:
                raise DataFormatError(f"{path}: line {lineno}: t must be positive, got {ti}")
            if has_delta:
                raw = row[idx["delta"]].strip()
                if raw not in ("1", "2"):
                    raise DataFormatError(f"{path}: line {lineno}: delta must be 1 or 2, got {raw!r}")
                delta.append(int(raw))
            t.append(ti)
            xs.append(xi)
            ys.append(yi)
    if not t:
        raise DataFormatError(f"{path}: no data rows")
    d = np.array(delta, dtype=np.int8) if has_delta else np.zeros(len(t), dtype=np.int8)
    return Dataset(t=np.array(t), delta=d, x=np.array(xs), y=np.array(ys))


def estimate_file(path, *, models: Sequence[str] = (), folds: int = 5,
                  cv_grid: Sequence[float] = DEFAULT_CV_GRID, h: Optional[float] = None,
                  B: int = 400, seed: int = 0) -> dict:
    """Estimation workflow on a CSV file: CV bandwidth (unless ``h`` is
    given), the ratio-of-sums estimate, then per requested model the
    coefficient ratio and its bootstrap specification test."""
    data = load_dataset(path)
    has_delta = bool(np.any(data.delta > 0))
    if models and not has_delta:
        raise ConfigurationError("baseline models requested but the file has no delta column")
    report: Dict = {"file": str(path), "n": len(data), "seed": seed}
    if h is None:
        cv = cv_bandwidth(data.t, data.x, data.y, CVConfig(grid=cv_grid, folds=folds, seed=seed))
        report["bandwidth"] = cv.bandwidth
        report["cv_scores"] = {repr(k): v for k, v in cv.scores.items()}
    else:
        report["bandwidth"] = float(h)
    kernel = KernelConfig.of(report["bandwidth"])
    report["eta"] = eta_bar(data.t, data.x, data.y, kernel).value
    report["models"] = {}
    for model in models:
        res = bootstrap_spec_test(data.t, data.delta, data.x, data.y, model, kernel, B=B, seed=seed)
        report["models"][model] = {"ratio": res.model_ratio, "statistic": res.statistic,
                                   "p_value": res.p_value, "replicates": res.replicates,
                                   "failures": res.failures}
    return report


# ---------------------------------------------------------------------------
# rendering


def emit_table(result: CampaignResult, fmt: str = "text") -> str:
    """Render the campaign summary as text (paper-style row labels), CSV, or
    JSON.  CSV/JSON round-trip to the same numbers exactly."""
    summary = result.summary
    if fmt == "json":
        return json.dumps({"summary": summary, "config": result.config,
                           "degraded": result.degraded}, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["estimator", "mean", "p5", "p95", "n_ok"])
        for key, row in summary.items():
            w.writerow([key, repr(row["mean"]), repr(row["p5"]), repr(row["p95"]), row["n_ok"]])
        return buf.getvalue()
    if fmt == "text":
        lines = []
        for key, row in summary.items():
            lines.append(key)
            lines.append(f"  mean                  {row['mean']:.4f}")
            lines.append(f"  5th, 95th percentile  [{row['p5']:.4f}, {row['p95']:.4f}]")
            lines.append(f"  runs used             {row['n_ok']}")
        if result.degraded:
            lines.append("campaign DEGRADED: %d failed runs" % result.failed_runs)
        return "\n".join(lines) + "\n"
    raise ConfigurationError(f"unknown format {fmt!r}; expected text, csv, or json")


def parse_summary_csv(text: str) -> dict:
    """Inverse of ``emit_table(..., 'csv')``."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != ["estimator", "mean", "p5", "p95", "n_ok"]:
        raise DataFormatError(f"unexpected summary header {header}")
    out = {}
    for row in reader:
        if not row:
            continue
        out[row[0]] = {"mean": float(row[1]), "p5": float(row[2]),
                       "p95": float(row[3]), "n_ok": int(row[4])}
    return out
