"""Command-line interface.

Subcommands: ``simulate`` (Monte Carlo campaign from a YAML config),
``estimate`` (workflow on a CSV file), ``test`` (bootstrap specification
test), ``cv`` (bandwidth selection report), ``oracle`` (closed-form /
quadrature reference values).

Exit codes: 0 success, 1 validation/configuration error, 2 numerical or
estimation failure, 3 degraded campaign.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import harness, oracle
from .copulas import CopulaModel
from .datagen import SingleIndexDGP, TwoHazardsDGP, WeibullMargin
from .errors import ConfigurationError, DataFormatError, EstimationError, NumericalError
from .inference import CVConfig, bootstrap_spec_test, cv_bandwidth
from .kernels import KernelConfig


def _write_out(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_grid(spec: str):
    try:
        return tuple(float(v) for v in spec.split(","))
    except ValueError:
        raise ConfigurationError(f"bad bandwidth grid {spec!r}; expected comma-separated floats")


def _cmd_simulate(args) -> int:
    config = harness.CampaignConfig.from_yaml(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.out is not None:
        overrides["out"] = args.out
    if overrides:
        from dataclasses import replace

        config = replace(config, **overrides)
    if args.explain:
        sys.stdout.write(json.dumps(config.resolved(), indent=2) + "\n")
        return 0
    result = harness.run_campaign(config)
    _write_out(harness.emit_table(result, args.format), None)
    return 3 if result.degraded else 0


def _cmd_estimate(args) -> int:
    models = tuple(m for m in (args.models.split(",") if args.models else []) if m)
    report = harness.estimate_file(args.data, models=models, folds=args.folds,
                                   cv_grid=_parse_grid(args.grid), h=args.h,
                                   B=args.bootstrap, seed=args.seed or 0)
    if args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        lines = [f"n                    {report['n']}",
                 f"bandwidth            {report['bandwidth']:.4f}",
                 f"eta (ratio of sums)  {report['eta']:.4f}"]
        for m, row in report.get("models", {}).items():
            lines.append(f"{m}: ratio {row['ratio']:.4f}  p-value {row['p_value']:.4f} "
                         f"({row['replicates']} replicates)")
        text = "\n".join(lines) + "\n"
    _write_out(text, args.out)
    return 0


def _cmd_test(args) -> int:
    data = harness.load_dataset(args.data)
    if not np.any(data.delta > 0):
        raise ConfigurationError("bootstrap test needs a delta column")
    if args.h is not None:
        h = args.h
    else:
        cv = cv_bandwidth(data.t, data.x, data.y,
                          CVConfig(grid=_parse_grid(args.grid), folds=args.folds, seed=args.seed or 0))
        h = cv.bandwidth
    res = bootstrap_spec_test(data.t, data.delta, data.x, data.y, args.model,
                              KernelConfig.of(h), B=args.bootstrap, seed=args.seed or 0)
    if args.out:
        res.to_json(args.out)
    sys.stdout.write(
        f"model {args.model}: eta {res.eta:.4f}  ratio {res.model_ratio:.4f}  "
        f"statistic {res.statistic:.4f}  p-value {res.p_value:.4f}  "
        f"(B={res.replicates}, failures={res.failures}, h={h:.4f})\n")
    return 0


def _cmd_cv(args) -> int:
    data = harness.load_dataset(args.data)
    res = cv_bandwidth(data.t, data.x, data.y,
                       CVConfig(grid=_parse_grid(args.grid), folds=args.folds, seed=args.seed or 0))
    lines = [f"selected bandwidth: {res.bandwidth}"]
    for h in sorted(res.scores):
        mark = " *" if h == res.bandwidth else ""
        lines.append(f"  h={h:g}: cv score {res.scores[h]:.6g} ({res.n_undefined[h]} undefined){mark}")
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_oracle(args) -> int:
    copula = CopulaModel.from_tau(args.family, args.tau)
    x, y = args.x, args.y
    lines = []
    if args.design in ("cox", "po", "aft"):
        ratio, beta_ratio = oracle.single_index_ratio_check(
            args.design, args.beta_x, args.beta_y, args.t, x, y)
        lines.append(f"{args.design}: partial-effect ratio {ratio:.10f}, "
                     f"coefficient ratio {beta_ratio:.10f}")
    elif args.design == "two_hazards":
        dgp = TwoHazardsDGP(a1=args.a1, b1=args.b1, a2=args.a2, b2=args.b2,
                            beta_x=args.beta_x, beta_y=args.beta_y, copula=copula)
        lines.append(f"eta_pi(t={args.t}, x={x}, y={y}) = {oracle.two_hazards_eta_pi(dgp, args.t, x, y):.6f}")
        lines.append(f"independence m(x, y)        = {oracle.independence_limit_m(dgp, x, y):.6f}")
        lines.append(f"independence eta_m(x, y)    = {oracle.independence_limit_eta_m(dgp, x, y):.6f}")
        lines.append(f"eta_m(x, y) by quadrature   = {oracle.quadrature_eta_m(dgp, x, y):.6f}")
        if args.expected_draws:
            v = oracle.expected_eta(dgp, draws=args.expected_draws, seed=args.seed or 0)
            lines.append(f"eta (E-averaged, {args.expected_draws} draws) = {v:.6f}")
    elif args.design == "single_index_x2":
        dgp = SingleIndexDGP(margin1=WeibullMargin(args.lambda1, 1.0),
                             margin2=WeibullMargin(args.lambda2, 1.0),
                             beta_x=args.beta_x, beta_y=args.beta_y,
                             beta_x2=args.beta_x2, copula=copula)
        draws = args.expected_draws or 200000
        v = oracle.expected_eta(dgp, draws=draws, seed=args.seed or 0)
        lines.append(f"eta (E-averaged, {draws} draws) = {v:.6f}")
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relcov",
                                description="Relative covariate effects under dependent competing risks")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo campaign from a YAML config")
    sim.add_argument("--config", required=True)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--threads", type=int)
    sim.add_argument("--format", choices=("text", "csv", "json"), default="text")
    sim.add_argument("--out")
    sim.add_argument("--explain", action="store_true", help="print the resolved config and exit")
    sim.set_defaults(func=_cmd_simulate)

    est = sub.add_parser("estimate", help="estimation workflow on a CSV file")
    est.add_argument("--data", required=True)
    est.add_argument("--models", default="", help="comma-separated subset of cox,aft,po")
    est.add_argument("--folds", type=int, default=5)
    est.add_argument("--grid", default=",".join(str(h) for h in harness.DEFAULT_CV_GRID))
    est.add_argument("--h", type=float, help="fixed bandwidth (skips cross-validation)")
    est.add_argument("--bootstrap", type=int, default=400)
    est.add_argument("--seed", type=int)
    est.add_argument("--format", choices=("text", "json"), default="text")
    est.add_argument("--out")
    est.set_defaults(func=_cmd_estimate)

    tst = sub.add_parser("test", help="bootstrap specification test")
    tst.add_argument("--data", required=True)
    tst.add_argument("--model", required=True, choices=("cox", "aft", "po"))
    tst.add_argument("--h", type=float)
    tst.add_argument("--grid", default=",".join(str(h) for h in harness.DEFAULT_CV_GRID))
    tst.add_argument("--folds", type=int, default=5)
    tst.add_argument("--bootstrap", type=int, default=400)
    tst.add_argument("--seed", type=int)
    tst.add_argument("--out")
    tst.set_defaults(func=_cmd_test)

    cv = sub.add_parser("cv", help="cross-validated bandwidth report")
    cv.add_argument("--data", required=True)
    cv.add_argument("--grid", default=",".join(str(h) for h in harness.DEFAULT_CV_GRID))
    cv.add_argument("--folds", type=int, default=5)
    cv.add_argument("--seed", type=int)
    cv.add_argument("--out")
    cv.set_defaults(func=_cmd_cv)

    orc = sub.add_parser("oracle", help="closed-form / quadrature reference values")
    orc.add_argument("--design", required=True,
                     choices=("cox", "po", "aft", "two_hazards", "single_index_x2"))
    orc.add_argument("--family", default="clayton", choices=("clayton", "gumbel"))
    orc.add_argument("--tau", type=float, default=0.8)
    orc.add_argument("--beta-x", dest="beta_x", type=float, default=1.0)
    orc.add_argument("--beta-y", dest="beta_y", type=float, default=1.0)
    orc.add_argument("--beta-x2", dest="beta_x2", type=float, default=2.0)
    orc.add_argument("--lambda1", type=float, default=0.5)
    orc.add_argument("--lambda2", type=float, default=1.0)
    orc.add_argument("--a1", type=float, default=1.0)
    orc.add_argument("--b1", type=float, default=0.5)
    orc.add_argument("--a2", type=float, default=1.0)
    orc.add_argument("--b2", type=float, default=1.0)
    orc.add_argument("--t", type=float, default=1.0)
    orc.add_argument("--x", type=float, default=0.0)
    orc.add_argument("--y", type=float, default=0.0)
    orc.add_argument("--expected-draws", dest="expected_draws", type=int, default=0)
    orc.add_argument("--seed", type=int)
    orc.add_argument("--out")
    orc.set_defaults(func=_cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, DataFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
