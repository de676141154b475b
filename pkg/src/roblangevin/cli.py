"""Command-line entry point: ``robust-langevin <experiment> [flags]``.

Flags override values from an optional ``--config`` JSON file, which in
turn overrides the preset and built-in defaults. Exit codes: 0 success,
1 configuration error, 2 chain divergence.
"""

from __future__ import annotations

import argparse
import json
import sys

from .contamination import DataError
from .experiment import (
    EXPERIMENTS,
    PRESETS,
    ExperimentConfig,
    ExperimentConfigError,
    run_experiment,
)
from .samplers import SamplerConfigError


def _parse_sweep(text: str) -> tuple[str, tuple]:
    if "=" not in text:
        raise ExperimentConfigError("sweep: expected param=v1,v2,...")
    param, _, rest = text.partition("=")
    param = param.strip()
    values = [v for v in rest.split(",") if v != ""]
    if not values:
        raise ExperimentConfigError("sweep: no values given")
    cast = int if param in ("n", "d") else float
    try:
        return param, tuple(cast(v) for v in values)
    except ValueError as exc:
        raise ExperimentConfigError(f"sweep: {exc}") from None


def _parse_step(text: str):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise ExperimentConfigError(f"step-size: expected 'auto' or a number, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="robust-langevin",
        description="Benchmark ULA vs Rob-ULA under epsilon-contamination.",
    )
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int, dest="base_seed")
    p.add_argument("--method", choices=["ula", "robula", "both"])
    p.add_argument("--sweep", type=str, help="param=v1,v2,... (one of n, d, eps)")
    p.add_argument("--burn-in", type=int, dest="burn_in")
    p.add_argument("--samples", type=int, dest="n_samples")
    p.add_argument("--step-size", type=str, dest="step_size")
    p.add_argument("--widen-eps", action="store_true", default=None, dest="widen_eps",
                   help="widen the estimator eps by the Hoeffding sampling band")
    p.add_argument("--delta", type=float)
    p.add_argument("--est-eps", type=float, dest="est_eps",
                   help="estimator eps override (sensitivity studies)")
    p.add_argument("--mode", choices=["bernoulli", "exact-count"])
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--out", type=str)
    p.add_argument("--config", type=str, help="JSON file with config fields")
    p.add_argument("--data", type=str, dest="data_path", help="input CSV (logistic)")
    p.add_argument("--label-col", type=str, dest="label_col")
    p.add_argument("--n-test", type=int, dest="n_test")
    p.add_argument("--dump-samples", type=str, dest="dump_samples",
                   help="directory for per-chain sample dumps")
    p.add_argument("--threads", type=int)
    p.add_argument("--loglik-avg-samples", action="store_true", default=None,
                   dest="loglik_over_samples",
                   help="average test log-likelihood over chain samples "
                        "instead of plugging in the posterior mean")
    return p


def config_from_args(argv: list[str]) -> ExperimentConfig:
    args = build_parser().parse_args(argv)

    merged: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                merged.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ExperimentConfigError(f"config: {exc}")
    preset = args.preset or merged.pop("preset", None)
    if preset:
        if preset not in PRESETS:
            raise ExperimentConfigError(f"preset: unknown value {preset!r}")
        for k, v in PRESETS[preset].items():
            merged.setdefault(k, v)

    for key in ("n", "d", "eps", "runs", "base_seed", "method", "burn_in",
                "n_samples", "widen_eps", "delta", "est_eps", "mode", "out",
                "data_path", "label_col", "n_test", "dump_samples", "threads",
                "loglik_over_samples"):
        val = getattr(args, key)
        if val is not None:
            merged[key] = val
    if args.step_size is not None:
        merged["step_size"] = _parse_step(args.step_size)
    elif isinstance(merged.get("step_size"), str) and merged["step_size"] != "auto":
        merged["step_size"] = _parse_step(merged["step_size"])
    sweep = args.sweep if args.sweep is not None else merged.pop("sweep", None)
    if isinstance(sweep, str):
        merged["sweep"] = _parse_sweep(sweep)
    elif sweep is not None:
        merged["sweep"] = (sweep[0], tuple(sweep[1]))

    allowed = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(merged) - allowed
    if unknown:
        raise ExperimentConfigError(f"config: unknown fields {sorted(unknown)}")
    return ExperimentConfig(experiment=args.experiment, **merged)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
        records, code = run_experiment(cfg)
    except (ExperimentConfigError, SamplerConfigError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    diverged = sum(r.diverged for r in records)
    print(f"wrote {len(records)} records" + (f" ({diverged} diverged)" if diverged else "")
          + (f" to {cfg.out}" if cfg.out else ""))
    return code


if __name__ == "__main__":
    sys.exit(main())
