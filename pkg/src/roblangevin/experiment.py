"""Benchmark harness: datasets -> chains -> metrics -> CSV rows.

One invocation runs a grid of cells (a single (n, d, eps) cell, or a sweep
over exactly one of them) times independent runs, for ULA and/or Rob-ULA.
Every random stream is derived from (base_seed, n, d, eps, run), so a cell
rerun in isolation reproduces its rows from a full sweep bit-exactly, and
both methods share the chain noise within a run.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .contamination import (
    ContaminationSpec,
    Dataset,
    flip_labels,
    gen_mean_estimation,
    gen_regression,
    hoeffding_band,
    load_csv,
)
from .metrics import avg_loglik, fit_gaussian, gaussian_w2, posterior_mean, recovery_error
from .models import GaussianMeanModel, LinRegModel, LogisticModel, rbme_closed_posterior
from .samplers import (
    ChainConfig,
    DivergenceError,
    resolve_defaults,
    run_rob_ula,
    run_ula,
)

CSV_HEADER = [
    "experiment", "method", "n", "d", "eps", "seed", "recovery_error",
    "avg_test_loglik", "w2_sq", "wall_time_ms", "step_size", "burn_in", "n_samples",
]

EXPERIMENTS = ("mean-est", "regression", "logistic")
SWEEPABLE = ("n", "d", "eps")


class ExperimentConfigError(ValueError):
    """Invalid experiment configuration; names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int = 500
    d: int = 20
    eps: float = 0.2
    runs: int = 10
    base_seed: int = 0
    method: str = "both"               # "ula" | "robula" | "both"
    sweep: tuple[str, tuple] | None = None
    burn_in: int | None = None         # None -> per-experiment default
    n_samples: int | None = None
    step_size: float | str = "auto"
    widen_eps: bool = False
    delta: float = 1e-3
    est_eps: float | None = None       # estimator eps override (sensitivity studies)
    mode: str = "bernoulli"
    n_test: int = 500
    out: str | None = None
    data_path: str | None = None
    label_col: str | None = None
    dump_samples: str | None = None
    threads: int | None = None
    loglik_over_samples: bool = False


@dataclass
class ExperimentRecord:
    experiment: str
    method: str
    n: int
    d: int
    eps: float
    seed: int
    recovery_error: float | None
    avg_test_loglik: float | None
    w2_sq: float | None
    wall_time_ms: float
    step_size: float
    burn_in: int
    n_samples: int
    diverged: bool = False

    def to_row(self) -> list[str]:
        def num(v):
            if self.diverged:
                return "diverged"
            return "" if v is None else repr(v)

        return [
            self.experiment, self.method, str(self.n), str(self.d), repr(self.eps),
            str(self.seed), num(self.recovery_error), num(self.avg_test_loglik),
            num(self.w2_sq), repr(self.wall_time_ms), repr(self.step_size),
            str(self.burn_in), str(self.n_samples),
        ]


DEFAULT_CHAIN = {
    "mean-est": (300, 1000),
    "regression": (100, 300),
    "logistic": (100, 300),
}

PRESETS = {
    "desk": {"n": 500, "d": 20},
    "paper": {"n": 1000, "d": 200},
}


def apply_en_widening(eps: float, n: int, delta: float) -> float:
    """Widen the nominal contamination level by the Hoeffding sampling band,
    clamped below 1."""
    return min(eps + hoeffding_band(n, delta), 0.999)


def validate_config(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.experiment not in EXPERIMENTS:
        raise ExperimentConfigError(f"experiment: unknown value {cfg.experiment!r}")
    if cfg.method not in ("ula", "robula", "both"):
        raise ExperimentConfigError(f"method: unknown value {cfg.method!r}")
    if not 0.0 <= cfg.eps < 1.0:
        raise ExperimentConfigError(f"eps: must be in [0, 1), got {cfg.eps}")
    if cfg.n < 1 or cfg.d < 1 or cfg.runs < 1:
        raise ExperimentConfigError("n, d, runs: must be positive")
    if cfg.sweep is not None:
        param, values = cfg.sweep
        if param not in SWEEPABLE:
            raise ExperimentConfigError(f"sweep: parameter must be one of {SWEEPABLE}")
        if len(values) < 1:
            raise ExperimentConfigError("sweep: needs at least one value")
    if cfg.experiment == "logistic":
        if cfg.data_path is None:
            raise ExperimentConfigError("data: logistic experiments need --data <csv>")
        if cfg.label_col is None:
            raise ExperimentConfigError("label-col: required for logistic experiments")
        if cfg.sweep is not None and cfg.sweep[0] != "eps":
            raise ExperimentConfigError("sweep: logistic sweeps support eps only")
    if not 0 < cfg.delta < 1:
        raise ExperimentConfigError(f"delta: must be in (0, 1), got {cfg.delta}")
    burn, samp = DEFAULT_CHAIN[cfg.experiment]
    return replace(
        cfg,
        burn_in=burn if cfg.burn_in is None else cfg.burn_in,
        n_samples=samp if cfg.n_samples is None else cfg.n_samples,
    )


def _cells(cfg: ExperimentConfig) -> list[dict]:
    base = {"n": cfg.n, "d": cfg.d, "eps": cfg.eps}
    if cfg.sweep is None:
        return [base]
    param, values = cfg.sweep
    out = []
    for v in values:
        cell = dict(base)
        cell[param] = int(v) if param in ("n", "d") else float(v)
        out.append(cell)
    return out


def _cell_seedseq(base_seed: int, n: int, d: int, eps: float, run: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([base_seed, n, d, int(round(eps * 10**9)), run])


def _clean_test_set(kind: str, truth: np.ndarray, n_test: int,
                    rng: np.random.Generator) -> Dataset:
    d = truth.size
    if kind == "mean":
        Z = truth + rng.standard_normal((n_test, d))
        return Dataset(kind="mean", is_corrupt=np.zeros(n_test, dtype=bool), Z=Z, truth=truth)
    X = rng.standard_normal((n_test, d))
    y = X @ truth + rng.standard_normal(n_test)
    return Dataset(kind="regression", is_corrupt=np.zeros(n_test, dtype=bool),
                   X=X, y=y, truth=truth)


def _dump_path(cfg: ExperimentConfig, cell: dict, run: int, method: str) -> str:
    name = (f"{cfg.experiment}_n{cell['n']}_d{cell['d']}_eps{cell['eps']:g}"
            f"_run{run}_{method}.csv")
    return os.path.join(cfg.dump_samples, name)


def _dump_chain(path: str, samples: np.ndarray) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration"] + [f"theta_{j}" for j in range(samples.shape[1])])
        for i, row in enumerate(samples):
            writer.writerow([i] + [repr(v) for v in row])


def _run_task(cfg: ExperimentConfig, cell: dict, run: int) -> list[ExperimentRecord]:
    n, d, eps = cell["n"], cell["d"], cell["eps"]
    ss = _cell_seedseq(cfg.base_seed, n, d, eps, run)
    ss_data, ss_chain, ss_test = ss.spawn(3)
    rng_data = np.random.default_rng(ss_data)
    chain_seed = int(ss_chain.generate_state(1, np.uint32)[0])

    spec = ContaminationSpec(eps=eps, mode=cfg.mode)
    clean_posterior = None
    if cfg.experiment == "mean-est":
        data = gen_mean_estimation(n, d, spec, rng_data)
        model = GaussianMeanModel(np.eye(d), np.zeros(d), np.eye(d))
        test = _clean_test_set("mean", data.truth, cfg.n_test, np.random.default_rng(ss_test))
        clean_z = data.Z[~data.is_corrupt]
        clean_posterior = rbme_closed_posterior(model, clean_z)
    elif cfg.experiment == "regression":
        data = gen_regression(n, d, spec, rng_data)
        model = LinRegModel(d, 1.0, np.zeros(d), np.eye(d))
        test = _clean_test_set("regression", data.truth, cfg.n_test,
                               np.random.default_rng(ss_test))
    else:
        train, test = load_csv(cfg.data_path, cfg.label_col, seed=cfg.base_seed)
        data = flip_labels(train, eps, rng_data, mode=cfg.mode)
        n = data.n
        d = data.d
        model = LogisticModel(d)

    eps_est = cfg.est_eps if cfg.est_eps is not None else eps
    if cfg.widen_eps:
        eps_est = apply_en_widening(eps_est, n, cfg.delta)

    report = model.smoothness_report(n, eps_est, data.obs)
    chain_cfg = resolve_defaults(
        ChainConfig(step_size=cfg.step_size, burn_in=cfg.burn_in,
                    n_samples=cfg.n_samples, seed=chain_seed,
                    init_scale="auto", eps=eps_est),
        report, n,
    )

    methods = ["ula", "robula"] if cfg.method == "both" else [cfg.method]
    records = []
    for method in methods:
        rec = ExperimentRecord(
            experiment=cfg.experiment, method=method, n=n, d=d, eps=eps,
            seed=chain_seed, recovery_error=None, avg_test_loglik=None,
            w2_sq=None, wall_time_ms=0.0, step_size=chain_cfg.step_size,
            burn_in=chain_cfg.burn_in, n_samples=chain_cfg.n_samples,
        )
        try:
            runner = run_rob_ula if method == "robula" else run_ula
            result = runner(model, data.obs, chain_cfg)
        except DivergenceError:
            rec.diverged = True
            records.append(rec)
            continue
        theta_hat = posterior_mean(result.samples)
        if data.truth is not None:
            rec.recovery_error = recovery_error(theta_hat, data.truth)
        if cfg.loglik_over_samples:
            from .metrics import avg_loglik_over_samples
            rec.avg_test_loglik = avg_loglik_over_samples(model, result.samples, test.obs)
        else:
            rec.avg_test_loglik = avg_loglik(model, theta_hat, test.obs)
        if clean_posterior is not None:
            fit = fit_gaussian(result.samples)
            target = type(fit)(mean=clean_posterior[0], cov=clean_posterior[1])
            rec.w2_sq = gaussian_w2(fit, target)
        rec.wall_time_ms = result.wall_time * 1000.0
        records.append(rec)
        if cfg.dump_samples:
            _dump_chain(_dump_path(cfg, cell, run, method), result.samples)
    return records


def _resolve_threads(cfg: ExperimentConfig, n_tasks: int) -> int:
    if cfg.threads is not None:
        return max(1, cfg.threads)
    env = os.environ.get("ROBLANGEVIN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ExperimentConfigError(f"ROBLANGEVIN_THREADS: not an integer: {env!r}")
    return 1


def run_experiment(cfg: ExperimentConfig) -> tuple[list[ExperimentRecord], int]:
    """Execute the full grid. Returns (records, exit_code): 0 on success,
    2 if any chain diverged. Writes the CSV when cfg.out is set."""
    cfg = validate_config(cfg)
    cells = _cells(cfg)
    tasks = [(ci, cell, run) for ci, cell in enumerate(cells) for run in range(cfg.runs)]
    threads = _resolve_threads(cfg, len(tasks))

    if threads == 1:
        results = [_run_task(cfg, cell, run) for _, cell, run in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_run_task, cfg, cell, run) for _, cell, run in tasks]
            results = [f.result() for f in futures]

    records = [rec for batch in results for rec in batch]
    if cfg.out:
        write_csv(cfg.out, records)
    code = 2 if any(r.diverged for r in records) else 0
    return records, code


def write_csv(path: str, records: list[ExperimentRecord]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(rec.to_row())
