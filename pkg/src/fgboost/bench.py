"""Monte Carlo benchmark harness.

For every (scenario, sample size) cell the harness repeats ``n_runs`` times:
generate a fresh training set, fit a model with the default hyperparameters,
draw 100 fresh test predictors, and score the mean squared output-space
distance between the fitted predictions and the true regression function.
A constant predictor (the Fréchet mean of the training outputs) is scored on
the same test points as a baseline.

Per-run seeds are derived from the master seed and the (scenario, n, run)
coordinates through ``numpy``'s ``SeedSequence`` spawn keys, so results do
not depend on scheduling order and any single run can be reproduced in
isolation.  Runs execute in a process pool; the assembled report is ordered
by run coordinates and is byte-stable across invocations except for the
timing section.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field, asdict
from multiprocessing import get_context

import numpy as np

from .boosting import FGBoostRegressor
from .simulate import SCENARIOS, ScenarioConfig, amspe, draw_predictors, generate, mspe

REPORT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class BenchConfig:
    scenarios: tuple = SCENARIOS
    sample_sizes: tuple = (100, 500)
    n_runs: int = 20
    master_seed: int = 17
    n_test: int = 100
    threads: int | None = None
    learning_rate: float = 0.05
    n_estimators: int = 100
    max_depth: int = 3
    min_samples_leaf: int = 10
    validation_fraction: float = 0.1
    n_iter_no_change: int = 10
    grid_size: int = 100
    obs_per_output: int = 100
    n_nodes: int = 10
    noise_radius: float = 0.1

    def to_dict(self):
        d = asdict(self)
        d["scenarios"] = list(self.scenarios)
        d["sample_sizes"] = list(self.sample_sizes)
        return d


def _seed_int(master_seed, *key):
    return int(np.random.SeedSequence(master_seed, spawn_key=key).generate_state(1)[0])


def run_one(config: BenchConfig, scenario: str, n: int, run: int) -> dict:
    """Execute a single Monte Carlo run and return its record."""
    t0 = time.perf_counter()
    scen_idx = SCENARIOS.index(scenario)
    data_seed = _seed_int(config.master_seed, scen_idx, n, run, 0)
    test_seed = _seed_int(config.master_seed, scen_idx, n, run, 1)
    model_seed = _seed_int(config.master_seed, scen_idx, n, run, 2)

    data = generate(
        ScenarioConfig(
            scenario=scenario,
            n=n,
            seed=data_seed,
            grid_size=config.grid_size,
            obs_per_output=config.obs_per_output,
            n_nodes=config.n_nodes,
            noise_radius=config.noise_radius,
        )
    )
    model = FGBoostRegressor(
        space=data.space,
        learning_rate=config.learning_rate,
        n_estimators=config.n_estimators,
        max_depth=config.max_depth,
        min_samples_leaf=config.min_samples_leaf,
        validation_fraction=config.validation_fraction,
        n_iter_no_change=config.n_iter_no_change,
        random_state=model_seed,
    ).fit(data.X, data.Y)

    X_test = draw_predictors(scenario, config.n_test, np.random.default_rng(test_seed))
    error = mspe(model.predict, X_test, data.truth, data.space)

    baseline_point = data.space.mean_batch(data.Y)
    baseline = mspe(
        lambda X: np.tile(baseline_point, (X.shape[0], 1)),
        X_test,
        data.truth,
        data.space,
    )
    return {
        "scenario": scenario,
        "n": n,
        "run": run,
        "mspe": error,
        "baseline_mspe": baseline,
        "n_trees": model.n_estimators_,
        "seconds": time.perf_counter() - t0,
    }


def _run_task(task):
    config, scenario, n, run = task
    return run_one(config, scenario, n, run)


def run_bench(config: BenchConfig, progress=None) -> dict:
    """Execute the full grid and assemble the report."""
    tasks = [
        (config, scenario, n, run)
        for scenario in config.scenarios
        for n in config.sample_sizes
        for run in range(config.n_runs)
    ]
    threads = config.threads or os.cpu_count() or 1
    t0 = time.perf_counter()
    if threads > 1 and len(tasks) > 1:
        with get_context("fork").Pool(processes=threads) as pool:
            runs = []
            for record in pool.imap(_run_task, tasks):
                runs.append(record)
                if progress:
                    progress(record)
    else:
        runs = []
        for task in tasks:
            record = _run_task(task)
            runs.append(record)
            if progress:
                progress(record)
    total_seconds = time.perf_counter() - t0

    cells = []
    for scenario in config.scenarios:
        for n in config.sample_sizes:
            cell_runs = [r for r in runs if r["scenario"] == scenario and r["n"] == n]
            mean, sd = amspe([r["mspe"] for r in cell_runs])
            base_mean, base_sd = amspe([r["baseline_mspe"] for r in cell_runs])
            cells.append(
                {
                    "scenario": scenario,
                    "n": n,
                    "n_runs": len(cell_runs),
                    "amspe": mean,
                    "sd": sd,
                    "baseline_amspe": base_mean,
                    "baseline_sd": base_sd,
                }
            )
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "config": config.to_dict(),
        "cells": cells,
        "runs": [
            {k: v for k, v in r.items() if k != "seconds"} for r in runs
        ],
        "timing": {
            "per_run_seconds": [r["seconds"] for r in runs],
            "total_seconds": total_seconds,
            "threads": threads,
        },
    }


def write_report(report: dict, out_dir):
    """Write report.json plus the table and per-run CSV views."""
    import json
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=1)
        fh.write("\n")
    with open(out / "table.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("scenario,n,n_runs,amspe,sd,baseline_amspe,baseline_sd\n")
        for c in report["cells"]:
            fh.write(
                f"{c['scenario']},{c['n']},{c['n_runs']},{c['amspe']!r},"
                f"{c['sd']!r},{c['baseline_amspe']!r},{c['baseline_sd']!r}\n"
            )
    timing = report["timing"]["per_run_seconds"]
    with open(out / "runs.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("scenario,n,run,mspe,baseline_mspe,n_trees,seconds\n")
        for r, sec in zip(report["runs"], timing):
            fh.write(
                f"{r['scenario']},{r['n']},{r['run']},{r['mspe']!r},"
                f"{r['baseline_mspe']!r},{r['n_trees']},{sec!r}\n"
            )
