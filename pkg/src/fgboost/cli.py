"""Command-line interface.

Subcommands: ``simulate | fit | predict | eval | bench | shap``.  Every
subcommand accepts ``--config PATH`` pointing at a JSON object whose keys
match the long option names (dashes or underscores); explicit flags win over
config-file values.  All commands are deterministic given their
configuration (seeds included) and exit non-zero on any error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import BenchConfig, run_bench, write_report
from .boosting import FGBoostRegressor
from .errors import FGBoostError
from .explain import MetricShapExplainer
from .io import load_model, read_matrix, save_model, write_matrix
from .model_selection import grid_search_cv
from .simulate import SCENARIOS, ScenarioConfig, generate
from .spaces import SPACE_NAMES, make_space, simplex_to_sphere
from .validation import check_output_points


def _merge_config(args: argparse.Namespace, parser: argparse.ArgumentParser):
    """Fill unset options from the JSON config file; flags win."""
    if not getattr(args, "config", None):
        return args
    with open(args.config, "r", encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            parser.error(f"config file is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        parser.error("config file must contain a JSON object")
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            parser.error(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)
    return args


def _default(args, name, value):
    if getattr(args, name, None) is None:
        setattr(args, name, value)


def _load_outputs(args, space):
    """Read Y.csv in the space encoding (optionally simplex-encoded)."""
    Y, _ = read_matrix(args.y, has_header=bool(args.header))
    if getattr(args, "simplex", False):
        if space is not None and space != "sphere":
            raise FGBoostError("--simplex only applies to the sphere space")
        Y = simplex_to_sphere(Y)
    return Y


def _make_space_options(args):
    options = {}
    if getattr(args, "weight_bound", None) is not None:
        options["weight_bound"] = args.weight_bound
    if getattr(args, "positive_orthant", False):
        options["positive_orthant"] = True
    if getattr(args, "support", None) is not None:
        options["support"] = tuple(args.support)
    return options


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_simulate(args, parser):
    if args.manifest:
        with open(args.manifest, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        base = manifest["config"]
        for key, value in base.items():
            if getattr(args, key, None) is None:
                setattr(args, key, value)
    _default(args, "scenario", None)
    if args.scenario is None:
        parser.error("--scenario is required (or provide --manifest)")
    _default(args, "n", 100)
    _default(args, "seed", 0)
    _default(args, "grid_size", 100)
    _default(args, "obs_per_output", 100)
    _default(args, "n_nodes", 10)
    _default(args, "noise_radius", 0.1)
    config = ScenarioConfig(
        scenario=args.scenario,
        n=int(args.n),
        seed=int(args.seed),
        grid_size=int(args.grid_size),
        obs_per_output=int(args.obs_per_output),
        n_nodes=int(args.n_nodes),
        noise_radius=float(args.noise_radius),
    )
    data = generate(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(out / "X.csv", data.X)
    write_matrix(out / "Y.csv", data.Y)
    write_matrix(out / "truth.csv", data.truth(data.X))
    manifest = {
        "format_version": 1,
        "config": config.to_dict(),
        "space": {"name": data.space.name, **data.space.describe()},
    }
    with open(out / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    print(json.dumps({"out": str(out), "n": config.n, "space": data.space.name}))


def _fit_model(args, X, Y):
    options = _make_space_options(args)
    space = make_space(args.space, Y.shape[1], **options)
    check_output_points(space, Y)
    params = {
        "learning_rate": args.learning_rate,
        "n_estimators": int(args.n_estimators),
        "max_depth": int(args.max_depth),
        "min_samples_leaf": int(args.min_samples_leaf),
        "split_criterion": args.split_criterion,
        "shrinkage_in_split": bool(args.shrinkage_in_split),
        "validation_fraction": args.validation_fraction,
        "n_iter_no_change": int(args.n_iter_no_change),
        "random_state": int(args.seed),
    }
    chosen = None
    fold_rows = None
    if args.grid:
        chosen, fold_rows = grid_search_cv(
            X,
            Y,
            space,
            random_state=int(args.seed),
            base_params={
                k: v
                for k, v in params.items()
                if k not in ("learning_rate", "n_estimators", "max_depth")
            },
        )
        params.update(chosen)
    model = FGBoostRegressor(space=space, **params).fit(X, Y)
    return model, chosen, fold_rows


def cmd_fit(args, parser):
    for name, value in (
        ("learning_rate", 0.05),
        ("n_estimators", 100),
        ("max_depth", 3),
        ("min_samples_leaf", 10),
        ("split_criterion", "updated-prediction-mse"),
        ("validation_fraction", 0.1),
        ("n_iter_no_change", 10),
        ("seed", 0),
    ):
        _default(args, name, value)
    if args.space is None:
        parser.error("--space is required")
    X, _ = read_matrix(args.x, has_header=bool(args.header))
    Y = _load_outputs(args, args.space)
    if X.shape[0] != Y.shape[0]:
        raise FGBoostError(
            f"X has {X.shape[0]} rows but Y has {Y.shape[0]}"
        )
    model, chosen, fold_rows = _fit_model(args, X, Y)
    save_model(model, args.out)
    if fold_rows is not None:
        table_path = Path(args.out).with_suffix(".cv.csv")
        with open(table_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("learning_rate,n_estimators,max_depth,fold,risk\n")
            for row in fold_rows:
                fh.write(
                    f"{row['learning_rate']!r},{row['n_estimators']},"
                    f"{row['max_depth']},{row['fold']},{row['risk']!r}\n"
                )
    summary = {
        "model": str(args.out),
        "n": int(X.shape[0]),
        "n_trees": model.n_estimators_,
        "train_risk": model.train_risk_trace_[model.best_iteration_],
        "validation_risk": (
            None
            if model.val_risk_trace_ is None
            else model.val_risk_trace_[model.best_iteration_]
        ),
    }
    if chosen is not None:
        summary["selected"] = chosen
    print(json.dumps(summary))


def cmd_predict(args, parser):
    model = load_model(args.model)
    X, _ = read_matrix(args.x, has_header=bool(args.header))
    header = [f"y{k}" for k in range(model.space_.point_dim)]
    if X.shape == (0, 0):
        write_matrix(args.out, np.empty((0, len(header))), header=header)
        print(json.dumps({"out": str(args.out), "n": 0}))
        return
    preds = model.predict(X)
    write_matrix(args.out, preds, header=header)
    print(json.dumps({"out": str(args.out), "n": int(preds.shape[0])}))


def cmd_eval(args, parser):
    model = load_model(args.model)
    X, _ = read_matrix(args.x, has_header=bool(args.header))
    Y = _load_outputs(args, model.space_.name)
    risk = model.empirical_risk(X, Y)
    print(json.dumps({"n": int(X.shape[0]), "empirical_risk": risk}))


def cmd_bench(args, parser):
    _default(args, "scenarios", ",".join(SCENARIOS))
    _default(args, "sizes", "100,500")
    _default(args, "runs", 20)
    _default(args, "seed", 17)
    _default(args, "n_test", 100)
    _default(args, "n_nodes", 10)
    scenarios = (
        tuple(args.scenarios)
        if isinstance(args.scenarios, (list, tuple))
        else tuple(s.strip() for s in args.scenarios.split(",") if s.strip())
    )
    sizes = (
        tuple(int(v) for v in args.sizes)
        if isinstance(args.sizes, (list, tuple))
        else tuple(int(s) for s in args.sizes.split(","))
    )
    for scenario in scenarios:
        if scenario not in SCENARIOS:
            parser.error(f"unknown scenario {scenario!r}")
    config = BenchConfig(
        scenarios=scenarios,
        sample_sizes=sizes,
        n_runs=int(args.runs),
        master_seed=int(args.seed),
        n_test=int(args.n_test),
        threads=args.threads,
        n_nodes=int(args.n_nodes),
    )
    def progress(record):
        print(
            f"[bench] {record['scenario']} n={record['n']} run={record['run']} "
            f"mspe={record['mspe']:.6g} ({record['seconds']:.1f}s)",
            file=sys.stderr,
        )
    report = run_bench(config, progress=progress if not args.quiet else None)
    write_report(report, args.out)
    print(json.dumps({"out": str(args.out), "cells": report["cells"]}))


def cmd_shap(args, parser):
    _default(args, "mode", "exact")
    _default(args, "permutations", 2048)
    _default(args, "seed", 0)
    _default(args, "max_background", 100)
    model = load_model(args.model)
    X, _ = read_matrix(args.x, has_header=bool(args.header))
    if args.background:
        background, _ = read_matrix(args.background, has_header=bool(args.header))
    else:
        background = X
    explainer = MetricShapExplainer(
        model,
        background=background,
        max_background=int(args.max_background),
        random_state=int(args.seed),
    )
    summary = explainer.summary(
        X, mode=args.mode, n_permutations=int(args.permutations)
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(
        out / "shap_values.csv",
        summary.values,
        header=[f"x{j}" for j in range(model.n_features_in_)],
    )
    with open(out / "ranking.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary.ranking_records(), fh, indent=1)
        fh.write("\n")
    print(json.dumps({"out": str(out), "ranking": summary.ranking_records()}))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file; flags override it")
    sub.add_argument("--header", action="store_true", help="CSV inputs carry a header row")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fgboost",
        description="Gradient boosting for metric-space-valued outputs",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="generate a synthetic dataset")
    _add_common(p)
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-size", dest="grid_size", type=int)
    p.add_argument("--obs-per-output", dest="obs_per_output", type=int)
    p.add_argument("--n-nodes", dest="n_nodes", type=int)
    p.add_argument("--noise-radius", dest="noise_radius", type=float)
    p.add_argument("--manifest", help="rerun from a manifest.json")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = subs.add_parser("fit", help="train a model from X.csv and Y.csv")
    _add_common(p)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--space", choices=SPACE_NAMES)
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--n-estimators", dest="n_estimators", type=int)
    p.add_argument("--max-depth", dest="max_depth", type=int)
    p.add_argument("--min-samples-leaf", dest="min_samples_leaf", type=int)
    p.add_argument(
        "--split-criterion",
        dest="split_criterion",
        choices=("updated-prediction-mse", "residual-dg-mse"),
    )
    p.add_argument(
        "--shrinkage-in-split", dest="shrinkage_in_split", action="store_true"
    )
    p.add_argument("--validation-fraction", dest="validation_fraction", type=float)
    p.add_argument("--n-iter-no-change", dest="n_iter_no_change", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", action="store_true", help="grid-search hyperparameters by CV")
    p.add_argument("--simplex", action="store_true", help="Y.csv holds simplex proportions")
    p.add_argument("--weight-bound", dest="weight_bound", type=float)
    p.add_argument("--positive-orthant", dest="positive_orthant", action="store_true")
    p.add_argument("--support", nargs=2, type=float, metavar=("LO", "HI"))
    p.set_defaults(func=cmd_fit)

    p = subs.add_parser("predict", help="predict outputs for X.csv")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = subs.add_parser("eval", help="empirical risk of a model on labeled data")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--simplex", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = subs.add_parser("bench", help="Monte Carlo benchmark over the scenarios")
    _add_common(p)
    p.add_argument("--scenarios", help="comma-separated scenario names")
    p.add_argument("--sizes", help="comma-separated training sizes")
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-test", dest="n_test", type=int)
    p.add_argument("--n-nodes", dest="n_nodes", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--quiet", action="store_true")
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(func=cmd_bench)

    p = subs.add_parser("shap", help="feature attributions for a fitted model")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--background", help="background rows CSV (default: X itself)")
    p.add_argument("--mode", choices=("exact", "sampled"))
    p.add_argument("--permutations", type=int)
    p.add_argument("--max-background", dest="max_background", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_shap)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _merge_config(args, parser)
    try:
        args.func(args, parser)
    except FGBoostError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
