"""Command-line front end.

Subcommands:

* ``preprocess`` - Savitzky-Golay filter a dataset CSV into a new CSV
* ``cv``         - k-fold cross-validation of one algorithm
* ``nested-cv``  - cross-validation with per-fold hyperparameter search
* ``embed``      - t-SNE a dataset CSV into 2-D figure data
* ``predict``    - apply a saved checkpoint to a dataset CSV
* ``compare``    - tabulate one or more report.json files

Values resolve as flag > config file > built-in default. Exit codes are
stable: 0 success, 2 invalid configuration or arguments, 3 dataset errors.
Experiment output directories are written to a temporary sibling and renamed
into place only on success, so failures leave no partial output.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import shutil
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .checkpoint import load_checkpoint, save_checkpoint
from .cnn.model import CnnModel
from .crossval import (ALGORITHMS, HyperparamGrid, cross_validate, make_trainer,
                       nested_cross_validate)
from .baselines.knn import KnnModel
from .baselines.pls import PlsModel, pls_predict
from .data import LabeledDataset, load_csv, save_csv
from .exceptions import DatasetError
from .report import build_report, read_report, write_report_files
from .sgolay import SgFilterSpec, apply_sg
from .tsne import TsneConfig, tsne_embed


class ConfigError(ValueError):
    """Invalid experiment configuration (exit code 2)."""


# -- configuration resolution -------------------------------------------------

_EXPERIMENT_DEFAULTS = {
    "preprocess": "none",
    "window": 11,
    "degree": 3,
    "deriv": 2,
    "delta": 1.0,
    "algo": "cnn",
    "k": 5,
    "seed": 0,
    "stratified": False,
    "params": {},
    "grid": None,
    "embed": False,
}

# flag names that fold into the algorithm params dict, per algorithm
_PARAM_FLAGS = {
    "cnn": {"learning_rate": "learning_rate", "epochs": "epochs",
            "batch_size": "batch_size", "dropout": "dropout_rate",
            "loss": "loss"},
    "knn": {"k_neighbors": "k_neighbors"},
    "plsda": {"variance_target": "variance_target",
              "max_components": "max_components"},
}


def _load_json(path, what: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {what} {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{what} {path} must hold a JSON object")
    return doc


def resolve_experiment(args) -> dict:
    """Merge defaults, config file, and explicit flags into one config dict."""
    config = dict(_EXPERIMENT_DEFAULTS)
    config["dataset"] = None
    config["out"] = None
    if args.config:
        file_cfg = _load_json(args.config, "config file")
        unknown = set(file_cfg) - set(config)
        if unknown:
            raise ConfigError(f"unknown config file keys: {sorted(unknown)}")
        config.update(file_cfg)

    for key in ("dataset", "out", "preprocess", "window", "degree", "deriv",
                "delta", "algo", "k", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    if getattr(args, "stratified", False):
        config["stratified"] = True
    if getattr(args, "embed", False):
        config["embed"] = True

    params = dict(config["params"])
    if getattr(args, "params", None):
        params.update(_load_json(args.params, "params file")
                      if os.path.exists(str(args.params))
                      else _parse_inline_json(args.params, "--params"))
    algo = config["algo"]
    if algo not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")
    for flag, name in _PARAM_FLAGS[algo].items():
        value = getattr(args, flag, None)
        if value is not None:
            params[name] = value
    config["params"] = params

    if getattr(args, "grid", None):
        config["grid"] = _load_json(args.grid, "grid file")

    if not config["dataset"]:
        raise ConfigError("no dataset given (positional argument or config file)")
    if not config["out"]:
        raise ConfigError("no output directory given (--out or config file)")
    if config["preprocess"] not in ("none", "sg"):
        raise ConfigError("preprocess must be 'none' or 'sg'")
    if int(config["k"]) < 2:
        raise ConfigError("k must be at least 2")
    return config


def _parse_inline_json(text: str, what: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{what} must hold a JSON object")
    return doc


@contextlib.contextmanager
def _atomic_outdir(out: Path):
    if out.exists():
        raise ConfigError(f"output directory {out} already exists")
    tmp = out.parent / f".{out.name}.tmp-{os.getpid()}"
    if tmp.exists():
        shutil.rmtree(tmp)
    tmp.mkdir(parents=True)
    try:
        yield tmp
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    tmp.rename(out)


def _prepared_dataset(config) -> tuple[LabeledDataset, dict]:
    dataset = load_csv(config["dataset"])
    sg_spec = None
    if config["preprocess"] == "sg":
        sg_spec = SgFilterSpec(int(config["window"]), int(config["degree"]),
                               int(config["deriv"]), float(config["delta"]))
        dataset = apply_sg(dataset, sg_spec)
    info = {
        "path": str(config["dataset"]),
        "name": Path(config["dataset"]).stem,
        "n_samples": dataset.n_samples,
        "n_features": dataset.n_features,
        "n_classes": dataset.n_classes,
        "class_names": list(dataset.class_names),
    }
    return dataset, info


def _experiment_echo(config, nested: bool) -> dict:
    echo = {
        "tool_version": __version__,
        "dataset": str(config["dataset"]),
        "dataset_name": Path(config["dataset"]).stem,
        "preprocess": config["preprocess"],
        "algorithm": config["algo"],
        "params": config["params"],
        "k": int(config["k"]),
        "seed": int(config["seed"]),
        "stratified": bool(config["stratified"]),
        "nested": nested,
    }
    if config["preprocess"] == "sg":
        echo["sg"] = {"window": int(config["window"]),
                      "degree": int(config["degree"]),
                      "deriv": int(config["deriv"]),
                      "delta": float(config["delta"])}
    if nested:
        echo["grid"] = config["grid"]
    return echo


# -- subcommands --------------------------------------------------------------


def cmd_preprocess(args) -> int:
    spec = SgFilterSpec(args.window if args.window is not None else 11,
                        args.degree if args.degree is not None else 3,
                        args.deriv if args.deriv is not None else 2,
                        args.delta if args.delta is not None else 1.0)
    dataset = load_csv(args.input)
    save_csv(apply_sg(dataset, spec), args.output)
    return 0


def _run_experiment(args, nested: bool) -> int:
    config = resolve_experiment(args)
    if nested:
        if not config["grid"]:
            raise ConfigError("nested-cv requires a hyperparameter grid "
                              "(--grid or config file)")
        grid = HyperparamGrid(config["grid"])
    dataset, info = _prepared_dataset(config)

    algo, params = config["algo"], config["params"]
    k, seed = int(config["k"]), int(config["seed"])
    if nested:
        factory = lambda cand: make_trainer(algo, {**params, **cand})
        cv = nested_cross_validate(factory, grid, dataset, k=k, seed=seed,
                                   stratified=config["stratified"])
    else:
        cv = cross_validate(make_trainer(algo, params), dataset, k=k, seed=seed,
                            stratified=config["stratified"])

    report = build_report(cv, _experiment_echo(config, nested), info)
    out = Path(config["out"])
    with _atomic_outdir(out) as tmp:
        write_report_files(tmp, report)
        save_checkpoint(tmp / "model.ckpt", cv.representative_model)
        if config["embed"]:
            coords, trace = tsne_embed(dataset.rows, TsneConfig(seed=seed))
            _write_embedding(tmp / "embed.csv", coords, trace, dataset,
                             TsneConfig(seed=seed), config["dataset"])
    print(f"{algo}: mean accuracy {cv.mean_accuracy:.4f} "
          f"± {cv.std_accuracy:.4f} over {k} folds -> {out}")
    return 0


def cmd_cv(args) -> int:
    return _run_experiment(args, nested=False)


def cmd_nested_cv(args) -> int:
    return _run_experiment(args, nested=True)


def _write_embedding(path, coords, trace, dataset, config: TsneConfig, source):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# spectral-bench embed, tool version {__version__}\n")
        fh.write(f"# source: {source}\n")
        fh.write(f"# config: perplexity={config.perplexity} "
                 f"iterations={config.iterations} "
                 f"learning_rate={config.learning_rate} "
                 f"early_exaggeration={config.early_exaggeration} "
                 f"seed={config.seed}\n")
        fh.write(f"# kl_trace: {' '.join(f'{it}:{kl:.6f}' for it, kl in trace)}\n")
        fh.write("x,y,label\n")
        for (x, y), label in zip(coords, dataset.labels):
            fh.write(f"{x!r},{y!r},{dataset.class_names[label]}\n")


def cmd_embed(args) -> int:
    config = TsneConfig(
        perplexity=args.perplexity if args.perplexity is not None else 30.0,
        iterations=args.iterations if args.iterations is not None else 1000,
        learning_rate=args.learning_rate if args.learning_rate is not None else 200.0,
        seed=args.seed if args.seed is not None else 0,
    )
    dataset = load_csv(args.input)
    coords, trace = tsne_embed(dataset.rows, config)
    _write_embedding(args.output, coords, trace, dataset, config, args.input)
    return 0


def cmd_predict(args) -> int:
    model = load_checkpoint(args.model)
    dataset = load_csv(args.input)
    if isinstance(model, CnnModel):
        ids, scores = model.predict(dataset.rows)
        names = getattr(model, "class_names", None)
    elif isinstance(model, PlsModel):
        ids, scores = pls_predict(model, dataset.rows)
        names = model.class_names
    elif isinstance(model, KnnModel):
        ids, scores = model.predict(dataset.rows), None
        names = model.class_names
    else:  # pragma: no cover - load_checkpoint only returns the above
        raise ConfigError(f"cannot predict with a {type(model).__name__}")

    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        header = ["row", "predicted_id", "predicted_class"]
        ncols = scores.shape[1] if scores is not None else 0
        header += [f"score_{(names[c] if names else c)}" for c in range(ncols)]
        fh.write(",".join(str(h) for h in header) + "\n")
        for i, pred in enumerate(ids):
            cells = [str(i), str(int(pred)),
                     str(names[pred]) if names else str(int(pred))]
            if scores is not None:
                cells += [repr(v) for v in scores[i]]
            fh.write(",".join(cells) + "\n")

    if args.dump_features:
        if not isinstance(model, CnnModel):
            raise ConfigError("--dump-features requires a CNN checkpoint")
        feats = model.features(dataset.rows)
        feature_set = LabeledDataset(np.arange(feats.shape[1], dtype=float),
                                     feats, dataset.labels, dataset.class_names)
        save_csv(feature_set, args.dump_features)
    return 0


def cmd_compare(args) -> int:
    rows = []
    for path in args.reports:
        try:
            report = read_report(path)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        exp, summary = report["experiment"], report["summary"]
        mm = summary["metrics_mean"]
        preproc = exp["preprocess"]
        if preproc == "sg":
            sg = exp.get("sg", {})
            preproc = (f"sg({sg.get('window')},{sg.get('degree')},"
                       f"{sg.get('deriv')})")
        seconds = [f["train_seconds"] for f in report["folds"]]
        rows.append({
            "dataset": exp["dataset_name"],
            "algorithm": exp["algorithm"] + ("+nested" if exp.get("nested") else ""),
            "preprocessing": preproc,
            "accuracy": _pct(summary["mean_accuracy"], summary["std_accuracy"]),
            "specificity": _pct(mm["specificity"], mm["specificity_std"]),
            "sensitivity": _pct(mm["sensitivity"], mm["sensitivity_std"]),
            "train_seconds": f"{np.mean(seconds):.4f}",
        })

    columns = ["dataset", "algorithm", "preprocessing", "accuracy",
               "specificity", "sensitivity", "train_seconds"]
    widths = {c: max(len(c), *(len(r[c]) for r in rows)) for c in columns}
    print("  ".join(c.ljust(widths[c]) for c in columns))
    for r in rows:
        print("  ".join(r[c].ljust(widths[c]) for c in columns))

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(columns) + "\n")
            for r in rows:
                fh.write(",".join(r[c] for c in columns) + "\n")
    return 0


def _pct(mean, std) -> str:
    if mean is None:
        return "n/a"
    if std is None:
        return f"{100 * mean:.2f}"
    return f"{100 * mean:.2f} ± {100 * std:.2f}"


# -- parser -------------------------------------------------------------------


def _add_sg_flags(p):
    p.add_argument("--window", type=int, help="SG window length (odd, default 11)")
    p.add_argument("--degree", type=int, help="SG polynomial degree (default 3)")
    p.add_argument("--deriv", type=int, help="SG derivative order (default 2)")
    p.add_argument("--delta", type=float, help="sample spacing (default 1)")


def _add_experiment_flags(p):
    p.add_argument("dataset", nargs="?", help="dataset CSV")
    p.add_argument("--out", help="output directory (must not exist)")
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--algo", choices=ALGORITHMS, help="algorithm (default cnn)")
    p.add_argument("--k", type=int, help="number of folds (default 5)")
    p.add_argument("--seed", type=int, help="experiment seed (default 0)")
    p.add_argument("--stratified", action="store_true",
                   help="stratify folds by class (default off)")
    p.add_argument("--preprocess", choices=["none", "sg"],
                   help="apply the SG filter before splitting (default none)")
    _add_sg_flags(p)
    p.add_argument("--embed", action="store_true",
                   help="also write a t-SNE embed.csv of the prepared data")
    p.add_argument("--params", help="JSON object (inline or a file path) of "
                                    "extra algorithm parameters")
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--dropout", type=float)
    p.add_argument("--loss", choices=["plain", "weighted"])
    p.add_argument("--k-neighbors", dest="k_neighbors", type=int)
    p.add_argument("--variance-target", dest="variance_target", type=float)
    p.add_argument("--max-components", dest="max_components", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectral-bench",
        description="Spectral classification toolkit: preprocessing, CNN/KNN/"
                    "PLS-DA benchmarking, and figure data.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="Savitzky-Golay filter a dataset CSV")
    p.add_argument("input")
    p.add_argument("output")
    _add_sg_flags(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("cv", help="k-fold cross-validation")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("nested-cv", help="cross-validation with per-fold "
                                         "hyperparameter search")
    _add_experiment_flags(p)
    p.add_argument("--grid", help="JSON file mapping axis names to candidate lists")
    p.set_defaults(func=cmd_nested_cv)

    p = sub.add_parser("embed", help="t-SNE a dataset CSV to 2-D figure data")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--perplexity", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("predict", help="apply a checkpoint to a dataset CSV")
    p.add_argument("input")
    p.add_argument("--model", required=True, help="checkpoint file")
    p.add_argument("--out", dest="output", required=True, help="predictions CSV")
    p.add_argument("--dump-features", dest="dump_features",
                   help="also write penultimate-layer features as a dataset CSV "
                        "(CNN checkpoints only)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("compare", help="tabulate report.json files")
    p.add_argument("reports", nargs="+")
    p.add_argument("--out", help="also write the table as CSV")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DatasetError as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
