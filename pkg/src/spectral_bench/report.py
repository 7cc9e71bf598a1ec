"""Experiment reports: a versioned JSON schema plus CSV side files.

A report is self-describing: it embeds the fully resolved experiment
configuration (dataset path, preprocessing, algorithm parameters or grid,
fold count, seed) and the label-to-id mapping, so any run can be reproduced
from its own output.

Reports are byte-identical across repeated runs of the same seeded
experiment once the *volatile* fields are stripped: wall-clock timings and
the creation timestamp. :func:`canonical_json` performs exactly that
stripping and is what determinism checks and diffs should compare.
"""

from __future__ import annotations

import copy
import csv
import json
from datetime import datetime, timezone

import numpy as np

from .crossval import CvReport

SCHEMA_VERSION = 1

#: keys whose values legitimately differ between identical seeded runs
VOLATILE_KEYS = ("created_at", "train_seconds", "search_seconds")


def build_report(cv: CvReport, experiment: dict, dataset_info: dict) -> dict:
    """Assemble the report document from a finished cross-validation run."""
    folds = []
    for fr in cv.fold_results:
        folds.append({
            "fold": fr.fold,
            "test_indices": list(fr.test_indices),
            "accuracy": fr.accuracy,
            "metrics": fr.metrics.as_dict(),
            "confusion": fr.confusion.counts.tolist(),
            "chosen_params": fr.chosen_params,
            "train_seconds": fr.train_seconds,
        })
    report = {
        "schema_version": SCHEMA_VERSION,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "experiment": experiment,
        "dataset": dataset_info,
        "folds": folds,
        "summary": {
            "mean_accuracy": cv.mean_accuracy,
            "std_accuracy": cv.std_accuracy,
            "std_method": "sample standard deviation (n-1 denominator)",
            "representative_fold": cv.representative_fold,
            "representative_params": cv.representative_params,
            "metrics_mean": _mean_metrics(cv),
        },
    }
    return report


def _mean_metrics(cv: CvReport) -> dict:
    out = {}
    for key in ("accuracy", "specificity", "sensitivity"):
        values = [getattr(fr.metrics, key) for fr in cv.fold_results]
        defined = [v for v in values if v is not None]
        if defined:
            out[key] = float(np.mean(defined))
            out[key + "_std"] = float(np.std(defined, ddof=1)) if len(defined) > 1 else 0.0
        else:
            out[key] = None
            out[key + "_std"] = None
    return out


def strip_volatile(report: dict) -> dict:
    """Deep copy with volatile keys (timestamps, wall-clock timings) removed."""
    def scrub(node):
        if isinstance(node, dict):
            return {k: scrub(v) for k, v in node.items() if k not in VOLATILE_KEYS}
        if isinstance(node, list):
            return [scrub(v) for v in node]
        return node
    return scrub(copy.deepcopy(report))


def canonical_json(report: dict) -> str:
    """Deterministic serialization of the non-volatile report content."""
    return json.dumps(strip_volatile(report), sort_keys=True, indent=None,
                      separators=(",", ":"))


def write_report_files(outdir, report: dict):
    """Write report.json, folds.csv, and one confusion CSV per fold."""
    with open(outdir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    class_names = report["dataset"]["class_names"]
    with open(outdir / "folds.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold", "accuracy", "specificity", "sensitivity",
                         "train_seconds", "chosen_params"])
        for fold in report["folds"]:
            m = fold["metrics"]
            writer.writerow([
                fold["fold"], repr(fold["accuracy"]),
                "" if m["specificity"] is None else repr(m["specificity"]),
                "" if m["sensitivity"] is None else repr(m["sensitivity"]),
                repr(fold["train_seconds"]),
                "" if fold["chosen_params"] is None else json.dumps(fold["chosen_params"]),
            ])
    for fold in report["folds"]:
        path = outdir / f"confusion_fold{fold['fold']}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["true\\predicted"] + list(class_names))
            for name, row in zip(class_names, fold["confusion"]):
                writer.writerow([name] + list(row))


def read_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    version = report.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(
            f"{path}: report schema version {version} is not supported "
            f"(expected {SCHEMA_VERSION})"
        )
    return report
