"""Cross-validation and nested hyperparameter search.

Plain k-fold evaluation: shuffle, split into k folds, train on k-1 folds and
test on the held-out one, then summarize fold accuracies by mean and sample
standard deviation and keep the *representative* model, the one whose fold
accuracy is closest to the mean (ties to the lowest fold id).

Nested search evaluates every hyperparameter candidate by an inner loop that
reuses the outer partition: with outer test fold f held out, each remaining
fold serves once as the validation set while the others train. The candidate
with the best inner mean accuracy (ties broken by grid order) is retrained on
all folds but f and tested on f. Outer test indices are never visible to the
inner loop; this is asserted at runtime.

Fold f trains with the derived stream child(seed, f), so outer folds can run
in parallel (cap with the SPECTRAL_BENCH_THREADS environment variable) with
bit-identical results to a serial run.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import KnnConfig, knn_fit
from .baselines.pls import pls_fit, pls_predict
from .cnn import CnnConfig
from .cnn.train import train as cnn_train
from .data import LabeledDataset
from .folds import FoldPlan, shuffled_fold_indices
from .metrics import ConfusionMatrix, DiagnosisMetrics, confusion, diagnosis_metrics
from .rng import Rng

ALGORITHMS = ("cnn", "knn", "plsda")


def _max_threads() -> int:
    raw = os.environ.get("SPECTRAL_BENCH_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"SPECTRAL_BENCH_THREADS must be an integer, got {raw!r}")


# -- trainers ---------------------------------------------------------------


class CnnTrainer:
    algorithm = "cnn"

    def __init__(self, params: dict | None = None):
        self.params = dict(params or {})

    def config_for(self, train_set: LabeledDataset) -> CnnConfig:
        return CnnConfig(num_classes=train_set.n_classes, **self.params)

    def fit(self, train_set: LabeledDataset, rng: Rng):
        model, _ = cnn_train(self.config_for(train_set), train_set, rng)
        return model

    def predict(self, model, rows):
        return model.predict(rows)[0]


class KnnTrainer:
    algorithm = "knn"

    def __init__(self, params: dict | None = None):
        self.params = dict(params or {})
        self.config = KnnConfig(int(self.params.get("k_neighbors", 3)))

    def fit(self, train_set: LabeledDataset, rng: Rng):
        return knn_fit(train_set, self.config)

    def predict(self, model, rows):
        return model.predict(rows)


class PlsTrainer:
    algorithm = "plsda"

    def __init__(self, params: dict | None = None):
        self.params = dict(params or {})

    def fit(self, train_set: LabeledDataset, rng: Rng):
        return pls_fit(
            train_set,
            variance_target=float(self.params.get("variance_target", 0.95)),
            max_components=self.params.get("max_components"),
            variance_block=self.params.get("variance_block", "x"),
        )

    def predict(self, model, rows):
        return pls_predict(model, rows)[0]


_TRAINERS = {"cnn": CnnTrainer, "knn": KnnTrainer, "plsda": PlsTrainer}


def make_trainer(algorithm: str, params: dict | None = None):
    """Trainer for one of the built-in algorithm names."""
    if algorithm not in _TRAINERS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    return _TRAINERS[algorithm](params)


# -- grids ------------------------------------------------------------------


@dataclass(frozen=True)
class HyperparamGrid:
    """Named axes of candidate values; candidates enumerate their product."""

    axes: dict

    def __post_init__(self):
        axes = {str(k): tuple(v) for k, v in dict(self.axes).items()}
        if not axes or any(len(v) == 0 for v in axes.values()):
            raise ValueError("grid axes must be nonempty")
        object.__setattr__(self, "axes", axes)

    def candidates(self) -> list[dict]:
        """Cartesian product in axis order, first axis varying slowest."""
        names = list(self.axes)
        return [dict(zip(names, combo))
                for combo in itertools.product(*(self.axes[n] for n in names))]


# -- reports ----------------------------------------------------------------


@dataclass
class FoldResult:
    fold: int
    test_indices: tuple
    accuracy: float
    confusion: ConfusionMatrix
    metrics: DiagnosisMetrics
    train_seconds: float
    chosen_params: dict | None = None
    model: object = field(default=None, repr=False)


@dataclass
class CvReport:
    """Per-fold outcomes plus the representative model."""

    algorithm: str
    k: int
    seed: int
    stratified: bool
    plan: FoldPlan
    fold_results: list[FoldResult]
    nested: bool = False

    @property
    def accuracies(self) -> np.ndarray:
        return np.array([fr.accuracy for fr in self.fold_results])

    @property
    def mean_accuracy(self) -> float:
        return float(self.accuracies.mean())

    @property
    def std_accuracy(self) -> float:
        """Sample standard deviation (n-1 denominator) of fold accuracies."""
        return float(self.accuracies.std(ddof=1))

    @property
    def representative_fold(self) -> int:
        """Fold whose accuracy is closest to the mean; ties to the lowest id."""
        return int(np.argmin(np.abs(self.accuracies - self.mean_accuracy)))

    @property
    def representative_model(self):
        return self.fold_results[self.representative_fold].model

    @property
    def representative_params(self) -> dict | None:
        return self.fold_results[self.representative_fold].chosen_params


# -- protocols ----------------------------------------------------------------


def _evaluate_fold(trainer, dataset, plan, fold, rng, chosen_params=None):
    test_idx = plan.test_indices(fold)
    train_set = dataset.subset(plan.train_indices(fold))
    try:
        start = time.perf_counter()
        model = trainer.fit(train_set, rng)
        seconds = time.perf_counter() - start
        preds = trainer.predict(model, dataset.rows[test_idx])
    except Exception as exc:
        raise RuntimeError(f"fold {fold}: {exc}") from exc
    cm = confusion(preds, dataset.labels[test_idx], dataset.n_classes)
    acc = float(np.mean(np.asarray(preds) == dataset.labels[test_idx]))
    return FoldResult(fold, tuple(int(i) for i in test_idx), acc, cm,
                      diagnosis_metrics(cm), seconds,
                      chosen_params=chosen_params, model=model)


def _run_folds(worker, k):
    threads = min(_max_threads(), k)
    if threads == 1:
        results = [worker(f) for f in range(k)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(worker, range(k)))
    return sorted(results, key=lambda fr: fr.fold)


def cross_validate(trainer, dataset: LabeledDataset, k: int = 5, seed: int = 0,
                   stratified: bool = False) -> CvReport:
    """Shuffle, split into k folds, train/evaluate each, summarize."""
    plan = shuffled_fold_indices(dataset.n_samples, k, Rng(seed),
                                 labels=dataset.labels, stratified=stratified)
    root = Rng(seed)

    def worker(f):
        return _evaluate_fold(trainer, dataset, plan, f, root.child(f))

    results = _run_folds(worker, k)
    return CvReport(getattr(trainer, "algorithm", "custom"), k, seed,
                    stratified, plan, results)


def nested_cross_validate(trainer_factory, grid: HyperparamGrid,
                          dataset: LabeledDataset, k: int = 5, seed: int = 0,
                          stratified: bool = False) -> CvReport:
    """Per-fold hyperparameter selection by inner validation rounds.

    ``trainer_factory`` maps one candidate dict to a trainer. The report's
    fold results carry the chosen candidate for each outer fold.
    """
    if k < 3:
        raise ValueError("nested cross-validation needs k >= 3")
    candidates = grid.candidates()
    plan = shuffled_fold_indices(dataset.n_samples, k, Rng(seed),
                                 labels=dataset.labels, stratified=stratified)
    root = Rng(seed)

    def worker(f):
        outer_test = set(plan.folds[f])
        inner_folds = [v for v in range(k) if v != f]
        means = np.empty(len(candidates))
        for li, params in enumerate(candidates):
            accs = []
            for v in inner_folds:
                train_idx = np.concatenate(
                    [plan.test_indices(g) for g in inner_folds if g != v])
                val_idx = plan.test_indices(v)
                # the outer test fold must stay invisible to the search
                assert not (set(train_idx.tolist()) | set(val_idx.tolist())) & outer_test
                trainer = trainer_factory(params)
                try:
                    model = trainer.fit(dataset.subset(np.sort(train_idx)),
                                        root.child(f, li, v))
                    preds = trainer.predict(model, dataset.rows[val_idx])
                except Exception as exc:
                    raise RuntimeError(f"fold {f}: {exc}") from exc
                accs.append(float(np.mean(np.asarray(preds) == dataset.labels[val_idx])))
            means[li] = np.mean(accs)
        best = candidates[int(np.argmax(means))]  # first max: grid order
        return _evaluate_fold(trainer_factory(best), dataset, plan, f,
                              root.child(f), chosen_params=best)

    results = _run_folds(worker, k)
    first = trainer_factory(candidates[0])
    return CvReport(getattr(first, "algorithm", "custom"), k, seed,
                    stratified, plan, results, nested=True)
