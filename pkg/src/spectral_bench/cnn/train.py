"""Mini-batch training loop for the 1D CNN."""

from __future__ import annotations

import numpy as np

from ..data import LabeledDataset
from ..rng import Rng
from .loss import batch_cross_entropy, class_weights
from .model import CnnConfig, CnnModel


def train(config: CnnConfig, train_set: LabeledDataset,
          rng: Rng | None = None) -> tuple[CnnModel, list[float]]:
    """Train a freshly initialized model; returns it with its loss trace.

    Runs ``config.epochs`` passes of shuffled mini-batches (the last partial
    batch is kept), Adam updates after every batch. The trace holds one
    sample-weighted mean loss per epoch. All randomness (init, shuffles,
    dropout) comes from ``rng``, which defaults to ``Rng(config.seed)``, so a
    repeated seed reproduces the trace bit for bit. The returned model is in
    inference mode: dropout applies only here.
    """
    n = train_set.n_samples
    if config.batch_size > n:
        raise ValueError(
            f"batch_size ({config.batch_size}) exceeds the training set size ({n})"
        )
    if config.num_classes != train_set.n_classes:
        raise ValueError(
            f"config.num_classes ({config.num_classes}) does not match the "
            f"dataset ({train_set.n_classes})"
        )
    if rng is None:
        rng = Rng(config.seed)

    model = CnnModel.build(config, train_set.n_features, rng)
    model.class_names = train_set.class_names
    weights = (class_weights(train_set.labels, config.num_classes)
               if config.loss == "weighted" else None)

    x_all = train_set.rows[:, None, :]
    y_all = train_set.labels
    trace: list[float] = []
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            probs = model.forward_train(x_all[idx], rng)
            loss = batch_cross_entropy(probs, y_all[idx], weights)
            grads = model.backward(probs, y_all[idx], weights)
            model.apply_gradients(grads)
            epoch_loss += loss * idx.size
        trace.append(epoch_loss / n)
    return model, trace


def training_accuracy(model: CnnModel, dataset: LabeledDataset) -> float:
    preds, _ = model.predict(dataset.rows)
    return float(np.mean(preds == dataset.labels))
