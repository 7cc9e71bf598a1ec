"""Spectral classification toolkit.

Library plus CLI for benchmarking classifiers on spectroscopy data:
Savitzky-Golay preprocessing, a from-scratch 1D CNN trained with Adam, KNN
and PLS-DA baselines, k-fold and nested cross-validation with diagnosis
metrics, and exact t-SNE for 2-D figure data.
"""

__version__ = "0.1.0"

from .baselines import (KnnConfig, KnnModel, PlsModel, knn_fit, knn_predict,
                        pls_fit, pls_predict)
from .checkpoint import load_checkpoint, save_checkpoint
from .cnn import CnnConfig, CnnModel, ConvBlockSpec, cross_entropy, train
from .crossval import (HyperparamGrid, cross_validate, make_trainer,
                       nested_cross_validate)
from .data import LabeledDataset, Spectrum, load_csv, save_csv
from .exceptions import DatasetError, ShapeError, StateError
from .folds import FoldPlan, shuffled_fold_indices
from .metrics import (ConfusionMatrix, DiagnosisMetrics, confusion,
                      diagnosis_metrics)
from .rng import Rng
from .sgolay import SgFilterSpec, apply_sg, sg_coefficients
from .tsne import TsneConfig, tsne_embed

__all__ = [
    "__version__",
    "KnnConfig", "KnnModel", "PlsModel", "knn_fit", "knn_predict",
    "pls_fit", "pls_predict",
    "load_checkpoint", "save_checkpoint",
    "CnnConfig", "CnnModel", "ConvBlockSpec", "cross_entropy", "train",
    "HyperparamGrid", "cross_validate", "make_trainer", "nested_cross_validate",
    "LabeledDataset", "Spectrum", "load_csv", "save_csv",
    "DatasetError", "ShapeError", "StateError",
    "FoldPlan", "shuffled_fold_indices",
    "ConfusionMatrix", "DiagnosisMetrics", "confusion", "diagnosis_metrics",
    "Rng",
    "SgFilterSpec", "apply_sg", "sg_coefficients",
    "TsneConfig", "tsne_embed",
]
