"""Comparison classifiers: brute-force KNN and NIPALS PLS-DA."""

from .knn import KnnConfig, KnnModel, knn_fit, knn_predict
from .pls import PlsModel, pls_fit, pls_predict

__all__ = ["KnnConfig", "KnnModel", "knn_fit", "knn_predict",
           "PlsModel", "pls_fit", "pls_predict"]
