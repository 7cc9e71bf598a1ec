"""Versioned model checkpoints.

One JSON document per model: a format tag, a version number, an algorithm
tag (cnn / knn / plsda), algorithm-specific metadata, and every array as
base64-encoded little-endian bytes (float64, or int64 for label vectors).
The CNN checkpoint includes the full optimizer state so training could be
resumed; loading any checkpoint reproduces predictions bit for bit.
"""

from __future__ import annotations

import base64
import dataclasses
import json

import numpy as np

from .baselines.knn import KnnConfig, KnnModel
from .baselines.pls import PlsModel
from .cnn.adam import AdamState
from .cnn.model import CnnConfig, CnnModel

FORMAT_NAME = "spectral-bench-checkpoint"
FORMAT_VERSION = 1

_DTYPES = {"f8": "<f8", "i8": "<i8"}


def _encode_array(arr: np.ndarray) -> dict:
    kind = "i8" if np.issubdtype(arr.dtype, np.integer) else "f8"
    data = np.ascontiguousarray(arr).astype(_DTYPES[kind]).tobytes()
    return {"shape": list(arr.shape), "dtype": kind,
            "data": base64.b64encode(data).decode("ascii")}


def _decode_array(entry: dict) -> np.ndarray:
    raw = base64.b64decode(entry["data"])
    arr = np.frombuffer(raw, dtype=_DTYPES[entry["dtype"]])
    native = "int64" if entry["dtype"] == "i8" else "float64"
    return arr.astype(native).reshape(entry["shape"])


def _document(model) -> tuple[str, dict, dict]:
    if isinstance(model, CnnModel):
        cfg = dataclasses.asdict(model.config)
        arrays = {f"param/{k}": v for k, v in model.params.items()}
        arrays.update({f"adam_m/{k}": v for k, v in model.adam.m.items()})
        arrays.update({f"adam_v/{k}": v for k, v in model.adam.v.items()})
        payload = {"config": cfg, "input_length": model.input_length,
                   "class_names": (list(model.class_names)
                                   if model.class_names else None),
                   "adam": {"t": model.adam.t, "beta1": model.adam.beta1,
                            "beta2": model.adam.beta2, "eps": model.adam.eps}}
        return "cnn", payload, arrays
    if isinstance(model, KnnModel):
        payload = {"k_neighbors": model.config.k_neighbors,
                   "class_names": list(model.class_names)}
        arrays = {"grid": model.grid, "rows": model.rows, "labels": model.labels}
        return "knn", payload, arrays
    if isinstance(model, PlsModel):
        payload = {"class_names": list(model.class_names)}
        arrays = {"x_mean": model.x_mean, "y_mean": model.y_mean,
                  "weights": model.weights, "x_loadings": model.x_loadings,
                  "y_loadings": model.y_loadings, "rotation": model.rotation,
                  "explained_x_variance": model.explained_x_variance}
        return "plsda", payload, arrays
    raise TypeError(f"cannot checkpoint a {type(model).__name__}")


def save_checkpoint(path, model):
    algorithm, payload, arrays = _document(model)
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "algorithm": algorithm,
        "payload": payload,
        "arrays": {k: _encode_array(np.asarray(v)) for k, v in arrays.items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_checkpoint(path):
    """Rebuild the saved model; raises ValueError on foreign or newer files."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT_NAME:
        raise ValueError(f"{path}: not a {FORMAT_NAME} file")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(
            f"{path}: checkpoint version {doc.get('version')} is not "
            f"supported (expected {FORMAT_VERSION})"
        )
    arrays = {k: _decode_array(v) for k, v in doc["arrays"].items()}
    payload = doc["payload"]
    algorithm = doc["algorithm"]
    if algorithm == "cnn":
        config = CnnConfig(**payload["config"])
        params = {k.split("/", 1)[1]: v for k, v in arrays.items()
                  if k.startswith("param/")}
        meta = payload["adam"]
        adam = AdamState(
            m={k.split("/", 1)[1]: v for k, v in arrays.items()
               if k.startswith("adam_m/")},
            v={k.split("/", 1)[1]: v for k, v in arrays.items()
               if k.startswith("adam_v/")},
            t=int(meta["t"]), beta1=meta["beta1"], beta2=meta["beta2"],
            eps=meta["eps"],
        )
        return CnnModel(config, payload["input_length"], params, adam,
                        class_names=payload.get("class_names"))
    if algorithm == "knn":
        return KnnModel(KnnConfig(int(payload["k_neighbors"])), arrays["grid"],
                        arrays["rows"], arrays["labels"],
                        tuple(payload["class_names"]))
    if algorithm == "plsda":
        return PlsModel(arrays["x_mean"], arrays["y_mean"], arrays["weights"],
                        arrays["x_loadings"], arrays["y_loadings"],
                        arrays["rotation"], arrays["explained_x_variance"],
                        tuple(payload["class_names"]))
    raise ValueError(f"{path}: unknown algorithm tag {algorithm!r}")
