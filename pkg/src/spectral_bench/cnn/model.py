"""1D CNN model: configuration, forward/backward passes, prediction.

The architecture is a chain of conv/ReLU/maxpool blocks followed by a dense
classifier head with softmax output. The default configuration
(conv 16ch k5 -> pool 2 -> conv 32ch k5 -> pool 2 -> dropout -> dense 64 ->
dense C) is fully overridable through :class:`CnnConfig`.

Backward passes are exact reverse-mode gradients of the batch loss, relying
on values cached during a training-mode forward pass (feature maps, pool
argmaxes, dropout masks). Dropout is inverted (masks scaled by 1/(1-rate))
so inference needs no rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ShapeError, StateError
from ..rng import Rng
from . import layers
from .adam import AdamState, adam_step


@dataclass(frozen=True)
class ConvBlockSpec:
    out_channels: int
    kernel_size: int
    pool_size: int

    def __post_init__(self):
        if self.out_channels < 1:
            raise ValueError("out_channels must be >= 1")
        if self.kernel_size < 1:
            raise ValueError("kernel_size must be >= 1")
        if self.pool_size < 1:
            raise ValueError("pool_size must be >= 1")


DEFAULT_CONV_BLOCKS = (ConvBlockSpec(16, 5, 2), ConvBlockSpec(32, 5, 2))


def _as_block(b) -> ConvBlockSpec:
    if isinstance(b, ConvBlockSpec):
        return b
    if isinstance(b, dict):
        return ConvBlockSpec(int(b["out_channels"]), int(b["kernel_size"]),
                             int(b["pool_size"]))
    return ConvBlockSpec(*(int(v) for v in b))


@dataclass(frozen=True)
class CnnConfig:
    """Hyperparameters and layer layout for one trained model.

    ``loss`` selects plain or class-weighted cross entropy (weights are the
    inverse class frequencies of the training set). ``dropout_placement``
    puts the single dropout either on the flattened conv features
    ("flatten", default) or after every hidden dense activation ("dense").
    ``seed`` drives initialization and batch shuffling when no explicit Rng
    is handed to :func:`spectral_bench.cnn.train.train`.
    """

    num_classes: int
    conv_blocks: tuple = DEFAULT_CONV_BLOCKS
    dense_hidden: tuple = (64,)
    dropout_rate: float = 0.1
    dropout_placement: str = "flatten"
    learning_rate: float = 0.001
    epochs: int = 300
    batch_size: int = 16
    loss: str = "plain"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "conv_blocks",
                           tuple(_as_block(b) for b in self.conv_blocks))
        object.__setattr__(self, "dense_hidden",
                           tuple(int(w) for w in self.dense_hidden))
        if self.num_classes < 2:
            raise ValueError("num_classes must be >= 2")
        if any(w < 1 for w in self.dense_hidden):
            raise ValueError("dense widths must be >= 1")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}")
        if self.dropout_placement not in ("flatten", "dense"):
            raise ValueError("dropout_placement must be 'flatten' or 'dense'")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be nonnegative")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.loss not in ("plain", "weighted"):
            raise ValueError("loss must be 'plain' or 'weighted'")


def conv_stack_shapes(config: CnnConfig, input_length: int):
    """(channels, length) after each conv block; raises if a layer underflows."""
    shapes = []
    channels, length = 1, int(input_length)
    for i, blk in enumerate(config.conv_blocks):
        if length < blk.kernel_size:
            raise ShapeError(
                f"conv block {i}: length {length} is shorter than kernel "
                f"{blk.kernel_size}"
            )
        length = length - blk.kernel_size + 1
        if length < blk.pool_size:
            raise ShapeError(
                f"conv block {i}: length {length} is shorter than pool "
                f"{blk.pool_size}"
            )
        length //= blk.pool_size
        channels = blk.out_channels
        shapes.append((channels, length))
    return shapes


class CnnModel:
    """Parameters plus optimizer state for one configured network.

    A model instance is single-writer while training; once training
    finishes, prediction is read-only and safe to share.
    """

    def __init__(self, config: CnnConfig, input_length: int, params: dict,
                 adam: AdamState | None = None, class_names=None):
        self.config = config
        self.input_length = int(input_length)
        self.params = params
        self.adam = adam if adam is not None else AdamState.for_params(params)
        self.class_names = tuple(class_names) if class_names else None
        self._cache = None

    # -- construction -----------------------------------------------------

    @classmethod
    def build(cls, config: CnnConfig, input_length: int, rng: Rng) -> "CnnModel":
        """He-initialized weights (ReLU layers), zero biases."""
        shapes = conv_stack_shapes(config, input_length)
        params: dict[str, np.ndarray] = {}
        in_ch = 1
        for i, blk in enumerate(config.conv_blocks):
            fan_in = in_ch * blk.kernel_size
            params[f"conv{i}.w"] = rng.standard_normal(
                (blk.out_channels, in_ch, blk.kernel_size)) * np.sqrt(2.0 / fan_in)
            params[f"conv{i}.b"] = np.zeros(blk.out_channels)
            in_ch = blk.out_channels
        width = shapes[-1][0] * shapes[-1][1] if shapes else input_length
        for j, hidden in enumerate(config.dense_hidden):
            params[f"dense{j}.w"] = rng.standard_normal(
                (hidden, width)) * np.sqrt(2.0 / width)
            params[f"dense{j}.b"] = np.zeros(hidden)
            width = hidden
        j = len(config.dense_hidden)
        params[f"dense{j}.w"] = rng.standard_normal(
            (config.num_classes, width)) * np.sqrt(2.0 / width)
        params[f"dense{j}.b"] = np.zeros(config.num_classes)
        return cls(config, input_length, params)

    @property
    def flat_width(self) -> int:
        shapes = conv_stack_shapes(self.config, self.input_length)
        return shapes[-1][0] * shapes[-1][1] if shapes else self.input_length

    # -- forward ----------------------------------------------------------

    def _check_input(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 2:  # (batch, length) -> single channel
            x = x[:, None, :]
        if x.ndim != 3 or x.shape[1] != 1 or x.shape[2] != self.input_length:
            raise ShapeError(
                f"expected rows of length {self.input_length}, got {x.shape}"
            )
        return x

    def _dropout(self, a, rng, cache_list):
        rate = self.config.dropout_rate
        mask = (rng.uniform(a.shape) >= rate) / (1.0 - rate)
        cache_list.append(mask)
        return a * mask

    def forward_train(self, x, rng: Rng) -> np.ndarray:
        """Training-mode forward pass; caches everything backward needs.

        Dropout masks are drawn from ``rng`` (skipped entirely when
        ``dropout_rate == 0``). Returns softmax probabilities.
        """
        x = self._check_input(x)
        cfg = self.config
        use_dropout = cfg.dropout_rate > 0.0
        cache = {"x": x, "conv": [], "dense": [], "dropout": []}

        a = x
        for i, blk in enumerate(cfg.conv_blocks):
            z = layers.conv1d_forward(a, self.params[f"conv{i}.w"],
                                      self.params[f"conv{i}.b"])
            r = layers.relu(z)
            p, arg = layers.maxpool1d(r, blk.pool_size)
            cache["conv"].append((a, z > 0, arg, r.shape[2]))
            a = p
        a = a.reshape(a.shape[0], -1)
        if use_dropout and cfg.dropout_placement == "flatten":
            a = self._dropout(a, rng, cache["dropout"])
        for j in range(len(cfg.dense_hidden)):
            z = layers.dense_forward(a, self.params[f"dense{j}.w"],
                                     self.params[f"dense{j}.b"])
            r = layers.relu(z)
            cache["dense"].append((a, z > 0))
            a = r
            if use_dropout and cfg.dropout_placement == "dense":
                a = self._dropout(a, rng, cache["dropout"])
        j = len(cfg.dense_hidden)
        logits = layers.dense_forward(a, self.params[f"dense{j}.w"],
                                      self.params[f"dense{j}.b"])
        cache["head_in"] = a
        probs = layers.softmax(logits)
        self._cache = cache
        return probs

    def _forward_inference(self, x) -> tuple[np.ndarray, np.ndarray]:
        """(penultimate activations, probabilities); dropout disabled."""
        x = self._check_input(x)
        cfg = self.config
        a = x
        for i, blk in enumerate(cfg.conv_blocks):
            z = layers.conv1d_forward(a, self.params[f"conv{i}.w"],
                                      self.params[f"conv{i}.b"])
            a, _ = layers.maxpool1d(layers.relu(z), blk.pool_size)
        a = a.reshape(a.shape[0], -1)
        for j in range(len(cfg.dense_hidden)):
            a = layers.relu(layers.dense_forward(a, self.params[f"dense{j}.w"],
                                                 self.params[f"dense{j}.b"]))
        j = len(cfg.dense_hidden)
        logits = layers.dense_forward(a, self.params[f"dense{j}.w"],
                                      self.params[f"dense{j}.b"])
        return a, layers.softmax(logits)

    # -- backward ---------------------------------------------------------

    def backward(self, probs, labels, class_weights=None) -> dict:
        """Exact gradients of the mean (optionally weighted) cross entropy.

        Requires the cache of the immediately preceding
        :meth:`forward_train` call.
        """
        if self._cache is None:
            raise StateError("backward() called without a cached forward pass")
        cache = self._cache
        self._cache = None
        cfg = self.config
        labels = np.asarray(labels, dtype=np.int64)
        batch = labels.size

        grads: dict[str, np.ndarray] = {}
        dz = np.asarray(probs, dtype=np.float64).copy()
        dz[np.arange(batch), labels] -= 1.0
        if class_weights is not None:
            dz *= np.asarray(class_weights)[labels][:, None]
        dz /= batch

        dropout_masks = list(cache["dropout"])
        j = len(cfg.dense_hidden)
        grads[f"dense{j}.w"] = dz.T @ cache["head_in"]
        grads[f"dense{j}.b"] = dz.sum(axis=0)
        da = dz @ self.params[f"dense{j}.w"]
        for j in reversed(range(len(cfg.dense_hidden))):
            if cfg.dropout_rate > 0.0 and cfg.dropout_placement == "dense":
                da = da * dropout_masks.pop()
            a_in, relu_mask = cache["dense"][j]
            dzj = da * relu_mask
            grads[f"dense{j}.w"] = dzj.T @ a_in
            grads[f"dense{j}.b"] = dzj.sum(axis=0)
            da = dzj @ self.params[f"dense{j}.w"]
        if cfg.dropout_rate > 0.0 and cfg.dropout_placement == "flatten":
            da = da * dropout_masks.pop()

        shapes = conv_stack_shapes(cfg, self.input_length)
        if shapes:
            da = da.reshape(batch, *shapes[-1])
        for i in reversed(range(len(cfg.conv_blocks))):
            a_in, relu_mask, arg, pre_pool_len = cache["conv"][i]
            dp = layers.maxpool1d_backward(da, arg, cfg.conv_blocks[i].pool_size,
                                           pre_pool_len)
            dzc = dp * relu_mask
            dx, gw, gb = layers.conv1d_backward(a_in, self.params[f"conv{i}.w"], dzc)
            grads[f"conv{i}.w"] = gw
            grads[f"conv{i}.b"] = gb
            da = dx
        return grads

    def apply_gradients(self, grads: dict):
        adam_step(self.params, grads, self.adam, self.config.learning_rate)

    # -- inference --------------------------------------------------------

    def predict(self, rows) -> tuple[np.ndarray, np.ndarray]:
        """Predicted class ids and probability rows for raw absorbance rows.

        Deterministic and independent of the dropout rate. Probability ties
        resolve to the lowest class id.
        """
        _, probs = self._forward_inference(rows)
        return probs.argmax(axis=1), probs

    def features(self, rows) -> np.ndarray:
        """Penultimate-layer activations (input of the final dense layer)."""
        feats, _ = self._forward_inference(rows)
        return feats
