"""From-scratch 1D convolutional network: layers, Adam, training loop."""

from .adam import AdamState, adam_step
from .layers import (conv1d_backward, conv1d_forward, dense_forward, maxpool1d,
                     maxpool1d_backward, relu, softmax)
from .loss import batch_cross_entropy, class_weights, cross_entropy
from .model import CnnConfig, CnnModel, ConvBlockSpec, conv_stack_shapes
from .train import train, training_accuracy

__all__ = [
    "AdamState", "adam_step", "conv1d_backward", "conv1d_forward",
    "dense_forward", "maxpool1d", "maxpool1d_backward", "relu", "softmax",
    "batch_cross_entropy", "class_weights", "cross_entropy",
    "CnnConfig", "CnnModel", "ConvBlockSpec", "conv_stack_shapes",
    "train", "training_accuracy",
]
