"""Self-contained numerical core: float64 layers with exact backprop.

Everything here is plain numpy; parameters live in dicts of named arrays so
the optimizer, the gradient checker, and the checkpoint container can treat
any model uniformly.
"""

from .layers import Dense, LSTMCell, LayerMix, sigmoid
from .losses import (
    binary_cross_entropy,
    cross_entropy,
    sigmoid_bce_with_logits,
    softmax,
    softmax_xent,
)
from .optim import Adam, Sgd
from .gradcheck import grad_check
from .checkpoint import load_params, save_params

__all__ = [
    "Adam",
    "Dense",
    "LSTMCell",
    "LayerMix",
    "Sgd",
    "binary_cross_entropy",
    "cross_entropy",
    "grad_check",
    "load_params",
    "save_params",
    "sigmoid",
    "sigmoid_bce_with_logits",
    "softmax",
    "softmax_xent",
]
