"""Losses and probability transforms, numerically stabilized.

Softmax subtracts the row max; probabilities are clamped at 1e-12 before any
log, so losses stay finite on any finite input.
"""

from __future__ import annotations

import numpy as np

from ..errors import NonFiniteValue, ShapeMismatch
from .layers import sigmoid

_P_MIN = 1e-12


def softmax(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise NonFiniteValue("non-finite logits")
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise NonFiniteValue("non-finite logits")
    shifted = z - z.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def cross_entropy(probs: np.ndarray, target: int) -> float:
    probs = np.asarray(probs, dtype=np.float64)
    if not np.all(np.isfinite(probs)):
        raise NonFiniteValue("non-finite probabilities")
    return float(-np.log(max(probs[target], _P_MIN)))


def binary_cross_entropy(p: float, y) -> float:
    if not np.isfinite(p):
        raise NonFiniteValue("non-finite probability")
    p = min(max(float(p), _P_MIN), 1.0 - _P_MIN)
    y = float(y)
    return float(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def softmax_xent(logits: np.ndarray, targets: np.ndarray, mask: np.ndarray | None = None):
    """Summed cross-entropy over rows with its logit gradient.

    logits [N, V], targets [N] int, mask [N] of 0/1 excludes padded rows.
    Returns (loss_sum, dlogits) with dlogits already mask-scaled but NOT
    normalized; callers divide by their own token count.
    """
    logits = np.asarray(logits, dtype=np.float64)
    targets = np.asarray(targets)
    if logits.ndim != 2 or targets.shape != (logits.shape[0],):
        raise ShapeMismatch(f"xent got logits {logits.shape}, targets {targets.shape}")
    logp = log_softmax(logits)
    rows = np.arange(logits.shape[0])
    picked = np.maximum(logp[rows, targets], np.log(_P_MIN))
    p = np.exp(logp)
    dlogits = p
    dlogits[rows, targets] -= 1.0
    if mask is not None:
        picked = picked * mask
        dlogits *= mask[:, None]
    return float(-picked.sum()), dlogits


def sigmoid_bce_with_logits(z: np.ndarray, y: np.ndarray):
    """Summed binary cross-entropy on logits; returns (loss_sum, dz).

    Uses the softplus form so saturation cannot overflow; the gradient is the
    exact p - y.
    """
    z = np.asarray(z, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if z.shape != y.shape:
        raise ShapeMismatch(f"bce got logits {z.shape}, labels {y.shape}")
    loss = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    return float(loss.sum()), sigmoid(z) - y
