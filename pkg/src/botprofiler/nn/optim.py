"""Optimizers over named-parameter dicts; updates happen in place."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch


class Adam:
    """Bias-corrected Adam (update = lr * m_hat / (sqrt(v_hat) + eps))."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, grads):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for name, g in grads.items():
            p = self.params[name]
            if g.shape != p.shape:
                raise ShapeMismatch(
                    f"grad shape {g.shape} != param shape {p.shape} for {name!r}"
                )
            m = self.m[name]
            v = self.v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            m_hat = m / (1.0 - b1**self.t)
            v_hat = v / (1.0 - b2**self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class Sgd:
    """Plain SGD with 1/sqrt(t) decay; the linear-SGD classifier variant."""

    def __init__(self, params, lr=0.1):
        self.params = params
        self.lr = lr
        self.t = 0

    def step(self, grads):
        self.t += 1
        lr_t = self.lr / np.sqrt(self.t)
        for name, g in grads.items():
            p = self.params[name]
            if g.shape != p.shape:
                raise ShapeMismatch(
                    f"grad shape {g.shape} != param shape {p.shape} for {name!r}"
                )
            p -= lr_t * g
