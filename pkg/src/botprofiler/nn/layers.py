"""Dense, LSTM, and layer-mixing primitives with analytic backward passes.

All arrays are float64. Layers validate shapes and reject non-finite inputs
at their boundaries; every backward pass is covered by the finite-difference
checker in gradcheck.py.
"""

from __future__ import annotations

import numpy as np

from ..errors import NonFiniteValue, ShapeMismatch


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _check_finite(name: str, arr: np.ndarray):
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"non-finite values in {name}")


def _fanin_uniform(rng: np.random.Generator, out_dim: int, in_dim: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(in_dim)
    return rng.uniform(-bound, bound, size=(out_dim, in_dim))


_ACTIVATIONS = {
    "identity": (lambda z: z, lambda pre, out: np.ones_like(pre)),
    "relu": (lambda z: np.maximum(z, 0.0), lambda pre, out: (pre > 0).astype(np.float64)),
    "tanh": (np.tanh, lambda pre, out: 1.0 - out * out),
    "sigmoid": (sigmoid, lambda pre, out: out * (1.0 - out)),
}


class Dense:
    """y = act(W x + b) with W of shape [out, in]."""

    def __init__(self, w: np.ndarray, b: np.ndarray, activation: str = "identity"):
        if activation not in _ACTIVATIONS:
            raise ShapeMismatch(f"unknown activation {activation!r}")
        if w.ndim != 2 or b.shape != (w.shape[0],):
            raise ShapeMismatch(f"inconsistent dense shapes {w.shape} / {b.shape}")
        self.w = np.asarray(w, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.activation = activation

    @classmethod
    def create(cls, rng, in_dim, out_dim, activation="identity"):
        return cls(_fanin_uniform(rng, out_dim, in_dim), np.zeros(out_dim), activation)

    @property
    def in_dim(self):
        return self.w.shape[1]

    @property
    def out_dim(self):
        return self.w.shape[0]

    def forward(self, x: np.ndarray):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ShapeMismatch(
                f"dense expects [n, {self.in_dim}], got {x.shape}"
            )
        _check_finite("dense input", x)
        pre = x @ self.w.T + self.b
        act, _ = _ACTIVATIONS[self.activation]
        out = act(pre)
        return out, (x, pre, out)

    def backward(self, dout: np.ndarray, cache):
        x, pre, out = cache
        if dout.shape != out.shape:
            raise ShapeMismatch(f"dense backward got {dout.shape}, expected {out.shape}")
        _, dact = _ACTIVATIONS[self.activation]
        dpre = dout * dact(pre, out)
        grads = {"w": dpre.T @ x, "b": dpre.sum(axis=0)}
        dx = dpre @ self.w
        return dx, grads

    def params(self) -> dict[str, np.ndarray]:
        return {"w": self.w, "b": self.b}


class LSTMCell:
    """Standard gated cell; gate order i, f, g, o; forget bias starts at 1."""

    def __init__(self, wx: np.ndarray, wh: np.ndarray, b: np.ndarray):
        h4, d = wx.shape
        if h4 % 4 != 0 or wh.shape != (h4, h4 // 4) or b.shape != (h4,):
            raise ShapeMismatch(
                f"inconsistent lstm shapes {wx.shape} / {wh.shape} / {b.shape}"
            )
        self.wx = np.asarray(wx, dtype=np.float64)
        self.wh = np.asarray(wh, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.hidden_size = h4 // 4
        self.input_size = d

    @classmethod
    def create(cls, rng, input_size, hidden_size):
        wx = _fanin_uniform(rng, 4 * hidden_size, input_size)
        wh = _fanin_uniform(rng, 4 * hidden_size, hidden_size)
        b = np.zeros(4 * hidden_size)
        b[hidden_size : 2 * hidden_size] = 1.0  # forget gate
        return cls(wx, wh, b)

    def _gates(self, x, h_prev):
        h = self.hidden_size
        z = x @ self.wx.T + h_prev @ self.wh.T + self.b
        i = sigmoid(z[:, :h])
        f = sigmoid(z[:, h : 2 * h])
        g = np.tanh(z[:, 2 * h : 3 * h])
        o = sigmoid(z[:, 3 * h :])
        return i, f, g, o

    def step(self, x, h_prev, c_prev):
        """One recurrence step for a batch; returns (h_t, c_t)."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        h_prev = np.atleast_2d(np.asarray(h_prev, dtype=np.float64))
        c_prev = np.atleast_2d(np.asarray(c_prev, dtype=np.float64))
        if x.shape[1] != self.input_size or h_prev.shape[1] != self.hidden_size:
            raise ShapeMismatch(
                f"lstm step expects [n, {self.input_size}] and [n, {self.hidden_size}]"
            )
        _check_finite("lstm input", x)
        i, f, g, o = self._gates(x, h_prev)
        c = f * c_prev + i * g
        h = o * np.tanh(c)
        return h, c

    def forward_seq(self, xs: np.ndarray, mask: np.ndarray | None = None):
        """Run the cell over xs [T, B, d]; mask [T, B] freezes padded steps.

        Returns hidden states [T, B, h] and the cache for backward_seq.
        """
        xs = np.asarray(xs, dtype=np.float64)
        if xs.ndim != 3 or xs.shape[2] != self.input_size:
            raise ShapeMismatch(f"lstm seq expects [T, B, {self.input_size}]")
        _check_finite("lstm input", xs)
        t_len, batch, _ = xs.shape
        if mask is None:
            mask = np.ones((t_len, batch))
        h = np.zeros((batch, self.hidden_size))
        c = np.zeros((batch, self.hidden_size))
        hs = np.empty((t_len, batch, self.hidden_size))
        steps = []
        for t in range(t_len):
            i, f, g, o = self._gates(xs[t], h)
            c_new = f * c + i * g
            h_new = o * np.tanh(c_new)
            m = mask[t][:, None]
            steps.append((xs[t], h, c, i, f, g, o, c_new, m))
            h = m * h_new + (1.0 - m) * h
            c = m * c_new + (1.0 - m) * c
            hs[t] = h
        return hs, steps

    def backward_seq(self, dhs: np.ndarray, steps):
        """Backprop through time; dhs [T, B, h] is dLoss/d(hidden state)."""
        t_len = len(steps)
        d_wx = np.zeros_like(self.wx)
        d_wh = np.zeros_like(self.wh)
        d_b = np.zeros_like(self.b)
        dxs = np.empty((t_len,) + steps[0][0].shape)
        dh_next = np.zeros((steps[0][0].shape[0], self.hidden_size))
        dc_next = np.zeros_like(dh_next)
        for t in range(t_len - 1, -1, -1):
            x, h_prev, c_prev, i, f, g, o, c_new, m = steps[t]
            dh_total = dhs[t] + dh_next
            dh_new = dh_total * m
            dc_new = dc_next * m
            tanh_c = np.tanh(c_new)
            do = dh_new * tanh_c
            dc_inner = dc_new + dh_new * o * (1.0 - tanh_c * tanh_c)
            df = dc_inner * c_prev
            di = dc_inner * g
            dg = dc_inner * i
            dz = np.concatenate(
                [
                    di * i * (1.0 - i),
                    df * f * (1.0 - f),
                    dg * (1.0 - g * g),
                    do * o * (1.0 - o),
                ],
                axis=1,
            )
            d_wx += dz.T @ x
            d_wh += dz.T @ h_prev
            d_b += dz.sum(axis=0)
            dxs[t] = dz @ self.wx
            dh_next = dz @ self.wh + dh_total * (1.0 - m)
            dc_next = dc_inner * f + dc_next * (1.0 - m)
        return dxs, {"wx": d_wx, "wh": d_wh, "b": d_b}

    def params(self) -> dict[str, np.ndarray]:
        return {"wx": self.wx, "wh": self.wh, "b": self.b}


class LayerMix:
    """Softmax-weighted sum of K aligned blocks: y = sum_k softmax(s)_k x_k."""

    def __init__(self, scalars: np.ndarray):
        self.s = np.asarray(scalars, dtype=np.float64).reshape(-1)

    @property
    def weights(self) -> np.ndarray:
        e = np.exp(self.s - self.s.max())
        return e / e.sum()

    def forward(self, blocks: np.ndarray):
        """blocks [n, K, d] -> [n, d]."""
        blocks = np.asarray(blocks, dtype=np.float64)
        if blocks.ndim != 3 or blocks.shape[1] != self.s.size:
            raise ShapeMismatch(
                f"layer mix expects [n, {self.s.size}, d], got {blocks.shape}"
            )
        w = self.weights
        out = np.einsum("k,nkd->nd", w, blocks)
        return out, (blocks, w)

    def backward(self, dout: np.ndarray, cache):
        blocks, w = cache
        dblocks = w[None, :, None] * dout[:, None, :]
        dw = np.einsum("nd,nkd->k", dout, blocks)
        ds = w * (dw - float(w @ dw))
        return dblocks, {"s": ds}

    def params(self) -> dict[str, np.ndarray]:
        return {"s": self.s}
