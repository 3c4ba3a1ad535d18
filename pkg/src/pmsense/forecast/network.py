"""Vanilla RNN and LSTM regressors with hand-written BPTT.

Both networks read a window of scalar inputs and emit one linear prediction
from the last hidden state. Parameters live in an ordered ``dict`` of float64
arrays; the order is the serialisation order.

RNN step::

    h_t = tanh(w_x x_t + w_h h_{t-1} + b_h)
    y_t = w_y . h_t + b_y

LSTM step, gate blocks stacked as (input, forget, candidate, output)::

    z   = w_x x_t + w_h h_{t-1} + b
    i, f, o = sigmoid(z_i), sigmoid(z_f), sigmoid(z_o);  g = tanh(z_g)
    c_t = f * c_{t-1} + i * g
    h_t = o * tanh(c_t)
"""

from __future__ import annotations

from typing import Optional

import numpy as np

RNN_PARAM_ORDER = ("w_x", "w_h", "b_h", "w_y", "b_y")
LSTM_PARAM_ORDER = ("w_x", "w_h", "b", "w_y", "b_y")
LSTM_GATES = ("input", "forget", "candidate", "output")


def sigmoid(z):
    # split by sign so exp never overflows
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _as_input(x_t, h_prev: np.ndarray) -> np.ndarray:
    x = np.asarray(x_t, dtype=np.float64)
    if x.ndim == h_prev.ndim - 1:
        x = x[..., None]
    return x


def rnn_cell(x_t, h_prev, p: dict) -> tuple[np.ndarray, np.ndarray]:
    """One RNN step. ``x_t`` is a scalar (or batch of scalars)."""
    h_prev = np.asarray(h_prev, dtype=np.float64)
    x = _as_input(x_t, h_prev)
    h = np.tanh(x @ p["w_x"].T + h_prev @ p["w_h"].T + p["b_h"])
    return h, h @ p["w_y"] + p["b_y"]


def lstm_cell(x_t, h_prev, c_prev, p: dict) -> tuple[np.ndarray, np.ndarray]:
    h_prev = np.asarray(h_prev, dtype=np.float64)
    c_prev = np.asarray(c_prev, dtype=np.float64)
    h, c, _ = _lstm_step(_as_input(x_t, h_prev), h_prev, c_prev, p)
    return h, c


def lstm_gates(x_t, h_prev, p: dict) -> dict[str, np.ndarray]:
    """Gate activations of one LSTM step, keyed by :data:`LSTM_GATES`."""
    h_prev = np.asarray(h_prev, dtype=np.float64)
    _, _, acts = _lstm_step(_as_input(x_t, h_prev), h_prev, np.zeros_like(h_prev), p)
    m = h_prev.shape[-1]
    return {name: acts[..., k * m:(k + 1) * m] for k, name in enumerate(LSTM_GATES)}


def _lstm_step(x, h_prev, c_prev, p):
    m = h_prev.shape[-1]
    z = x @ p["w_x"].T + h_prev @ p["w_h"].T + p["b"]
    acts = np.empty_like(z)
    acts[..., : 2 * m] = sigmoid(z[..., : 2 * m])
    acts[..., 2 * m: 3 * m] = np.tanh(z[..., 2 * m: 3 * m])
    acts[..., 3 * m:] = sigmoid(z[..., 3 * m:])
    i, f, g, o = (acts[..., k * m:(k + 1) * m] for k in range(4))
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return h, c, acts


def init_params(kind: str, hidden: int, rng: np.random.Generator, input_dim: int = 1) -> dict:
    """Uniform(-1/sqrt(m), 1/sqrt(m)) for every weight and bias."""
    m = hidden
    gates = 4 if kind == "lstm" else 1
    shapes = {
        "w_x": (gates * m, input_dim),
        "w_h": (gates * m, m),
        ("b" if kind == "lstm" else "b_h"): (gates * m,),
        "w_y": (m,),
        "b_y": (),
    }
    bound = 1.0 / np.sqrt(m)
    return {name: rng.uniform(-bound, bound, size=shape) for name, shape in shapes.items()}


class RecurrentRegressor:
    """Many-to-one recurrent network for one-step forecasting.

    ``predict`` takes a (batch, window) array of scaled inputs and returns a
    (batch,) array of scaled predictions.
    """

    def __init__(self, kind: str, hidden: int, params: Optional[dict] = None, seed: int = 0):
        if kind not in ("rnn", "lstm"):
            raise ValueError(f"kind must be 'rnn' or 'lstm', not {kind!r}")
        if hidden < 1:
            raise ValueError("hidden size must be >= 1")
        self.kind = kind
        self.hidden = hidden
        if params is None:
            params = init_params(kind, hidden, np.random.default_rng(seed))
        order = self.param_order
        if set(params) != set(order):
            raise ValueError(f"expected parameters {order}, got {tuple(params)}")
        self.params = {k: np.array(params[k], dtype=np.float64) for k in order}
        self._check_shapes()

    @property
    def param_order(self) -> tuple[str, ...]:
        return LSTM_PARAM_ORDER if self.kind == "lstm" else RNN_PARAM_ORDER

    def _check_shapes(self):
        m = self.hidden
        gm = 4 * m if self.kind == "lstm" else m
        p = self.params
        bias = p["b"] if self.kind == "lstm" else p["b_h"]
        if (p["w_x"].ndim != 2 or p["w_x"].shape[0] != gm or p["w_h"].shape != (gm, m)
                or bias.shape != (gm,) or p["w_y"].shape != (m,) or p["b_y"].shape != ()):
            raise ValueError("parameter shapes inconsistent with hidden size")
        for k, v in p.items():
            if not np.all(np.isfinite(v)):
                raise ValueError(f"non-finite values in {k}")

    def copy(self) -> "RecurrentRegressor":
        return RecurrentRegressor(self.kind, self.hidden, {k: v.copy() for k, v in self.params.items()})

    def predict(self, X) -> np.ndarray:
        return self.forward(X)[0]

    def forward(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 2:
            X = X[..., None]
        B, L, _ = X.shape
        m = self.hidden
        p = self.params
        h = np.zeros((B, m))
        hs = [h]
        if self.kind == "rnn":
            for t in range(L):
                h = np.tanh(X[:, t] @ p["w_x"].T + h @ p["w_h"].T + p["b_h"])
                hs.append(h)
            cache = (X, hs)
        else:
            c = np.zeros((B, m))
            cs, acts = [c], []
            for t in range(L):
                h, c, a = _lstm_step(X[:, t], h, c, p)
                hs.append(h)
                cs.append(c)
                acts.append(a)
            cache = (X, hs, cs, acts)
        return h @ p["w_y"] + p["b_y"], cache

    def backward(self, cache, dyhat) -> dict:
        """Gradients of ``sum(dyhat * yhat)`` with respect to every parameter."""
        p = self.params
        grads = {k: np.zeros_like(v) for k, v in p.items()}
        X, hs = cache[0], cache[1]
        L = X.shape[1]
        grads["w_y"] = hs[-1].T @ dyhat
        grads["b_y"] = np.array(dyhat.sum())
        dh = dyhat[:, None] * p["w_y"][None, :]
        if self.kind == "rnn":
            for t in range(L - 1, -1, -1):
                dpre = dh * (1.0 - hs[t + 1] ** 2)
                grads["w_x"] += dpre.T @ X[:, t]
                grads["w_h"] += dpre.T @ hs[t]
                grads["b_h"] += dpre.sum(axis=0)
                dh = dpre @ p["w_h"]
            return grads

        cs, acts = cache[2], cache[3]
        m = self.hidden
        dc = np.zeros_like(dh)
        dz = np.empty((X.shape[0], 4 * m))
        for t in range(L - 1, -1, -1):
            a = acts[t]
            i, f, g, o = (a[:, k * m:(k + 1) * m] for k in range(4))
            tc = np.tanh(cs[t + 1])
            dc = dc + dh * o * (1.0 - tc**2)
            dz[:, :m] = dc * g * i * (1.0 - i)
            dz[:, m:2 * m] = dc * cs[t] * f * (1.0 - f)
            dz[:, 2 * m:3 * m] = dc * i * (1.0 - g**2)
            dz[:, 3 * m:] = dh * tc * o * (1.0 - o)
            grads["w_x"] += dz.T @ X[:, t]
            grads["w_h"] += dz.T @ hs[t]
            grads["b"] += dz.sum(axis=0)
            dh = dz @ p["w_h"]
            dc = dc * f
        return grads

    def loss(self, X, y) -> float:
        err = self.predict(X) - np.asarray(y, dtype=np.float64)
        return float(np.mean(err**2))

    def loss_and_grads(self, X, y) -> tuple[float, dict]:
        """Mean squared error over the batch and its gradient."""
        y = np.asarray(y, dtype=np.float64)
        yhat, cache = self.forward(X)
        err = yhat - y
        grads = self.backward(cache, 2.0 * err / len(y))
        return float(np.mean(err**2)), grads
