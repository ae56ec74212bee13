"""Small numpy kernel: GRU/LSTM layers with backprop-through-time, softmax,
dropout and SGD.

Recurrent layers work on time-major arrays ``(T, B, D)``.  Weights are kept
as ``W`` (input to gates, ``(D, G*H)``), ``U`` (hidden to gates, ``(H, G*H)``)
and ``b`` (``(G*H,)``).  GRU gate order is reset, update, candidate; LSTM
gate order is input, forget, cell, output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.special import expit

from .errors import DimensionMismatch

GRU = "gru"
LSTM = "lstm"
INIT_SCALE = 0.08


@dataclass(frozen=True)
class RnnCellSpec:
    kind: str
    input_size: int
    hidden_size: int

    def __post_init__(self):
        if self.kind not in (GRU, LSTM):
            raise ValueError(f"unknown cell kind {self.kind!r}")
        if self.input_size < 1 or self.hidden_size < 1:
            raise ValueError("cell sizes must be >= 1")

    @property
    def gates(self) -> int:
        return 3 if self.kind == GRU else 4


sigmoid = expit


def log_softmax(logits, axis=-1):
    shifted = logits - logits.max(axis=axis, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))


def softmax(logits, axis=-1):
    return np.exp(log_softmax(logits, axis=axis))


def softmax_cross_entropy(logits, target_index: int):
    """Return ``(loss, probabilities)`` with ``loss = -log p[target]``."""
    logits = np.asarray(logits)
    if not 0 <= target_index < logits.shape[-1]:
        raise IndexError("target index out of range")
    logp = log_softmax(logits)
    return -logp[target_index], np.exp(logp)


def init_cell(spec: RnnCellSpec, rng: np.random.Generator, dtype=np.float32) -> dict:
    G, H, D = spec.gates, spec.hidden_size, spec.input_size
    p = {
        "W": rng.uniform(-INIT_SCALE, INIT_SCALE, size=(D, G * H)).astype(dtype),
        "U": rng.uniform(-INIT_SCALE, INIT_SCALE, size=(H, G * H)).astype(dtype),
        "b": np.zeros(G * H, dtype=dtype),
    }
    if spec.kind == LSTM:
        p["b"][H:2 * H] = 1.0
    return p


def zero_state(kind: str, batch: int, hidden: int, dtype=np.float32):
    h = np.zeros((batch, hidden), dtype=dtype)
    if kind == LSTM:
        return (h, np.zeros_like(h))
    return h


def _check(p, x):
    if x.shape[-1] != p["W"].shape[0]:
        raise DimensionMismatch(
            f"input width {x.shape[-1]} does not match weight rows {p['W'].shape[0]}")


def cell_forward(spec: RnnCellSpec, params: Mapping, x, state=None):
    """One recurrent step.  ``x`` is ``(D,)`` or ``(B, D)``.

    Returns ``(output, new_state)``; the state is ``h`` for a GRU and
    ``(h, c)`` for an LSTM.
    """
    x = np.asarray(x)
    single = x.ndim == 1
    xb = x[None] if single else x
    if xb.shape[-1] != spec.input_size:
        raise DimensionMismatch(f"expected input of width {spec.input_size}, got {xb.shape[-1]}")
    if state is None:
        state = zero_state(spec.kind, xb.shape[0], spec.hidden_size, params["W"].dtype)
    elif single:
        state = tuple(s[None] for s in state) if spec.kind == LSTM else state[None]
    _check(params, xb)
    xw = xb @ params["W"] + params["b"]
    if spec.kind == GRU:
        h, _ = _gru_step(params["U"], xw, state)
        new = h
    else:
        h, c, _ = _lstm_step(params["U"], xw, *state)
        new = (h, c)
    if single:
        h = h[0]
        new = (new[0][0], new[1][0]) if spec.kind == LSTM else new[0]
    return h, new


def _gru_step(U, xw, h_prev):
    H = h_prev.shape[-1]
    hu = h_prev @ U[:, :2 * H]
    rz = sigmoid(xw[:, :2 * H] + hu)
    r, z = rz[:, :H], rz[:, H:]
    rh = r * h_prev
    n = np.tanh(xw[:, 2 * H:] + rh @ U[:, 2 * H:])
    h = n + z * (h_prev - n)
    return h, (h_prev, r, z, n, rh)


def _lstm_step(U, xw, h_prev, c_prev):
    H = h_prev.shape[-1]
    a = xw + h_prev @ U
    if_ = sigmoid(a[:, :2 * H])
    i, f = if_[:, :H], if_[:, H:]
    o = sigmoid(a[:, 3 * H:])
    g = np.tanh(a[:, 2 * H:3 * H])
    c = f * c_prev + i * g
    tc = np.tanh(c)
    h = o * tc
    return h, c, (h_prev, c_prev, i, f, g, o, tc)


def layer_forward(kind: str, p: Mapping, xs, state0=None):
    """Run one recurrent layer over ``xs`` of shape ``(T, B, D)``."""
    _check(p, xs)
    T, B, _ = xs.shape
    H = p["U"].shape[0]
    xw = xs @ p["W"] + p["b"]
    hs = np.empty((T, B, H), dtype=xs.dtype)
    steps = []
    if kind == GRU:
        h = np.zeros((B, H), dtype=xs.dtype) if state0 is None else state0
        for t in range(T):
            h, cache = _gru_step(p["U"], xw[t], h)
            hs[t] = h
            steps.append(cache)
    else:
        h, c = (np.zeros((B, H), dtype=xs.dtype),) * 2 if state0 is None else state0
        for t in range(T):
            h, c, cache = _lstm_step(p["U"], xw[t], h, c)
            hs[t] = h
            steps.append(cache)
    return hs, (xs, steps)


def layer_backward(kind: str, p: Mapping, dhs, cache):
    """Backprop-through-time.  Returns ``(dxs, {"W", "U", "b"} grads)``."""
    xs, steps = cache
    T, B, _ = dhs.shape
    U = p["U"]
    H = U.shape[0]
    G = U.shape[1] // H
    dxw = np.empty((T, B, G * H), dtype=dhs.dtype)
    dU = np.zeros_like(U)
    carry = np.zeros((B, H), dtype=dhs.dtype)
    if kind == GRU:
        Urz, Un = U[:, :2 * H], U[:, 2 * H:]
        for t in range(T - 1, -1, -1):
            h_prev, r, z, n, rh = steps[t]
            dh = dhs[t] + carry
            dan = dh * (1.0 - z) * (1.0 - n * n)
            daz = dh * (h_prev - n) * z * (1.0 - z)
            drh = dan @ Un.T
            dar = drh * h_prev * r * (1.0 - r)
            darz = np.concatenate([dar, daz], axis=1)
            dU[:, 2 * H:] += rh.T @ dan
            dU[:, :2 * H] += h_prev.T @ darz
            carry = dh * z + drh * r + darz @ Urz.T
            dxw[t, :, :2 * H] = darz
            dxw[t, :, 2 * H:] = dan
    else:
        dc = np.zeros((B, H), dtype=dhs.dtype)
        for t in range(T - 1, -1, -1):
            h_prev, c_prev, i, f, g, o, tc = steps[t]
            dh = dhs[t] + carry
            dc = dc + dh * o * (1.0 - tc * tc)
            da = np.concatenate([
                dc * g * i * (1.0 - i),
                dc * c_prev * f * (1.0 - f),
                dc * i * (1.0 - g * g),
                dh * tc * o * (1.0 - o),
            ], axis=1)
            dU += h_prev.T @ da
            carry = da @ U.T
            dc = dc * f
            dxw[t] = da
    flat_x = xs.reshape(T * B, -1)
    flat_d = dxw.reshape(T * B, -1)
    grads = {"W": flat_x.T @ flat_d, "U": dU, "b": flat_d.sum(axis=0)}
    dxs = dxw @ p["W"].T
    return dxs, grads


def dropout_mask(shape, rate: float, rng: np.random.Generator, dtype=np.float32):
    keep = rng.random(shape) >= rate
    return keep.astype(dtype) / dtype(1.0 - rate) if rate > 0 else np.ones(shape, dtype)


def dropout(x, rate: float, training: bool, rng: np.random.Generator | None = None):
    """Inverted dropout; identity outside training or when ``rate == 0``."""
    if not 0.0 <= rate < 1.0:
        raise ValueError("dropout rate must be in [0, 1)")
    if not training or rate == 0.0:
        return x
    if rng is None:
        raise ValueError("training-mode dropout needs an rng")
    x = np.asarray(x)
    return x * dropout_mask(x.shape, rate, rng, x.dtype.type)


def stack_forward(kind: str, layers, xs, rate=0.0, training=False, rng=None):
    """Stacked recurrent layers, dropout on the input of every layer."""
    caches = []
    h = xs
    for p in layers:
        mask = None
        if training and rate > 0:
            mask = dropout_mask(h.shape, rate, rng, h.dtype.type)
            h = h * mask
        h, cache = layer_forward(kind, p, h)
        caches.append((mask, cache))
    return h, caches


def stack_backward(kind: str, layers, dhs, caches):
    grads = [None] * len(layers)
    d = dhs
    for k in range(len(layers) - 1, -1, -1):
        mask, cache = caches[k]
        d, grads[k] = layer_backward(kind, layers[k], d, cache)
        if mask is not None:
            d = d * mask
    return d, grads


def stack_step(kind: str, layers, x, states):
    """Single time step through a stack; ``states`` holds one entry per layer."""
    new_states = []
    h = x
    for p, s in zip(layers, states):
        xw = h @ p["W"] + p["b"]
        if kind == GRU:
            h, _ = _gru_step(p["U"], xw, s)
            new_states.append(h)
        else:
            h, c, _ = _lstm_step(p["U"], xw, *s)
            new_states.append((h, c))
    return h, new_states


def global_norm(grads: Mapping) -> float:
    return float(np.sqrt(sum(float(np.vdot(g, g)) for g in grads.values())))


def clip_by_global_norm(grads: Mapping, max_norm: float | None):
    """Scale ``grads`` so their joint L2 norm is at most ``max_norm``."""
    norm = global_norm(grads)
    if max_norm is None or max_norm <= 0 or norm <= max_norm:
        return dict(grads), norm
    scale = max_norm / norm
    return {k: g * g.dtype.type(scale) for k, g in grads.items()}, norm


def sgd_step(params: dict, grads: Mapping, lr: float, clip: float | None = None) -> dict:
    """In-place ``p -= lr * g`` for every gradient, after optional clipping."""
    for k, g in grads.items():
        if params[k].shape != g.shape:
            raise DimensionMismatch(f"{k}: parameter {params[k].shape} vs gradient {g.shape}")
    grads, _ = clip_by_global_norm(grads, clip)
    for k, g in grads.items():
        p = params[k]
        p -= p.dtype.type(lr) * g.astype(p.dtype, copy=False)
    return params
