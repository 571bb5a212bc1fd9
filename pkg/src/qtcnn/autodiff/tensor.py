"""Minimal reverse-mode engine on float64 numpy arrays.

Tensors form an implicit DAG through parent links; `Tape` freezes the reverse
topological order for one output and replays backward closures
deterministically.  Gradients accumulate into `.grad` (never overwritten), so
per-sample tapes can share parameter leaves within a batch.  Ops implement
exactly the shapes the models need; there is no general broadcasting.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Tensor",
    "Tape",
    "matmul",
    "affine",
    "conv1d",
    "relu",
    "tanh",
    "sigmoid",
    "global_avg_pool",
    "batchnorm1d",
    "BatchNormState",
    "concat",
    "reshape",
    "dropout",
    "bce_loss",
]


class Tensor:
    __slots__ = ("values", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, values, requires_grad: bool = False, _parents=(), _backward=None):
        self.values = np.asarray(values, dtype=np.float64)
        self.requires_grad = bool(requires_grad) or any(p.requires_grad for p in _parents)
        self.grad = None
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.values.shape

    def accumulate(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.values)
        self.grad += g

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self, seed: np.ndarray | None = None) -> None:
        Tape(self).backward(seed)

    # arithmetic conveniences (Tensor op Tensor, or Tensor op python scalar)
    def __add__(self, other):
        if isinstance(other, Tensor):
            return _add(self, other)
        return _shift(self, float(other))

    def __mul__(self, other):
        if isinstance(other, Tensor):
            return _mul(self, other)
        return _scale(self, float(other))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return _scale(self, -1.0)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Tensor) else -float(other))

    def __repr__(self):
        return f"Tensor(shape={self.values.shape}, requires_grad={self.requires_grad})"


class Tape:
    """Reverse topological record of the ops reaching one output tensor."""

    def __init__(self, root: Tensor):
        self.root = root
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(root, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        self.order = order  # parents precede children

    def backward(self, seed: np.ndarray | None = None) -> None:
        if seed is None:
            seed = np.ones_like(self.root.values)
        self.root.accumulate(np.asarray(seed, dtype=np.float64))
        for node in reversed(self.order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    def zero_grads(self) -> None:
        """Clear every recorded node, leaves and intermediates alike."""
        for node in self.order:
            node.grad = None


def _op(values, parents, backward) -> Tensor:
    out = Tensor(values, _parents=tuple(parents), _backward=None)
    if out.requires_grad:
        out._backward = backward
    return out


def _add(a: Tensor, b: Tensor) -> Tensor:
    if a.values.shape != b.values.shape:
        raise ValueError(f"add shape mismatch: {a.values.shape} vs {b.values.shape}")

    def backward(g):
        if a.requires_grad:
            a.accumulate(g)
        if b.requires_grad:
            b.accumulate(g)

    return _op(a.values + b.values, (a, b), backward)


def _mul(a: Tensor, b: Tensor) -> Tensor:
    if a.values.shape != b.values.shape:
        raise ValueError(f"mul shape mismatch: {a.values.shape} vs {b.values.shape}")

    def backward(g):
        if a.requires_grad:
            a.accumulate(g * b.values)
        if b.requires_grad:
            b.accumulate(g * a.values)

    return _op(a.values * b.values, (a, b), backward)


def _scale(a: Tensor, k: float) -> Tensor:
    def backward(g):
        if a.requires_grad:
            a.accumulate(k * g)

    return _op(k * a.values, (a,), backward)


def _shift(a: Tensor, k: float) -> Tensor:
    def backward(g):
        if a.requires_grad:
            a.accumulate(g)

    return _op(a.values + k, (a,), backward)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """1-D/2-D matrix product with numpy @ semantics."""
    av, bv = a.values, b.values

    def backward(g):
        if a.requires_grad:
            if av.ndim == 1 and bv.ndim == 1:
                a.accumulate(g * bv)
            elif av.ndim == 1:
                a.accumulate(g @ bv.T)
            elif bv.ndim == 1:
                a.accumulate(np.outer(g, bv))
            else:
                a.accumulate(g @ bv.T)
        if b.requires_grad:
            if av.ndim == 1 and bv.ndim == 1:
                b.accumulate(g * av)
            elif av.ndim == 1:
                b.accumulate(np.outer(av, g))
            elif bv.ndim == 1:
                b.accumulate(av.T @ g)
            else:
                b.accumulate(av.T @ g)

    return _op(av @ bv, (a, b), backward)


def affine(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """x @ w + b; x is (N, d) or (d,), w is (d, h), b is (h,)."""
    xv, wv, bv = x.values, w.values, b.values
    if xv.shape[-1] != wv.shape[0] or wv.shape[1] != bv.shape[0]:
        raise ValueError(f"affine shape mismatch: x{xv.shape} w{wv.shape} b{bv.shape}")

    def backward(g):
        if x.requires_grad:
            x.accumulate(g @ wv.T)
        if w.requires_grad:
            w.accumulate(np.outer(xv, g) if xv.ndim == 1 else xv.T @ g)
        if b.requires_grad:
            b.accumulate(g if g.ndim == 1 else g.sum(axis=0))

    return _op(xv @ wv + bv, (x, w, b), backward)


def conv1d(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """Temporal convolution with same padding.

    x is (T, C_in), w is (k, C_in, C_out), b is (C_out,); output (T, C_out).
    Zero padding of (k-1)//2 on the left and the remainder on the right.
    """
    xv, wv, bv = x.values, w.values, b.values
    if xv.ndim != 2 or wv.ndim != 3 or xv.shape[1] != wv.shape[1]:
        raise ValueError(f"conv1d shape mismatch: x{xv.shape} w{wv.shape}")
    t_len, k = xv.shape[0], wv.shape[0]
    pad_left = (k - 1) // 2
    pad_right = k - 1 - pad_left
    xp = np.pad(xv, ((pad_left, pad_right), (0, 0)))
    out = np.tile(bv, (t_len, 1))
    for o in range(k):
        out += xp[o : o + t_len] @ wv[o]

    def backward(g):
        if b.requires_grad:
            b.accumulate(g.sum(axis=0))
        if w.requires_grad:
            gw = np.empty_like(wv)
            for o in range(k):
                gw[o] = xp[o : o + t_len].T @ g
            w.accumulate(gw)
        if x.requires_grad:
            gxp = np.zeros_like(xp)
            for o in range(k):
                gxp[o : o + t_len] += g @ wv[o].T
            x.accumulate(gxp[pad_left : pad_left + t_len])

    return _op(out, (x, w, b), backward)


def relu(x: Tensor) -> Tensor:
    mask = x.values > 0

    def backward(g):
        if x.requires_grad:
            x.accumulate(g * mask)

    return _op(np.where(mask, x.values, 0.0), (x,), backward)


def tanh(x: Tensor) -> Tensor:
    y = np.tanh(x.values)

    def backward(g):
        if x.requires_grad:
            x.accumulate(g * (1.0 - y * y))

    return _op(y, (x,), backward)


def sigmoid(x: Tensor) -> Tensor:
    v = x.values
    y = np.where(v >= 0, 1.0 / (1.0 + np.exp(-np.abs(v))), np.exp(-np.abs(v)) / (1.0 + np.exp(-np.abs(v))))

    def backward(g):
        if x.requires_grad:
            x.accumulate(g * y * (1.0 - y))

    return _op(y, (x,), backward)


def global_avg_pool(x: Tensor) -> Tensor:
    """(T, C) -> (C,): mean over the time axis."""
    if x.values.ndim != 2:
        raise ValueError(f"global_avg_pool expects (T, C), got {x.values.shape}")
    t_len = x.values.shape[0]

    def backward(g):
        if x.requires_grad:
            x.accumulate(np.tile(g / t_len, (t_len, 1)))

    return _op(x.values.mean(axis=0), (x,), backward)


class BatchNormState:
    """Running statistics; population variance, momentum-mixed."""

    def __init__(self, n_features: int, momentum: float = 0.1, eps: float = 1e-5):
        self.running_mean = np.zeros(n_features)
        self.running_var = np.ones(n_features)
        self.momentum = momentum
        self.eps = eps


def batchnorm1d(x: Tensor, gamma: Tensor, beta: Tensor, state: BatchNormState, training: bool) -> Tensor:
    """(N, C) batch normalization over axis 0.

    Training mode normalizes with batch statistics and folds them into the
    running estimates; evaluation mode normalizes with the running estimates.
    """
    xv = x.values
    if xv.ndim != 2:
        raise ValueError(f"batchnorm1d expects (N, C), got {xv.shape}")
    eps = state.eps
    if training:
        mu = xv.mean(axis=0)
        var = xv.var(axis=0)
        state.running_mean = (1 - state.momentum) * state.running_mean + state.momentum * mu
        state.running_var = (1 - state.momentum) * state.running_var + state.momentum * var
    else:
        mu, var = state.running_mean, state.running_var
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (xv - mu) * inv_std
    out = gamma.values * xhat + beta.values

    def backward(g):
        if gamma.requires_grad:
            gamma.accumulate((g * xhat).sum(axis=0))
        if beta.requires_grad:
            beta.accumulate(g.sum(axis=0))
        if x.requires_grad:
            if training:
                gm = gamma.values * inv_std
                x.accumulate(gm * (g - g.mean(axis=0) - xhat * (g * xhat).mean(axis=0)))
            else:
                x.accumulate(g * gamma.values * inv_std)

    return _op(out, (x, gamma, beta), backward)


def concat(parts: list[Tensor]) -> Tensor:
    """Concatenate 1-D tensors."""
    for p in parts:
        if p.values.ndim != 1:
            raise ValueError(f"concat expects 1-D tensors, got {p.values.shape}")
    sizes = [p.values.size for p in parts]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            if p.requires_grad:
                p.accumulate(g[lo:hi])

    return _op(np.concatenate([p.values for p in parts]), tuple(parts), backward)


def reshape(x: Tensor, shape) -> Tensor:
    old = x.values.shape

    def backward(g):
        if x.requires_grad:
            x.accumulate(g.reshape(old))

    return _op(x.values.reshape(shape), (x,), backward)


def dropout(x: Tensor, p: float, rng: np.random.Generator, training: bool) -> Tensor:
    """Inverted dropout; identity when not training or p == 0."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {p}")
    if not training or p == 0.0:
        return x
    keep = (rng.random(x.values.shape) >= p) / (1.0 - p)

    def backward(g):
        if x.requires_grad:
            x.accumulate(g * keep)

    return _op(x.values * keep, (x,), backward)


CLAMP_LO = 1e-7
CLAMP_HI = 1.0 - 1e-7


def bce_loss(y_hat: Tensor, y: np.ndarray) -> Tensor:
    """Mean binary cross-entropy; predictions clamped to [1e-7, 1 - 1e-7].

    The clamp is part of the differentiated function: gradients vanish where
    it is active.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape != y_hat.values.shape:
        raise ValueError(f"bce shape mismatch: y_hat {y_hat.values.shape} vs y {y.shape}")
    if y.size == 0:
        raise ValueError("bce_loss needs at least one element")
    p = np.clip(y_hat.values, CLAMP_LO, CLAMP_HI)
    inside = (y_hat.values > CLAMP_LO) & (y_hat.values < CLAMP_HI)
    n = y.size
    loss = -np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))

    def backward(g):
        if y_hat.requires_grad:
            y_hat.accumulate(g * inside * (p - y) / (p * (1.0 - p) * n))

    return _op(loss, (y_hat,), backward)
