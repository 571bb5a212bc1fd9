"""Adam and AdamW on lists of parameter arrays.

AdamW applies decoupled weight decay (params *= 1 - lr * wd) before the
bias-corrected Adam update; plain Adam is the weight_decay=0 case.
"""

from __future__ import annotations

import numpy as np

from .tensor import Tensor

__all__ = ["adamw_step", "AdamW", "Adam"]


def adamw_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: dict,
    lr: float = 1e-3,
    betas: tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
    weight_decay: float = 1e-2,
) -> tuple[list[np.ndarray], dict]:
    """One optimizer step, in place; returns (params, state) for chaining.

    state is {} on the first call and carries first/second moment estimates
    plus the step counter afterwards.
    """
    if len(params) != len(grads):
        raise ValueError(f"{len(params)} params but {len(grads)} grads")
    if not state:
        state["t"] = 0
        state["m"] = [np.zeros_like(p) for p in params]
        state["v"] = [np.zeros_like(p) for p in params]
    state["t"] += 1
    t = state["t"]
    b1, b2 = betas
    bias1 = 1.0 - b1**t
    bias2 = 1.0 - b2**t
    for p, g, m, v in zip(params, grads, state["m"], state["v"]):
        if weight_decay:
            p *= 1.0 - lr * weight_decay
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= lr * (m / bias1) / (np.sqrt(v / bias2) + eps)
    return params, state


class AdamW:
    """Optimizer over Tensor leaves; missing grads count as zero."""

    weight_decay_default = 1e-2

    def __init__(self, tensors: list[Tensor], lr: float = 1e-3,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8,
                 weight_decay: float | None = None):
        self.tensors = list(tensors)
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.weight_decay = self.weight_decay_default if weight_decay is None else weight_decay
        self.state: dict = {}

    def step(self) -> None:
        grads = [
            t.grad if t.grad is not None else np.zeros_like(t.values) for t in self.tensors
        ]
        adamw_step(
            [t.values for t in self.tensors],
            grads,
            self.state,
            lr=self.lr,
            betas=self.betas,
            eps=self.eps,
            weight_decay=self.weight_decay,
        )

    def zero_grad(self) -> None:
        for t in self.tensors:
            t.zero_grad()


class Adam(AdamW):
    """AdamW without the decoupled decay term."""

    weight_decay_default = 0.0
