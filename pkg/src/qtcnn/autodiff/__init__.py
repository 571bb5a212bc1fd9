"""Reverse-mode autodiff with parameter-shift quantum nodes."""

from .tensor import (
    BatchNormState,
    Tape,
    Tensor,
    affine,
    batchnorm1d,
    bce_loss,
    concat,
    conv1d,
    dropout,
    global_avg_pool,
    matmul,
    relu,
    reshape,
    sigmoid,
    tanh,
)
from .qnode import ShiftCircuit, param_shift_grad, qconv_circuit, qnn_circuit, quantum_node
from .optim import Adam, AdamW, adamw_step

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
    "param_shift_grad",
    "ShiftCircuit",
    "qconv_circuit",
    "qnn_circuit",
    "quantum_node",
    "adamw_step",
    "AdamW",
    "Adam",
]
