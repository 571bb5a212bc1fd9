"""Pure-numpy gate kernels.

Each function mutates a 1-D complex128 amplitude array in place.  Basis index
convention: wire w is bit w of the index (wire 0 = least significant bit), so
the pair partner of index i under wire w is i ^ (1 << w).  The reshape used
below groups the array as (high bits, wire bit, low bits).
"""

from __future__ import annotations

import math

import numpy as np


def apply_ry(amps: np.ndarray, wire: int, theta: float) -> None:
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    v = amps.reshape(-1, 2, 1 << wire)
    a0 = v[:, 0, :].copy()
    v[:, 0, :] = c * a0 - s * v[:, 1, :]
    v[:, 1, :] = s * a0 + c * v[:, 1, :]


def apply_rz(amps: np.ndarray, wire: int, theta: float) -> None:
    phase = complex(math.cos(0.5 * theta), math.sin(0.5 * theta))
    v = amps.reshape(-1, 2, 1 << wire)
    v[:, 0, :] *= phase.conjugate()
    v[:, 1, :] *= phase


def apply_cnot(amps: np.ndarray, control: int, target: int) -> None:
    n = amps.size.bit_length() - 1
    psi = amps.reshape([2] * n)
    # numpy axis 0 is the most significant bit, so wire w lives on axis n-1-w
    axis_c = n - 1 - control
    axis_t = n - 1 - target
    index = [slice(None)] * n
    index[axis_c] = 1
    sub = psi[tuple(index)]
    # integer indexing removed one axis; shift the target axis if it came later
    axis_t_sub = axis_t - 1 if axis_t > axis_c else axis_t
    sub[...] = np.take(sub, [1, 0], axis=axis_t_sub)


def expect_z(amps: np.ndarray, wire: int) -> float:
    probs = amps.real**2 + amps.imag**2
    v = probs.reshape(-1, 2, 1 << wire)
    return float(v[:, 0, :].sum() - v[:, 1, :].sum())
