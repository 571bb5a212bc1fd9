"""Parameter-shift differentiation and the quantum/classical graph bridge.

The two-point rule 0.5 * (f(t + pi/2) - f(t - pi/2)) is exact when the shifted
angle parameterizes a single RY/RZ gate.  Layouts with intra-layer sharing
reuse one trainable angle across several gates, so `quantum_node` shifts each
gate occurrence separately and sums the contributions into the shared slot;
shifting the shared angle everywhere at once would not match the true
derivative.  Embedding inputs each feed exactly one RY, so plain per-input
shifts give exact input gradients and the classical encoder trains end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..circuits import AnsatzParams, QConvLayout, eval_qconv_occ, eval_qnn, occ_index_map
from .tensor import Tensor, _op

__all__ = ["param_shift_grad", "ShiftCircuit", "qconv_circuit", "qnn_circuit", "quantum_node"]

_HALF_PI = np.pi / 2


def param_shift_grad(circuit_eval: Callable[[np.ndarray], float], angles: np.ndarray, index: int) -> float:
    """Two-point shift derivative of a scalar circuit w.r.t. angles[index].

    Exact only when angles[index] appears in exactly one gate inside
    circuit_eval (see module docstring).
    """
    angles = np.asarray(angles, dtype=np.float64)
    if not 0 <= index < angles.size:
        raise ValueError(f"index {index} out of range for {angles.size} angles")
    up = angles.copy()
    up[index] += _HALF_PI
    dn = angles.copy()
    dn[index] -= _HALF_PI
    return 0.5 * (circuit_eval(up) - circuit_eval(dn))


@dataclass(frozen=True)
class ShiftCircuit:
    """A circuit in occurrence-angle form, ready for shift-rule gradients.

    eval_fn(inputs, occ_angles) returns a 1-D output vector; occ_to_param maps
    each occurrence slot to its trainable-parameter index.
    """

    eval_fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    n_inputs: int
    n_params: int
    occ_to_param: np.ndarray
    n_outputs: int


def qconv_circuit(layout: QConvLayout) -> ShiftCircuit:
    """Pooled convolution stack as a single-output ShiftCircuit."""

    def eval_fn(z, occ):
        return np.array([eval_qconv_occ(z, layout, occ)])

    return ShiftCircuit(
        eval_fn=eval_fn,
        n_inputs=layout.n_qubits,
        n_params=layout.n_params,
        occ_to_param=occ_index_map(layout),
        n_outputs=1,
    )


def qnn_circuit(n_qubits: int, n_layers: int) -> ShiftCircuit:
    """Ring ansatz as a ShiftCircuit; every angle is used exactly once."""
    n_angles = n_layers * n_qubits

    def eval_fn(phi, occ):
        return eval_qnn(phi, AnsatzParams(occ.reshape(n_layers, n_qubits)))

    return ShiftCircuit(
        eval_fn=eval_fn,
        n_inputs=n_qubits,
        n_params=n_angles,
        occ_to_param=np.arange(n_angles, dtype=np.intp),
        n_outputs=n_qubits,
    )


def quantum_node(z: Tensor, params: Tensor, circuit: ShiftCircuit) -> Tensor:
    """Evaluate the circuit inside the tape, with shift-rule gradients for
    both the embedding inputs and the trainable angles."""
    zv = np.asarray(z.values, dtype=np.float64)
    pv = np.asarray(params.values, dtype=np.float64)
    if zv.shape != (circuit.n_inputs,):
        raise ValueError(f"circuit takes {circuit.n_inputs} inputs, got shape {zv.shape}")
    if pv.shape != (circuit.n_params,):
        raise ValueError(f"circuit takes {circuit.n_params} parameters, got shape {pv.shape}")
    occ = pv[circuit.occ_to_param]
    out = circuit.eval_fn(zv, occ)

    def backward(g):
        if z.requires_grad:
            gz = np.empty(circuit.n_inputs)
            for i in range(circuit.n_inputs):
                up = zv.copy()
                up[i] += _HALF_PI
                dn = zv.copy()
                dn[i] -= _HALF_PI
                diff = 0.5 * (circuit.eval_fn(up, occ) - circuit.eval_fn(dn, occ))
                gz[i] = diff @ g
            z.accumulate(gz)
        if params.requires_grad:
            gp = np.zeros(circuit.n_params)
            for o in range(occ.size):
                up = occ.copy()
                up[o] += _HALF_PI
                dn = occ.copy()
                dn[o] -= _HALF_PI
                diff = 0.5 * (circuit.eval_fn(zv, up) - circuit.eval_fn(zv, dn))
                gp[circuit.occ_to_param[o]] += diff @ g
            params.accumulate(gp)

    return _op(out, (z, params), backward)
