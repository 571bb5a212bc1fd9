"""Dense state-vector simulator over the gate set {RY, RZ, CNOT}.

Wire 0 is the least significant bit of the basis index.  States are plain
complex128 arrays of length 2**n updated in place, one gate at a time; no
2**n x 2**n matrices are ever formed.  Gate arithmetic lives in a compiled
Cython module when built, with a numpy fallback selected at import (see
`_dispatch`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from . import _dispatch
from ._dispatch import available_backends, use_backend

MAX_QUBITS = 14

__all__ = [
    "MAX_QUBITS",
    "StateVector",
    "GateOp",
    "zero_state",
    "apply_gate",
    "angle_embed",
    "expect_z",
    "fidelity",
    "backend_name",
    "available_backends",
    "use_backend",
]


def backend_name() -> str:
    """Name of the kernel backend currently in use ('compiled' or 'python')."""
    return _dispatch.backend_name


@dataclass
class StateVector:
    """Mutable n-qubit state; amplitudes indexed little-endian by wire."""

    n_qubits: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.amplitudes.real**2 + self.amplitudes.imag**2)))


@dataclass(frozen=True)
class GateOp:
    """One gate: kind 'RY'/'RZ' with a single wire and an angle, or 'CNOT'
    with wires (control, target) and no angle."""

    kind: str
    wires: tuple[int, ...]
    angle: float | None = field(default=None)


def zero_state(n_qubits: int) -> StateVector:
    """|0...0> on n_qubits wires; n_qubits must lie in [1, MAX_QUBITS]."""
    if not isinstance(n_qubits, (int, np.integer)) or isinstance(n_qubits, bool):
        raise ConfigError(f"n_qubits must be an integer, got {n_qubits!r}")
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(int(n_qubits), amps)


def _check_wire(state: StateVector, wire: int, role: str = "wire") -> int:
    w = int(wire)
    if not 0 <= w < state.n_qubits:
        raise ValueError(f"{role} {wire} out of range for {state.n_qubits} qubits")
    return w


def apply_gate(state: StateVector, gate: GateOp) -> None:
    """Apply one gate in place."""
    k = _dispatch.kernels
    if gate.kind == "RY":
        (w,) = gate.wires
        k.apply_ry(state.amplitudes, _check_wire(state, w), float(gate.angle))
    elif gate.kind == "RZ":
        (w,) = gate.wires
        k.apply_rz(state.amplitudes, _check_wire(state, w), float(gate.angle))
    elif gate.kind == "CNOT":
        c, t = gate.wires
        c = _check_wire(state, c, "control")
        t = _check_wire(state, t, "target")
        if c == t:
            raise ValueError("CNOT control and target must differ")
        k.apply_cnot(state.amplitudes, c, t)
    else:
        raise ValueError(f"unknown gate kind {gate.kind!r}")


def angle_embed(state: StateVector, angles: np.ndarray) -> None:
    """Product embedding: RY(angles[w]) on wire w, for every wire."""
    x = np.asarray(angles, dtype=np.float64)
    if x.ndim != 1 or x.size != state.n_qubits:
        raise ValueError(f"expected {state.n_qubits} angles, got shape {x.shape}")
    k = _dispatch.kernels
    for w in range(state.n_qubits):
        k.apply_ry(state.amplitudes, w, float(x[w]))


def expect_z(state: StateVector, wire: int) -> float:
    """<Z> on one wire: P(bit=0) - P(bit=1)."""
    return float(_dispatch.kernels.expect_z(state.amplitudes, _check_wire(state, wire)))


def fidelity(x_i: np.ndarray, x_j: np.ndarray) -> float:
    """|<phi(x_i)|phi(x_j)>|**2 for the RY product embedding.

    Computed by preparing S(x_j)|0> and un-preparing with S(x_i)^dagger; the
    probability of the all-zeros outcome is the fidelity.  For a single qubit
    this reduces to cos((a - b) / 2) ** 2.
    """
    a = np.asarray(x_i, dtype=np.float64)
    b = np.asarray(x_j, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"angle vectors must share one 1-D shape, got {a.shape} and {b.shape}")
    state = zero_state(a.size)
    k = _dispatch.kernels
    for w in range(state.n_qubits):
        k.apply_ry(state.amplitudes, w, float(b[w]))
    for w in range(state.n_qubits):
        k.apply_ry(state.amplitudes, w, -float(a[w]))
    amp0 = state.amplitudes[0]
    return float(amp0.real**2 + amp0.imag**2)
