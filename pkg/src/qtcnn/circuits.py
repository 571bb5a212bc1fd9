"""Circuit families built on the simulator: pooled two-qubit convolutions,
a hardware-efficient ring ansatz, and the fidelity Gram matrix.

Flat parameter order is layer-major, pair-major, angle-minor everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from . import qsim
from .qsim import StateVector, angle_embed, expect_z, fidelity, zero_state
from .qsim import _dispatch

__all__ = [
    "ConvUnitParams",
    "QConvLayout",
    "AnsatzParams",
    "apply_conv_unit",
    "effective_depth",
    "build_qconv_layout",
    "eval_qconv",
    "eval_qconv_occ",
    "occ_index_map",
    "eval_qnn",
    "kernel_gram",
]


@dataclass(frozen=True)
class ConvUnitParams:
    """Six angles for one two-qubit convolution unit."""

    theta: tuple[float, float, float, float, float, float]

    def __post_init__(self):
        if len(self.theta) != 6:
            raise ValueError(f"conv unit takes 6 angles, got {len(self.theta)}")


def apply_conv_unit(state: StateVector, pair: tuple[int, int], params) -> None:
    """One convolution unit on wires (i, j).

    Gate order: RY(t1) on i, RZ(t2) on j; CNOT(j->i); RY(t3) on i, RZ(t4)
    on j; CNOT(i->j); RY(t5) on i, RZ(t6) on j.  With all angles zero this
    reduces to CNOT(j->i) CNOT(i->j), so |01> maps to |11>.
    """
    t = params.theta if isinstance(params, ConvUnitParams) else params
    if len(t) != 6:
        raise ValueError(f"conv unit takes 6 angles, got {len(t)}")
    i, j = pair
    if i == j:
        raise ValueError("conv unit wires must differ")
    k = _dispatch.kernels
    amps = state.amplitudes
    k.apply_ry(amps, i, float(t[0]))
    k.apply_rz(amps, j, float(t[1]))
    k.apply_cnot(amps, j, i)
    k.apply_ry(amps, i, float(t[2]))
    k.apply_rz(amps, j, float(t[3]))
    k.apply_cnot(amps, i, j)
    k.apply_ry(amps, i, float(t[4]))
    k.apply_rz(amps, j, float(t[5]))


def effective_depth(depth: int, n_qubits: int) -> int:
    """Number of conv+pool layers actually applied: min(depth, log2(n_qubits))."""
    if depth < 0:
        raise ConfigError(f"depth must be non-negative, got {depth}")
    full = int(n_qubits).bit_length() - 1
    return min(int(depth), full)


@dataclass(frozen=True)
class QConvLayout:
    """Wire schedule for a pooled convolution stack.

    kept_wires has effective_depth + 1 entries: the wires alive entering each
    layer, then the wires surviving the final pooling.  Pooling keeps the
    even-position wires of the previous list; abandoned wires are simply no
    longer operated on.  pairs[l] lists the non-overlapping (i, j) conv pairs
    of layer l.
    """

    n_qubits: int
    depth: int
    effective_depth: int
    shared: bool
    kept_wires: tuple[tuple[int, ...], ...]
    pairs: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def n_params(self) -> int:
        if self.shared:
            return 6 * self.effective_depth
        return 6 * sum(len(layer) for layer in self.pairs)


def build_qconv_layout(n_qubits: int, depth: int, shared: bool) -> QConvLayout:
    """Construct the pooling schedule; n_qubits must be a power of two."""
    n = int(n_qubits)
    if not 1 <= n <= qsim.MAX_QUBITS or n & (n - 1):
        raise ConfigError(f"n_qubits must be a power of two in [1, {qsim.MAX_QUBITS}], got {n_qubits}")
    l_eff = effective_depth(depth, n)
    kept = [tuple(range(n))]
    pairs = []
    for _ in range(l_eff):
        wires = kept[-1]
        pairs.append(tuple((wires[2 * m], wires[2 * m + 1]) for m in range(len(wires) // 2)))
        kept.append(wires[::2])
    return QConvLayout(
        n_qubits=n,
        depth=int(depth),
        effective_depth=l_eff,
        shared=bool(shared),
        kept_wires=tuple(kept),
        pairs=tuple(pairs),
    )


def occ_index_map(layout: QConvLayout) -> np.ndarray:
    """Map each angle occurrence (6 per pair, layer-major) to its index in the
    flat trainable parameter vector.  Identity when nothing is shared."""
    idx = []
    pair_counter = 0
    for l, layer_pairs in enumerate(layout.pairs):
        for _ in layer_pairs:
            base = 6 * l if layout.shared else 6 * pair_counter
            idx.extend(base + t for t in range(6))
            pair_counter += 1
    return np.asarray(idx, dtype=np.intp)


def eval_qconv_occ(z: np.ndarray, layout: QConvLayout, occ_params: np.ndarray) -> float:
    """Evaluate with one independent angle per gate occurrence."""
    z = np.asarray(z, dtype=np.float64)
    occ = np.asarray(occ_params, dtype=np.float64)
    n_occ = 6 * sum(len(p) for p in layout.pairs)
    if occ.shape != (n_occ,):
        raise ValueError(f"expected {n_occ} occurrence angles, got shape {occ.shape}")
    state = zero_state(layout.n_qubits)
    angle_embed(state, z)
    off = 0
    for layer_pairs in layout.pairs:
        for pair in layer_pairs:
            apply_conv_unit(state, pair, occ[off : off + 6])
            off += 6
    return expect_z(state, layout.kept_wires[-1][0])


def eval_qconv(z: np.ndarray, layout: QConvLayout, params: np.ndarray) -> float:
    """<Z> on the final retained wire after embedding z and running the stack."""
    p = np.asarray(params, dtype=np.float64)
    if p.shape != (layout.n_params,):
        raise ValueError(f"layout takes {layout.n_params} parameters, got shape {p.shape}")
    return eval_qconv_occ(z, layout, p[occ_index_map(layout)])


@dataclass(frozen=True)
class AnsatzParams:
    """Rotation angles for the ring ansatz, shape (n_layers, n_qubits)."""

    thetas: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.thetas, dtype=np.float64)
        if t.ndim != 2:
            raise ValueError(f"thetas must be 2-D (layers, qubits), got shape {t.shape}")
        object.__setattr__(self, "thetas", t)


def eval_qnn(phi: np.ndarray, params: AnsatzParams) -> np.ndarray:
    """Angle-embed phi, run RY layers with ring entanglement, read all <Z>.

    Each layer rotates every wire by its own angle, then applies
    CNOT(j -> j+1) for j = 0..n-2 followed by CNOT(n-1 -> 0).
    """
    phi = np.asarray(phi, dtype=np.float64)
    n = phi.size
    if params.thetas.shape[1] != n:
        raise ValueError(
            f"ansatz is over {params.thetas.shape[1]} qubits but phi has {n} angles"
        )
    state = zero_state(n)
    angle_embed(state, phi)
    k = _dispatch.kernels
    for layer in params.thetas:
        for w in range(n):
            k.apply_ry(state.amplitudes, w, float(layer[w]))
        if n > 1:
            for w in range(n - 1):
                k.apply_cnot(state.amplitudes, w, w + 1)
            k.apply_cnot(state.amplitudes, n - 1, 0)
    return np.array([expect_z(state, w) for w in range(n)])


def kernel_gram(X: np.ndarray) -> np.ndarray:
    """Pairwise embedding fidelities |<phi(x_i)|phi(x_j)>|**2, mirrored so the
    result is exactly symmetric."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError(f"expected a non-empty 2-D angle matrix, got shape {X.shape}")
    m = X.shape[0]
    gram = np.empty((m, m), dtype=np.float64)
    for i in range(m):
        for j in range(i + 1):
            gram[i, j] = gram[j, i] = fidelity(X[i], X[j])
    return gram
