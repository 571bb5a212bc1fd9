"""Model zoo: temporal encoder, hybrid quantum heads, MLP, momentum baseline.

All trainable state lives in ordered dicts of Tensors so optimizers and
checkpoints see one flat, documented parameter order.  Classical weights are
initialized uniform within +/- sqrt(1/fan_in); quantum angles uniform within
+/- 0.1.
"""

from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from ..circuits import build_qconv_layout
from ..errors import DataError
from .preprocess import MinMaxMap, PcaModel, fit_minmax, fit_pca, require_fitted

__all__ = [
    "TemporalEncoder",
    "temporal_encode",
    "QTCNNModel",
    "QCNNModel",
    "QNNModel",
    "MLPModel",
    "momentum_vol_score",
    "MODEL_KINDS",
]

ENCODER_CHANNELS = 32
ENCODER_KERNEL = 3
HEAD_HIDDEN = (64, 32)
MLP_HIDDEN = (384, 192, 96)


def _uniform(rng: np.random.Generator, shape, fan_in: int) -> Tensor:
    bound = np.sqrt(1.0 / fan_in)
    return Tensor(rng.uniform(-bound, bound, shape), requires_grad=True)


class TemporalEncoder:
    """conv1d(F->32) / ReLU / conv1d(32->32) / ReLU / time-mean / affine to
    n_qubits / tanh scaled by pi, so outputs are angles in [-pi, pi]."""

    def __init__(self, n_features: int, n_qubits: int, rng: np.random.Generator):
        k, c = ENCODER_KERNEL, ENCODER_CHANNELS
        self.n_features = n_features
        self.n_qubits = n_qubits
        self.params: dict[str, Tensor] = {
            "conv1_w": _uniform(rng, (k, n_features, c), k * n_features),
            "conv1_b": _uniform(rng, (c,), k * n_features),
            "conv2_w": _uniform(rng, (k, c, c), k * c),
            "conv2_b": _uniform(rng, (c,), k * c),
            "proj_w": _uniform(rng, (c, n_qubits), c),
            "proj_b": _uniform(rng, (n_qubits,), c),
        }

    def encode(self, x_seq: Tensor) -> Tensor:
        p = self.params
        h = ad.relu(ad.conv1d(x_seq, p["conv1_w"], p["conv1_b"]))
        h = ad.relu(ad.conv1d(h, p["conv2_w"], p["conv2_b"]))
        h = ad.global_avg_pool(h)
        return ad.tanh(ad.affine(h, p["proj_w"], p["proj_b"])) * np.pi


def temporal_encode(x_seq, params: TemporalEncoder) -> Tensor:
    """Encode a (T, F) window into n_qubits embedding angles."""
    x = x_seq if isinstance(x_seq, Tensor) else Tensor(x_seq)
    return params.encode(x)


class _Head:
    """Dense head with ReLU hidden layers and a sigmoid output."""

    def __init__(self, n_in: int, rng: np.random.Generator, hidden=HEAD_HIDDEN):
        dims = [n_in, *hidden, 1]
        self.params: dict[str, Tensor] = {}
        for i, (a, b) in enumerate(zip(dims[:-1], dims[1:]), start=1):
            self.params[f"w{i}"] = _uniform(rng, (a, b), a)
            self.params[f"b{i}"] = _uniform(rng, (b,), a)

    def __call__(self, h: Tensor) -> Tensor:
        n_layers = len(self.params) // 2
        for i in range(1, n_layers + 1):
            h = ad.affine(h, self.params[f"w{i}"], self.params[f"b{i}"])
            if i < n_layers:
                h = ad.relu(h)
        return ad.sigmoid(h)


class QTCNNModel:
    """Temporal encoder feeding a parameter-shared conv circuit; the head sees
    the circuit readout concatenated with the encoder angles."""

    kind = "qtcnn"
    takes_sequences = True

    def __init__(self, n_features: int, n_qubits: int, depth: int, rng: np.random.Generator):
        self.n_features = n_features
        self.layout = build_qconv_layout(n_qubits, depth, shared=True)
        self.circuit = ad.qconv_circuit(self.layout)
        self.encoder = TemporalEncoder(n_features, n_qubits, rng)
        self.qparams = Tensor(rng.uniform(-0.1, 0.1, self.layout.n_params), requires_grad=True)
        self.head = _Head(n_qubits + 1, rng)

    def forward_sample(self, seq: np.ndarray) -> Tensor:
        z = temporal_encode(seq, self.encoder)
        q = ad.quantum_node(z, self.qparams, self.circuit)
        return self.head(ad.concat([q, z]))

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        out = [(f"encoder.{k}", v) for k, v in self.encoder.params.items()]
        out.append(("qparams", self.qparams))
        out += [(f"head.{k}", v) for k, v in self.head.params.items()]
        return out


class QCNNModel:
    """PCA angles into an unshared conv circuit, same head shape as QTCNN."""

    kind = "qcnn"
    takes_sequences = False

    def __init__(self, n_features: int, n_qubits: int, depth: int, rng: np.random.Generator):
        self.n_features = n_features
        self.n_qubits = n_qubits
        self.layout = build_qconv_layout(n_qubits, depth, shared=False)
        self.circuit = ad.qconv_circuit(self.layout)
        self.qparams = Tensor(rng.uniform(-0.1, 0.1, self.layout.n_params), requires_grad=True)
        self.head = _Head(n_qubits + 1, rng)
        self.pca: PcaModel | None = None

    def fit_preprocess(self, X_train: np.ndarray) -> None:
        self.pca = fit_pca(X_train, self.n_qubits)

    def forward_sample(self, x_flat: np.ndarray) -> Tensor:
        pca = require_fitted(self.pca, "PCA")
        z = Tensor(pca.transform(x_flat))
        q = ad.quantum_node(z, self.qparams, self.circuit)
        return self.head(ad.concat([q, z]))

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        out = [("qparams", self.qparams)]
        out += [(f"head.{k}", v) for k, v in self.head.params.items()]
        return out


class QNNModel:
    """PCA then min-max to [0, pi], ring ansatz, linear readout of all <Z>."""

    kind = "qnn"
    takes_sequences = False

    def __init__(self, n_features: int, n_qubits: int, n_layers: int, rng: np.random.Generator):
        self.n_features = n_features
        self.n_qubits = n_qubits
        self.n_layers = n_layers
        self.circuit = ad.qnn_circuit(n_qubits, n_layers)
        self.thetas = Tensor(rng.uniform(-0.1, 0.1, n_layers * n_qubits), requires_grad=True)
        self.w = _uniform(rng, (n_qubits,), n_qubits)
        self.b = _uniform(rng, (1,), n_qubits)
        self.pca: PcaModel | None = None
        self.minmax: MinMaxMap | None = None

    def fit_preprocess(self, X_train: np.ndarray) -> None:
        self.pca = fit_pca(X_train, self.n_qubits)
        self.minmax = fit_minmax(self.pca.transform_batch(X_train))

    def forward_sample(self, x_flat: np.ndarray) -> Tensor:
        pca = require_fitted(self.pca, "PCA")
        minmax = require_fitted(self.minmax, "min-max map")
        phi = Tensor(minmax.apply(pca.transform(x_flat)))
        expectations = ad.quantum_node(phi, self.thetas, self.circuit)
        logit = ad.reshape(ad.matmul(expectations, self.w), (1,)) + self.b
        return ad.sigmoid(logit)

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        return [("thetas", self.thetas), ("w", self.w), ("b", self.b)]


class MLPModel:
    """Batched dense classifier: three affine/BN/ReLU/dropout blocks then a
    sigmoid output."""

    kind = "mlp"
    takes_sequences = False

    def __init__(self, n_features: int, dropout: float, rng: np.random.Generator):
        self.n_features = n_features
        self.dropout = dropout
        dims = [n_features, *MLP_HIDDEN]
        self.params: dict[str, Tensor] = {}
        self.bn_states: dict[str, ad.BatchNormState] = {}
        for i, (a, b) in enumerate(zip(dims[:-1], dims[1:]), start=1):
            self.params[f"w{i}"] = _uniform(rng, (a, b), a)
            self.params[f"b{i}"] = _uniform(rng, (b,), a)
            self.params[f"gamma{i}"] = Tensor(np.ones(b), requires_grad=True)
            self.params[f"beta{i}"] = Tensor(np.zeros(b), requires_grad=True)
            self.bn_states[f"bn{i}"] = ad.BatchNormState(b)
        self.params["w_out"] = _uniform(rng, (MLP_HIDDEN[-1], 1), MLP_HIDDEN[-1])
        self.params["b_out"] = _uniform(rng, (1,), MLP_HIDDEN[-1])

    def forward_batch(self, X: np.ndarray, training: bool,
                      rng: np.random.Generator | None = None) -> Tensor:
        p = self.params
        h = Tensor(np.atleast_2d(np.asarray(X, dtype=np.float64)))
        for i in range(1, len(MLP_HIDDEN) + 1):
            h = ad.affine(h, p[f"w{i}"], p[f"b{i}"])
            h = ad.batchnorm1d(h, p[f"gamma{i}"], p[f"beta{i}"], self.bn_states[f"bn{i}"], training)
            h = ad.relu(h)
            if training:
                h = ad.dropout(h, self.dropout, rng, training)
        return ad.sigmoid(ad.affine(h, p["w_out"], p["b_out"]))

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        return list(self.params.items())

    def named_state(self) -> list[tuple[str, np.ndarray]]:
        out = []
        for name, st in self.bn_states.items():
            out.append((f"{name}.running_mean", st.running_mean))
            out.append((f"{name}.running_var", st.running_var))
        return out


def momentum_vol_score(mom5, mom20, vol20) -> np.ndarray:
    """Parameter-free score: equal-weight momentum scaled by recent volatility."""
    mom5 = np.asarray(mom5, dtype=np.float64)
    mom20 = np.asarray(mom20, dtype=np.float64)
    vol20 = np.asarray(vol20, dtype=np.float64)
    if np.any(vol20 < 0):
        raise DataError("vol20 must be non-negative; pass raw (pre-normalization) values")
    return (0.5 * mom5 + 0.5 * mom20) / (vol20 + 1e-9)


MODEL_KINDS = ("qtcnn", "qcnn", "qnn", "mlp", "baseline")
