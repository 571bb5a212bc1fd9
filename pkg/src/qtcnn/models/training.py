"""Mini-batch training and scoring.

QTCNN/QCNN/QNN run per-sample forward/backward tapes and accumulate gradients
across a batch (each tape contributes 1/batch of the seed); the MLP trains on
whole-batch tensors because BatchNorm needs batch statistics.  All randomness
(init, shuffling, dropout) comes from named streams off config.seed, so runs
are bit-reproducible.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ..autodiff import Adam, AdamW, bce_loss
from ..errors import ConfigError, DataError
from ..seeding import stage_rng
from .networks import MLPModel, QCNNModel, QNNModel, QTCNNModel

log = logging.getLogger(__name__)

__all__ = ["TrainConfig", "MODEL_DEFAULTS", "build_model", "train", "predict_scores"]

MODEL_DEFAULTS = {
    "qtcnn": {"batch_size": 128, "lr": 1e-3, "optimizer": "adamw"},
    "qcnn": {"batch_size": 128, "lr": 1e-3, "optimizer": "adamw"},
    "qnn": {"batch_size": 512, "lr": 2e-3, "optimizer": "adam"},
    "mlp": {"batch_size": 128, "lr": 1e-3, "optimizer": "adamw"},
}


@dataclass
class TrainConfig:
    model: str
    n_qubits: int = 8
    depth: int = 3
    qnn_layers: int = 2
    epochs: int = 50
    batch_size: int | None = None
    lr: float | None = None
    weight_decay: float = 1e-2
    dropout: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODEL_DEFAULTS:
            raise ConfigError(
                f"unknown trainable model {self.model!r}; supported: {sorted(MODEL_DEFAULTS)}"
            )
        defaults = MODEL_DEFAULTS[self.model]
        if self.batch_size is None:
            self.batch_size = defaults["batch_size"]
        if self.lr is None:
            self.lr = defaults["lr"]
        if self.epochs < 0:
            raise ConfigError(f"epochs must be non-negative, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be positive, got {self.batch_size}")

    @property
    def optimizer(self) -> str:
        return MODEL_DEFAULTS[self.model]["optimizer"]

    def as_dict(self) -> dict:
        return asdict(self)


def build_model(config: TrainConfig, n_features: int):
    rng = stage_rng(config.seed, f"init:{config.model}")
    if config.model == "qtcnn":
        return QTCNNModel(n_features, config.n_qubits, config.depth, rng)
    if config.model == "qcnn":
        return QCNNModel(n_features, config.n_qubits, config.depth, rng)
    if config.model == "qnn":
        return QNNModel(n_features, config.n_qubits, config.qnn_layers, rng)
    return MLPModel(n_features, config.dropout, rng)


def _sample_input(model, samples, row: int) -> np.ndarray:
    return samples.sequences[row] if model.takes_sequences else samples.flat[row]


def train(samples, config: TrainConfig):
    """Fit one model on a labeled SampleSet; returns (model, loss_curve)."""
    labels = np.asarray(samples.labels, dtype=np.float64)
    n = labels.size
    if n == 0:
        raise DataError("no training samples")
    classes = np.unique(labels)
    if not np.all(np.isin(classes, [0.0, 1.0])):
        raise DataError(f"labels must be 0/1, found values {classes}")
    if classes.size < 2:
        raise DataError("training needs both classes present, found a single class")

    model = build_model(config, samples.flat.shape[1])
    if hasattr(model, "fit_preprocess"):
        model.fit_preprocess(samples.flat)

    tensors = [t for _, t in model.named_parameters()]
    opt_cls = AdamW if config.optimizer == "adamw" else Adam
    kwargs = {"weight_decay": config.weight_decay} if config.optimizer == "adamw" else {}
    opt = opt_cls(tensors, lr=config.lr, **kwargs)

    shuffle_rng = stage_rng(config.seed, "shuffle")
    dropout_rng = stage_rng(config.seed, "dropout")
    loss_curve: list[float] = []
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            opt.zero_grad()
            if isinstance(model, MLPModel):
                probs = model.forward_batch(samples.flat[batch], training=True, rng=dropout_rng)
                loss = bce_loss(probs, labels[batch].reshape(-1, 1))
                loss.backward()
                epoch_loss += float(loss.values) * batch.size
            else:
                inv = 1.0 / batch.size
                for row in batch:
                    prob = model.forward_sample(_sample_input(model, samples, row))
                    loss = bce_loss(prob, labels[row : row + 1])
                    loss.backward(np.float64(inv))
                    epoch_loss += float(loss.values)
            opt.step()
        loss_curve.append(epoch_loss / n)
        log.info("epoch %d/%d: mean bce %.6f", epoch + 1, config.epochs, loss_curve[-1])
    return model, loss_curve


def predict_scores(model, samples, workers: int = 1) -> np.ndarray:
    """Evaluation-mode probability per row, in row order."""
    n = samples.flat.shape[0]
    if isinstance(model, MLPModel):
        if n == 0:
            return np.zeros(0)
        return model.forward_batch(samples.flat, training=False).values[:, 0].copy()

    def score(row: int) -> float:
        return float(model.forward_sample(_sample_input(model, samples, row)).values[0])

    if workers > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return np.fromiter(pool.map(score, range(n)), dtype=np.float64, count=n)
    return np.fromiter((score(i) for i in range(n)), dtype=np.float64, count=n)
