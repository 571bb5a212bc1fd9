"""Model zoo, preprocessing maps, training, and checkpoints."""

from .preprocess import MinMaxMap, PcaModel, fit_minmax, fit_pca
from .networks import (
    MLPModel,
    MODEL_KINDS,
    QCNNModel,
    QNNModel,
    QTCNNModel,
    TemporalEncoder,
    momentum_vol_score,
    temporal_encode,
)
from .training import MODEL_DEFAULTS, TrainConfig, build_model, predict_scores, train
from .checkpoint import FORMAT_VERSION, load_checkpoint, save_checkpoint

__all__ = [
    "PcaModel",
    "fit_pca",
    "MinMaxMap",
    "fit_minmax",
    "TemporalEncoder",
    "temporal_encode",
    "QTCNNModel",
    "QCNNModel",
    "QNNModel",
    "MLPModel",
    "momentum_vol_score",
    "MODEL_KINDS",
    "MODEL_DEFAULTS",
    "TrainConfig",
    "build_model",
    "train",
    "predict_scores",
    "FORMAT_VERSION",
    "save_checkpoint",
    "load_checkpoint",
]
