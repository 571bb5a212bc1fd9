"""Checkpoint container: one .npz holding a JSON meta record, every trainable
array under "param:<name>" (order documented by named_parameters), fitted
preprocessing under "pca:*" / "minmax:*", and BatchNorm running statistics
under "state:<name>"."""

from __future__ import annotations

import json

import numpy as np

from ..errors import DataError
from .preprocess import MinMaxMap, PcaModel
from .training import TrainConfig, build_model

__all__ = ["FORMAT_VERSION", "save_checkpoint", "load_checkpoint"]

FORMAT_VERSION = 1


def save_checkpoint(path, model, config: TrainConfig, fingerprint: str) -> None:
    arrays: dict[str, np.ndarray] = {}
    for name, tensor in model.named_parameters():
        arrays[f"param:{name}"] = tensor.values
    pca = getattr(model, "pca", None)
    if pca is not None:
        arrays["pca:mean"] = pca.mean
        arrays["pca:std"] = pca.std
        arrays["pca:components"] = pca.components
        arrays["pca:eigenvalues"] = pca.eigenvalues
    minmax = getattr(model, "minmax", None)
    if minmax is not None:
        arrays["minmax:lo"] = minmax.lo
        arrays["minmax:hi"] = minmax.hi
    if hasattr(model, "named_state"):
        for name, value in model.named_state():
            arrays[f"state:{name}"] = value
    meta = {
        "format_version": FORMAT_VERSION,
        "model": model.kind,
        "n_features": int(model.n_features),
        "config": config.as_dict(),
        "fingerprint": fingerprint,
    }
    with open(path, "wb") as fh:
        np.savez(fh, meta=json.dumps(meta, sort_keys=True), **arrays)


def load_checkpoint(path):
    """Rebuild the model and return (model, meta dict)."""
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("format_version") != FORMAT_VERSION:
            raise DataError(
                f"checkpoint format {meta.get('format_version')!r} not supported "
                f"(expected {FORMAT_VERSION})"
            )
        config = TrainConfig(**meta["config"])
        model = build_model(config, meta["n_features"])
        for name, tensor in model.named_parameters():
            key = f"param:{name}"
            if key not in data:
                raise DataError(f"checkpoint missing array {key!r}")
            saved = data[key]
            if saved.shape != tensor.values.shape:
                raise DataError(
                    f"checkpoint array {key!r} has shape {saved.shape}, "
                    f"expected {tensor.values.shape}"
                )
            tensor.values[...] = saved
        if "pca:mean" in data:
            model.pca = PcaModel(
                mean=data["pca:mean"],
                std=data["pca:std"],
                components=data["pca:components"],
                eigenvalues=data["pca:eigenvalues"],
            )
        if "minmax:lo" in data:
            model.minmax = MinMaxMap(lo=data["minmax:lo"], hi=data["minmax:hi"])
        if hasattr(model, "named_state"):
            for name, value in model.named_state():
                value[...] = data[f"state:{name}"]
    return model, meta
