"""Fitted feature maps: PCA projection and min-max angle scaling.

Both are fitted on training rows only and applied unchanged elsewhere; the
quantum models use them to squeeze the feature vector down to one angle per
wire.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError, NotFittedError

__all__ = ["PcaModel", "fit_pca", "MinMaxMap", "fit_minmax"]


@dataclass
class PcaModel:
    """Standardize-then-project map; `components` rows are orthonormal."""

    mean: np.ndarray
    std: np.ndarray
    components: np.ndarray  # (n_components, d)
    eigenvalues: np.ndarray  # descending, all d of them

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return self.components @ ((x - self.mean) / self.std)

    def transform_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return ((X - self.mean) / self.std) @ self.components.T


def fit_pca(X: np.ndarray, n_components: int) -> PcaModel:
    """Eigendecomposition of the standardized covariance matrix.

    Eigenvalues are sorted descending and each eigenvector's largest-magnitude
    entry is made positive so the decomposition is reproducible.  Zero-variance
    columns standardize with std 1.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected 2-D data, got shape {X.shape}")
    n, d = X.shape
    if not 1 <= n_components <= d:
        raise ValueError(f"n_components must be in [1, {d}], got {n_components}")
    if n <= n_components:
        raise DataError(f"need more than {n_components} rows to fit PCA, got {n}")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std == 0, 1.0, std)
    Z = (X - mean) / std
    cov = (Z.T @ Z) / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    for j in range(d):
        peak = np.argmax(np.abs(eigvecs[:, j]))
        if eigvecs[peak, j] < 0:
            eigvecs[:, j] = -eigvecs[:, j]
    return PcaModel(mean=mean, std=std, components=eigvecs[:, :n_components].T.copy(),
                    eigenvalues=eigvals)


@dataclass
class MinMaxMap:
    """Per-feature linear map onto [0, pi]; out-of-range inputs are clamped
    and constant features land on pi/2."""

    lo: np.ndarray
    hi: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        span = self.hi - self.lo
        with np.errstate(invalid="ignore", divide="ignore"):
            scaled = np.pi * (x - self.lo) / span
        scaled = np.where(span > 0, scaled, np.pi / 2)
        return np.clip(scaled, 0.0, np.pi)


def fit_minmax(X: np.ndarray) -> MinMaxMap:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError(f"need a non-empty 2-D matrix to fit min-max, got shape {X.shape}")
    return MinMaxMap(lo=X.min(axis=0), hi=X.max(axis=0))


def require_fitted(obj, name: str):
    if obj is None:
        raise NotFittedError(f"{name} must be fitted before use")
    return obj
