"""Predictor centering and scaling applied before every regression fit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted


@dataclass
class PredictorMatrix:
    """A named design matrix with the standardization applied to it.

    means/sds are None until :func:`standardize` has run; afterwards they
    hold the fitting-set statistics so the same affine map can be applied
    to new data.
    """

    names: tuple[str, ...]
    values: np.ndarray
    means: np.ndarray | None = None
    sds: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("values must be 2-dimensional")
        if self.values.shape[1] != len(self.names):
            raise ValueError(
                f"{len(self.names)} names for {self.values.shape[1]} columns"
            )

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]


class PredictorScaler(BaseEstimator, TransformerMixin):
    """Center and scale columns to mean 0, sd 1 (population sd, divide by n).

    Unlike sklearn's StandardScaler this refuses constant columns by name
    instead of silently passing them through: a constant predictor is a
    specification error here.
    """

    def fit(self, X, y=None, feature_names=None):
        X = check_array(X, ensure_2d=True, dtype=float)
        self.n_features_in_ = X.shape[1]
        if feature_names is None:
            feature_names = tuple(f"x{i}" for i in range(X.shape[1]))
        self.feature_names_ = tuple(feature_names)
        self.means_ = X.mean(axis=0)
        self.sds_ = X.std(axis=0)  # ddof=0
        constant = np.flatnonzero(self.sds_ == 0.0)
        if constant.size:
            names = [self.feature_names_[i] for i in constant]
            raise ValueError(f"constant predictor column(s): {names}")
        return self

    def transform(self, X):
        check_is_fitted(self, "means_")
        X = check_array(X, ensure_2d=True, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} columns, got {X.shape[1]}"
            )
        return (X - self.means_) / self.sds_

    def inverse_transform(self, X):
        check_is_fitted(self, "means_")
        X = check_array(X, ensure_2d=True, dtype=float)
        return X * self.sds_ + self.means_


def standardize(matrix: PredictorMatrix) -> PredictorMatrix:
    """Standardize a PredictorMatrix, recording the means/sds used."""
    scaler = PredictorScaler().fit(matrix.values, feature_names=matrix.names)
    return PredictorMatrix(
        names=matrix.names,
        values=scaler.transform(matrix.values),
        means=scaler.means_.copy(),
        sds=scaler.sds_.copy(),
    )


def apply_standardization(matrix: PredictorMatrix, new_values: np.ndarray) -> np.ndarray:
    """Apply a fitted matrix's centering/scaling to new rows."""
    if matrix.means is None or matrix.sds is None:
        raise ValueError("matrix has not been standardized")
    return (np.asarray(new_values, dtype=float) - matrix.means) / matrix.sds
