"""Standardize -> min-max -> optional PCA, with fit/transform separation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ContractError, DegenerateInputError

# cumulative ratios are compared with a small slack so that e.g. an exact 0.95
# is not rejected because of the last ulp of a sum
_RATIO_SLACK = 1e-12


@dataclass
class ScalerModel:
    means: np.ndarray
    stds: np.ndarray
    mins: np.ndarray
    maxs: np.ndarray

    @property
    def n_features(self) -> int:
        return self.means.shape[0]

    @property
    def constant(self) -> np.ndarray:
        """Columns that carry no spread after standardization."""
        return (self.stds == 0) | (self.maxs <= self.mins)

    def to_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in ("means", "stds", "mins", "maxs")}

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerModel":
        return cls(*(np.asarray(d[k], dtype=np.float64) for k in ("means", "stds", "mins", "maxs")))


@dataclass
class PcaModel:
    means: np.ndarray
    components: np.ndarray  # (k, d), orthonormal rows
    explained_variance_ratios: np.ndarray
    variance_target: float = 0.95

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def to_dict(self) -> dict:
        return {
            "means": self.means.tolist(),
            "components": self.components.tolist(),
            "explained_variance_ratios": self.explained_variance_ratios.tolist(),
            "variance_target": self.variance_target,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PcaModel":
        return cls(
            np.asarray(d["means"], dtype=np.float64),
            np.asarray(d["components"], dtype=np.float64).reshape(-1, len(d["means"])),
            np.asarray(d["explained_variance_ratios"], dtype=np.float64),
            float(d["variance_target"]),
        )


def _as_matrix(matrix) -> np.ndarray:
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2:
        raise ContractError(f"expected a samples x features matrix, got shape {x.shape}")
    return x


def fit_scaler(train_matrix) -> ScalerModel:
    x = _as_matrix(train_matrix)
    if x.shape[0] < 2:
        raise ContractError("need at least 2 samples to fit a scaler")
    means = x.mean(axis=0)
    stds = x.std(axis=0)  # population (ddof=0)
    z = _standardize(x, means, stds)
    return ScalerModel(means, stds, z.min(axis=0), z.max(axis=0))


def _standardize(x: np.ndarray, means: np.ndarray, stds: np.ndarray) -> np.ndarray:
    safe = np.where(stds > 0, stds, 1.0)
    return np.where(stds > 0, (x - means) / safe, 0.0)


def apply_scaler(model: ScalerModel, matrix) -> np.ndarray:
    x = _as_matrix(matrix)
    if x.shape[1] != model.n_features:
        raise ContractError(f"matrix has {x.shape[1]} features, scaler was fit on {model.n_features}")
    z = _standardize(x, model.means, model.stds)
    const = model.constant
    span = np.where(const, 1.0, model.maxs - model.mins)
    out = np.clip((z - model.mins) / span, 0.0, 1.0)
    out[:, const] = 0.5
    return out


def _svd_route(centered: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Variances and directions from the thin SVD of the centered data."""
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    return s**2, vt


def _gram_route(centered: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Same quantities from the samples x samples Gram matrix.

    Never forms the features x features covariance, so it stays cheap when
    features vastly outnumber samples.
    """
    gram = centered @ centered.T
    evals, evecs = np.linalg.eigh(gram)
    order = np.argsort(evals)[::-1]
    evals, evecs = np.clip(evals[order], 0.0, None), evecs[:, order]
    keep = evals > evals[0] * 1e-12 if evals[0] > 0 else np.zeros_like(evals, dtype=bool)
    dirs = (centered.T @ evecs[:, keep]) / np.sqrt(evals[keep])
    return evals, dirs.T


def select_k(ratios: np.ndarray, variance_target: float) -> int:
    """Smallest k whose cumulative explained-variance ratio reaches the target."""
    cum = np.cumsum(ratios)
    hits = np.flatnonzero(cum >= variance_target - _RATIO_SLACK)
    return int(hits[0]) + 1 if hits.size else len(ratios)


def fit_pca(matrix, variance_target: float = 0.95, method: str = "svd") -> PcaModel:
    x = _as_matrix(matrix)
    if not 0 < variance_target <= 1:
        raise ContractError(f"variance_target must be in (0, 1], got {variance_target}")
    if x.shape[0] < 2:
        raise ContractError("need at least 2 samples to fit PCA")
    means = x.mean(axis=0)
    centered = x - means
    if method == "svd":
        variances, dirs = _svd_route(centered)
    elif method == "gram":
        variances, dirs = _gram_route(centered)
    else:
        raise ContractError(f"unknown PCA method {method!r}")
    total = variances.sum()
    if total <= 0:
        raise DegenerateInputError("all columns are constant; nothing to project")
    # centered data has rank <= samples - 1; anything past that is round-off
    max_k = min(x.shape[0] - 1, x.shape[1], dirs.shape[0])
    ratios = variances[:max_k] / total
    k = select_k(ratios, variance_target)
    components = dirs[:k]
    # fix the sign so each component's largest-magnitude loading is positive
    pivots = components[np.arange(k), np.argmax(np.abs(components), axis=1)]
    components = components * np.where(pivots < 0, -1.0, 1.0)[:, None]
    return PcaModel(means, components, ratios[:k], variance_target)


def apply_pca(model: PcaModel, matrix) -> np.ndarray:
    x = _as_matrix(matrix)
    if x.shape[1] != model.means.shape[0]:
        raise ContractError(f"matrix has {x.shape[1]} features, PCA was fit on {model.means.shape[0]}")
    return (x - model.means) @ model.components.T


def reconstruct(model: PcaModel, reduced) -> np.ndarray:
    return np.asarray(reduced) @ model.components + model.means


@dataclass
class PreprocessConfig:
    pca: bool = False
    pca_variance: float = 0.95
    fit_scope: str = "train"  # "train" | "all"

    def __post_init__(self):
        if self.fit_scope not in ("train", "all"):
            raise ContractError(f"fit_scope must be 'train' or 'all', got {self.fit_scope!r}")
        if not 0 < self.pca_variance <= 1:
            raise ContractError(f"pca_variance must be in (0, 1], got {self.pca_variance}")


@dataclass
class PreprocessModel:
    config: PreprocessConfig
    scaler: ScalerModel
    pca: Optional[PcaModel] = None
    extra: dict = field(default_factory=dict)

    @property
    def n_output_features(self) -> int:
        return self.pca.n_components if self.pca is not None else self.scaler.n_features

    def transform(self, matrix) -> np.ndarray:
        out = apply_scaler(self.scaler, matrix)
        if self.pca is not None:
            out = apply_pca(self.pca, out)
        return out

    def to_dict(self) -> dict:
        return {
            "config": {
                "pca": self.config.pca,
                "pca_variance": self.config.pca_variance,
                "fit_scope": self.config.fit_scope,
            },
            "scaler": self.scaler.to_dict(),
            "pca": None if self.pca is None else self.pca.to_dict(),
            **({"extra": self.extra} if self.extra else {}),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PreprocessModel":
        return cls(
            PreprocessConfig(**d["config"]),
            ScalerModel.from_dict(d["scaler"]),
            None if d.get("pca") is None else PcaModel.from_dict(d["pca"]),
            d.get("extra", {}),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "PreprocessModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def fit_preprocess(matrix, config: PreprocessConfig) -> PreprocessModel:
    scaler = fit_scaler(matrix)
    pca = None
    if config.pca:
        pca = fit_pca(apply_scaler(scaler, matrix), config.pca_variance)
    return PreprocessModel(config, scaler, pca)
