"""Seeded Gaussian-blob datasets for desk-scale end-to-end runs."""

from __future__ import annotations

import numpy as np

from .data_io import Dataset


def make_blobs(
    n_samples: int = 100,
    n_features: int = 32,
    n_classes: int = 5,
    separation: float = 3.0,
    sigma: float = 1.0,
    seed: int = 0,
) -> Dataset:
    """Isotropic Gaussian classes with per-feature center separation.

    Every class center has each coordinate at +-separation*sigma/2 (random
    sign), so two centers that disagree on a feature are ``separation``
    standard deviations apart along it.  Samples are split as evenly as
    possible between classes.
    """
    rng = np.random.default_rng(seed)
    half = 0.5 * separation * sigma
    centers = rng.choice([-half, half], size=(n_classes, n_features))
    labels = np.arange(n_samples) % n_classes
    features = centers[labels] + rng.normal(0.0, sigma, size=(n_samples, n_features))
    return Dataset(
        [f"s{i}" for i in range(n_samples)],
        features,
        labels,
        [f"class_{c}" for c in range(n_classes)],
        [f"g{j}" for j in range(n_features)],
    )
