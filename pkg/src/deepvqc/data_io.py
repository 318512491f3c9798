"""CuMiDa-style CSV ingestion, class summaries and stratified partitions.

Expected layout: header row, one row per sample, an optional id column
(``samples`` in CuMiDa exports), a label column (``type``), and numeric gene
columns everywhere else.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ContractError, ParseError, StratificationError


@dataclass
class Dataset:
    sample_ids: list[str]
    features: np.ndarray
    labels: np.ndarray
    class_names: list[str]
    feature_names: Optional[list[str]] = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        n = len(self.sample_ids)
        if self.features.ndim != 2 or self.features.shape[0] != n or self.labels.shape != (n,):
            raise ContractError(
                f"row counts disagree: {n} ids, features {self.features.shape}, labels {self.labels.shape}"
            )
        if len(set(self.class_names)) != len(self.class_names):
            raise ContractError("class names must be distinct")
        if n and (self.labels.min() < 0 or self.labels.max() >= len(self.class_names)):
            raise ContractError("label index outside the class-name table")
        if self.feature_names is not None and len(self.feature_names) != self.features.shape[1]:
            raise ContractError("feature_names length does not match the feature count")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            [self.sample_ids[i] for i in idx],
            self.features[idx],
            self.labels[idx],
            list(self.class_names),
            self.feature_names,
        )

    def with_features(self, features, feature_names=None) -> "Dataset":
        return Dataset(list(self.sample_ids), features, self.labels.copy(), list(self.class_names), feature_names)

    def summary(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "n_features": self.n_features,
            "class_names": list(self.class_names),
            "class_counts": class_distribution(self).tolist(),
        }


def load_csv(path, label_column: str = "type", id_column: Optional[str] = "samples") -> Dataset:
    """Read a microarray CSV.

    Class indices follow order of first appearance in the file.  If
    ``id_column`` is absent from the header, ids are the 0-based row numbers.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if label_column not in header:
            raise ParseError(f"{path}: no label column {label_column!r} in header")
        label_pos = header.index(label_column)
        id_pos = header.index(id_column) if id_column is not None and id_column in header else None
        feat_pos = [i for i in range(len(header)) if i not in (label_pos, id_pos)]
        feat_names = [header[i] for i in feat_pos]

        ids, rows, raw_labels = [], [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}: line {line_no} has {len(row)} fields, header has {len(header)}")
            cells = [row[i] for i in feat_pos]
            try:
                values = np.array(cells, dtype=np.float64)
            except ValueError:
                bad = next(j for j, c in enumerate(cells) if not _is_float(c))
                raise ParseError(
                    f"{path}: line {line_no}, column {feat_names[bad]!r}: non-numeric value {cells[bad]!r}"
                ) from None
            rows.append(values)
            raw_labels.append(row[label_pos])
            ids.append(row[id_pos] if id_pos is not None else str(len(ids)))

    if not rows:
        raise ParseError(f"{path}: no data rows")
    class_names: list[str] = []
    for name in raw_labels:
        if name not in class_names:
            class_names.append(name)
    labels = np.array([class_names.index(name) for name in raw_labels], dtype=np.int64)
    return Dataset(ids, np.vstack(rows), labels, class_names, feat_names)


def _is_float(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def save_csv(dataset: Dataset, path, label_column: str = "type", id_column: str = "samples") -> None:
    names = dataset.feature_names or [f"f{j}" for j in range(dataset.n_features)]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([id_column, label_column, *names])
        for sid, label, row in zip(dataset.sample_ids, dataset.labels, dataset.features):
            writer.writerow([sid, dataset.class_names[label], *(repr(float(v)) for v in row)])


def class_distribution(dataset: Dataset) -> np.ndarray:
    return np.bincount(dataset.labels, minlength=dataset.n_classes)


def _by_class(labels: np.ndarray, n_classes: int, rng: np.random.Generator) -> list[np.ndarray]:
    return [rng.permutation(np.flatnonzero(labels == c)) for c in range(n_classes)]


def stratified_split(dataset: Dataset, val_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Per-class seeded split; every class keeps at least one sample on each side."""
    if not 0 < val_fraction < 1:
        raise ContractError(f"val_fraction must be in (0, 1), got {val_fraction}")
    counts = class_distribution(dataset)
    if counts.min() < 2:
        c = int(np.argmin(counts))
        raise StratificationError(f"class {dataset.class_names[c]!r} has {counts[c]} sample(s); need >= 2")
    rng = np.random.default_rng(seed)
    train_idx, val_idx = [], []
    for members in _by_class(dataset.labels, dataset.n_classes, rng):
        n_val = min(max(math.floor(len(members) * val_fraction + 0.5), 1), len(members) - 1)
        val_idx.extend(members[:n_val])
        train_idx.extend(members[n_val:])
    return dataset.subset(np.sort(train_idx)), dataset.subset(np.sort(val_idx))


def stratified_kfold(dataset: Dataset, k: int = 3, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Return k (train_indices, test_indices) pairs.

    Shuffled members of every class are dealt round-robin into folds, with the
    dealing position carried over from one class to the next, so both the
    per-class and the total fold sizes differ by at most one.
    """
    if k < 2:
        raise ContractError(f"need k >= 2 folds, got {k}")
    counts = class_distribution(dataset)
    if counts.min() < k:
        c = int(np.argmin(counts))
        raise StratificationError(f"class {dataset.class_names[c]!r} has {counts[c]} sample(s); need >= {k}")
    rng = np.random.default_rng(seed)
    order = np.concatenate(_by_class(dataset.labels, dataset.n_classes, rng))
    fold_of = np.empty(dataset.n_samples, dtype=np.int64)
    fold_of[order] = np.arange(order.size) % k
    everything = np.arange(dataset.n_samples)
    return [(everything[fold_of != f], everything[fold_of == f]) for f in range(k)]
