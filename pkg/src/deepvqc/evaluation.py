"""Confusion matrices, per-class metrics, cross-validation and report files."""

from __future__ import annotations

import csv
import dataclasses
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .ansatz import build_circuit
from .classifier import ModelConfig, TrainHistory, evaluate, train
from .data_io import Dataset, stratified_kfold
from .errors import ContractError, DegenerateInputError
from .preprocess import PreprocessConfig, fit_preprocess
from .statevector import qubits_for

# Accuracy of classical baselines on the same dataset, as published alongside
# the CuMiDa brain set (3-fold CV).  Emitted for comparison only.
REFERENCE_ACCURACIES = {
    "SVM": 0.95,
    "RF": 0.91,
    "KNN": 0.87,
    "DT": 0.85,
    "NB": 0.85,
    "MLP": 0.82,
    "k-Means": 0.46,
    "HC": 0.38,
    "ZeroR": 0.35,
}
REFERENCE_DEEP_VQC_CV_ACCURACY = 0.85


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # rows: true class, columns: predicted class

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]


@dataclass
class ClassMetrics:
    precision: list[float]
    recall: list[float]
    f1: list[float]
    accuracy: float
    precision_undefined: list[bool]
    recall_undefined: list[bool]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ClassMetrics":
        return cls(**d)


def confusion(true_labels, predicted_labels, n_classes: int) -> ConfusionMatrix:
    t = np.asarray(true_labels, dtype=np.int64).reshape(-1)
    p = np.asarray(predicted_labels, dtype=np.int64).reshape(-1)
    if t.shape != p.shape:
        raise ContractError(f"{t.size} true labels vs {p.size} predictions")
    for arr in (t, p):
        if arr.size and (arr.min() < 0 or arr.max() >= n_classes):
            raise ContractError(f"label outside 0..{n_classes - 1}")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    return ConfusionMatrix(counts)


def metrics(cm: ConfusionMatrix) -> ClassMetrics:
    """Per-class precision/recall/F1; zero denominators report 0 plus a flag."""
    c = cm.counts
    if cm.total == 0:
        raise DegenerateInputError("confusion matrix is empty")
    tp = np.diag(c).astype(np.float64)
    predicted = c.sum(axis=0)
    actual = c.sum(axis=1)
    p_undef = predicted == 0
    r_undef = actual == 0
    precision = np.divide(tp, predicted, out=np.zeros_like(tp), where=~p_undef)
    recall = np.divide(tp, actual, out=np.zeros_like(tp), where=~r_undef)
    denom = precision + recall
    f1 = np.divide(2 * precision * recall, denom, out=np.zeros_like(tp), where=denom > 0)
    return ClassMetrics(
        precision.tolist(),
        recall.tolist(),
        f1.tolist(),
        float(tp.sum() / cm.total),
        p_undef.tolist(),
        r_undef.tolist(),
    )


def fold_seed(master_seed: int, fold: int) -> int:
    return int(np.random.SeedSequence([master_seed, fold]).generate_state(1)[0])


def resolve_qubits(n_features: int, n_readout: int) -> int:
    """Register size for a feature count: enough amplitudes and enough read-out qubits."""
    return max(qubits_for(n_features), n_readout)


def _run_fold(dataset, model_config, preprocess_config, fold, train_idx, test_idx, seed, n_qubits, threads):
    train_set, test_set = dataset.subset(train_idx), dataset.subset(test_idx)
    fit_rows = dataset.features if preprocess_config.fit_scope == "all" else train_set.features
    prep = fit_preprocess(fit_rows, preprocess_config)
    train_set = train_set.with_features(prep.transform(train_set.features))
    test_set = test_set.with_features(prep.transform(test_set.features))

    n = n_qubits or resolve_qubits(prep.n_output_features, model_config.n_classes)
    ansatz = dataclasses.replace(model_config.ansatz, n_qubits=n)
    cfg = dataclasses.replace(model_config, ansatz=ansatz, init_seed=fold_seed(seed, fold))
    theta, history = train(train_set, test_set, cfg, threads=threads)
    circuit = build_circuit(cfg.ansatz)
    tr_cost, tr_acc, _ = evaluate(theta, cfg, circuit, train_set.features, train_set.labels, threads)
    te_cost, te_acc, preds = evaluate(theta, cfg, circuit, test_set.features, test_set.labels, threads)
    cm = confusion(test_set.labels, preds, dataset.n_classes)
    return {
        "fold": fold,
        "n_train": int(len(train_idx)),
        "n_test": int(len(test_idx)),
        "test_indices": [int(i) for i in test_idx],
        "n_qubits": n,
        "n_features": prep.n_output_features,
        "init_seed": cfg.init_seed,
        "train_accuracy": tr_acc,
        "train_cost": tr_cost,
        "test_accuracy": te_acc,
        "test_cost": te_cost,
        "confusion_matrix": cm.counts.tolist(),
        "metrics": metrics(cm).to_dict(),
        "history": history.to_list(),
    }


def cross_validate(
    dataset: Dataset,
    model_config: ModelConfig,
    preprocess_config: PreprocessConfig,
    k: int = 3,
    seed: int = 0,
    n_qubits: Optional[int] = None,
    threads: int = 1,
) -> dict:
    """Stratified k-fold CV.

    Preprocessing is refit per fold (on the fold's training rows, or on all
    rows when ``fit_scope == "all"``).  Without an explicit ``n_qubits`` the
    register is sized from each fold's preprocessed feature count.  Folds
    run concurrently when ``threads > 1``; each fold's init seed depends only
    on (seed, fold), so results do not depend on the thread count.
    """
    folds = stratified_kfold(dataset, k, seed)
    jobs = [(f, tr, te) for f, (tr, te) in enumerate(folds)]

    def job(args):
        f, tr, te = args
        return _run_fold(dataset, model_config, preprocess_config, f, tr, te, seed, n_qubits, 1)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, k)) as pool:
            results = list(pool.map(job, jobs))
    else:
        results = [job(j) for j in jobs]

    total = np.zeros((dataset.n_classes, dataset.n_classes), dtype=np.int64)
    for r in results:
        total += np.asarray(r["confusion_matrix"], dtype=np.int64)
    pooled = ConfusionMatrix(total)

    def mean(key):
        return float(np.mean([r[key] for r in results]))

    return {
        "k": k,
        "seed": seed,
        "class_names": list(dataset.class_names),
        "folds": results,
        "mean_test_accuracy": mean("test_accuracy"),
        "mean_test_cost": mean("test_cost"),
        "mean_train_accuracy": mean("train_accuracy"),
        "mean_train_cost": mean("train_cost"),
        "pooled_confusion_matrix": total.tolist(),
        "pooled_metrics": metrics(pooled).to_dict(),
        "mean_curves": _mean_curves(results),
    }


def _mean_curves(results: list[dict]) -> list[dict]:
    """Per-epoch fold average of every history column."""
    histories = [r["history"] for r in results]
    out = []
    for recs in zip(*histories):
        row = {"epoch": recs[0]["epoch"]}
        for key in ("train_cost", "train_accuracy", "val_cost", "val_accuracy"):
            row[key] = float(np.mean([r[key] for r in recs]))
        out.append(row)
    return out


def reference_block(mean_accuracy: Optional[float] = None, band: float = 0.10) -> dict:
    block = {
        "reference_accuracies": dict(REFERENCE_ACCURACIES),
        "reference_deep_vqc_cv_accuracy": REFERENCE_DEEP_VQC_CV_ACCURACY,
    }
    if mean_accuracy is not None:
        block["deep_vqc_delta"] = mean_accuracy - REFERENCE_DEEP_VQC_CV_ACCURACY
        block["within_band"] = abs(mean_accuracy - REFERENCE_DEEP_VQC_CV_ACCURACY) <= band
        block["band"] = band
    return block


def write_curves(history: TrainHistory | list[dict], path) -> None:
    rows = history.to_list() if isinstance(history, TrainHistory) else history
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_acc", "train_cost", "val_acc", "val_cost"])
        for r in rows:
            writer.writerow(
                [r["epoch"]] + [repr(float(r[k])) for k in ("train_accuracy", "train_cost", "val_accuracy", "val_cost")]
            )


def write_json(doc: dict, path) -> None:
    # repr-based float output keeps 17 significant digits
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def emit_report(
    history: TrainHistory,
    cm: ConfusionMatrix,
    class_metrics: ClassMetrics,
    config: dict,
    out_dir,
    class_names: Optional[list[str]] = None,
    include_reference: bool = True,
    extra: Optional[dict] = None,
) -> tuple[Path, Path]:
    """Write curves.csv and report.json into ``out_dir``; returns both paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        curves_path, report_path = out / "curves.csv", out / "report.json"
        write_curves(history, curves_path)
        doc = {
            "config": config,
            "seed": config.get("seed"),
            "class_names": class_names,
            "confusion_matrix": cm.counts.tolist(),
            "metrics": class_metrics.to_dict(),
            "accuracy": class_metrics.accuracy,
        }
        if include_reference:
            doc["reference"] = reference_block()
        if extra:
            doc.update(extra)
        write_json(doc, report_path)
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc}") from exc
    return curves_path, report_path


def load_report(path) -> tuple[ConfusionMatrix, ClassMetrics, dict]:
    doc = json.loads(Path(path).read_text())
    return ConfusionMatrix(np.asarray(doc["confusion_matrix"], dtype=np.int64)), ClassMetrics.from_dict(doc["metrics"]), doc
