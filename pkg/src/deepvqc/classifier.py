"""Softmax read-out over Pauli-Z expectations, cross-entropy cost and
full-batch gradient descent."""

from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .ansatz import AnsatzConfig, CircuitSpec, build_circuit
from .autodiff import adjoint_vjp, check_theta, run_batch
from .data_io import Dataset, class_distribution
from .errors import ContractError, DomainError, StratificationError
from .statevector import encode_batch, expectation_z_batch

# states per simulation chunk is 2**22 // 2**n_qubits; independent of thread
# count so that reductions always happen in the same order
_CHUNK_AMPLITUDES = 1 << 22


class InitScale(str, enum.Enum):
    UNIFORM_0_2PI = "UNIFORM_0_2PI"
    NORMAL_SMALL = "NORMAL_SMALL"


@dataclass(frozen=True)
class ModelConfig:
    ansatz: AnsatzConfig
    readout_qubits: tuple[int, ...] = (0, 1, 2, 3, 4)
    learning_rate: float = 0.01
    epochs: int = 100
    init_seed: int = 0
    init_scale: InitScale = InitScale.UNIFORM_0_2PI

    def __post_init__(self):
        object.__setattr__(self, "readout_qubits", tuple(int(q) for q in self.readout_qubits))
        object.__setattr__(self, "init_scale", InitScale(self.init_scale))
        ro = self.readout_qubits
        if len(set(ro)) != len(ro) or not ro:
            raise ContractError(f"readout qubits must be distinct and non-empty, got {ro}")
        if max(ro) >= self.ansatz.n_qubits or min(ro) < 0:
            raise ContractError(f"readout qubits {ro} do not fit in {self.ansatz.n_qubits} qubits")
        if not (self.learning_rate >= 0 and math.isfinite(self.learning_rate)):
            raise ContractError(f"learning_rate must be finite and >= 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ContractError(f"epochs must be >= 1, got {self.epochs}")

    @property
    def n_classes(self) -> int:
        return len(self.readout_qubits)

    def to_dict(self) -> dict:
        return {
            "ansatz": self.ansatz.to_dict(),
            "readout_qubits": list(self.readout_qubits),
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "init_seed": self.init_seed,
            "init_scale": self.init_scale.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        d = dict(d)
        d["ansatz"] = AnsatzConfig.from_dict(d["ansatz"])
        return cls(**d)


@dataclass
class EpochRecord:
    epoch: int
    train_cost: float
    train_accuracy: float
    val_cost: float
    val_accuracy: float


@dataclass
class TrainHistory:
    records: list[EpochRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    def to_list(self) -> list[dict]:
        return [asdict(r) for r in self.records]


def init_params(config: ModelConfig) -> np.ndarray:
    n = 4 * config.ansatz.n_qubits * config.ansatz.n_layers
    rng = np.random.default_rng(config.init_seed)
    if config.init_scale is InitScale.NORMAL_SMALL:
        return rng.normal(0.0, 0.1, n)
    return rng.uniform(0.0, 2 * math.pi, n)


def softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = np.exp(z - z.max(axis=-1, keepdims=True))
    return z / z.sum(axis=-1, keepdims=True)


def cross_entropy(probs, label: int) -> float:
    p = np.asarray(probs, dtype=np.float64)
    if not 0 <= label < p.shape[0]:
        raise ContractError(f"label {label} outside 0..{p.shape[0] - 1}")
    if np.any(p <= 0):
        raise DomainError("cross-entropy needs strictly positive probabilities")
    return float(-math.log(p[label]))


def _chunks(n_rows: int, n_qubits: int) -> list[slice]:
    size = max(1, _CHUNK_AMPLITUDES >> n_qubits)
    return [slice(i, min(i + size, n_rows)) for i in range(0, n_rows, size)]


def _map_ordered(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def logits_batch(theta, config: ModelConfig, circuit: CircuitSpec, samples, threads: int = 1) -> np.ndarray:
    """Read-out expectations for every row of ``samples``; shape (batch, n_classes)."""
    theta = check_theta(circuit, theta)
    x = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    n = circuit.n_qubits

    def run(sl):
        states = run_batch(circuit, theta, encode_batch(x[sl], n))
        return expectation_z_batch(states, n, config.readout_qubits)

    parts = _map_ordered(run, _chunks(x.shape[0], n), threads)
    return np.concatenate(parts) if parts else np.zeros((0, config.n_classes))


def predict_proba(theta, config: ModelConfig, circuit: CircuitSpec, sample) -> np.ndarray:
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1:
        raise ContractError("predict_proba takes one sample; use predict_proba_batch")
    return softmax(logits_batch(theta, config, circuit, x[None, :])[0])


def predict_proba_batch(theta, config: ModelConfig, circuit: CircuitSpec, samples, threads: int = 1) -> np.ndarray:
    return softmax(logits_batch(theta, config, circuit, samples, threads))


def argmax_lowest(probs) -> np.ndarray:
    """Row-wise argmax; ties go to the lowest class index."""
    return np.argmax(np.asarray(probs), axis=-1)


def predict(theta, config: ModelConfig, circuit: CircuitSpec, sample) -> int:
    return int(argmax_lowest(predict_proba(theta, config, circuit, sample)))


def _check_batch(samples, labels, n_classes: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    y = np.asarray(labels, dtype=np.int64).reshape(-1)
    if x.shape[0] == 0:
        raise ContractError("empty batch")
    if y.shape[0] != x.shape[0]:
        raise ContractError(f"{x.shape[0]} samples but {y.shape[0]} labels")
    if y.min() < 0 or y.max() >= n_classes:
        raise ContractError(f"labels must lie in 0..{n_classes - 1}")
    return x, y


def cost_gradient(
    theta, config: ModelConfig, circuit: CircuitSpec, samples, labels, threads: int = 1
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy over the batch and its gradient with respect to theta.

    Uses dC/de_j = p_j - y_j, folded into one weighted observable per sample
    so a single adjoint sweep yields the whole vector-Jacobian product.
    """
    theta = check_theta(circuit, theta)
    x, y = _check_batch(samples, labels, config.n_classes)
    n = circuit.n_qubits
    ro = list(config.readout_qubits)

    def run(sl):
        states = run_batch(circuit, theta, encode_batch(x[sl], n))
        probs = softmax(expectation_z_batch(states, n, ro))
        onehot = np.eye(config.n_classes)[y[sl]]
        cost = -np.log(probs[np.arange(probs.shape[0]), y[sl]]).sum()
        grads = adjoint_vjp(circuit, theta, states, probs - onehot, ro)
        return cost, grads.sum(axis=0)

    total_cost, total_grad = 0.0, np.zeros(circuit.n_params)
    for cost, grad in _map_ordered(run, _chunks(x.shape[0], n), threads):
        total_cost += cost
        total_grad += grad
    return total_cost / x.shape[0], total_grad / x.shape[0]


def evaluate(theta, config: ModelConfig, circuit: CircuitSpec, samples, labels, threads: int = 1):
    """(mean cost, accuracy, predictions) of ``theta`` on a labelled set."""
    x, y = _check_batch(samples, labels, config.n_classes)
    probs = predict_proba_batch(theta, config, circuit, x, threads)
    preds = argmax_lowest(probs)
    cost = float(-np.log(probs[np.arange(len(y)), y]).mean())
    return cost, float(np.mean(preds == y)), preds


def train(
    train_set: Dataset,
    val_set: Dataset,
    config: ModelConfig,
    threads: int = 1,
    progress=None,
) -> tuple[np.ndarray, TrainHistory]:
    """Full-batch gradient descent from a seeded initialization.

    Each history record is measured after that epoch's update.  ``progress``
    (optional) is called with every new record.
    """
    if train_set.n_samples == 0 or val_set.n_samples == 0:
        raise ContractError("train and validation sets must be non-empty")
    if train_set.n_classes != config.n_classes:
        raise ContractError(
            f"{train_set.n_classes} classes but {config.n_classes} readout qubits"
        )
    counts = class_distribution(train_set)
    if counts.min() == 0:
        missing = [train_set.class_names[c] for c in np.flatnonzero(counts == 0)]
        raise StratificationError(f"training set lacks class(es) {missing}")

    circuit = build_circuit(config.ansatz)
    theta = init_params(config)
    history = TrainHistory()
    for epoch in range(1, config.epochs + 1):
        _, grad = cost_gradient(theta, config, circuit, train_set.features, train_set.labels, threads)
        theta = theta - config.learning_rate * grad
        tr_cost, tr_acc, _ = evaluate(theta, config, circuit, train_set.features, train_set.labels, threads)
        va_cost, va_acc, _ = evaluate(theta, config, circuit, val_set.features, val_set.labels, threads)
        record = EpochRecord(epoch, tr_cost, tr_acc, va_cost, va_acc)
        history.records.append(record)
        if progress is not None:
            progress(record)
    return theta, history


def save_checkpoint(path, config: ModelConfig, theta, extra: Optional[dict] = None) -> None:
    doc = {
        "model_config": config.to_dict(),
        "circuit_config": config.ansatz.to_dict(),
        "seed": config.init_seed,
        "theta": [float(t) for t in theta],
    }
    if extra:
        doc["extra"] = extra
    Path(path).write_text(json.dumps(doc, indent=1))


def load_checkpoint(path) -> tuple[ModelConfig, np.ndarray, dict]:
    doc = json.loads(Path(path).read_text())
    config = ModelConfig.from_dict(doc["model_config"])
    theta = np.asarray(doc["theta"], dtype=np.float64)
    if theta.shape != (4 * config.ansatz.n_qubits * config.ansatz.n_layers,):
        raise ContractError(f"{path}: theta length does not match the circuit")
    return config, theta, doc.get("extra", {})
