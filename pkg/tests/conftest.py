import numpy as np
import pytest

from deepvqc.data_io import Dataset
from deepvqc.statevector import GateKind, GateOp

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def single_qubit_matrix(kind, angle=None):
    if kind is GateKind.H:
        return _H
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
    raise ValueError(kind)


def dense_matrix(gate: GateOp, n_qubits: int, angle=None) -> np.ndarray:
    """Full 2**n x 2**n unitary, built without any of the package kernels."""
    dim = 1 << n_qubits
    if gate.kind in (GateKind.CNOT, GateKind.TOFFOLI):
        *controls, target = gate.targets
        m = np.zeros((dim, dim), dtype=complex)
        for i in range(dim):
            j = i ^ (1 << target) if all((i >> c) & 1 for c in controls) else i
            m[j, i] = 1
        return m
    (q,) = gate.targets
    # little-endian: qubit 0 is the rightmost kron factor
    return np.kron(np.kron(np.eye(1 << (n_qubits - 1 - q)), single_qubit_matrix(gate.kind, angle)), np.eye(1 << q))


def random_gate(rng, n_qubits):
    kinds = [GateKind.H, GateKind.RX, GateKind.RY, GateKind.RZ]
    if n_qubits >= 2:
        kinds.append(GateKind.CNOT)
    if n_qubits >= 3:
        kinds.append(GateKind.TOFFOLI)
    kind = kinds[rng.integers(len(kinds))]
    targets = tuple(int(t) for t in rng.choice(n_qubits, size=kind.arity, replace=False))
    slot = 0 if kind.is_rotation else None
    angle = float(rng.uniform(-2 * np.pi, 2 * np.pi)) if kind.is_rotation else None
    return GateOp(kind, targets, slot), angle


def random_amplitudes(rng, n_qubits):
    v = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def toy_csv(tmp_path):
    path = tmp_path / "toy.csv"
    path.write_text("samples,type,g1,g2\ns0,a,1.0,2.0\ns1,b,3.0,4.5\ns2,a,-1.0,0.25\n")
    return path


def make_labelled(counts, n_features=3, seed=0):
    """Dataset with the given per-class sample counts and random features."""
    rng = np.random.default_rng(seed)
    labels = np.concatenate([np.full(c, k) for k, c in enumerate(counts)])
    labels = rng.permutation(labels)
    n = labels.size
    return Dataset(
        [f"s{i}" for i in range(n)],
        rng.normal(size=(n, n_features)),
        labels,
        [f"c{k}" for k in range(len(counts))],
    )


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
