"""Dense statevector simulation.

Qubit ``k`` is bit ``k`` of the amplitude index (little-endian), so for an
n-qubit register the basis index ``i`` has qubit ``k`` set iff
``(i >> k) & 1``.

The kernels work in place on a batch of states with shape ``(batch, 2**n)``.
The batch array is viewed as a ``(batch, 2, ..., 2)`` tensor; qubit ``k``
lives on tensor axis ``n - k`` (axis 0 is the batch axis).  Every gate then
reduces to arithmetic on two (or more) strided sub-views, without ever
building a ``2**n x 2**n`` matrix.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CapacityError, ContractError, DegenerateInputError, QubitIndexError

MAX_QUBITS = 20
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class GateKind(str, enum.Enum):
    H = "H"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CNOT = "CNOT"
    TOFFOLI = "TOFFOLI"

    @property
    def is_rotation(self) -> bool:
        return self in (GateKind.RX, GateKind.RY, GateKind.RZ)

    @property
    def arity(self) -> int:
        return {GateKind.CNOT: 2, GateKind.TOFFOLI: 3}.get(self, 1)


@dataclass(frozen=True)
class GateOp:
    """One gate of a circuit.

    ``targets`` is ``(q,)`` for single-qubit gates, ``(control, target)`` for
    CNOT and ``(control, control, target)`` for Toffoli.  ``param_slot``
    indexes the parameter vector and is set exactly for rotations.
    """

    kind: GateKind
    targets: tuple[int, ...]
    param_slot: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.targets) != self.kind.arity:
            raise ContractError(
                f"{self.kind.value} takes {self.kind.arity} qubit(s), got {self.targets}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise ContractError(f"repeated qubit in {self.targets}")
        if min(self.targets) < 0:
            raise QubitIndexError(f"negative qubit index in {self.targets}")
        if self.kind.is_rotation != (self.param_slot is not None):
            raise ContractError(
                f"param_slot must be set iff the gate is a rotation ({self.kind.value})"
            )

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "targets": list(self.targets), "param_slot": self.param_slot}

    @classmethod
    def from_dict(cls, d: dict) -> "GateOp":
        return cls(GateKind(d["kind"]), tuple(d["targets"]), d.get("param_slot"))


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_qubit_count(self.n_qubits)
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ContractError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


def _check_qubit_count(n_qubits: int) -> None:
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits!r}")


def qubits_for(n_features: int) -> int:
    """Smallest register whose amplitude count holds ``n_features`` values."""
    if n_features < 1:
        raise ContractError("need at least one feature")
    return max(1, math.ceil(math.log2(n_features)))


def init_zero_state(n_qubits: int) -> StateVector:
    _check_qubit_count(n_qubits)
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def encode_batch(features: np.ndarray, n_qubits: int) -> np.ndarray:
    """Amplitude-encode each row of ``features``; returns ``(batch, 2**n)`` complex."""
    _check_qubit_count(n_qubits)
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    dim = 1 << n_qubits
    if x.shape[1] == 0:
        raise ContractError("empty feature vector")
    if x.shape[1] > dim:
        raise CapacityError(f"{x.shape[1]} features do not fit in {n_qubits} qubits ({dim} amplitudes)")
    if not np.all(np.isfinite(x)):
        raise ContractError("features must be finite")
    norms = np.linalg.norm(x, axis=1)
    bad = np.flatnonzero(norms == 0.0)
    if bad.size:
        raise DegenerateInputError(f"zero-norm feature vector at row {int(bad[0])}")
    out = np.zeros((x.shape[0], dim), dtype=np.complex128)
    out[:, : x.shape[1]] = x / norms[:, None]
    return out


def amplitude_encode(features: Sequence[float], n_qubits: int) -> StateVector:
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 1:
        raise ContractError("amplitude_encode takes a single feature vector")
    return StateVector(n_qubits, encode_batch(x, n_qubits)[0])


# --- in-place batch kernels -------------------------------------------------


def _tensor(batch: np.ndarray, n_qubits: int) -> np.ndarray:
    t = batch.reshape((batch.shape[0],) + (2,) * n_qubits)
    if not np.shares_memory(t, batch):
        raise ContractError("state batch must be C-contiguous for in-place kernels")
    return t


def _index(n_qubits: int, fixed: dict[int, int]) -> tuple:
    idx = [slice(None)] * (n_qubits + 1)
    for q, bit in fixed.items():
        idx[n_qubits - q] = bit
    return tuple(idx)


def check_targets(gate: GateOp, n_qubits: int) -> None:
    if max(gate.targets) >= n_qubits:
        raise QubitIndexError(f"{gate.kind.value} on {gate.targets} exceeds {n_qubits} qubits")


def apply_gate_batch(batch: np.ndarray, n_qubits: int, gate: GateOp, angle: Optional[float] = None) -> None:
    """Apply ``gate`` in place to every state of a ``(batch, 2**n)`` array."""
    t = _tensor(batch, n_qubits)
    kind = gate.kind
    if kind.is_rotation:
        (q,) = gate.targets
        i0, i1 = _index(n_qubits, {q: 0}), _index(n_qubits, {q: 1})
        c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
        a, b = t[i0], t[i1]
        if kind is GateKind.RZ:
            a *= complex(c, -s)
            b *= complex(c, s)
        elif kind is GateKind.RX:
            a_old = a.copy()
            a *= c
            a += (-1j * s) * b
            b *= c
            b += (-1j * s) * a_old
        else:
            a_old = a.copy()
            a *= c
            a -= s * b
            b *= c
            b += s * a_old
    elif kind is GateKind.H:
        (q,) = gate.targets
        a, b = t[_index(n_qubits, {q: 0})], t[_index(n_qubits, {q: 1})]
        a_old = a.copy()
        a += b
        a *= _INV_SQRT2
        b -= a_old
        b *= -_INV_SQRT2
    else:
        *controls, target = gate.targets
        fixed = {c: 1 for c in controls}
        i0 = _index(n_qubits, {**fixed, target: 0})
        i1 = _index(n_qubits, {**fixed, target: 1})
        tmp = t[i0].copy()
        t[i0] = t[i1]
        t[i1] = tmp


def apply_gate_dagger_batch(batch: np.ndarray, n_qubits: int, gate: GateOp, angle: Optional[float] = None) -> None:
    """Apply the inverse of ``gate`` in place."""
    if gate.kind.is_rotation:
        apply_gate_batch(batch, n_qubits, gate, -angle)
    else:
        # H, CNOT and Toffoli are self-inverse
        apply_gate_batch(batch, n_qubits, gate)


def apply_generator_batch(batch: np.ndarray, n_qubits: int, gate: GateOp) -> None:
    """Multiply in place by the Pauli generator of a rotation (R(t) = exp(-i t G / 2))."""
    t = _tensor(batch, n_qubits)
    (q,) = gate.targets
    i0, i1 = _index(n_qubits, {q: 0}), _index(n_qubits, {q: 1})
    a, b = t[i0], t[i1]
    if gate.kind is GateKind.RZ:
        b *= -1.0
    elif gate.kind is GateKind.RX:
        tmp = a.copy()
        a[...] = b
        b[...] = tmp
    elif gate.kind is GateKind.RY:
        tmp = a.copy()
        a[...] = b
        a *= -1j
        b[...] = tmp
        b *= 1j
    else:
        raise ContractError(f"{gate.kind.value} has no generator")


def z_signs(n_qubits: int, qubit: int) -> np.ndarray:
    """+1 where ``qubit`` is 0 in the basis index, -1 where it is 1."""
    bits = (np.arange(1 << n_qubits) >> qubit) & 1
    return 1.0 - 2.0 * bits


def expectation_z_batch(batch: np.ndarray, n_qubits: int, qubits: Sequence[int]) -> np.ndarray:
    """<Z_q> for every state and every qubit in ``qubits``; shape ``(batch, len(qubits))``."""
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise QubitIndexError(f"qubit {q} out of range for {n_qubits} qubits")
    probs = (batch.real**2 + batch.imag**2).reshape((batch.shape[0],) + (2,) * n_qubits)
    out = np.empty((batch.shape[0], len(qubits)))
    for j, q in enumerate(qubits):
        axis = n_qubits - q
        other = tuple(a for a in range(1, n_qubits + 1) if a != axis)
        marg = probs.sum(axis=other)
        out[:, j] = marg[:, 0] - marg[:, 1]
    return out


# --- single-state surface ---------------------------------------------------


def apply_gate(state: StateVector, gate: GateOp, angle: Optional[float] = None) -> StateVector:
    """Return ``gate`` applied to ``state``; the input is left untouched."""
    if gate.kind.is_rotation and angle is None:
        raise ContractError(f"{gate.kind.value} needs an angle")
    if not gate.kind.is_rotation and angle is not None:
        raise ContractError(f"{gate.kind.value} takes no angle")
    check_targets(gate, state.n_qubits)
    batch = state.amplitudes.copy()[None, :]
    apply_gate_batch(batch, state.n_qubits, gate, None if angle is None else float(angle))
    return StateVector(state.n_qubits, batch[0])


def expectation_z(state: StateVector, qubit: int) -> float:
    return float(expectation_z_batch(state.amplitudes[None, :], state.n_qubits, [qubit])[0, 0])
