"""Layered hardware-efficient ansatz.

One composite layer is two sub-blocks run back to back:

* block A: H on every qubit, RX on every qubit, RY on every qubit, then the
  entanglers;
* block B: H on every qubit, RY on every qubit, RZ on every qubit, then the
  same entanglers.

Entanglers follow a linear chain: CNOT(q, q+1) for every neighbouring pair,
then TOFFOLI(q, q+1, q+2) for every neighbouring triple.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from .errors import ContractError
from .statevector import GateKind, GateOp, MAX_QUBITS


class EntanglePattern(str, enum.Enum):
    LINEAR = "LINEAR"


@dataclass(frozen=True)
class AnsatzConfig:
    n_qubits: int
    n_layers: int = 25
    entangle_pattern: EntanglePattern = EntanglePattern.LINEAR

    def __post_init__(self):
        object.__setattr__(self, "entangle_pattern", EntanglePattern(self.entangle_pattern))
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ContractError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        if self.n_layers < 1:
            raise ContractError(f"n_layers must be >= 1, got {self.n_layers}")

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_layers": self.n_layers,
            "entangle_pattern": self.entangle_pattern.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnsatzConfig":
        return cls(int(d["n_qubits"]), int(d["n_layers"]), EntanglePattern(d.get("entangle_pattern", "LINEAR")))


@dataclass(frozen=True)
class CircuitSpec:
    """An immutable gate list plus the number of trainable slots it reads."""

    config: AnsatzConfig | None
    gates: tuple[GateOp, ...]
    n_params: int
    n_qubits: int

    def to_dict(self) -> dict:
        return {
            "config": None if self.config is None else self.config.to_dict(),
            "n_qubits": self.n_qubits,
            "n_params": self.n_params,
            "gates": [g.to_dict() for g in self.gates],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "CircuitSpec":
        config = None if d.get("config") is None else AnsatzConfig.from_dict(d["config"])
        return circuit_from_gates([GateOp.from_dict(g) for g in d["gates"]], int(d["n_qubits"]), config)


def circuit_from_gates(gates, n_qubits: int, config: AnsatzConfig | None = None) -> CircuitSpec:
    """Wrap an arbitrary gate list, checking targets and the slot layout."""
    gates = tuple(gates)
    slots = []
    for g in gates:
        if max(g.targets) >= n_qubits:
            raise ContractError(f"gate {g} exceeds {n_qubits} qubits")
        if g.param_slot is not None:
            slots.append(g.param_slot)
    if slots != list(range(len(slots))):
        raise ContractError("parameter slots must be 0..n_params-1, once each, in order")
    return CircuitSpec(config, gates, len(slots), n_qubits)


def _entanglers(n_qubits: int) -> list[GateOp]:
    gates = [GateOp(GateKind.CNOT, (q, q + 1)) for q in range(n_qubits - 1)]
    gates += [GateOp(GateKind.TOFFOLI, (q, q + 1, q + 2)) for q in range(n_qubits - 2)]
    return gates


def _block(n_qubits: int, param_base: int, first: GateKind, second: GateKind) -> list[GateOp]:
    gates = [GateOp(GateKind.H, (q,)) for q in range(n_qubits)]
    gates += [GateOp(first, (q,), param_base + q) for q in range(n_qubits)]
    gates += [GateOp(second, (q,), param_base + n_qubits + q) for q in range(n_qubits)]
    return gates + _entanglers(n_qubits)


def build_hea1_layer(n_qubits: int, param_base: int) -> list[GateOp]:
    return _block(n_qubits, param_base, GateKind.RX, GateKind.RY)


def build_hea2_layer(n_qubits: int, param_base: int) -> list[GateOp]:
    return _block(n_qubits, param_base, GateKind.RY, GateKind.RZ)


def param_count(config: AnsatzConfig) -> int:
    return 4 * config.n_qubits * config.n_layers


def build_circuit(config: AnsatzConfig) -> CircuitSpec:
    n = config.n_qubits
    gates: list[GateOp] = []
    base = 0
    for _ in range(config.n_layers):
        gates += build_hea1_layer(n, base)
        base += 2 * n
        gates += build_hea2_layer(n, base)
        base += 2 * n
    return CircuitSpec(config, tuple(gates), base, n)
