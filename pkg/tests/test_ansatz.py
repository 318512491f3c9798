import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deepvqc.ansatz import (
    AnsatzConfig,
    CircuitSpec,
    build_circuit,
    build_hea1_layer,
    build_hea2_layer,
    circuit_from_gates,
)
from deepvqc.autodiff import forward
from deepvqc.errors import ContractError
from deepvqc.statevector import GateKind, GateOp, StateVector

H, RX, RY, RZ, CNOT, TOF = (GateKind.H, GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CNOT, GateKind.TOFFOLI)


def g(kind, *targets, slot=None):
    return GateOp(kind, targets, slot)


class TestHea1:
    def test_two_qubits(self):
        assert build_hea1_layer(2, 0) == [
            g(H, 0), g(H, 1), g(RX, 0, slot=0), g(RX, 1, slot=1), g(RY, 0, slot=2), g(RY, 1, slot=3), g(CNOT, 0, 1),
        ]

    def test_three_qubits_counts(self):
        gates = build_hea1_layer(3, 0)
        assert len(gates) == 12
        assert sum(x.param_slot is not None for x in gates) == 6
        assert gates[-3:] == [g(CNOT, 0, 1), g(CNOT, 1, 2), g(TOF, 0, 1, 2)]

    def test_one_qubit(self):
        assert build_hea1_layer(1, 5) == [g(H, 0), g(RX, 0, slot=5), g(RY, 0, slot=6)]


class TestHea2:
    def test_two_qubits(self):
        assert build_hea2_layer(2, 0) == [
            g(H, 0), g(H, 1), g(RY, 0, slot=0), g(RY, 1, slot=1), g(RZ, 0, slot=2), g(RZ, 1, slot=3), g(CNOT, 0, 1),
        ]

    def test_slot_range(self):
        slots = [x.param_slot for x in build_hea2_layer(3, 6) if x.param_slot is not None]
        assert slots == list(range(6, 12))

    def test_one_qubit(self):
        assert build_hea2_layer(1, 0) == [g(H, 0), g(RY, 0, slot=0), g(RZ, 0, slot=1)]


@pytest.mark.parametrize(
    "n,layers,params,gates",
    [(15, 25, 1500, None), (2, 1, 8, 14), (1, 1, 4, 6), (7, 25, 700, None)],
)
def test_build_circuit_sizes(n, layers, params, gates):
    circ = build_circuit(AnsatzConfig(n, layers))
    assert circ.n_params == params
    if gates is not None:
        assert len(circ.gates) == gates


def test_layer_is_hea1_then_hea2():
    circ = build_circuit(AnsatzConfig(3, 2))
    expected = build_hea1_layer(3, 0) + build_hea2_layer(3, 6) + build_hea1_layer(3, 12) + build_hea2_layer(3, 18)
    assert list(circ.gates) == expected


def test_config_validation():
    with pytest.raises(ContractError):
        AnsatzConfig(0, 1)
    with pytest.raises(ContractError):
        AnsatzConfig(2, 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 12), st.integers(1, 6))
def test_slot_layout_bijective(n, layers):
    circ = build_circuit(AnsatzConfig(n, layers))
    slots = [x.param_slot for x in circ.gates if x.param_slot is not None]
    assert slots == list(range(circ.n_params))
    assert circ.n_params == 4 * n * layers
    assert all(x.kind.is_rotation == (x.param_slot is not None) for x in circ.gates)


def test_deterministic_serialization():
    a = build_circuit(AnsatzConfig(4, 3)).to_json()
    b = build_circuit(AnsatzConfig(4, 3)).to_json()
    assert a == b
    doc = json.loads(a)
    assert doc["gates"][0] == {"kind": "H", "targets": [0], "param_slot": None}
    assert CircuitSpec.from_dict(doc) == build_circuit(AnsatzConfig(4, 3))


def test_circuit_from_gates_rejects_bad_slots():
    with pytest.raises(ContractError):
        circuit_from_gates([g(RX, 0, slot=1)], 1)
    with pytest.raises(ContractError):
        circuit_from_gates([g(H, 3)], 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 7), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_circuit_preserves_norm(n, layers, seed):
    rng = np.random.default_rng(seed)
    circ = build_circuit(AnsatzConfig(n, layers))
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    out, _ = forward(circ, rng.uniform(0, 2 * np.pi, circ.n_params), StateVector(n, amps / np.linalg.norm(amps)), [])
    assert abs(out.norm - 1) <= 1e-10
