import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_amplitudes
from deepvqc.ansatz import AnsatzConfig, build_circuit, circuit_from_gates
from deepvqc.autodiff import (
    forward,
    grad_adjoint,
    grad_finite_diff,
    grad_parameter_shift,
    oracle_sweep,
)
from deepvqc.errors import ContractError
from deepvqc.statevector import GateKind, GateOp, StateVector, init_zero_state

GRADS = [grad_adjoint, grad_parameter_shift]


def single(kind):
    return circuit_from_gates([GateOp(kind, (0,), 0)], 1)


class TestForward:
    def test_empty_circuit(self):
        out, e = forward(circuit_from_gates([], 1), [], init_zero_state(1), [0])
        np.testing.assert_array_equal(out.amplitudes, [1, 0])
        assert e.tolist() == [1.0]

    def test_ry_pi(self):
        _, e = forward(single(GateKind.RY), [math.pi], init_zero_state(1), [0])
        assert abs(e[0] + 1) <= 1e-12

    def test_ry_half_pi(self):
        _, e = forward(single(GateKind.RY), [math.pi / 2], init_zero_state(1), [0])
        assert abs(e[0]) <= 1e-12

    def test_theta_length_mismatch(self):
        with pytest.raises(ContractError):
            forward(single(GateKind.RY), [0.1, 0.2], init_zero_state(1), [0])

    def test_nonfinite_theta(self):
        with pytest.raises(ContractError):
            forward(single(GateKind.RY), [float("nan")], init_zero_state(1), [0])


@pytest.mark.parametrize("grad", GRADS)
@pytest.mark.parametrize("theta,expected", [(0.0, 0.0), (math.pi / 2, -1.0)])
def test_single_ry_gradient(grad, theta, expected):
    assert abs(grad(single(GateKind.RY), [theta], init_zero_state(1), [0])[0, 0] - expected) <= 1e-12


@pytest.mark.parametrize("grad", GRADS)
def test_random_small_circuit_matches_finite_diff(grad, rng):
    circ = build_circuit(AnsatzConfig(3, 2))
    theta = rng.uniform(0, 2 * np.pi, circ.n_params)
    state = StateVector(3, random_amplitudes(rng, 3))
    fd = grad_finite_diff(circ, theta, state, [0, 1, 2], 1e-5)
    assert np.abs(grad(circ, theta, state, [0, 1, 2]) - fd).max() <= 1e-6


def test_adjoint_equals_shift_over_seeds():
    circ = build_circuit(AnsatzConfig(5, 3))
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        theta = rng.uniform(0, 2 * np.pi, circ.n_params)
        state = StateVector(5, random_amplitudes(rng, 5))
        a = grad_adjoint(circ, theta, state, range(5))
        s = grad_parameter_shift(circ, theta, state, range(5))
        worst = max(worst, np.abs(a - s).max())
    assert worst <= 1e-9


def test_zero_parameter_circuit():
    circ = circuit_from_gates([GateOp(GateKind.H, (0,))], 1)
    assert grad_adjoint(circ, [], init_zero_state(1), [0]).shape == (1, 0)


class TestFiniteDiff:
    def test_ry(self):
        assert abs(grad_finite_diff(single(GateKind.RY), [math.pi / 2], init_zero_state(1), [0], 1e-5)[0, 0] + 1) <= 1e-9

    def test_rx_stationary(self):
        assert abs(grad_finite_diff(single(GateKind.RX), [0.0], init_zero_state(1), [0], 1e-5)[0, 0]) <= 1e-9

    @pytest.mark.parametrize("step", [0.0, -1e-5])
    def test_bad_step(self, step):
        with pytest.raises(ContractError):
            grad_finite_diff(single(GateKind.RX), [0.0], init_zero_state(1), [0], step)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 2), st.integers(0, 2**32 - 1))
def test_gradients_bounded(n, layers, seed):
    rng = np.random.default_rng(seed)
    circ = build_circuit(AnsatzConfig(n, layers))
    jac = grad_adjoint(circ, rng.uniform(0, 2 * np.pi, circ.n_params), StateVector(n, random_amplitudes(rng, n)), range(n))
    assert np.all(np.isfinite(jac))
    assert np.abs(jac).max() <= 1 + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_hh_insertion_is_identity(n, seed):
    rng = np.random.default_rng(seed)
    base = build_circuit(AnsatzConfig(n, 1))
    gates = list(base.gates)
    pos = int(rng.integers(len(gates) + 1))
    q = int(rng.integers(n))
    padded = circuit_from_gates(gates[:pos] + [GateOp(GateKind.H, (q,))] * 2 + gates[pos:], n)
    theta = rng.uniform(0, 2 * np.pi, base.n_params)
    state = StateVector(n, random_amplitudes(rng, n))
    _, e0 = forward(base, theta, state, range(n))
    _, e1 = forward(padded, theta, state, range(n))
    assert np.abs(e0 - e1).max() <= 1e-12


def test_sweep_detects_sign_flip():
    ok = oracle_sweep(n_cases=5, seed=3, max_qubits=3, max_layers=2)
    bad = oracle_sweep(n_cases=5, seed=3, max_qubits=3, max_layers=2, sign_flip=True)
    assert ok["max_adjoint_vs_shift"] <= 1e-9
    assert bad["max_adjoint_vs_shift"] > 1e-3
    assert oracle_sweep(n_cases=5, seed=3, max_qubits=3, max_layers=2) == ok
