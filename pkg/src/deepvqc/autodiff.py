"""Forward simulation and exact gradients of Pauli-Z expectations.

Three routes to d<Z_q>/d(theta_k):

* ``grad_adjoint`` -- one reverse sweep over the gate list, shared by all
  parameters.  This is the path used for training.
* ``grad_parameter_shift`` -- two extra forward runs per parameter, exact for
  rotations whose generator has eigenvalues +-1/2.
* ``grad_finite_diff`` -- central differences, kept purely as a test oracle.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .ansatz import AnsatzConfig, CircuitSpec, build_circuit
from .errors import ContractError, QubitIndexError
from .statevector import (
    StateVector,
    apply_gate_batch,
    apply_gate_dagger_batch,
    apply_generator_batch,
    expectation_z_batch,
    z_signs,
)

DEFAULT_FD_STEP = 1e-5


def check_theta(circuit: CircuitSpec, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (circuit.n_params,):
        raise ContractError(f"theta has shape {theta.shape}, circuit needs ({circuit.n_params},)")
    if not np.all(np.isfinite(theta)):
        raise ContractError("theta contains NaN or Inf")
    return theta


def _check_observe(circuit: CircuitSpec, observe: Sequence[int]) -> list[int]:
    observe = [int(q) for q in observe]
    for q in observe:
        if not 0 <= q < circuit.n_qubits:
            raise QubitIndexError(f"observed qubit {q} out of range for {circuit.n_qubits} qubits")
    return observe


def _check_input(circuit: CircuitSpec, state: StateVector) -> None:
    if state.n_qubits != circuit.n_qubits:
        raise ContractError(f"state has {state.n_qubits} qubits, circuit has {circuit.n_qubits}")


def run_batch(circuit: CircuitSpec, theta: np.ndarray, batch: np.ndarray) -> np.ndarray:
    """Evolve every row of ``batch`` through the circuit, in place."""
    n = circuit.n_qubits
    for gate in circuit.gates:
        angle = None if gate.param_slot is None else float(theta[gate.param_slot])
        apply_gate_batch(batch, n, gate, angle)
    return batch


def adjoint_vjp(
    circuit: CircuitSpec,
    theta: np.ndarray,
    final: np.ndarray,
    weights: np.ndarray,
    observe: Sequence[int],
) -> np.ndarray:
    """Gradient of ``sum_j weights[b, j] <Z_observe[j]>`` for each state ``b``.

    ``final`` holds the circuit outputs (batch, 2**n) and is consumed: on
    return it has been swept back to the circuit inputs.  Returns an array
    of shape (batch, n_params).
    """
    n = circuit.n_qubits
    signs = np.stack([z_signs(n, q) for q in observe]) if observe else np.zeros((0, 1 << n))
    # the weighted observable is diagonal, so lambda = O psi is elementwise
    lam = (np.asarray(weights, dtype=np.float64) @ signs) * final
    psi = final
    grads = np.zeros((psi.shape[0], circuit.n_params))
    scratch = np.empty_like(psi)
    for gate in reversed(circuit.gates):
        if gate.param_slot is None:
            apply_gate_dagger_batch(psi, n, gate)
            apply_gate_dagger_batch(lam, n, gate)
            continue
        angle = float(theta[gate.param_slot])
        # d/dt <psi|U^+ O U|psi> with U = exp(-i t G/2) reduces to Im<lam|G|psi>
        np.copyto(scratch, psi)
        apply_generator_batch(scratch, n, gate)
        grads[:, gate.param_slot] = np.einsum("bi,bi->b", lam.conj(), scratch).imag
        apply_gate_dagger_batch(psi, n, gate, angle)
        apply_gate_dagger_batch(lam, n, gate, angle)
    return grads


def forward(circuit: CircuitSpec, theta, input: StateVector, observe: Sequence[int]) -> tuple[StateVector, np.ndarray]:
    theta = check_theta(circuit, theta)
    observe = _check_observe(circuit, observe)
    _check_input(circuit, input)
    batch = run_batch(circuit, theta, input.amplitudes.copy()[None, :])
    return StateVector(circuit.n_qubits, batch[0]), expectation_z_batch(batch, circuit.n_qubits, observe)[0]


def _expectations(circuit: CircuitSpec, theta: np.ndarray, input: StateVector, observe: list[int]) -> np.ndarray:
    batch = run_batch(circuit, theta, input.amplitudes.copy()[None, :])
    return expectation_z_batch(batch, circuit.n_qubits, observe)[0]


def grad_adjoint(circuit: CircuitSpec, theta, input: StateVector, observe: Sequence[int]) -> np.ndarray:
    """Jacobian of the observed expectations, shape (len(observe), n_params)."""
    theta = check_theta(circuit, theta)
    observe = _check_observe(circuit, observe)
    _check_input(circuit, input)
    m = len(observe)
    if m == 0 or circuit.n_params == 0:
        return np.zeros((m, circuit.n_params))
    final = run_batch(circuit, theta, input.amplitudes.copy()[None, :])
    # one row per observable, each with a one-hot weight
    final = np.repeat(final, m, axis=0)
    return adjoint_vjp(circuit, theta, final, np.eye(m), observe)


def grad_parameter_shift(circuit: CircuitSpec, theta, input: StateVector, observe: Sequence[int]) -> np.ndarray:
    theta = check_theta(circuit, theta)
    observe = _check_observe(circuit, observe)
    _check_input(circuit, input)
    jac = np.zeros((len(observe), circuit.n_params))
    shift = math.pi / 2
    for k in range(circuit.n_params):
        plus, minus = theta.copy(), theta.copy()
        plus[k] += shift
        minus[k] -= shift
        jac[:, k] = 0.5 * (_expectations(circuit, plus, input, observe) - _expectations(circuit, minus, input, observe))
    return jac


def grad_finite_diff(
    circuit: CircuitSpec, theta, input: StateVector, observe: Sequence[int], step: float = DEFAULT_FD_STEP
) -> np.ndarray:
    if not step > 0:
        raise ContractError(f"finite-difference step must be positive, got {step}")
    theta = check_theta(circuit, theta)
    observe = _check_observe(circuit, observe)
    _check_input(circuit, input)
    jac = np.zeros((len(observe), circuit.n_params))
    for k in range(circuit.n_params):
        plus, minus = theta.copy(), theta.copy()
        plus[k] += step
        minus[k] -= step
        jac[:, k] = (_expectations(circuit, plus, input, observe) - _expectations(circuit, minus, input, observe)) / (2 * step)
    return jac


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return StateVector(n_qubits, amps / np.linalg.norm(amps))


def oracle_sweep(
    n_cases: int = 100,
    seed: int = 0,
    max_qubits: int = 6,
    max_layers: int = 3,
    step: float = DEFAULT_FD_STEP,
    sign_flip: bool = False,
) -> dict:
    """Compare adjoint, parameter-shift and finite-difference Jacobians on
    seeded random ansatz circuits.

    ``sign_flip`` negates the adjoint result; it exists only as a negative
    control for the checker itself.
    """
    rng = np.random.default_rng(seed)
    worst_as, worst_sf, max_abs = 0.0, 0.0, 0.0
    worst_as_case = worst_sf_case = -1
    for case in range(n_cases):
        n = int(rng.integers(1, max_qubits + 1))
        layers = int(rng.integers(1, max_layers + 1))
        circuit = build_circuit(AnsatzConfig(n, layers))
        theta = rng.uniform(0, 2 * math.pi, circuit.n_params)
        state = random_state(n, rng)
        observe = list(range(n))
        adj = grad_adjoint(circuit, theta, state, observe)
        if sign_flip:
            adj = -adj
        shift = grad_parameter_shift(circuit, theta, state, observe)
        fd = grad_finite_diff(circuit, theta, state, observe, step)
        d_as = float(np.abs(adj - shift).max())
        d_sf = float(np.abs(shift - fd).max())
        if d_as > worst_as:
            worst_as, worst_as_case = d_as, case
        if d_sf > worst_sf:
            worst_sf, worst_sf_case = d_sf, case
        max_abs = max(max_abs, float(np.abs(shift).max()))
    return {
        "n_cases": n_cases,
        "seed": seed,
        "max_adjoint_vs_shift": worst_as,
        "worst_adjoint_case": worst_as_case,
        "max_shift_vs_finite_diff": worst_sf,
        "worst_finite_diff_case": worst_sf_case,
        "max_abs_gradient": max_abs,
    }
