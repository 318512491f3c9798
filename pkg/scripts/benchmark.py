"""Time one composite layer and a full forward pass on a 16-qubit register."""

import argparse
import time

import numpy as np

from deepvqc.ansatz import AnsatzConfig, build_circuit
from deepvqc.autodiff import run_batch
from deepvqc.statevector import amplitude_encode


def timed(circuit, theta, psi, repeats):
    best = float("inf")
    for _ in range(repeats):
        batch = psi.copy()
        t0 = time.perf_counter()
        run_batch(circuit, theta, batch)
        best = min(best, time.perf_counter() - t0)
    return best, batch


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--qubits", type=int, default=16)
    p.add_argument("--layers", type=int, default=25)
    p.add_argument("--repeats", type=int, default=3)
    a = p.parse_args()
    rng = np.random.default_rng(0)
    psi = amplitude_encode(rng.uniform(0, 1, 1 << a.qubits), a.qubits).amplitudes[None, :]
    for layers in (1, a.layers):
        circuit = build_circuit(AnsatzConfig(a.qubits, layers))
        theta = rng.uniform(0, 2 * np.pi, circuit.n_params)
        t, out = timed(circuit, theta, psi, a.repeats)
        drift = abs(np.linalg.norm(out) - 1)
        print(f"{a.qubits} qubits, {layers:>2} layer(s), {len(circuit.gates):>5} gates: {t:.3f} s  |norm-1| {drift:.1e}")


if __name__ == "__main__":
    main()
