"""
Protocols built from the counterfactual gate
============================================

Communication, swap and a four-qubit erasure code, first as exact circuits
and then on a finite device.
"""
import numpy as np

from cfqc.gate_model import AtomPhotonInput, CfGateParams, NoiseParams, compose_fidelity_bound, finite_map
from cfqc.protocols import (
    ErasureCode, build_communication_circuit, parallel_gates_circuit, run_on_device,
    run_state_transfer, superposed_atoms_input, verify_communication,
    verify_erasure, verify_erasure_correctable, verify_swap,
)
from cfqc.quantum_core import DensityMatrix, StateVector

for verify in (verify_communication, verify_swap, verify_erasure):
    print(verify().to_text(), "\n")

# transfer a mixed atom state onto a photon, atom reset to |e>
rho = DensityMatrix(np.diag([0.3, 0.7]).astype(complex))
r = run_state_transfer(rho)
print("transferred:", np.round(np.diag(r.output_state.matrix).real, 6), "fidelity", round(r.transfer_fidelity, 12))

# a code that leaks logical information on one qubit fails the erasure test
print("\n" + verify_erasure_correctable(ErasureCode.sabotaged()).to_text())

# efficiency multiplies over gates, fidelity stays above the worst-case bound
params = CfGateParams(10, 200)
gate = finite_map(AtomPhotonInput.equal_superposition(), params)
print(f"\none gate: E={gate.efficiency:.4f} F={gate.fidelity:.5f}")
for K in (1, 2, 3):
    run = run_on_device(parallel_gates_circuit(K), superposed_atoms_input(K), params)
    print(f"K={K}: E={run.efficiency:.4f} (E^K={gate.efficiency**K:.4f})  "
          f"F={run.fidelity:.5f} >= {compose_fidelity_bound(gate.fidelity, K):.5f}")

state = StateVector.product(np.array([1, 1]) / np.sqrt(2), np.array([1, 0]))
for gamma in (0.0, 0.05):
    run = run_on_device(build_communication_circuit(), state, params, NoiseParams(gamma=gamma))
    print(f"communication, gamma={gamma}: E={run.efficiency:.4f} F={run.fidelity:.5f}")
