import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfqc.circuit import make_circuit
from cfqc.quantum_core import (
    CNOT,
    GATE_NPARAMS,
    SWAP,
    DensityMatrix,
    Gate,
    H,
    StateVector,
    X,
    apply_gate,
    circuit_unitary,
    cnot,
    fidelity_states,
    gate_matrix,
    kron,
    partial_trace,
    phase_aligned_deviation,
    run_gates,
)

ALL_KINDS = ["H", "X", "Y", "Z", "S", "T", "RX", "RY", "RZ", "U3", "CNOT"]
I2 = np.eye(2)


def _embed(op, q, n):
    """Independent oracle: explicit Kronecker embedding of a 1-qubit op."""
    factors = [I2] * n
    factors[q] = op
    out = np.array([[1.0]])
    for f in factors:
        out = np.kron(out, f)
    return out


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_gate_matrices_unitary(kind, rng):
    m = gate_matrix(kind, rng.uniform(-3, 3, GATE_NPARAMS.get(kind, 0)))
    assert np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) < 1e-12


def test_rotation_conventions():
    theta = 0.37
    assert np.allclose(gate_matrix("RZ", [theta]), np.diag(np.exp([-0.5j * theta, 0.5j * theta])))
    assert np.allclose(gate_matrix("U3", [np.pi / 2, 0, np.pi]), H)
    assert np.allclose(gate_matrix("RX", [np.pi]), -1j * X)


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("CNOT", (0,))
    with pytest.raises(ValueError):
        Gate("CNOT", (1, 1))
    with pytest.raises(ValueError):
        Gate("FOO", (0,))
    with pytest.raises(ValueError):
        Gate("RX", (0,))
    with pytest.raises(IndexError):
        apply_gate(StateVector.basis("0"), Gate("H", (1,)))


def test_hadamard_on_zero():
    out = apply_gate(StateVector.basis("0"), Gate("H", (0,)))
    assert np.allclose(out.amplitudes, [2**-0.5, 2**-0.5])


def test_cnot_truth_table():
    out = apply_gate(StateVector.basis("10"), cnot(0, 1))
    assert np.allclose(out.amplitudes, StateVector.basis("11").amplitudes)


def test_three_cnots_swap_01():
    out = run_gates(StateVector.basis("01"), [cnot(0, 1), cnot(1, 0), cnot(0, 1)])
    assert np.allclose(out.amplitudes, StateVector.basis("10").amplitudes)


def test_qubit_zero_is_msb():
    out = apply_gate(StateVector.basis("000"), Gate("X", (0,)))
    assert np.argmax(np.abs(out.amplitudes)) == 0b100


def test_apply_matches_kron_oracle(rng):
    n = 4
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    psi /= np.linalg.norm(psi)
    for q in range(n):
        g = Gate("U3", (q,), rng.uniform(-3, 3, 3))
        got = apply_gate(StateVector(psi), g).amplitudes
        assert np.allclose(got, _embed(g.matrix, q, n) @ psi, atol=1e-12)


def test_circuit_unitary_examples():
    assert np.allclose(circuit_unitary(make_circuit([("p", "photon", "H")])), I2)
    assert np.allclose(circuit_unitary(make_circuit([("p", "photon", "H")], [("h", "p")])), H)
    c = make_circuit(
        [("a", "photon", "H"), ("b", "photon", "H")],
        [("h", "b"), ("h", "a"), ("cnot", "b", "a"), ("h", "b"), ("h", "a")],
    )
    # reversed-role CNOT by explicit permutation: |ab> -> |a xor b, b>
    oracle = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            oracle[2 * (a ^ b) + b, 2 * a + b] = 1
    # H-sandwich of CNOT(b->a) is CNOT(a->b)
    assert phase_aligned_deviation(circuit_unitary(c), CNOT) < 1e-10
    reversed_cnot = make_circuit([("a", "photon", "H"), ("b", "photon", "H")], [("cnot", "b", "a")])
    assert np.allclose(circuit_unitary(reversed_cnot), oracle)


def test_circuit_unitary_composition(rng):
    from cfqc.circuit import random_circuit

    for _ in range(20):
        c1 = random_circuit(rng, n_photons=3, n_atoms=1)
        c2 = random_circuit(rng, n_photons=3, n_atoms=1)
        joined = c1.with_gates(c1.gates + c2.gates)
        lhs = circuit_unitary(joined)
        rhs = circuit_unitary(c2) @ circuit_unitary(c1)
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_circuit_unitary_budget():
    class Big:
        n_qubits = 13
        gates = ()

    with pytest.raises(ValueError):
        circuit_unitary(Big())


def test_norm_preserved_randomized(rng):
    kinds = ALL_KINDS
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        state = StateVector(psi / np.linalg.norm(psi))
        for _ in range(5):
            kind = kinds[int(rng.integers(len(kinds)))]
            ops = rng.choice(n, size=2 if kind == "CNOT" else 1, replace=False)
            state = apply_gate(state, Gate(kind, ops, rng.uniform(-3, 3, GATE_NPARAMS.get(kind, 0))))
        worst = max(worst, abs(state.norm2 - 1))
    assert worst < 1e-12


def test_statevector_invariants():
    with pytest.raises(ValueError):
        StateVector(np.ones(3))
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0]))
    s = StateVector(np.array([0.5, 0.0]))       # sub-normalized is allowed
    assert s.n_qubits == 1 and abs(s.norm2 - 0.25) < 1e-15
    assert abs(s.normalized().norm2 - 1) < 1e-15
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1.0


def test_density_invariants():
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[1, 1], [0, 0]], dtype=complex))       # not Hermitian
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.5, 0.4]).astype(complex))              # trace
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5]).astype(complex))             # not PSD
    assert abs(DensityMatrix.maximally_mixed(2).purity - 0.25) < 1e-12


def test_partial_trace_examples():
    rho = StateVector.basis("00").to_density()
    assert np.allclose(partial_trace(rho, [0]).matrix, np.diag([1, 0]))
    bell = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2)).to_density()
    assert np.allclose(partial_trace(bell, [0]).matrix, np.eye(2) / 2)
    with pytest.raises(ValueError):
        partial_trace(bell, [])


def test_partial_trace_of_ideal_gate_output():
    from cfqc.gate_model import AtomPhotonInput, ideal_map

    out = ideal_map(AtomPhotonInput.equal_superposition()).joint_state()
    atom = partial_trace(out.to_density(), [0])
    assert np.allclose(atom.matrix, np.diag([0.5, 0.5]), atol=1e-12)


def test_partial_trace_matches_einsum_oracle(rng):
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    m = a @ a.conj().T
    rho = DensityMatrix(m / np.trace(m))
    t = rho.matrix.reshape(2, 2, 2, 2, 2, 2)
    oracle = np.einsum("abcdbf->acdf", t).reshape(4, 4)    # trace out qubit 1
    assert np.allclose(partial_trace(rho, [0, 2]).matrix, oracle, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_partial_trace_product_factor(seed):
    rng = np.random.default_rng(seed)
    factors = []
    for _ in range(3):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        factors.append(v / np.linalg.norm(v))
    rho = StateVector.product(*factors).to_density()
    for q in range(3):
        got = partial_trace(rho, [q]).matrix
        assert np.max(np.abs(got - np.outer(factors[q], factors[q].conj()))) < 1e-12


def test_fidelity_examples(rng):
    zero = StateVector.basis("0").to_density()
    one = StateVector.basis("1").to_density()
    plus = StateVector(np.array([1, 1]) / np.sqrt(2)).to_density()
    assert abs(fidelity_states(zero, zero) - 1) < 1e-12
    assert abs(fidelity_states(zero, one)) < 1e-12
    assert abs(fidelity_states(zero, plus) - 0.5) < 1e-12
    with pytest.raises(ValueError):
        fidelity_states(zero, StateVector.basis("00").to_density())


def test_fidelity_pure_formula_and_symmetry(rng):
    for _ in range(20):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = DensityMatrix(a @ a.conj().T / np.trace(a @ a.conj().T))
        phi = rng.normal(size=4) + 1j * rng.normal(size=4)
        phi /= np.linalg.norm(phi)
        sigma = StateVector(phi).to_density()
        expect = float(np.real(phi.conj() @ rho.matrix @ phi))
        assert abs(fidelity_states(rho, sigma) - expect) < 1e-9
        assert abs(fidelity_states(rho, sigma) - fidelity_states(sigma, rho)) < 1e-9


def test_phase_alignment():
    assert phase_aligned_deviation(SWAP, np.exp(0.7j) * SWAP) < 1e-12
    assert phase_aligned_deviation(CNOT, np.eye(4)) > 0.5
    assert np.allclose(kron(I2, X), np.kron(I2, X))
