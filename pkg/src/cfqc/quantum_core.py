"""Small exact simulator: state vectors, density matrices and the standard gate set.

Qubit 0 is the most significant bit of a basis-state index, so ``|10>`` on two
qubits is index 2.  Atoms use ``|e> -> 0`` and ``|g> -> 1``; photons use
``|H> -> 0`` and ``|V> -> 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_UNITARY_QUBITS = 12

SQRT1_2 = 1.0 / np.sqrt(2.0)

GATE_ARITY = {
    "H": 1, "X": 1, "Y": 1, "Z": 1, "S": 1, "T": 1,
    "RX": 1, "RY": 1, "RZ": 1, "U3": 1, "CNOT": 2,
}
GATE_NPARAMS = {"RX": 1, "RY": 1, "RZ": 1, "U3": 3}

I2 = np.eye(2, dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
T = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

_FIXED = {"H": H, "X": X, "Y": Y, "Z": Z, "S": S, "T": T, "CNOT": CNOT}


def _rx(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta):
    return np.array(
        [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex
    )


def _u3(theta, phi, lam):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def gate_matrix(kind: str, params: Sequence[float] = ()) -> np.ndarray:
    """Unitary of a gate kind; two-qubit matrices use (control, target) order."""
    kind = kind.upper()
    if kind in _FIXED:
        return _FIXED[kind].copy()
    if kind == "RX":
        return _rx(*params)
    if kind == "RY":
        return _ry(*params)
    if kind == "RZ":
        return _rz(*params)
    if kind == "U3":
        return _u3(*params)
    raise ValueError(f"unknown gate kind {kind!r}")


@dataclass(frozen=True)
class Gate:
    kind: str
    operands: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "operands", tuple(int(q) for q in self.operands))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {kind!r}")
        if len(self.operands) != GATE_ARITY[kind]:
            raise ValueError(
                f"{kind} takes {GATE_ARITY[kind]} operand(s), got {len(self.operands)}"
            )
        if len(set(self.operands)) != len(self.operands):
            raise ValueError(f"{kind} operands must be distinct: {self.operands}")
        if any(q < 0 for q in self.operands):
            raise ValueError(f"negative qubit index in {self.operands}")
        if len(self.params) != GATE_NPARAMS.get(kind, 0):
            raise ValueError(
                f"{kind} takes {GATE_NPARAMS.get(kind, 0)} parameter(s), "
                f"got {len(self.params)}"
            )

    @property
    def matrix(self) -> np.ndarray:
        return gate_matrix(self.kind, self.params)

    @property
    def is_cnot(self) -> bool:
        return self.kind == "CNOT"

    @property
    def control(self) -> int:
        return self.operands[0]

    @property
    def target(self) -> int:
        return self.operands[-1]


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _n_qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        amps = _readonly(np.ravel(self.amplitudes))
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "n_qubits", _n_qubits_for(amps.size))
        if self.norm2 > 1 + 1e-12:
            raise ValueError(f"state norm^2 {self.norm2} exceeds 1")

    @classmethod
    def basis(cls, bits: str | Sequence[int]) -> "StateVector":
        """Computational basis state, e.g. ``basis("0110")``."""
        bits = [int(b) for b in bits]
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int("".join(map(str, bits)) or "0", 2)] = 1.0
        return cls(amps)

    @classmethod
    def zeros(cls, n_qubits: int) -> "StateVector":
        return cls.basis([0] * n_qubits)

    @classmethod
    def product(cls, *factors: "StateVector | Sequence[complex]") -> "StateVector":
        out = np.array([1.0 + 0j])
        for f in factors:
            out = np.kron(out, f.amplitudes if isinstance(f, StateVector) else f)
        return cls(out)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "StateVector":
        n = np.sqrt(self.norm2)
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_density(self) -> "DensityMatrix":
        psi = self.normalized().amplitudes
        return DensityMatrix(np.outer(psi, psi.conj()))

    def __len__(self):
        return self.amplitudes.size


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        m = _readonly(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "n_qubits", _n_qubits_for(m.shape[0]))
        if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > 1e-12:
            raise ValueError(f"density matrix trace {np.trace(m).real} != 1")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")

    @classmethod
    def mixture(
        cls, ensemble: Iterable[tuple[float, StateVector]]
    ) -> "DensityMatrix":
        rho = None
        for p, psi in ensemble:
            term = p * np.outer(psi.amplitudes, psi.amplitudes.conj())
            rho = term if rho is None else rho + term
        return cls(rho)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        d = 2**n_qubits
        return cls(np.eye(d) / d)

    @property
    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def kron(*ops) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def apply_matrix(
    amplitudes: np.ndarray, matrix: np.ndarray, operands: Sequence[int], n_qubits: int
) -> np.ndarray:
    """Apply a k-qubit operator (not necessarily unitary) to chosen qubits.

    ``amplitudes`` may carry trailing columns: shape ``(2**n,)`` or ``(2**n, m)``.
    """
    k = len(operands)
    if matrix.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {matrix.shape} does not fit {k} operand(s)")
    for q in operands:
        if not 0 <= q < n_qubits:
            raise IndexError(f"qubit index {q} out of range for {n_qubits} qubits")
    extra = amplitudes.shape[1:]
    psi = amplitudes.reshape((2,) * n_qubits + extra)
    op = matrix.reshape((2,) * (2 * k))
    psi = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), list(operands)))
    psi = np.moveaxis(psi, list(range(k)), list(operands))
    return psi.reshape(amplitudes.shape)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    return StateVector(
        apply_matrix(state.amplitudes, gate.matrix, gate.operands, state.n_qubits)
    )


def run_gates(state: StateVector, gates: Iterable[Gate]) -> StateVector:
    amps = state.amplitudes
    for g in gates:
        amps = apply_matrix(amps, g.matrix, g.operands, state.n_qubits)
    return StateVector(amps)


def circuit_unitary(circuit) -> np.ndarray:
    """Product of gate matrices in application order.

    Accepts anything with ``n_qubits`` and ``gates`` attributes.
    """
    n = circuit.n_qubits
    if n > MAX_UNITARY_QUBITS:
        raise ValueError(
            f"circuit has {n} qubits; unitary budget is {MAX_UNITARY_QUBITS}"
        )
    u = np.eye(2**n, dtype=complex)
    for g in circuit.gates:
        u = apply_matrix(u, g.matrix, g.operands, n)
    return u


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    keep = sorted(set(keep))
    n = rho.n_qubits
    if not keep:
        raise ValueError("keep set must not be empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"keep indices {keep} out of range for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    t = rho.matrix.reshape((2,) * (2 * n))
    # trace pairs from the highest index down so remaining axes keep their order
    for q in sorted(traced, reverse=True):
        cur = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=q + cur)
    d = 2 ** len(keep)
    m = t.reshape(d, d)
    return DensityMatrix((m + m.conj().T) / 2)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity_states(a: DensityMatrix, b: DensityMatrix) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(a) b sqrt(a)))**2``."""
    if a.matrix.shape != b.matrix.shape:
        raise ValueError(
            f"dimension mismatch: {a.matrix.shape} vs {b.matrix.shape}"
        )
    # a pure argument gives <phi|rho|phi> directly; the square-root route
    # would amplify rounding in the zero eigenvalues
    for pure, other in ((b, a), (a, b)):
        w, v = np.linalg.eigh(pure.matrix)
        if w[-1] > 1 - 1e-12:
            phi = v[:, -1]
            f = float(np.real(phi.conj() @ other.matrix @ phi))
            return min(max(f, 0.0), 1.0)
    ra = _psd_sqrt(a.matrix)
    inner = ra @ b.matrix @ ra
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    f = float(np.sum(np.sqrt(np.clip(w, 0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def phase_aligned_deviation(a: np.ndarray, b: np.ndarray) -> float:
    """Max entry deviation between ``a`` and ``b`` after removing a global phase."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    overlap = np.vdot(a, b)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.max(np.abs(a * phase - b), initial=0.0))


def equal_up_to_phase(a, b, atol: float = 1e-10) -> bool:
    return phase_aligned_deviation(a, b) < atol
