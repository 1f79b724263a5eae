"""Depth scheduling of counterfactual CNOTs over a pool of atoms.

Only CNOTs cost depth: each one takes roughly M*N photon round trips, while
single-qubit gates are treated as free.
"""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, make_circuit


@dataclass(frozen=True)
class ScheduledCnot:
    source: int            # index of the originating gate in the input circuit
    operands: tuple        # qubit labels (circuit indices or atom names)


@dataclass(frozen=True)
class Schedule:
    assignment: dict       # source gate index -> atom identifier (None if no routing)
    operations: tuple      # ScheduledCnot, in emission order
    layers: tuple          # frozensets of indices into ``operations``

    @property
    def depth(self) -> int:
        return len(self.layers)


def _expand(circuit: Circuit, gate_index: int, atom: str):
    g = circuit.gates[gate_index]
    c, t = g.operands
    return [
        ScheduledCnot(gate_index, (c, atom)),
        ScheduledCnot(gate_index, (atom, t)),
        ScheduledCnot(gate_index, (c, atom)),
    ]


def schedule(circuit: Circuit, atom_count: int) -> Schedule:
    """Assign photon-photon CNOTs to atoms and layer the resulting CNOTs.

    Each photon-photon CNOT becomes a three-CNOT routing block on one of
    ``atom_count`` ancilla atoms (``__atom0`` ...).  Blocks go to the atom
    that lets them start earliest, lowest atom first on ties; CNOTs already
    touching an atom are kept as single operations.  Layers are filled ASAP
    in gate order, which keeps every layer qubit-disjoint.
    """
    if atom_count < 1:
        raise ValueError(f"atom_count must be >= 1, got {atom_count}")
    atoms = [f"__atom{i}" for i in range(atom_count)]
    ready: dict = {}
    ops: list[ScheduledCnot] = []
    layer_of: list[int] = []
    assignment: dict = {}

    def place(op: ScheduledCnot):
        layer = max(ready.get(q, 0) for q in op.operands)
        for q in op.operands:
            ready[q] = layer + 1
        ops.append(op)
        layer_of.append(layer)

    for i, g in enumerate(circuit.gates):
        if not g.is_cnot:
            continue
        c, t = g.operands
        if circuit.qubits[c].is_atom or circuit.qubits[t].is_atom:
            assignment[i] = None
            place(ScheduledCnot(i, (c, t)))
            continue
        start = max(ready.get(c, 0), ready.get(t, 0))
        best = min(atoms, key=lambda a: (max(start, ready.get(a, 0)), atoms.index(a)))
        assignment[i] = best
        for op in _expand(circuit, i, best):
            place(op)

    depth = max(layer_of, default=-1) + 1
    layers = tuple(
        frozenset(k for k, lay in enumerate(layer_of) if lay == d) for d in range(depth)
    )
    return Schedule(assignment, tuple(ops), layers)


def paired_cnot_circuit(n: int) -> Circuit:
    """n photons in n/2 disjoint pairs, one CNOT per pair and nothing else."""
    if n < 2 or n % 2:
        raise ValueError(f"n must be a positive even number, got {n}")
    qubits = [(f"p{i}", "photon", "H") for i in range(n)]
    gates = [("cnot", f"p{2 * i}", f"p{2 * i + 1}") for i in range(n // 2)]
    return make_circuit(qubits, gates)
