"""Rewrite passes that bring arbitrary CNOT circuits into atom-controlled special form."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .circuit import ATOM, Circuit, CircuitError, QubitDecl
from .quantum_core import Gate, circuit_unitary, cnot, phase_aligned_deviation

ANCILLA_PREFIX = "__atom"
EQUIVALENCE_TOL = 1e-9


def swap_direction(gate: Gate) -> list[Gate]:
    """CNOT(c->t) as H t, H c, CNOT(t->c), H t, H c."""
    if not gate.is_cnot:
        raise ValueError(f"swap_direction needs a CNOT, got {gate.kind}")
    c, t = gate.operands
    return [Gate("H", (t,)), Gate("H", (c,)), cnot(t, c), Gate("H", (t,)), Gate("H", (c,))]


def relocate_control(gate: Gate, atom: int) -> list[Gate]:
    """Route CNOT(c->t) through an atom that starts (and ends) in logical 0.

    CNOT(c->atom); CNOT(atom->t); CNOT(c->atom), with the two outer CNOTs
    direction-swapped so the atom controls every CNOT in the block.
    """
    if not gate.is_cnot:
        raise ValueError(f"relocate_control needs a CNOT, got {gate.kind}")
    c, t = gate.operands
    if atom in (c, t):
        raise ValueError(f"atom {atom} coincides with an operand of CNOT({c}->{t})")
    fetch = swap_direction(cnot(c, atom))
    return fetch + [cnot(atom, t)] + list(fetch)


def cancel_hadamards(circuit: Circuit) -> Circuit:
    """Drop pairs of H gates that meet on a qubit with nothing in between."""
    gates = list(circuit.gates)
    keep = [True] * len(gates)
    last: dict[int, int] = {}
    for i, g in enumerate(gates):
        if g.kind == "H":
            q = g.operands[0]
            j = last.get(q)
            if j is not None and gates[j].kind == "H":
                keep[i] = keep[j] = False
                del last[q]
                continue
        for q in g.operands:
            last[q] = i
    return circuit.with_gates(g for g, k in zip(gates, keep) if k)


@dataclass(frozen=True)
class RewriteStats:
    cnots_before: int
    cnots_after: int
    relocated: int
    reversed: int
    ancilla_added: bool


def to_special_form(
    circuit: Circuit, peephole: bool = True, with_stats: bool = False
):
    """Rewrite so that every CNOT has an atom control and a photon target.

    Atoms are taken to start in their declared basis state.  A photon-photon
    CNOT is routed through an atom that is still in ``|e>`` and untouched
    since its last routing block; if no atom qualifies, an ancilla atom
    ``__atom0`` (initially ``|e>``) is appended and used from then on.
    """
    qubits = list(circuit.qubits)
    if any(g.kind not in ("H", "X", "Y", "Z", "S", "T", "RX", "RY", "RZ", "U3", "CNOT")
           for g in circuit.gates):
        raise CircuitError("unsupported gate kind")
    for g in circuit.cnots():
        if qubits[g.control].is_atom and qubits[g.target].is_atom:
            raise CircuitError(
                f"CNOT between atoms {qubits[g.control].name} and "
                f"{qubits[g.target].name} has no counterfactual realization"
            )
    n_cnots = len(circuit.cnots())
    if circuit.is_special_form():
        out = circuit
        stats = RewriteStats(n_cnots, n_cnots, 0, 0, False)
        return (out, stats) if with_stats else out

    clean = {i for i, q in enumerate(qubits) if q.is_atom and q.initial == "e"}
    ancilla = None
    out: list[Gate] = []
    relocated = reversed_ = 0

    for g in circuit.gates:
        if not g.is_cnot:
            clean.discard(g.operands[0])
            out.append(g)
            continue
        c, t = g.operands
        c_atom, t_atom = qubits[c].is_atom, qubits[t].is_atom
        if c_atom:
            clean.discard(c)
            out.append(g)
        elif t_atom:
            clean.discard(t)
            out.extend(swap_direction(g))
            reversed_ += 1
        else:
            usable = sorted(clean)
            if usable:
                atom = usable[0]
            else:
                if ancilla is None:
                    ancilla = len(qubits)
                    qubits.append(QubitDecl(f"{ANCILLA_PREFIX}0", ATOM, "e"))
                    clean.add(ancilla)
                atom = ancilla
            out.extend(relocate_control(g, atom))
            relocated += 1

    result = Circuit(tuple(qubits), tuple(out))
    if peephole:
        result = cancel_hadamards(result)
    stats = RewriteStats(
        n_cnots, len(result.cnots()), relocated, reversed_, ancilla is not None
    )
    return (result, stats) if with_stats else result


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    max_deviation: float

    def __bool__(self):
        return self.equivalent


def _restricted_block(
    circuit: Circuit,
    order: list[str],
    pinned: Mapping[str, int],
    input_only: Mapping[str, int],
) -> np.ndarray:
    """Unitary of ``circuit`` reordered to ``order`` + pinned qubits, then sliced.

    ``pinned`` qubits are fixed on both input and output; ``input_only`` qubits
    are fixed on input only.
    """
    u = circuit_unitary(circuit)
    n = circuit.n_qubits
    names = circuit.names
    t = u.reshape((2,) * (2 * n))
    perm = [names.index(x) for x in order] + [names.index(x) for x in pinned]
    t = t.transpose(perm + [n + p for p in perm])
    k = len(order)
    rows = [slice(None)] * k + [pinned[x] for x in pinned]
    cols = [
        input_only.get(x, slice(None)) for x in order
    ] + [pinned[x] for x in pinned]
    block = t[tuple(rows + cols)]
    n_free_in = sum(1 for x in order if x not in input_only)
    return block.reshape(2**k, 2**n_free_in)


def verify_equivalent(
    a: Circuit,
    b: Circuit,
    restriction: Mapping[str, str] | None = None,
    tol: float = EQUIVALENCE_TOL,
) -> Equivalence:
    """Compare unitaries modulo global phase, aligning qubits by name.

    Qubits present in only one circuit must be atoms or photons the other
    never needs; they are pinned to their declared initial state on input and
    output.  ``restriction`` pins shared qubits on input only, e.g.
    ``{"a0": "e"}`` to compare on the subspace where atom ``a0`` starts in |e>.
    """
    restriction = dict(restriction or {})
    shared = [x for x in a.names if x in b.names]
    extra_a = [x for x in a.names if x not in shared]
    extra_b = [x for x in b.names if x not in shared]
    if a.n_qubits > 12 or b.n_qubits > 12:
        raise ValueError("verify_equivalent supports at most 12 qubits per circuit")
    for side, extra in ((a, extra_a), (b, extra_b)):
        for x in extra:
            decl = side.qubits[side.index(x)]
            if not decl.is_atom:
                raise CircuitError(
                    f"qubit {x!r} appears in only one circuit and is not an ancilla atom"
                )

    def bits(circ: Circuit, names) -> dict[str, int]:
        out = {}
        for x in names:
            decl = circ.qubits[circ.index(x)]
            label = restriction.get(x, decl.initial) if x in restriction else decl.initial
            out[x] = QubitDecl(x, decl.kind, label).initial_bit
        return out

    for x in restriction:
        if x not in shared:
            raise CircuitError(f"restricted qubit {x!r} is not shared by both circuits")
    inp = bits(a, restriction)
    ua = _restricted_block(a, shared, bits(a, extra_a), inp)
    ub = _restricted_block(b, shared, bits(b, extra_b), inp)
    dev = phase_aligned_deviation(ua, ub)
    return Equivalence(dev < tol, dev)
