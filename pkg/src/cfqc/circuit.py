"""Circuits over typed qubits (atoms and photons) and their line-oriented text format.

Format, one statement per line, ``#`` starts a comment::

    qubit <name> <atom|photon> <e|g|H|V>
    <h|x|y|z|s|t> <qubit>
    <rx|ry|rz> <qubit> <angle>
    u3 <qubit> <theta> <phi> <lambda>
    cnot <control> <target>
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .quantum_core import GATE_ARITY, GATE_NPARAMS, Gate, StateVector

ATOM = "atom"
PHOTON = "photon"
INITIAL_LABELS = {ATOM: ("e", "g"), PHOTON: ("H", "V")}
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class CircuitError(ValueError):
    pass


class CircuitSyntaxError(CircuitError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class QubitDecl:
    name: str
    kind: str
    initial: str

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise CircuitError(f"invalid qubit name {self.name!r}")
        if self.kind not in INITIAL_LABELS:
            raise CircuitError(f"qubit kind must be atom or photon, got {self.kind!r}")
        if self.initial not in INITIAL_LABELS[self.kind]:
            raise CircuitError(
                f"{self.kind} {self.name} cannot start in {self.initial!r}; "
                f"expected one of {INITIAL_LABELS[self.kind]}"
            )

    @property
    def is_atom(self) -> bool:
        return self.kind == ATOM

    @property
    def initial_bit(self) -> int:
        return INITIAL_LABELS[self.kind].index(self.initial)


@dataclass(frozen=True)
class Circuit:
    qubits: tuple[QubitDecl, ...]
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "gates", tuple(self.gates))
        names = [q.name for q in self.qubits]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise CircuitError(f"duplicate qubit declaration: {sorted(dup)}")
        for g in self.gates:
            for q in g.operands:
                if q >= len(self.qubits):
                    raise CircuitError(f"gate {g.kind} references undeclared qubit {q}")

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    @property
    def names(self) -> list[str]:
        return [q.name for q in self.qubits]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise CircuitError(f"undeclared qubit {name!r}") from None

    def atoms(self) -> list[int]:
        return [i for i, q in enumerate(self.qubits) if q.is_atom]

    def cnots(self) -> list[Gate]:
        return [g for g in self.gates if g.is_cnot]

    def is_special_form(self) -> bool:
        """Every CNOT is atom-controlled and photon-targeted."""
        return all(
            self.qubits[g.control].is_atom and not self.qubits[g.target].is_atom
            for g in self.cnots()
        )

    def initial_state(self) -> StateVector:
        return StateVector.basis([q.initial_bit for q in self.qubits])

    def append(self, *gates: Gate) -> "Circuit":
        return Circuit(self.qubits, self.gates + tuple(gates))

    def with_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.qubits, tuple(gates))


def make_circuit(qubits: Sequence[tuple[str, str, str]], gates: Iterable = ()) -> Circuit:
    """Build a circuit from ``(name, kind, initial)`` triples and named gate tuples.

    Gates are ``(kind, name, ...)`` with numeric parameters after the names,
    e.g. ``("cnot", "a", "p")`` or ``("rz", "p", 0.3)``.
    """
    decls = tuple(QubitDecl(*q) for q in qubits)
    index = {q.name: i for i, q in enumerate(decls)}
    out = []
    for spec in gates:
        if isinstance(spec, Gate):
            out.append(spec)
            continue
        kind = spec[0].upper()
        arity = GATE_ARITY[kind]
        try:
            operands = [index[n] for n in spec[1 : 1 + arity]]
        except KeyError as exc:
            raise CircuitError(f"undeclared qubit {exc.args[0]!r}") from None
        out.append(Gate(kind, operands, spec[1 + arity :]))
    return Circuit(decls, tuple(out))


def _tokens(line: str):
    for m in re.finditer(r"\S+", line):
        yield m.group(0), m.start() + 1


def parse_circuit(text: str) -> Circuit:
    decls: list[QubitDecl] = []
    index: dict[str, int] = {}
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = list(_tokens(line))
        if not toks:
            continue
        (word, col) = toks[0]
        word = word.lower()
        if word == "qubit":
            if len(toks) != 4:
                raise CircuitSyntaxError(
                    "expected 'qubit <name> <atom|photon> <initial>'", lineno, col
                )
            name, ncol = toks[1]
            if name in index:
                raise CircuitSyntaxError(f"duplicate declaration of {name!r}", lineno, ncol)
            try:
                decl = QubitDecl(name, toks[2][0].lower(), toks[3][0])
            except CircuitError as exc:
                raise CircuitSyntaxError(str(exc), lineno, toks[2][1]) from None
            index[name] = len(decls)
            decls.append(decl)
            continue
        kind = word.upper()
        if kind not in GATE_ARITY:
            raise CircuitSyntaxError(f"unknown gate {toks[0][0]!r}", lineno, col)
        arity = GATE_ARITY[kind]
        nparams = GATE_NPARAMS.get(kind, 0)
        if len(toks) != 1 + arity + nparams:
            raise CircuitSyntaxError(
                f"{word} expects {arity} qubit(s) and {nparams} angle(s)", lineno, col
            )
        operands = []
        for name, ncol in toks[1 : 1 + arity]:
            if name not in index:
                raise CircuitSyntaxError(f"undeclared qubit {name!r}", lineno, ncol)
            operands.append(index[name])
        params = []
        for value, vcol in toks[1 + arity :]:
            try:
                params.append(float(value))
            except ValueError:
                raise CircuitSyntaxError(f"invalid angle {value!r}", lineno, vcol) from None
        try:
            gates.append(Gate(kind, operands, params))
        except ValueError as exc:
            raise CircuitSyntaxError(str(exc), lineno, col) from None
    return Circuit(tuple(decls), tuple(gates))


def _fmt_angle(x: float) -> str:
    return repr(float(x))


def serialize_circuit(circuit: Circuit) -> str:
    names = circuit.names
    lines = [f"qubit {q.name} {q.kind} {q.initial}" for q in circuit.qubits]
    for g in circuit.gates:
        parts = [g.kind.lower()] + [names[q] for q in g.operands]
        parts += [_fmt_angle(p) for p in g.params]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def normalize_text(text: str) -> str:
    """Whitespace/comment normalization used for round-trip comparisons."""
    out = []
    for raw in text.splitlines():
        line = " ".join(raw.split("#", 1)[0].split())
        if line:
            out.append(line)
    return "\n".join(out) + "\n"


def random_circuit(
    rng: np.random.Generator,
    n_photons: int = 3,
    n_atoms: int = 1,
    max_gates: int = 12,
    atom_initial: str = "e",
) -> Circuit:
    """Random circuit of single-qubit gates and CNOTs; atom-atom CNOTs are avoided."""
    qubits = [(f"a{i}", ATOM, atom_initial) for i in range(n_atoms)]
    qubits += [(f"p{i}", PHOTON, "H") for i in range(n_photons)]
    decls = tuple(QubitDecl(*q) for q in qubits)
    n = len(decls)
    singles = ["H", "X", "Y", "Z", "S", "T", "RX", "RY", "RZ", "U3"]
    gates = []
    for _ in range(int(rng.integers(0, max_gates + 1))):
        if n >= 2 and rng.random() < 0.5:
            while True:
                c, t = rng.choice(n, size=2, replace=False)
                if not (decls[c].is_atom and decls[t].is_atom):
                    break
            gates.append(Gate("CNOT", (int(c), int(t))))
        else:
            kind = singles[int(rng.integers(len(singles)))]
            params = rng.uniform(-np.pi, np.pi, GATE_NPARAMS.get(kind, 0))
            gates.append(Gate(kind, (int(rng.integers(n)),), params))
    return Circuit(decls, tuple(gates))
