"""
Compiling circuits for an atom-controlled device
================================================

Every CNOT on the device needs an atom control and a photon target.  Rewrite
arbitrary circuits into that form, check equivalence and schedule the result
over a pool of atoms.
"""
import numpy as np

from cfqc.circuit import parse_circuit, random_circuit, serialize_circuit
from cfqc.passes import to_special_form, verify_equivalent
from cfqc.scheduling import paired_cnot_circuit, schedule

# a photon-photon CNOT has to be routed through an ancilla atom
text = """qubit p0 photon H
qubit p1 photon V
h p0
cnot p0 p1
"""
circ = parse_circuit(text)
special, stats = to_special_form(circ, with_stats=True)
print(serialize_circuit(special))
print(stats)
print("equivalent:", verify_equivalent(circ, special).equivalent)

# random mixed circuits, atoms restricted to their declared initial state
rng = np.random.default_rng(7)
worst = 0.0
for _ in range(100):
    c = random_circuit(rng, n_photons=3, n_atoms=1, max_gates=10)
    worst = max(worst, verify_equivalent(c, to_special_form(c), restriction={"a0": "e"}).max_deviation)
print(f"\n100 random circuits, worst deviation {worst:.1e}")

# n/2 disjoint photon pairs: each routed CNOT is three layers on one atom
pairs = paired_cnot_circuit(8)
for atoms in (1, 2, 4):
    print(f"{atoms} atom(s): depth {schedule(pairs, atoms).depth}")
