"""
Zeno suppression and the finite counterfactual CNOT
===================================================

Walk from the bare Zeno closed forms to the efficiency/fidelity landscape of
the finite gate, then add photon loss and missing-atom noise.
"""
import math

import numpy as np

from cfqc.gate_model import (
    AtomPhotonInput, CfGateParams, NoiseParams, finite_map, ideal_map,
    total_variation, zeno_channel_presence_prob, zeno_prob_d0,
)

# the photon survives M blocked rotations with probability cos^(2M)(pi/2M)
for M in (4, 10, 100, 1000):
    print(f"M={M:5d}  P(D0)={zeno_prob_d0(M):.6f}  exp(-pi^2/4M)={math.exp(-math.pi**2 / (4 * M)):.6f}"
          f"  P(channel)={zeno_channel_presence_prob(M):.6f}")

# atom in (|g> + |e>)/sqrt2; the ideal gate flips the photon on |g>
atom = AtomPhotonInput.equal_superposition()
print("\nideal amplitudes (gH, gV, eH, eV):", np.round(ideal_map(atom).amplitudes, 6))

# efficiency and fidelity over M at several inner/outer ratios
print("\n   M  N/M      E        F")
for ratio in (2, 5, 10, 20):
    for M in (10, 30, 50):
        out = finite_map(atom, CfGateParams(M, ratio * M))
        print(f"{M:4d} {ratio:4d}  {out.efficiency:.4f}  {out.fidelity:.5f}")

# large M and N approach the ideal gate once conditioned on success
out = finite_map(atom, CfGateParams(1000, 10**5))
print(f"\nM=1000, N=1e5: E={out.efficiency:.5f}, conditional TV to ideal = {total_variation(out, ideal_map(atom)):.2e}")

# loss hurts much more than an occasionally missing atom
p = CfGateParams(10, 200)
print("\nnoise   F(gamma)  F(eta)   E(gamma)  E(eta)")
for x in np.linspace(0, 0.1, 6):
    lo = finite_map(atom, p, NoiseParams(gamma=x))
    mi = finite_map(atom, p, NoiseParams(eta=x))
    print(f"{x:5.2f}   {lo.fidelity:.5f}   {mi.fidelity:.5f}  {lo.efficiency:.5f}   {mi.efficiency:.5f}")
