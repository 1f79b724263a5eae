"""
Certifying that no photon visits the channel
============================================

Propagate forward and backward waves through the optical network of one
gate and flag every channel edge where both are non-negligible.
"""
from cfqc.counterfactuality import (
    BLOCK, PASS, build_cf_gate_network, build_interferometer,
    certify_gate_counterfactual, propagate,
)
from cfqc.gate_model import CfGateParams

# a single interferometer: a shutter in the arm removes the photon's presence
for shutter in (True, False):
    pm = propagate(build_interferometer(shutter))
    print(f"shutter={shutter}: presence on {len(pm.channel_presence)} channel edge(s)")

# the full gate network in both atom branches
params = CfGateParams(3, 4)
print()
print(certify_gate_counterfactual(params).summary())

# without the double-sided mirror the pass branch leaves a trace in the channel
print()
bad = certify_gate_counterfactual(params, double_mirror=False)
print(bad.summary().splitlines()[-1], "-", len(bad.branch(PASS).channel_presence), "presence pairs")

# the propagation is unitary step by step
for state in (BLOCK, PASS):
    pm = propagate(build_cf_gate_network(params, state))
    print(f"{state}: max norm error {pm.max_norm_error():.1e}")
