"""Counterfactual special CNOT: Zeno probabilities, ideal map and finite-device recursions.

Amplitude ordering of a :class:`GateOutcome` follows the photon-first labels
``c1=|H>|g>, c2=|V>|g>, c3=|H>|e>, c4=|V>|e>``.  Joint states handed to the
simulator use atom as qubit 0 and photon as qubit 1 (``e, H -> 0``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .quantum_core import StateVector


@dataclass(frozen=True)
class CfGateParams:
    M: int
    N: int

    def __post_init__(self):
        if int(self.M) != self.M or int(self.N) != self.N:
            raise ValueError("M and N must be integers")
        if self.M < 1 or self.N < 1:
            raise ValueError(f"M and N must be >= 1, got M={self.M}, N={self.N}")

    @property
    def beta1(self) -> float:
        return math.pi / (2 * self.M)

    @property
    def beta2(self) -> float:
        return math.pi / (2 * self.N)


@dataclass(frozen=True)
class NoiseParams:
    gamma: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "eta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


IDEAL_DEVICE = NoiseParams()


@dataclass(frozen=True)
class AtomPhotonInput:
    c_g: complex
    c_e: complex

    def __post_init__(self):
        norm = abs(self.c_g) ** 2 + abs(self.c_e) ** 2
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"atom input is not normalized (|c_g|^2+|c_e|^2={norm})")

    @classmethod
    def equal_superposition(cls) -> "AtomPhotonInput":
        return cls(1 / math.sqrt(2), 1 / math.sqrt(2))


class RecursionState(NamedTuple):
    x: complex
    y: complex
    w_or_z: float


@dataclass(frozen=True)
class GateOutcome:
    c1: complex
    c2: complex
    c3: complex
    c4: complex
    efficiency: float
    fidelity: float
    degenerate: bool = False

    @classmethod
    def from_amplitudes(cls, c1, c2, c3, c4, source: AtomPhotonInput) -> "GateOutcome":
        eff = abs(c1) ** 2 + abs(c2) ** 2 + abs(c3) ** 2 + abs(c4) ** 2
        if eff == 0:
            return cls(c1, c2, c3, c4, 0.0, 0.0, degenerate=True)
        overlap = np.conj(source.c_e) * c3 + np.conj(source.c_g) * c2
        fid = min(abs(overlap) ** 2 / eff, 1.0)
        return cls(c1, c2, c3, c4, float(min(eff, 1.0)), float(fid))

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3, self.c4], dtype=complex)

    @property
    def lost(self) -> float:
        """Probability absorbed by the atom or lost in the channel."""
        return max(0.0, 1.0 - self.efficiency)

    def joint_state(self) -> StateVector:
        """Unnormalized atom (qubit 0) x photon (qubit 1) state."""
        # index = 2*atom + photon with e=0, g=1, H=0, V=1
        return StateVector(np.array([self.c3, self.c4, self.c1, self.c2]))


def total_variation(a: GateOutcome, b: GateOutcome, include_loss: bool = False) -> float:
    """Distance between the output distributions over the four basis outcomes.

    By default both outcomes are conditioned on success (normalized by their
    efficiency), since efficiency is reported separately.  ``include_loss``
    instead compares the unconditioned distributions with loss as a fifth
    outcome.
    """
    pa = np.abs(a.amplitudes) ** 2
    pb = np.abs(b.amplitudes) ** 2
    if include_loss:
        pa = np.append(pa, a.lost)
        pb = np.append(pb, b.lost)
    else:
        if a.degenerate or b.degenerate:
            raise ValueError("conditional distribution of a degenerate outcome is undefined")
        pa = pa / pa.sum()
        pb = pb / pb.sum()
    return 0.5 * float(np.sum(np.abs(pa - pb)))


def zeno_prob_d0(M: int) -> float:
    """Probability of reaching D0 through M blocked Zeno cycles."""
    if M < 1:
        raise ValueError("M must be >= 1")
    return math.cos(math.pi / (2 * M)) ** (2 * M)


def zeno_prob_d1(M: int) -> float:
    """Probability of reaching D1 when the upper arms are open."""
    if M < 1:
        raise ValueError("M must be >= 1")
    return math.sin(M * math.pi / (2 * M)) ** 2


def zeno_channel_presence_prob(M: int) -> float:
    """Detection probability in the channel during the last open cycle."""
    if M < 2:
        raise ValueError("M must be >= 2")
    return math.sin((M - 1) * math.pi / (2 * M)) ** 2


def outer_rotation(beta: float) -> np.ndarray:
    """Polarization rotation taking |H> to cos(beta)|H> + sin(beta)|V>."""
    c, s = math.cos(beta), math.sin(beta)
    return np.array([[c, -s], [s, c]])


def inner_survival(beta2: float, N: int, leak: float) -> float:
    """First entry of ``[[c, s], [-leak*s, leak*c]]**N @ (1, 0)``.

    ``leak`` is the amplitude factor for the channel-side component per inner
    cycle: ``1 - gamma`` for photon loss, ``eta`` for atom missing.
    """
    c, s = math.cos(beta2), math.sin(beta2)
    step = np.array([[c, s], [-leak * s, leak * c]])
    return float(np.linalg.matrix_power(step, N)[0, 0])


def loss_survival(params: CfGateParams, gamma: float) -> float:
    """W: survival of the vertical component over one half outer cycle, atom in |e>."""
    return inner_survival(params.beta2, params.N, 1.0 - gamma)


def missing_survival(params: CfGateParams, eta: float, gamma: float = 0.0) -> float:
    """Z: survival of the vertical component over one half outer cycle, atom in |g>.

    The fraction that slips past a missing atom still crosses the channel, so
    it also carries the loss factor ``1 - gamma``.
    """
    return inner_survival(params.beta2, params.N, eta * (1.0 - gamma))


def outer_recursion(
    beta1: float, steps: int, survival: float, trajectory: bool = False
):
    """Iterate ``(x, y) <- diag(1, survival**2) R(beta1) (x, y)`` from ``(1, 0)``.

    Returns the final :class:`RecursionState`, or every state including the
    initial one when ``trajectory`` is set.
    """
    rot = outer_rotation(beta1)
    damp = np.array([1.0, survival * survival])
    v = np.array([1.0, 0.0])
    states = [RecursionState(1.0, 0.0, survival)]
    for _ in range(steps):
        v = damp * (rot @ v)
        states.append(RecursionState(float(v[0]), float(v[1]), survival))
    return states if trajectory else states[-1]


def branch_transfer(params: CfGateParams, noise: NoiseParams = IDEAL_DEVICE):
    """Photon output (x, y) for input |H> in the |g> and |e> branches."""
    z = missing_survival(params, noise.eta, noise.gamma)
    w = loss_survival(params, noise.gamma)
    g = outer_recursion(params.beta1, params.M, z)
    e = outer_recursion(params.beta1, params.M, w)
    return (g.x, g.y), (e.x, e.y)


def ideal_map(inp: AtomPhotonInput) -> GateOutcome:
    """The M, N -> infinity limit: |g>|H> -> |g>|V>, |e>|H> -> |e>|H>."""
    return GateOutcome.from_amplitudes(0.0, inp.c_g, inp.c_e, 0.0, inp)


def finite_map(
    inp: AtomPhotonInput,
    params: CfGateParams,
    noise: NoiseParams = IDEAL_DEVICE,
) -> GateOutcome:
    (xg, yg), (xe, ye) = branch_transfer(params, noise)
    return GateOutcome.from_amplitudes(
        inp.c_g * xg, inp.c_g * yg, inp.c_e * xe, inp.c_e * ye, inp
    )


def finite_cnot_matrix(
    params: CfGateParams, noise: NoiseParams = IDEAL_DEVICE
) -> np.ndarray:
    """4x4 (atom, photon) operator of the finite device extended to photon input |V>.

    The device is only specified for |H> input; a |V> photon is routed through
    a half-wave plate, the same optics and a second half-wave plate, so its
    column is the flipped |H> column.  In the ideal limit this is exactly CNOT.
    """
    (xg, yg), (xe, ye) = branch_transfer(params, noise)
    op = np.zeros((4, 4), dtype=complex)
    op[0:2, 0:2] = [[xe, ye], [ye, xe]]
    op[2:4, 2:4] = [[xg, yg], [yg, xg]]
    return op


def compose_efficiency(e_gate: float, K: int) -> float:
    if not 0 <= e_gate <= 1:
        raise ValueError(f"gate efficiency must lie in [0, 1], got {e_gate}")
    return e_gate**K


def compose_fidelity_bound(f_gate: float, K: int) -> float:
    """Worst-case fidelity of K gates whose errors all rotate the same way."""
    if not 0 <= f_gate <= 1:
        raise ValueError(f"gate fidelity must lie in [0, 1], got {f_gate}")
    angle = K * math.acos(math.sqrt(f_gate))
    if angle >= math.pi / 2:
        return 0.0
    return math.cos(angle) ** 2


def intermediate_states(
    inp: AtomPhotonInput, params: CfGateParams, infinite_inner: bool = False
) -> list[StateVector]:
    """Conditional joint states after each outer PBS and each outer cycle.

    Returns ``[psi_1, psi_1', psi_2, psi_2', ..., psi_M]`` for the ideal
    device.  ``psi_i'`` keeps only the photon that was not absorbed; its |g>
    vertical amplitude carries ``cos(beta2)**(2N)`` unless ``infinite_inner``
    replaces that factor by 1.
    """
    rot = outer_rotation(params.beta1)
    g_damp = 1.0 if infinite_inner else math.cos(params.beta2) ** (2 * params.N)
    # the pass branch dumps the vertical component exactly when gamma = 0
    e_damp = 0.0
    g = np.array([1.0, 0.0])
    e = np.array([1.0, 0.0])
    out = []

    def joint(gv, ev):
        return StateVector(
            np.array([inp.c_e * ev[0], inp.c_e * ev[1], inp.c_g * gv[0], inp.c_g * gv[1]])
        )

    for i in range(1, params.M + 1):
        g = rot @ g
        e = rot @ e
        out.append(joint(g, e))
        if i == params.M:
            break
        g = g * [1.0, g_damp]
        e = e * [1.0, e_damp]
        out.append(joint(g, e))
    return out
