"""Two-state-vector presence analysis on unrolled optical networks.

A network is a directed graph of optical elements.  Every edge carries a
two-component polarization amplitude ``(H, V)`` and takes one time step to
traverse.  The forward wave starts at the source at ``t = 0``; the backward
wave is injected at a detector at the post-selection time and evolves under
the adjoint scattering.  A particle is present on ``(edge, t)`` exactly when
both waves are nonzero there.
"""
from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .gate_model import CfGateParams, outer_rotation

BLOCK = "block"
PASS = "pass"

TERMINAL_KINDS = {"detector", "absorber"}
KIND_PORTS = {
    "source": (0, 1),
    "detector": (1, 0),
    "absorber": (1, 0),
    "beamsplitter": (2, 2),
    "pbs": (2, 2),
    "polarization_rotator": (1, 1),
    "mirror": (1, 1),
    "single_sided_mirror": (1, 1),
    "double_sided_mirror": (1, 1),
    "shutter": (1, 1),
}
LOSSY_KINDS = {"shutter"}

PRESENCE_EPS = 1e-12
MAX_GATE_CELLS = 10**5
MAX_PROPAGATION_CELLS = 5 * 10**7


class NetworkBudgetError(ValueError):
    pass


class HorizonError(ValueError):
    pass


@dataclass(frozen=True)
class Element:
    name: str
    kind: str
    params: tuple = ()

    @property
    def n_in(self) -> int:
        return KIND_PORTS[self.kind][0]

    @property
    def n_out(self) -> int:
        return KIND_PORTS[self.kind][1]

    def param(self, key, default=None):
        return dict(self.params).get(key, default)

    def scattering(self) -> np.ndarray:
        """Matrix from stacked input (port, pol) amplitudes to outputs."""
        k = self.kind
        if k in ("mirror", "single_sided_mirror", "double_sided_mirror"):
            return np.eye(2)
        if k == "polarization_rotator":
            return outer_rotation(self.param("angle"))
        if k == "shutter":
            return np.eye(2) if self.param("state") == PASS else np.zeros((2, 2))
        if k == "beamsplitter":
            theta = self.param("theta")
            c, s = math.cos(theta), math.sin(theta)
            return np.kron(np.array([[c, s], [-s, c]]), np.eye(2))
        if k == "pbs":
            # H passes straight through, V crosses to the other output
            m = np.zeros((4, 4))
            m[0, 0] = 1  # in0 H -> out0 H
            m[3, 1] = 1  # in0 V -> out1 V
            m[1, 3] = 1  # in1 V -> out0 V
            m[2, 2] = 1  # in1 H -> out1 H
            return m
        raise ValueError(f"{k} has no scattering matrix")


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    src_port: int
    dst: int
    dst_port: int
    channel: bool = False


@dataclass(frozen=True)
class OpticalNetwork:
    nodes: tuple
    edges: tuple
    source_polarization: tuple = (1.0, 0.0)
    default_detector: str | None = None
    default_post_selection: tuple = (1.0, 0.0)
    label: str = ""

    @property
    def channel_edges(self) -> frozenset:
        return frozenset(e.id for e in self.edges if e.channel)

    def node_index(self, name: str) -> int:
        for i, n in enumerate(self.nodes):
            if n.name == name:
                return i
        raise KeyError(name)

    def in_edge(self, node: int, port: int = 0) -> Edge | None:
        for e in self.edges:
            if e.dst == node and e.dst_port == port:
                return e
        return None

    @property
    def source(self) -> int:
        return next(i for i, n in enumerate(self.nodes) if n.kind == "source")

    def detectors(self) -> list[str]:
        return [n.name for n in self.nodes if n.kind == "detector"]

    def validate(self, tol: float = 1e-12) -> None:
        kinds = [n.kind for n in self.nodes]
        if kinds.count("source") != 1:
            raise ValueError("network needs exactly one source")
        if "detector" not in kinds:
            raise ValueError("network needs at least one detector")
        seen_in, seen_out = set(), set()
        for e in self.edges:
            if (e.src, e.src_port) in seen_out or (e.dst, e.dst_port) in seen_in:
                raise ValueError(f"port used twice by edge {e.id}")
            seen_out.add((e.src, e.src_port))
            seen_in.add((e.dst, e.dst_port))
            if e.src_port >= self.nodes[e.src].n_out or e.dst_port >= self.nodes[e.dst].n_in:
                raise ValueError(f"edge {e.id} uses a port the element lacks")
        for i, n in enumerate(self.nodes):
            for p in range(n.n_out):
                if (i, p) not in seen_out:
                    raise ValueError(f"output port {p} of {n.name} is not connected")
            if n.kind in TERMINAL_KINDS or n.kind == "source":
                continue
            s = n.scattering()
            if n.kind in LOSSY_KINDS and n.param("state") == BLOCK:
                continue
            if np.max(np.abs(s.conj().T @ s - np.eye(s.shape[1]))) > tol:
                raise ValueError(f"{n.name} scattering is not unitary")

    def arrival_times(self) -> dict:
        """Earliest time at which each node can receive amplitude from the source."""
        out_edges: dict = {}
        for e in self.edges:
            out_edges.setdefault(e.src, []).append(e)
        times = {self.source: 0}
        queue = deque([self.source])
        while queue:
            u = queue.popleft()
            for e in out_edges.get(u, []):
                if e.dst not in times:
                    times[e.dst] = times[u] + 1
                    queue.append(e.dst)
        return times

    def to_adjacency_text(self) -> str:
        outs: dict = {}
        for e in self.edges:
            outs.setdefault(e.src, []).append(e)
        lines = []
        for i, n in enumerate(self.nodes):
            params = ",".join(f"{k}={v}" for k, v in n.params) or "-"
            targets = " ".join(
                f"{self.nodes[e.dst].name}:{e.dst_port}" + ("*" if e.channel else "")
                for e in sorted(outs.get(i, []), key=lambda e: e.src_port)
            )
            lines.append(f"{n.name} {n.kind} {params} -> {targets}".rstrip())
        return "\n".join(lines) + "\n"


class _Builder:
    """Incremental network construction that keeps every path synchronized."""

    def __init__(self):
        self.nodes: list[Element] = []
        self.edges: list[Edge] = []
        self.time: list[int] = []
        self._ids: dict = {}

    def _name(self, stem: str) -> str:
        k = self._ids.get(stem, 0)
        self._ids[stem] = k + 1
        return f"{stem}{k}"

    def node(self, kind: str, stem: str | None = None, exact_name: str | None = None, **params) -> int:
        name = exact_name or self._name(stem or kind)
        self.nodes.append(Element(name, kind, tuple(sorted(params.items()))))
        self.time.append(0 if kind == "source" else -1)
        return len(self.nodes) - 1

    def wire(self, src: int, src_port: int, dst: int, dst_port: int = 0, channel=False):
        t = self.time[src] + 1
        if self.time[dst] not in (-1, t):
            raise RuntimeError(
                f"unsynchronized arrival at {self.nodes[dst].name}: {self.time[dst]} vs {t}"
            )
        self.time[dst] = t
        self.edges.append(Edge(len(self.edges), src, src_port, dst, dst_port, channel))

    def delay_line(self, src: int, src_port: int, length: int) -> tuple[int, int]:
        """Chain of ``length - 1`` plain mirrors; returns the open (node, port)."""
        node, port = src, src_port
        for _ in range(length - 1):
            m = self.node("mirror", "delay")
            self.wire(node, port, m)
            node, port = m, 0
        return node, port

    def build(self, **kw) -> OpticalNetwork:
        net = OpticalNetwork(tuple(self.nodes), tuple(self.edges), **kw)
        net.validate()
        return net


def build_interferometer(with_shutter: bool) -> OpticalNetwork:
    """Balanced Mach-Zehnder with one arm crossing the channel to Bob and back.

    Detector T sits on the port that stays dark when Bob's arm is open.
    """
    b = _Builder()
    src = b.node("source", exact_name="L")
    bs1 = b.node("beamsplitter", exact_name="BS1", theta=math.pi / 4)
    bs2 = b.node("beamsplitter", exact_name="BS2", theta=math.pi / 4)
    b.wire(src, 0, bs1, 0)
    # Bob's arm: BS1 -> channel -> [S] -> SM2 -> channel -> BS2
    sm2 = b.node("single_sided_mirror", exact_name="SM2")
    if with_shutter:
        shutter = b.node("shutter", exact_name="S", state=BLOCK)
        b.wire(bs1, 1, shutter, 0, channel=True)
        b.wire(shutter, 0, sm2, 0)
    else:
        b.wire(bs1, 1, sm2, 0, channel=True)
    bob_len = b.time[sm2] + 1 - b.time[bs1]
    # Alice's arm, padded to the same optical length
    sm1 = b.node("single_sided_mirror", exact_name="SM1")
    b.wire(bs1, 0, sm1, 0)
    node, port = b.delay_line(sm1, 0, bob_len - 1)
    b.wire(node, port, bs2, 0)
    b.wire(sm2, 0, bs2, 1, channel=True)
    t = b.node("detector", exact_name="T")
    d = b.node("detector", exact_name="D")
    b.wire(bs2, 0, t, 0)
    b.wire(bs2, 1, d, 0)
    return b.build(
        default_detector="T",
        default_post_selection=(1.0, 0.0),
        label="interferometer" + ("+shutter" if with_shutter else ""),
    )


def _inner_chain(b: _Builder, node: int, port: int, params: CfGateParams, switch_state: str):
    """N inner cycles; the channel-side polarization (H) visits Bob each cycle."""
    for _ in range(params.N):
        pr = b.node("polarization_rotator", "PR2_", angle=params.beta2)
        b.wire(node, port, pr)
        split = b.node("pbs", "PBS2a_")
        b.wire(pr, 0, split, 0)
        join = b.node("pbs", "PBS2b_")
        # channel arm: Alice -> Bob's switch -> mirror -> Alice
        qsw = b.node("shutter", "QSW", state=switch_state)
        mrb = b.node("mirror", "MRB")
        b.wire(split, 0, qsw, 0, channel=True)
        b.wire(qsw, 0, mrb, 0)
        b.wire(mrb, 0, join, 0, channel=True)
        # local arm with matched delay
        d1 = b.node("mirror", "MR2_")
        d2 = b.node("mirror", "OD2_")
        b.wire(split, 1, d1)
        b.wire(d1, 0, d2)
        b.wire(d2, 0, join, 1)
        leak = b.node("absorber", "leak")
        b.wire(join, 1, leak)
        node, port = join, 0
    return node, port


def _half_cycle(b: _Builder, node: int, port: int, params, switch_state):
    node, port = _inner_chain(b, node, port, params, switch_state)
    # keep the vertical (surviving) part; the horizontal rest leaves the gate
    sel = b.node("pbs", "PBSd")
    b.wire(node, port, sel, 0)
    dump = b.node("detector", "Ddump")
    b.wire(sel, 0, dump)
    return sel, 1


def gate_network_census(M: int, N: int, double_mirror: bool = True) -> tuple[int, int]:
    """Closed-form (node, edge) counts of :func:`build_cf_gate_network`."""
    halves = 2 if double_mirror else 1
    upper_nodes = halves * (8 * N + 2) + (1 if double_mirror else 0)
    upper_len = halves * (5 * N + 2)
    lower_nodes = upper_len - 1
    per_step_nodes = 4 + lower_nodes + upper_nodes
    upper_edges = halves * (9 * N + 2) + (1 if double_mirror else 0)
    per_step_edges = 1 + 2 + lower_nodes + upper_edges + 2
    return M * per_step_nodes + 2, M * per_step_edges + 1


def build_cf_gate_network(
    params: CfGateParams, switch_state: str, double_mirror: bool = True
) -> OpticalNetwork:
    """Unrolled chained-Zeno network of the counterfactual special CNOT.

    Each of the M outer steps rotates by beta1 and splits on a PBS: H stays on
    Alice's side, V runs through N inner cycles, a double-sided mirror, and
    another N inner cycles, losing its horizontal remainder at each half.  The
    quantum switch is frozen to ``switch_state`` (``block`` = atom in |g>).
    ``double_mirror=False`` keeps a single inner chain per outer step.
    """
    if switch_state not in (BLOCK, PASS):
        raise ValueError(f"switch_state must be 'block' or 'pass', got {switch_state!r}")
    if params.M < 2 or params.N < 2:
        raise ValueError(
            f"degenerate network: need M >= 2 and N >= 2, got M={params.M}, N={params.N}"
        )
    if params.M * params.N > MAX_GATE_CELLS:
        raise NetworkBudgetError(
            f"M*N = {params.M * params.N} exceeds the budget of {MAX_GATE_CELLS}"
        )
    b = _Builder()
    src = b.node("source", exact_name="source")
    node, port = src, 0
    for _ in range(params.M):
        pr = b.node("polarization_rotator", "PR1_", angle=params.beta1)
        b.wire(node, port, pr)
        split = b.node("pbs", "PBS1a_")
        b.wire(pr, 0, split, 0)
        join = b.node("pbs", "PBS1b_")
        # upper arm (V): inner cycles toward Bob
        up, up_port = _half_cycle(b, split, 1, params, switch_state)
        if double_mirror:
            dm = b.node("double_sided_mirror", "DM")
            b.wire(up, up_port, dm)
            up, up_port = _half_cycle(b, dm, 0, params, switch_state)
        upper_len = b.time[up] + 1 - b.time[split]
        # lower arm (H): plain delay on Alice's side
        low, low_port = b.delay_line(split, 0, upper_len)
        b.wire(low, low_port, join, 0)
        b.wire(up, up_port, join, 1)
        leak = b.node("absorber", "leak")
        b.wire(join, 1, leak)
        node, port = join, 0
    out = b.node("detector", exact_name="D")
    b.wire(node, port, out)
    expected = (0.0, 1.0) if switch_state == BLOCK else (1.0, 0.0)
    return b.build(
        default_detector="D",
        default_post_selection=expected,
        label=f"cf-gate M={params.M} N={params.N} {switch_state}"
        + ("" if double_mirror else " no-double-mirror"),
    )


@dataclass
class PresenceMap:
    horizon: int
    forward: np.ndarray          # (horizon, n_edges, 2)
    backward: np.ndarray         # (horizon, n_edges, 2)
    present: frozenset           # {(edge_id, t)}
    forward_absorbed: np.ndarray   # cumulative, indexed by forward time
    backward_absorbed: np.ndarray  # cumulative, indexed by backward step count
    detector: str = ""
    channel_edges: frozenset = field(default_factory=frozenset)

    def present_at(self, eps: float = PRESENCE_EPS) -> frozenset:
        return _presence(self.forward, self.backward, eps)

    @property
    def channel_presence(self) -> list:
        return sorted(p for p in self.present if p[0] in self.channel_edges)

    def max_norm_error(self) -> float:
        """Worst violation of norm^2 + absorbed = 1 over both waves and all steps."""
        f = self.forward_norms() + self.forward_absorbed
        b = self.backward_norms()[::-1] + self.backward_absorbed
        return float(max(np.max(np.abs(f - 1)), np.max(np.abs(b - 1))))

    def forward_norms(self) -> np.ndarray:
        return np.sum(np.abs(self.forward) ** 2, axis=(1, 2))

    def backward_norms(self) -> np.ndarray:
        return np.sum(np.abs(self.backward) ** 2, axis=(1, 2))

    def detector_amplitude(self, network: OpticalNetwork, name: str) -> np.ndarray:
        """Amplitude arriving at detector ``name`` at the horizon."""
        e = network.in_edge(network.node_index(name))
        return self.forward[-1, e.id]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["edge_id", "time", "forward_abs", "backward_abs", "present"])
        fn = np.linalg.norm(self.forward, axis=2)
        bn = np.linalg.norm(self.backward, axis=2)
        for t, e in zip(*np.nonzero((fn > 0) | (bn > 0))):
            w.writerow([
                int(e), int(t), f"{fn[t, e]:.17g}", f"{bn[t, e]:.17g}",
                int((int(e), int(t)) in self.present),
            ])
        return buf.getvalue()


def _presence(forward, backward, eps) -> frozenset:
    fn = np.linalg.norm(forward, axis=2)
    bn = np.linalg.norm(backward, axis=2)
    f_tol = eps * max(fn.max(initial=0.0), 1e-300)
    b_tol = eps * max(bn.max(initial=0.0), 1e-300)
    hits = np.nonzero((fn > f_tol) & (bn > b_tol))
    return frozenset((int(e), int(t)) for t, e in zip(*hits))


def transfer_matrix(network: OpticalNetwork):
    """Sparse one-step map on stacked edge amplitudes (2 entries per edge)."""
    n_edges = len(network.edges)
    in_edges: dict = {}
    out_edges: dict = {}
    for e in network.edges:
        in_edges.setdefault(e.dst, {})[e.dst_port] = e.id
        out_edges.setdefault(e.src, {})[e.src_port] = e.id
    rows, cols, vals = [], [], []
    for i, n in enumerate(network.nodes):
        if n.kind in TERMINAL_KINDS or n.kind == "source":
            continue
        s = n.scattering()
        for op in range(n.n_out):
            eo = out_edges[i][op]
            for ip in range(n.n_in):
                ei = in_edges.get(i, {}).get(ip)
                if ei is None:
                    continue
                block = s[2 * op : 2 * op + 2, 2 * ip : 2 * ip + 2]
                for a in range(2):
                    for c in range(2):
                        if block[a, c] != 0:
                            rows.append(2 * eo + a)
                            cols.append(2 * ei + c)
                            vals.append(block[a, c])
    return sparse.csr_matrix(
        (np.array(vals, dtype=complex), (rows, cols)), shape=(2 * n_edges, 2 * n_edges)
    )


def propagate(
    network: OpticalNetwork,
    horizon: int | None = None,
    detector: str | None = None,
    post_selection=None,
    eps: float = PRESENCE_EPS,
) -> PresenceMap:
    """Forward and backward waves over ``horizon`` steps and the presence set.

    ``horizon`` is the post-selection time: the backward wave starts on the
    detector's input edge at ``horizon - 1``.  It defaults to the detector's
    arrival time, which is the single arrival time in synchronized networks.
    """
    detector = detector or network.default_detector or network.detectors()[0]
    det = network.node_index(detector)
    if network.nodes[det].kind != "detector":
        raise ValueError(f"{detector!r} is not a detector")
    arrival = network.arrival_times().get(det)
    if arrival is None:
        raise HorizonError(f"detector {detector!r} is unreachable from the source")
    horizon = arrival if horizon is None else int(horizon)
    if horizon < arrival:
        raise HorizonError(
            f"horizon {horizon} is shorter than the source-to-{detector} path ({arrival})"
        )
    n_edges = len(network.edges)
    if horizon * n_edges > MAX_PROPAGATION_CELLS:
        raise NetworkBudgetError(
            f"{horizon} steps x {n_edges} edges exceeds {MAX_PROPAGATION_CELLS} cells"
        )
    P = transfer_matrix(network)
    Ph = P.conj().T.tocsr()

    fwd = np.zeros((horizon, 2 * n_edges), dtype=complex)
    src_edge = next(e for e in network.edges if e.src == network.source)
    pol = np.asarray(network.source_polarization, dtype=complex)
    pol = pol / np.linalg.norm(pol)
    fwd[0, 2 * src_edge.id : 2 * src_edge.id + 2] = pol
    for t in range(1, horizon):
        fwd[t] = P @ fwd[t - 1]

    bwd = np.zeros((horizon, 2 * n_edges), dtype=complex)
    det_edge = network.in_edge(det)
    post = np.asarray(
        network.default_post_selection if post_selection is None else post_selection,
        dtype=complex,
    )
    post = post / np.linalg.norm(post)
    bwd[horizon - 1, 2 * det_edge.id : 2 * det_edge.id + 2] = post
    for t in range(horizon - 2, -1, -1):
        bwd[t] = Ph @ bwd[t + 1]

    fwd_mask, bwd_mask, open_leak = _sinks(network)
    f_lost = np.sum(np.abs(fwd[:, fwd_mask]) ** 2, axis=1)
    b_lost = np.sum(np.abs(bwd[:, bwd_mask]) ** 2, axis=1)
    b_lost = b_lost + np.sum(np.abs(open_leak @ bwd.T) ** 2, axis=0)
    forward_absorbed = np.concatenate([[0.0], np.cumsum(f_lost[:-1])])
    # backward steps run from horizon-1 down to 0
    backward_absorbed = np.concatenate([[0.0], np.cumsum(b_lost[::-1][:-1])])
    forward = fwd.reshape(horizon, n_edges, 2)
    backward = bwd.reshape(horizon, n_edges, 2)
    return PresenceMap(
        horizon=horizon,
        forward=forward,
        backward=backward,
        present=_presence(forward, backward, eps),
        forward_absorbed=forward_absorbed,
        backward_absorbed=backward_absorbed,
        detector=detector,
        channel_edges=network.channel_edges,
    )


def _sinks(network: OpticalNetwork):
    """Where norm leaves each wave, read off the elements themselves.

    Forward: amplitude on an edge into a detector, absorber or blocked shutter
    is gone one step later.  Backward: amplitude on an edge out of the source
    or a blocked shutter is gone, and so is whatever the adjoint scattering
    sends into an element's unconnected input port.
    """
    n_edges = len(network.edges)
    fwd_mask = np.zeros(2 * n_edges, dtype=bool)
    bwd_mask = np.zeros(2 * n_edges, dtype=bool)
    connected_in = {(e.dst, e.dst_port) for e in network.edges}
    out_edges: dict = {}
    for e in network.edges:
        out_edges.setdefault(e.src, {})[e.src_port] = e.id
        dst = network.nodes[e.dst]
        if dst.kind in TERMINAL_KINDS or (dst.kind in LOSSY_KINDS and dst.param("state") == BLOCK):
            fwd_mask[2 * e.id : 2 * e.id + 2] = True
        src = network.nodes[e.src]
        if src.kind == "source" or (src.kind in LOSSY_KINDS and src.param("state") == BLOCK):
            bwd_mask[2 * e.id : 2 * e.id + 2] = True
    rows, cols, vals = [], [], []
    n_open = 0
    for i, n in enumerate(network.nodes):
        if n.kind in TERMINAL_KINDS or n.kind == "source":
            continue
        if n.kind in LOSSY_KINDS and n.param("state") == BLOCK:
            continue
        s_adj = n.scattering().conj().T
        for ip in range(n.n_in):
            if (i, ip) in connected_in:
                continue
            for op in range(n.n_out):
                eo = out_edges[i][op]
                block = s_adj[2 * ip : 2 * ip + 2, 2 * op : 2 * op + 2]
                for a in range(2):
                    for c in range(2):
                        if block[a, c] != 0:
                            rows.append(2 * n_open + a)
                            cols.append(2 * eo + c)
                            vals.append(block[a, c])
            n_open += 1
    open_leak = sparse.csr_matrix(
        (np.array(vals, dtype=complex), (rows, cols)), shape=(2 * n_open, 2 * n_edges)
    )
    return fwd_mask, bwd_mask, open_leak


@dataclass(frozen=True)
class BranchReport:
    switch_state: str
    channel_presence: tuple
    output_probability: float
    max_norm_error: float

    @property
    def counterfactual(self) -> bool:
        return not self.channel_presence


@dataclass(frozen=True)
class CertificationReport:
    params: CfGateParams
    double_mirror: bool
    branches: tuple

    @property
    def certified(self) -> bool:
        return all(b.counterfactual for b in self.branches)

    def branch(self, state: str) -> BranchReport:
        return next(b for b in self.branches if b.switch_state == state)

    def summary(self) -> str:
        lines = [
            f"M={self.params.M} N={self.params.N} double_mirror={self.double_mirror}"
        ]
        for b in self.branches:
            verdict = "no channel presence" if b.counterfactual else (
                f"present on {len(b.channel_presence)} channel (edge, t) pairs"
            )
            lines.append(
                f"  {b.switch_state:5s}: {verdict}; P(output)={b.output_probability:.6f}"
            )
        lines.append("CERTIFIED" if self.certified else "NOT CERTIFIED")
        return "\n".join(lines)


def certify_gate_counterfactual(
    params: CfGateParams, double_mirror: bool = True
) -> CertificationReport:
    """Check both frozen switch branches for photon presence in the channel.

    A superposed switch is covered branch by branch: the gate's forward and
    backward waves are superpositions of the branch waves.
    """
    reports = []
    for state in (BLOCK, PASS):
        net = build_cf_gate_network(params, state, double_mirror=double_mirror)
        pm = propagate(net)
        err = pm.max_norm_error()
        out = pm.detector_amplitude(net, "D")
        reports.append(
            BranchReport(
                state,
                tuple(pm.channel_presence),
                float(np.sum(np.abs(out) ** 2)),
                err,
            )
        )
    return CertificationReport(params, double_mirror, tuple(reports))
