"""Command-line front end: ``cfqc sweep | compile | certify | example``.

Exit statuses: 0 success, 2 usage or parse error, 3 verification failure,
4 resource budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import protocols
from .circuit import CircuitError, CircuitSyntaxError, parse_circuit, serialize_circuit
from .counterfactuality import NetworkBudgetError, certify_gate_counterfactual
from .gate_model import (
    AtomPhotonInput,
    CfGateParams,
    NoiseParams,
    compose_efficiency,
    compose_fidelity_bound,
    finite_map,
)
from .passes import to_special_form, verify_equivalent
from .quantum_core import StateVector
from .scheduling import schedule

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_BUDGET = 0, 2, 3, 4
CSV_HEADER = ("m", "n", "gamma", "eta", "efficiency", "fidelity")
_EQUAL = AtomPhotonInput.equal_superposition()


class UsageError(Exception):
    pass


# -- sweep ----------------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    m_values: tuple
    n_over_m_ratios: tuple = ()
    n_values: tuple = ()
    gamma_grid: tuple = (0.0,)
    eta_grid: tuple = (0.0,)
    atom_input: tuple = (_EQUAL.c_g, _EQUAL.c_e)
    output_path: str | None = None

    def __post_init__(self):
        if not self.m_values or not self.gamma_grid or not self.eta_grid:
            raise UsageError("sweep grids must be non-empty")
        if bool(self.n_over_m_ratios) == bool(self.n_values):
            raise UsageError("give exactly one of --ratio or --n")
        if any(m < 1 for m in self.m_values) or any(n < 1 for n in self.n_values):
            raise UsageError("M and N must be positive integers")
        if any(r <= 0 for r in self.n_over_m_ratios):
            raise UsageError("N/M ratios must be positive")
        for g in self.gamma_grid + self.eta_grid:
            if not 0 <= g <= 1:
                raise UsageError(f"noise value {g} outside [0, 1]")
        try:
            AtomPhotonInput(*self.atom_input)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def grid(self):
        """(m, n, gamma, eta) points in lexicographic order."""
        for m in self.m_values:
            ns = self.n_values or tuple(max(1, round(r * m)) for r in self.n_over_m_ratios)
            for n, g, e in itertools.product(ns, self.gamma_grid, self.eta_grid):
                yield (m, n, g, e)


@dataclass(frozen=True)
class SweepRow:
    m: int
    n: int
    gamma: float
    eta: float
    efficiency: float
    fidelity: float


def _eval_point(args) -> SweepRow:
    (m, n, g, e), atom = args
    out = finite_map(AtomPhotonInput(*atom), CfGateParams(m, n), NoiseParams(g, e))
    return SweepRow(m, n, g, e, out.efficiency, out.fidelity)


def run_sweep(config: SweepConfig, jobs: int = 1) -> list[SweepRow]:
    tasks = [(p, config.atom_input) for p in config.grid()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_eval_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [_eval_point(t) for t in tasks]


def _g17(x) -> str:
    return f"{float(x):.17g}"


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.m, r.n, _g17(r.gamma), _g17(r.eta), _g17(r.efficiency), _g17(r.fidelity)])
    return buf.getvalue()


def parse_grid(text: str, kind=float) -> tuple:
    """``a,b,c`` or inclusive ``start:stop:step`` (or a mix, comma-separated)."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ":" in part:
                bits = part.split(":")
                if len(bits) != 3:
                    raise ValueError
                start, stop, step = (float(b) for b in bits)
                if step <= 0 or stop < start:
                    raise ValueError
                count = int(round((stop - start) / step))
                seq = [start + i * step for i in range(count + 1)]
                values += [kind(round(v, 12)) if kind is float else kind(round(v)) for v in seq]
            else:
                v = float(part)
                if kind is int and v != int(v):
                    raise ValueError
                values.append(kind(v))
        except ValueError:
            raise UsageError(f"invalid grid specification {part!r}") from None
    if not values:
        raise UsageError(f"empty grid {text!r}")
    return tuple(values)


def parse_atom(text: str) -> tuple:
    try:
        c_g, c_e = (complex(x.strip().replace(" ", "")) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--atom expects 'c_g,c_e', got {text!r}") from None
    return (c_g, c_e)


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` comments and blank lines ignored."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lower().replace("-", "_")] = value
    return out


_CONFIG_KEYS = {"m", "ratio", "n", "gamma", "eta", "atom", "output", "jobs"}


def cmd_sweep(args) -> int:
    settings = read_config(args.config) if args.config else {}
    unknown = set(settings) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    if "m" not in settings:
        raise UsageError("--m is required")
    if "ratio" in settings and "n" in settings:
        # a flag for one overrides a file entry for the other
        drop = "n" if args.ratio is not None else "ratio"
        settings.pop(drop)
    config = SweepConfig(
        m_values=parse_grid(settings["m"], int),
        n_over_m_ratios=parse_grid(settings["ratio"]) if "ratio" in settings else (),
        n_values=parse_grid(settings["n"], int) if "n" in settings else (),
        gamma_grid=parse_grid(settings.get("gamma", "0")),
        eta_grid=parse_grid(settings.get("eta", "0")),
        atom_input=parse_atom(settings["atom"]) if "atom" in settings else SweepConfig.atom_input,
        output_path=settings.get("output"),
    )
    jobs = int(settings.get("jobs", 1))
    text = rows_to_csv(run_sweep(config, jobs))
    if config.output_path:
        try:
            with open(config.output_path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {config.output_path}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- compile --------------------------------------------------------------------

def cmd_compile(args) -> int:
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    try:
        circuit = parse_circuit(text)
    except CircuitSyntaxError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        special, stats = to_special_form(circuit, with_stats=True)
    except CircuitError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out_text = serialize_circuit(special)
    if args.output:
        Path(args.output).write_text(out_text)
    else:
        sys.stdout.write(out_text)

    report = sys.stderr if not args.output else sys.stdout
    if special is circuit:
        print("already special: circuit unchanged", file=report)
    print(f"cnots before: {stats.cnots_before}", file=report)
    print(f"cnots after: {stats.cnots_after}", file=report)
    print(f"relocated: {stats.relocated} reversed: {stats.reversed}"
          f"{' (ancilla __atom0 added)' if stats.ancilla_added else ''}", file=report)
    status = EXIT_OK
    restriction = {circuit.qubits[i].name: circuit.qubits[i].initial for i in circuit.atoms()}
    try:
        eq = verify_equivalent(circuit, special, restriction=restriction)
        print(f"verification: {'PASS' if eq.equivalent else 'FAIL'} "
              f"(max deviation {eq.max_deviation:.3e})", file=report)
        if not eq.equivalent:
            status = EXIT_VERIFY
    except ValueError as exc:
        print(f"verification: skipped ({exc})", file=report)
    if args.atoms is not None:
        sched = schedule(circuit, args.atoms)
        print(f"schedule depth with {args.atoms} atom(s): {sched.depth} CNOT layers", file=report)
    return status


# -- certify --------------------------------------------------------------------

def cmd_certify(args) -> int:
    try:
        params = CfGateParams(args.M, args.N)
        if params.M < 2 or params.N < 2:
            raise ValueError(
                f"degenerate network: M={params.M}, N={params.N} has no complete "
                "outer/inner cycle (need M, N >= 2)"
            )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = certify_gate_counterfactual(params, double_mirror=args.sabotage is None)
    except NetworkBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    print(report.summary())
    for b in report.branches:
        if b.channel_presence:
            shown = ", ".join(f"(edge {e}, t={t})" for e, t in b.channel_presence[:20])
            more = len(b.channel_presence) - 20
            print(f"  {b.switch_state} presence: {shown}{f' ... +{more} more' if more > 0 else ''}")
    return EXIT_OK if report.certified else EXIT_VERIFY


# -- example --------------------------------------------------------------------

_EXAMPLE_CIRCUITS = {
    "communicate": (protocols.build_communication_circuit, ["00", "10"]),
    "swap": (protocols.build_swap_circuit, ["00", "01", "10", "11"]),
    "erasure": (lambda: protocols.build_erasure_encoder(True), ["0000", "1000"]),
}


def parse_device(text: str) -> tuple[CfGateParams, NoiseParams]:
    fields = {"gamma": "0", "eta": "0"}
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise UsageError(f"--device expects key=value pairs, got {part!r}")
        k, v = (s.strip() for s in part.split("=", 1))
        fields[k.lower() if k not in ("M", "N") else k] = v
    try:
        params = CfGateParams(int(fields.pop("M")), int(fields.pop("N")))
        noise = NoiseParams(float(fields.pop("gamma")), float(fields.pop("eta")))
    except KeyError as exc:
        raise UsageError(f"--device is missing {exc.args[0]}") from None
    except ValueError as exc:
        raise UsageError(f"--device: {exc}") from None
    if fields:
        raise UsageError(f"--device has unknown keys {sorted(fields)}")
    return params, noise


def _initial_for(circuit, bits: str) -> StateVector:
    """Basis input on the declared qubits, with any ancilla atoms appended in |e>."""
    full = bits + "0" * (circuit.n_qubits - len(bits))
    return StateVector.basis(full)


def cmd_example(args) -> int:
    if args.name not in protocols.EXAMPLES:
        print(f"error: unknown example {args.name!r}; choose from "
              f"{', '.join(protocols.EXAMPLES)}", file=sys.stderr)
        return EXIT_USAGE
    device = parse_device(args.device) if args.device else None
    report = protocols.EXAMPLES[args.name]()
    print(report.to_text())
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    status = EXIT_OK if report.passed else EXIT_VERIFY
    if device is not None:
        params, noise = device
        build, cases = _EXAMPLE_CIRCUITS[args.name]
        circuit = build()
        gate = finite_map(AtomPhotonInput.equal_superposition(), params, noise)
        k = len(circuit.cnots())
        print(f"device M={params.M} N={params.N} gamma={noise.gamma} eta={noise.eta}: "
              f"gate E={gate.efficiency:.6f} F={gate.fidelity:.6f}")
        print(f"  {k} CNOTs: E_gate^K={compose_efficiency(gate.efficiency, k):.6f}, "
              f"fidelity bound={compose_fidelity_bound(gate.fidelity, k):.6f}")
        for bits in cases:
            run = protocols.run_on_device(circuit, _initial_for(circuit, bits), params, noise)
            print(f"  input |{bits}>: E={run.efficiency:.6f} F={run.fidelity:.6f}")
    return status


# -- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfqc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="efficiency/fidelity grid of the finite gate as CSV")
    sw.add_argument("--m", help="M values: list or start:stop:step")
    sw.add_argument("--ratio", help="N/M ratios")
    sw.add_argument("--n", help="explicit N values (instead of --ratio)")
    sw.add_argument("--gamma", help="photon-loss grid (default 0)")
    sw.add_argument("--eta", help="atom-missing grid (default 0)")
    sw.add_argument("--atom", help="atom input amplitudes 'c_g,c_e'")
    sw.add_argument("--config", help="key = value file; flags override it")
    sw.add_argument("--output", help="CSV path (default stdout)")
    sw.add_argument("--jobs", type=int, help="worker processes")
    sw.set_defaults(func=cmd_sweep)

    co = sub.add_parser("compile", help="rewrite a circuit into special form")
    co.add_argument("input")
    co.add_argument("-o", "--output", help="output circuit path (default stdout)")
    co.add_argument("--atoms", type=int, help="report schedule depth with this many atoms")
    co.set_defaults(func=cmd_compile)

    ce = sub.add_parser("certify", help="check the gate network for channel presence")
    ce.add_argument("--M", type=int, required=True)
    ce.add_argument("--N", type=int, required=True)
    ce.add_argument("--sabotage", choices=["no-double-mirror"])
    ce.set_defaults(func=cmd_certify)

    ex = sub.add_parser("example", help="run a worked protocol and its checks")
    ex.add_argument("name")
    ex.add_argument("--device", help="finite device, e.g. M=10,N=200,gamma=0,eta=0")
    ex.add_argument("--csv", help="also write the check report as CSV")
    ex.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
