import csv
import io
import subprocess
import sys

import pytest

from cfqc.cli import main, parse_grid, UsageError
from cfqc.gate_model import AtomPhotonInput, CfGateParams, NoiseParams, finite_map


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# -- sweep ----------------------------------------------------------------------

def test_sweep_single_point(capsys):
    assert main(["sweep", "--m", "10", "--ratio", "20"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "m,n,gamma,eta,efficiency,fidelity"
    rows = _rows(out)
    assert len(rows) == 1 and rows[0]["n"] == "200"
    assert float(rows[0]["efficiency"]) < 0.9


def test_sweep_rows_recompute_bit_for_bit(capsys):
    main(["sweep", "--m", "10,12", "--n", "100,200", "--gamma", "0,0.03", "--eta", "0.05"])
    for r in _rows(capsys.readouterr().out):
        ref = finite_map(
            AtomPhotonInput.equal_superposition(),
            CfGateParams(int(r["m"]), int(r["n"])),
            NoiseParams(float(r["gamma"]), float(r["eta"])),
        )
        assert float(r["efficiency"]) == ref.efficiency
        assert float(r["fidelity"]) == ref.fidelity


def test_sweep_gamma_range_strictly_decreasing(capsys):
    main(["sweep", "--m", "10", "--n", "200", "--gamma", "0:0.1:0.02"])
    rows = _rows(capsys.readouterr().out)
    assert [float(r["gamma"]) for r in rows] == pytest.approx([0, 0.02, 0.04, 0.06, 0.08, 0.1])
    fids = [float(r["fidelity"]) for r in rows]
    assert all(b < a for a, b in zip(fids, fids[1:]))


def test_sweep_ideal_limit(capsys):
    main(["sweep", "--m", "1000", "--ratio", "100"])
    assert float(_rows(capsys.readouterr().out)[0]["fidelity"]) > 0.999


def test_sweep_lexicographic_order(capsys):
    main(["sweep", "--m", "10,20", "--ratio", "2,5", "--gamma", "0,0.1"])
    rows = _rows(capsys.readouterr().out)
    keys = [(int(r["m"]), int(r["n"]), float(r["gamma"])) for r in rows]
    assert keys == sorted(keys) and len(keys) == 8


def test_sweep_byte_stable_and_jobs_independent(tmp_path):
    paths = [tmp_path / f"o{j}.csv" for j in (1, 2, 3)]
    for jobs, p in zip((1, 3, 1), paths):
        args = ["sweep", "--m", "10:30:10", "--ratio", "2,5,10", "--gamma", "0:0.04:0.02",
                "--output", str(p), "--jobs", str(jobs)]
        assert main(args) == 0
    data = [p.read_bytes() for p in paths]
    assert data[0] == data[1] == data[2]
    assert b"\r\n" not in data[0]


def test_sweep_17_significant_digits(capsys):
    main(["sweep", "--m", "10", "--n", "200"])
    eff = _rows(capsys.readouterr().out)[0]["efficiency"]
    assert len(eff.replace("0.", "", 1)) == 17


def test_sweep_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("# grid\nm = 10\nratio = 20\ngamma = 0, 0.02\n")
    assert main(["sweep", "--config", str(cfg)]) == 0
    assert len(_rows(capsys.readouterr().out)) == 2
    assert main(["sweep", "--config", str(cfg), "--gamma", "0.05", "--n", "50"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert [(r["n"], r["gamma"]) for r in rows] == [("50", "0.050000000000000003")]


def test_sweep_custom_atom(capsys):
    main(["sweep", "--m", "10", "--n", "200", "--atom", "1,0"])
    r = _rows(capsys.readouterr().out)[0]
    ref = finite_map(AtomPhotonInput(1, 0), CfGateParams(10, 200))
    assert float(r["efficiency"]) == ref.efficiency


@pytest.mark.parametrize("args", [
    ["sweep", "--ratio", "2"],
    ["sweep", "--m", "10"],
    ["sweep", "--m", "0", "--ratio", "2"],
    ["sweep", "--m", "10", "--ratio", "2", "--gamma", "1.5"],
    ["sweep", "--m", "10", "--ratio", "2", "--gamma", "a:b"],
    ["sweep", "--m", "10", "--ratio", "2", "--atom", "1,1"],
    ["sweep", "--m", "10", "--ratio", "2", "--output", "/nonexistent/dir/x.csv"],
    ["sweep", "--m", "10", "--ratio", "2", "--config", "/nonexistent.cfg"],
    ["bogus"],
])
def test_sweep_usage_errors(args):
    assert main(args) == 2


def test_parse_grid():
    assert parse_grid("1,2,3", int) == (1, 2, 3)
    assert parse_grid("10:50:10", int) == (10, 20, 30, 40, 50)
    assert parse_grid("0:0.1:0.05") == (0.0, 0.05, 0.1)
    with pytest.raises(UsageError):
        parse_grid("1.5", int)


# -- compile --------------------------------------------------------------------

def test_compile_already_special(tmp_path, capsys):
    src = tmp_path / "comm.txt"
    src.write_text("qubit a atom e\nqubit p photon H\ncnot a p\nh a\nh p\ncnot a p\nh a\nh p\n")
    out = tmp_path / "out.txt"
    assert main(["compile", str(src), "--output", str(out)]) == 0
    report = capsys.readouterr().out
    assert "already special" in report
    assert out.read_text() == src.read_text()


def test_compile_photon_photon(tmp_path, capsys):
    src = tmp_path / "pp.txt"
    src.write_text("qubit p0 photon H\nqubit p1 photon H\ncnot p0 p1\n")
    out = tmp_path / "out.txt"
    assert main(["compile", str(src), "-o", str(out)]) == 0
    report = capsys.readouterr().out
    assert "cnots before: 1" in report and "cnots after: 3" in report
    assert "verification: PASS" in report
    assert "__atom0" in out.read_text()


def test_compile_paired_depth(tmp_path, capsys):
    lines = [f"qubit p{i} photon H" for i in range(8)]
    lines += [f"cnot p{2 * i} p{2 * i + 1}" for i in range(4)]
    src = tmp_path / "paired.txt"
    src.write_text("\n".join(lines) + "\n")
    assert main(["compile", str(src), "--atoms", "4", "-o", str(tmp_path / "o.txt")]) == 0
    report = capsys.readouterr().out
    depth = int(report.split("schedule depth with 4 atom(s): ")[1].split()[0])
    assert depth <= 3


def test_compile_parse_error(tmp_path, capsys):
    src = tmp_path / "bad.txt"
    src.write_text("qubit a atom e\nfrob a\n")
    assert main(["compile", str(src)]) == 2
    assert "line 2, column 1" in capsys.readouterr().err


def test_compile_atom_atom_rejected(tmp_path):
    src = tmp_path / "aa.txt"
    src.write_text("qubit a atom e\nqubit b atom e\ncnot a b\n")
    assert main(["compile", str(src)]) == 2


def test_compile_verification_failure_exit(tmp_path, monkeypatch):
    import cfqc.cli as cli
    from cfqc.passes import Equivalence

    monkeypatch.setattr(cli, "verify_equivalent", lambda *a, **k: Equivalence(False, 1.0))
    src = tmp_path / "pp.txt"
    src.write_text("qubit p0 photon H\nqubit p1 photon H\ncnot p0 p1\n")
    assert main(["compile", str(src), "-o", str(tmp_path / "o.txt")]) == 3


# -- certify --------------------------------------------------------------------

def test_certify_ok(capsys):
    assert main(["certify", "--M", "3", "--N", "4"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "CERTIFIED"


def test_certify_sabotage(capsys):
    assert main(["certify", "--M", "3", "--N", "4", "--sabotage", "no-double-mirror"]) == 3
    out = capsys.readouterr().out
    assert "NOT CERTIFIED" in out and "pass presence:" in out


def test_certify_degenerate(capsys):
    assert main(["certify", "--M", "1", "--N", "4"]) == 2
    assert "degenerate" in capsys.readouterr().err


def test_certify_budget(capsys):
    assert main(["certify", "--M", "400", "--N", "400"]) == 4


# -- example --------------------------------------------------------------------

@pytest.mark.parametrize("name,cases", [
    ("communicate", ["|00> -> expected", "|10> -> expected"]),
    ("swap", ["|00>", "|01>", "|10>", "|11>"]),
    ("erasure", ["|0000> -> |0_L>", "|1000> -> |1_L>", "KL off-diagonal"]),
])
def test_examples_pass(name, cases, capsys):
    assert main(["example", name]) == 0
    out = capsys.readouterr().out
    for c in cases:
        assert any(c in line and "[PASS]" in line for line in out.splitlines())
    assert "FAIL" not in out


def test_example_device(capsys):
    assert main(["example", "communicate", "--device", "M=10,N=200,gamma=0,eta=0"]) == 0
    out = capsys.readouterr().out
    assert "fidelity bound=" in out and "input |10>: E=" in out


def test_example_csv(tmp_path):
    p = tmp_path / "r.csv"
    assert main(["example", "swap", "--csv", str(p)]) == 0
    assert p.read_text().startswith("check,result,max_deviation\n")


def test_example_unknown_and_bad_device():
    assert main(["example", "teleport"]) == 2
    assert main(["example", "swap", "--device", "M=10"]) == 2
    assert main(["example", "swap", "--device", "M=10,N=200,zeta=1"]) == 2


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "cfqc", "sweep", "--m", "10", "--ratio", "20"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and res.stdout.startswith("m,n,gamma,eta")
