import json
import subprocess
import sys

import pytest

from tbqudit.cli import main

BELL = "qudit q 2\ngate H q[0]\ncnot q[0] q[1]\nmeasure q\n"


@pytest.fixture
def bell(tmp_path):
    p = tmp_path / "bell.qbc"
    p.write_text(BELL)
    return p


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_bell(bell, capsys):
    code, out, _ = run(["sample", bell, "--shots", 100000, "--seed", 7], capsys)
    assert code == 0
    doc = json.loads(out)
    assert set(doc["counts"]) == {"0", "3"} and doc["shots"] == 100000


def test_verify_bell(bell, capsys):
    code, out, _ = run(["verify", bell], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] and doc["event_level"]["passed"]


def test_verify_cross_qudit(tmp_path, capsys):
    p = tmp_path / "cz.qbc"
    p.write_text("qudit a 1\nqudit b 2\nspin s\ngate H a[0]\ncz s a[0] b[1]\n")
    code, out, _ = run(["verify", p], capsys)
    assert code == 0 and json.loads(out)["event_level"] is None


def test_verify_qnd_fails_cleanly(tmp_path, capsys):
    p = tmp_path / "qnd.qbc"
    p.write_text("qudit a 1\nspin s\nqnd s a[0]\n")
    code, _, err = run(["verify", p], capsys)
    assert code == 1 and err.startswith("error: ") and err.count("\n") == 1


def test_estimate(capsys):
    code, out, _ = run(["estimate", "--qubits", 20, "--bin-period", "1e-9", "--json"], capsys)
    assert code == 0 and json.loads(out)["num_bins"] == 1048576
    code, out, _ = run(["estimate", "--qubits", 20, "--bin-period", "1e-9"], capsys)
    assert "1,048,576" in out


def test_compile_simulate_run(bell, tmp_path, capsys):
    prog = tmp_path / "bell.json"
    assert run(["compile", bell, "-o", prog], capsys)[0] == 0
    state = tmp_path / "in.json"
    state.write_text(json.dumps({"num_qubits": 2, "amplitudes": [[1, 0], [0, 0], [0, 0], [0, 0]]}))
    code, out, _ = run(["simulate", prog, "--input", state], capsys)
    assert code == 0
    doc = json.loads(out)
    amps = [complex(*a) for a in doc["state"]["amplitudes"]]
    assert abs(abs(amps[0]) ** 2 - 0.5) < 1e-12 and abs(abs(amps[3]) ** 2 - 0.5) < 1e-12
    assert doc["report"]["pass_latency_in_T"] == [1, 2]
    out_state = tmp_path / "out.json"
    code, out, _ = run(["run", bell, "--input", state, "--out", out_state, "--seed", 1], capsys)
    assert code == 0 and json.loads(out_state.read_text())["num_qubits"] == 2
    assert json.loads(out)["outcomes"][0]["kind"] == "measure"


def test_parse_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.qbc"
    p.write_text("qudit q 2\ngate H q[5]\n")
    code, _, err = run(["run", p], capsys)
    assert code == 1
    assert err.startswith("error: ParseError: line 2, column") and err.count("\n") == 1


def test_usage_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["estimate", "--qubits", "3", "--bogus"])
    assert e.value.code == 2
    capsys.readouterr()
    code, _, err = run(["run", tmp_path / "missing.qbc"], capsys)
    assert code == 2 and err.startswith("error: cannot read")


def test_bad_state_document(bell, tmp_path, capsys):
    prog = tmp_path / "p.json"
    run(["compile", bell, "-o", prog], capsys)
    state = tmp_path / "s.json"
    state.write_text('{"num_qubits": 2, "amplitudes": [[1, 0], [1, 0], [0, 0]]}')
    code, _, err = run(["simulate", prog, "--input", state], capsys)
    assert code == 1 and err.startswith("error:")


def test_determinism_byte_identical(bell, tmp_path, capsys):
    outs = []
    for k in range(2):
        target = tmp_path / f"h{k}.json"
        run(["sample", bell, "--shots", 5000, "--seed", 3, "--out", target], capsys)
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point(bell):
    proc = subprocess.run([sys.executable, "-m", "tbqudit", "verify", str(bell)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    proc = subprocess.run([sys.executable, "-m", "tbqudit"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr
