import json
import subprocess
import sys

import numpy as np
import pytest

from schur_dilate import serialize
from schur_dilate.cli import main
from schur_dilate.sampling import complex_gaussian, rng_from_seed


def write_matrix(path, a):
    serialize.dump(serialize.matrix_to_obj(np.asarray(a, dtype=complex)), path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_param_psd_identity(tmp_path, capsys):
    src = tmp_path / "a.json"
    out = tmp_path / "p.json"
    write_matrix(src, np.eye(4))
    code, _, err = run_cli(capsys, "param", "--kind", "psd", "--shape", "2+2",
                           "--in", str(src), "--out", str(out))
    assert code == 0
    assert err.startswith("roundtrip=0.0")
    params = serialize.params_from_obj(serialize.load(out))
    np.testing.assert_allclose(params.gamma(0, 1), np.zeros((2, 2)), atol=1e-12)


def test_param_scalar_fixture_gamma(tmp_path, capsys):
    src = tmp_path / "a.json"
    out = tmp_path / "p.json"
    write_matrix(src, np.array([[1.0, 0.5], [0.5, 1.0]]))
    code, _, _ = run_cli(capsys, "param", "--kind", "psd", "--shape", "1+1",
                         "--in", str(src), "--out", str(out))
    assert code == 0
    params = serialize.params_from_obj(serialize.load(out))
    assert complex(params.gamma(0, 1)[0, 0]) == pytest.approx(0.5, abs=1e-12)


def test_param_row_roundtrip_reported(tmp_path, capsys):
    rng = rng_from_seed(111)
    g = complex_gaussian(rng, 2, 6)
    t = g / np.linalg.norm(g, 2) * 0.9
    src = tmp_path / "t.json"
    out = tmp_path / "p.json"
    write_matrix(src, t)
    code, _, err = run_cli(capsys, "param", "--kind", "row", "--shape", "2+2+2",
                           "--in", str(src), "--out", str(out))
    assert code == 0
    reported = float(err.strip().split("=", 1)[1])
    assert reported <= 1e-8


def test_param_matrix_kind_and_reconstruct(tmp_path, capsys):
    rng = rng_from_seed(112)
    g = complex_gaussian(rng, 4, 4)
    t = g / np.linalg.norm(g, 2) * 0.8
    src = tmp_path / "t.json"
    out = tmp_path / "r.json"
    write_matrix(src, t)
    code, _, _ = run_cli(capsys, "param", "--kind", "matrix", "--shape", "2+2x2+2",
                         "--in", str(src), "--out", str(out), "--reconstruct")
    assert code == 0
    recon = serialize.matrix_from_obj(serialize.load(out))
    np.testing.assert_allclose(recon, t, atol=1e-8)


def test_param_domain_violation_exits_2(tmp_path, capsys):
    src = tmp_path / "bad.json"
    out = tmp_path / "p.json"
    write_matrix(src, np.diag([1.0, -1.0]))
    code, _, err = run_cli(capsys, "param", "--kind", "psd", "--shape", "1+1",
                           "--in", str(src), "--out", str(out))
    assert code == 2
    assert "NotPSD" in err and "eigenvalue" in err


def test_param_io_failure_exits_1(tmp_path, capsys):
    out = tmp_path / "p.json"
    code, _, _ = run_cli(capsys, "param", "--kind", "psd", "--shape", "1+1",
                         "--in", str(tmp_path / "missing.json"), "--out", str(out))
    assert code == 1
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    code, _, _ = run_cli(capsys, "param", "--kind", "psd", "--shape", "1+1",
                         "--in", str(broken), "--out", str(out))
    assert code == 1


def test_dilate_basis_povm(tmp_path, capsys):
    povm_file = tmp_path / "povm.json"
    out = tmp_path / "u.json"
    obj = {"dim": 2, "vectors": [[[1.0, 0.0], [0.0, 0.0]],
                                 [[0.0, 0.0], [1.0, 0.0]]]}
    serialize.dump(obj, povm_file)
    code, stdout, _ = run_cli(capsys, "dilate", "--povm", str(povm_file),
                              "--out", str(out))
    assert code == 0
    report = json.loads(stdout)
    assert report["passed"]
    assert report["compression"] <= 1e-12


def test_dilate_trine_povm(tmp_path, capsys):
    vs = [np.sqrt(2 / 3) * np.array([np.cos(2 * np.pi * k / 3),
                                     np.sin(2 * np.pi * k / 3)]) for k in range(3)]
    povm_file = tmp_path / "trine.json"
    out = tmp_path / "u.json"
    serialize.dump({"dim": 2, "vectors": [serialize.vector_to_obj(v) for v in vs]},
                   povm_file)
    code, stdout, _ = run_cli(capsys, "dilate", "--povm", str(povm_file),
                              "--out", str(out))
    assert code == 0
    report = json.loads(stdout)
    assert report["total_dim"] == 5
    assert report["compression"] <= 1e-10
    result = serialize.dilation_from_obj(serialize.load(out))
    assert result.unitary.shape == (5, 5)


def test_dilate_channel_with_simulation(tmp_path, capsys):
    ch_file = tmp_path / "ch.json"
    out = tmp_path / "u.json"
    obj = {
        "in_dim": 2, "out_dim": 2,
        "kraus": [
            serialize.matrix_to_obj(np.array([[1.0, 0.0], [0.0, 0.8]])),
            serialize.matrix_to_obj(np.array([[0.0, 0.6], [0.0, 0.0]])),
        ],
    }
    serialize.dump(obj, ch_file)
    code, stdout, _ = run_cli(capsys, "dilate", "--channel", str(ch_file),
                              "--simulate", "20", "--seed", "7", "--out", str(out))
    assert code == 0
    report = json.loads(stdout)
    assert report["simulate_trials"] == 20
    assert report["simulate_max_deviation"] <= 1e-10


def test_dilate_non_trace_preserving_exits_2(tmp_path, capsys):
    ch_file = tmp_path / "ch.json"
    out = tmp_path / "u.json"
    serialize.dump({"in_dim": 2, "out_dim": 2,
                    "kraus": [serialize.matrix_to_obj(np.diag([1.0, 0.8]))]},
                   ch_file)
    code, _, err = run_cli(capsys, "dilate", "--channel", str(ch_file),
                           "--out", str(out))
    assert code == 2
    assert "NotTracePreserving" in err


def test_witness_batch_passes_and_is_deterministic(tmp_path, capsys):
    out1 = tmp_path / "r1.jsonl"
    out2 = tmp_path / "r2.jsonl"
    common = ["witness", "--family", "toeplitz2", "--witness", "transpose",
              "--trials", "20", "--seed", "3", "--block-dim", "2"]
    code, _, _ = run_cli(capsys, *common, "--out", str(out1))
    assert code == 0
    code, _, _ = run_cli(capsys, *common, "--out", str(out2))
    assert code == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = [json.loads(line) for line in out1.read_text().splitlines()]
    assert "schur_dilate_version" in lines[0]
    trials = [l for l in lines if "family" in l]
    assert len(trials) == 20
    assert all(l["passed"] for l in trials)
    assert lines[-1]["all_passed"]


def test_witness_span_choi(tmp_path, capsys):
    code, stdout, _ = run_cli(capsys, "witness", "--family", "span3_1",
                              "--witness", "choi3", "--trials", "10",
                              "--seed", "5", "--blocks", "2")
    assert code == 0
    lines = [json.loads(line) for line in stdout.splitlines()]
    assert lines[-1]["all_passed"]


def test_witness_bell_control_fails(capsys):
    # the control fixture fixes its own dimension; no --block-dim needed
    code, stdout, _ = run_cli(capsys, "witness", "--family", "bell-control",
                              "--witness", "transpose", "--trials", "1",
                              "--seed", "0")
    assert code == 2
    lines = [json.loads(line) for line in stdout.splitlines()]
    assert lines[-1]["worst_min_eig"] == pytest.approx(-0.5, abs=1e-10)


def test_witness_choi_control_fails(capsys):
    code, stdout, _ = run_cli(capsys, "witness", "--family", "choi-control",
                              "--witness", "choi3", "--trials", "1", "--seed", "0")
    assert code == 2
    lines = [json.loads(line) for line in stdout.splitlines()]
    assert lines[-1]["worst_min_eig"] < -0.03


def test_witness_unsupported_combination_exits_2(capsys):
    code, _, err = run_cli(capsys, "witness", "--family", "span3_1",
                           "--witness", "transpose", "--trials", "1",
                           "--seed", "0", "--block-dim", "2")
    assert code == 2
    assert "UnsupportedCombination" in err


def test_console_script_version():
    proc = subprocess.run([sys.executable, "-m", "schur_dilate.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip()


def test_numerical_failure_exits_3(tmp_path, capsys, monkeypatch):
    import schur_dilate.cli as cli_mod
    from schur_dilate.errors import NoConvergence

    def explode(*args, **kwargs):
        raise NoConvergence("eigensolver gave up")

    monkeypatch.setattr(cli_mod, "psd_parametrize", explode)
    src = tmp_path / "a.json"
    out = tmp_path / "p.json"
    write_matrix(src, np.eye(2))
    code, _, err = run_cli(capsys, "param", "--kind", "psd", "--shape", "1+1",
                           "--in", str(src), "--out", str(out))
    assert code == 3
    assert "numerical failure" in err


def test_tolerance_env_override(tmp_path, capsys, monkeypatch):
    # a slightly indefinite matrix passes the psd gate once the tolerance is loosened
    src = tmp_path / "a.json"
    out = tmp_path / "p.json"
    write_matrix(src, np.diag([1.0, -1e-6]))
    code, _, _ = run_cli(capsys, "param", "--kind", "psd", "--shape", "1+1",
                         "--in", str(src), "--out", str(out))
    assert code == 2
    monkeypatch.setenv("SCHUR_DILATE_TOL", "1e-4")
    code, _, _ = run_cli(capsys, "param", "--kind", "psd", "--shape", "1+1",
                         "--in", str(src), "--out", str(out))
    assert code == 0
