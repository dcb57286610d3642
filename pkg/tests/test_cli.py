"""Command-line interface: subcommands, artifacts, exit codes."""

import json

import numpy as np
import pytest

from svmps.cli import main, read_config_file
from svmps.system import bundled_fcidump


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_stats_h6(capsys):
    code, out, _ = run_cli(capsys, "stats", "--fcidump", bundled_fcidump("h6"))
    assert code == 0
    stats = json.loads(out)
    assert stats["ci_k"] == 400
    assert stats["hilbert"] == 4096
    assert stats["ci"] == 924


def test_stats_by_counts_formula(capsys):
    code, out, _ = run_cli(capsys, "stats", "--qubits", 28, "--nalpha", 7)
    assert code == 0
    assert json.loads(out)["ci_k"] == 11778624


def test_stats_enumerated(capsys):
    code, out, _ = run_cli(capsys, "stats", "--fcidump", bundled_fcidump("h4"),
                           "--enumerate")
    assert code == 0
    stats = json.loads(out)
    assert stats["ci_k"] == 36 and stats["enumerated"]


def test_oracle_h2(capsys, h2_fci):
    code, out, _ = run_cli(capsys, "oracle", "--fcidump", bundled_fcidump("h2"))
    assert code == 0
    assert json.loads(out)["fci_energy"] == pytest.approx(h2_fci, abs=1e-10)


def test_assemble_cache_roundtrip(capsys, tmp_path, h2_csr):
    out_path = tmp_path / "h2.csr"
    code, out, _ = run_cli(capsys, "assemble", "--fcidump", bundled_fcidump("h2"),
                           "--out", out_path)
    assert code == 0
    from svmps.svengine import load_csr

    cached = load_csr(out_path)
    assert np.array_equal(cached.values, h2_csr.values)


def test_metrics_synthetic(capsys, tmp_path):
    csv = tmp_path / "synthetic.csv"
    rows = ["iter,selected_op,grad_max,energy,abs_error,nnz,max_trunc_err,wall_s,energy_evals"]
    for j in range(1, 7):
        rows.append(f"{j},d:0,1.0,-1.0,,1,0.0,{4.0 * j * j},{j}")
    csv.write_text("\n".join(rows) + "\n")
    code, out, _ = run_cli(capsys, "metrics", "--csv", csv)
    assert code == 0
    payload = json.loads(out)
    assert np.allclose(payload["c_tilde"], 0.5)
    assert payload["c_fit"] == pytest.approx(4.0)


def test_run_sv_artifacts(capsys, tmp_path):
    outdir = tmp_path / "h2run"
    code, out, _ = run_cli(capsys, "run", "--engine", "sv",
                           "--fcidump", bundled_fcidump("h2"),
                           "--max-iter", 3, "--out", outdir)
    assert code == 0
    lines = (outdir / "run.csv").read_text().splitlines()
    assert lines[0] == ("iter,selected_op,grad_max,energy,abs_error,nnz,"
                        "max_trunc_err,wall_s,energy_evals")
    summary = json.loads((outdir / "summary.json").read_text())
    assert summary["status"] == "converged"
    assert summary["config"]["engine"] == "sv"
    assert summary["final_abs_error"] <= 1e-8


def test_run_partitioned_writes_report(capsys, tmp_path):
    outdir = tmp_path / "h2part"
    code, out, _ = run_cli(capsys, "run", "--engine", "partitioned", "--eta", 1,
                           "--delta", "1e-12", "--fcidump", bundled_fcidump("h2"),
                           "--max-iter", 2, "--out", outdir)
    assert code == 0
    report = json.loads((outdir / "partition.json").read_text())
    assert report["eta"] == 1
    assert (outdir / "truncation.csv").exists()


def test_run_missing_fcidump_is_usage_error(capsys, tmp_path):
    code, out, err = run_cli(capsys, "run", "--engine", "sv",
                             "--fcidump", tmp_path / "absent.fcidump",
                             "--out", tmp_path / "x")
    assert code == 1
    assert "error" in err.lower()


def test_run_bond_abort_exit_code(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "run", "--engine", "mps", "--delta", "0",
                           "--max-bond", 2, "--fcidump", bundled_fcidump("h4"),
                           "--max-iter", 4, "--out", tmp_path / "abort")
    assert code == 2
    summary = json.loads((tmp_path / "abort" / "summary.json").read_text())
    assert summary["status"] == "aborted"


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# comment\n"
        f"fcidump={bundled_fcidump('h2')}\n"
        "engine=sv\nmax_iter=2\neps_grad=1e-5\n"
        f"out={tmp_path / 'cfgrun'}\n"
    )
    values = read_config_file(cfg)
    assert values["engine"] == "sv" and values["max_iter"] == 2
    code, out, _ = run_cli(capsys, "run", "--config", cfg)
    assert code == 0

    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_key=1\n")
    with pytest.raises(ValueError, match="unknown key"):
        read_config_file(bad)


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
