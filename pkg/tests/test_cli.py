"""CLI contract: subcommands, exit codes, report artifacts, config plumbing."""

import json
import subprocess
import sys

import pytest

from kahlerlab import cli

FAST = "check_einstein_ma_identity"


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestVerify:
    def test_passing_run_exits_zero(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--check", FAST, "--seed", "42")
        assert code == 0
        assert "PASS" in out and "rows passed" in out

    def test_failing_run_exits_one(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--check", "check_s_scalar_record_n3",
            "--tol", "curvature=1e-30",
        )
        assert code == 1
        assert "FAIL" in out

    def test_unknown_check_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "verify", "--check", "no_such_check")
        assert code == 2
        assert "no_such_check" in err

    def test_bad_samples_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "verify", "--check", FAST, "--samples", "3")
        assert code == 2

    def test_json_artifact_schema_and_determinism(self, tmp_path, capsys):
        out1 = tmp_path / "r1.json"
        out2 = tmp_path / "r2.json"
        for path in (out1, out2):
            code, _, _ = run_cli(
                capsys, "verify", "--check", FAST, "--seed", "42",
                "--format", "json", "--output", str(path),
            )
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()
        records = json.loads(out1.read_text())
        assert [list(r) for r in records] == [
            ["id", "pass", "max_residual", "mean_residual", "tolerance",
             "samples", "seed", "wall_ms", "claim_ref"]
        ] * len(records)

    def test_csv_column_order(self, tmp_path, capsys):
        path = tmp_path / "r.csv"
        code, _, _ = run_cli(
            capsys, "verify", "--check", FAST, "--format", "csv", "--output", str(path)
        )
        assert code == 0
        header = path.read_text().splitlines()[0]
        assert header == "id,pass,max_residual,mean_residual,tolerance,samples,seed,wall_ms,claim_ref"

    def test_unwritable_output_exits_two(self, capsys):
        code, _, err = run_cli(
            capsys, "verify", "--check", FAST, "--output", "/nonexistent-dir/report.json"
        )
        assert code == 2
        assert "cannot write" in err

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"checks": [FAST], "seed": 7, "format": "json"}))
        out = tmp_path / "r.json"
        code, _, _ = run_cli(
            capsys, "verify", "--config", str(cfg), "--seed", "9", "--output", str(out)
        )
        assert code == 0
        records = json.loads(out.read_text())
        assert all(r["seed"] == 9 for r in records)

    def test_env_seed_default(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv(cli.ENV_SEED, "31")
        out = tmp_path / "r.json"
        code, _, _ = run_cli(
            capsys, "verify", "--check", FAST, "--format", "json", "--output", str(out)
        )
        assert code == 0
        assert all(r["seed"] == 31 for r in json.loads(out.read_text()))

    def test_include_timings(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code, _, _ = run_cli(
            capsys, "verify", "--check", FAST, "--include-timings",
            "--format", "json", "--output", str(out),
        )
        assert code == 0
        records = json.loads(out.read_text())
        assert any(r["wall_ms"] > 0 for r in records)


class TestEval:
    def test_metric_matrix(self, capsys):
        code, out, _ = run_cli(capsys, "eval", "--metric", "s", "--kind", "metric",
                               "--point", "1,0")
        assert code == 0
        body = json.loads(out)
        assert body["matrix"][0][0] == "1.0+0.0i"
        assert body["matrix"][1][1] == "2.0+0.0i"

    def test_diastasis_value(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "--metric", "s", "--kind", "diastasis",
            "--center", "1,0", "--point", "2,0",
        )
        assert code == 0
        value = json.loads(out)["value"]
        assert abs(complex(value.replace("i", "j")) - 1.0) < 1e-12

    def test_eh_ricci_near_zero(self, capsys):
        code, out, _ = run_cli(capsys, "eval", "--metric", "eh", "--kind", "ricci",
                               "--point", "0.7,0.3i")
        assert code == 0
        body = json.loads(out)
        worst = max(
            abs(complex(v.replace("i", "j"))) for row in body["matrix"] for v in row
        )
        assert worst < 1e-10

    def test_inadmissible_point_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "eval", "--metric", "s", "--kind", "metric",
                               "--point", "0,0")
        assert code == 2
        assert "clearance" in err

    def test_malformed_point_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "eval", "--metric", "s", "--kind", "metric",
                               "--point", "1,oops")
        assert code == 2


class TestListChecks:
    def test_lists_registry(self, capsys):
        code, out, _ = run_cli(capsys, "list-checks")
        assert code == 0
        assert "check_eh_ricci_flat" in out
        assert "probe_nonexistence_fs_into_eh" in out


def test_internal_error_exits_three(capsys, monkeypatch):
    from kahlerlab.service import handlers

    def boom(cfg):
        raise RuntimeError("synthetic failure")

    monkeypatch.setattr(handlers, "run_verify_full", boom)
    code = cli.main(["verify", "--check", FAST])
    err = capsys.readouterr().err
    assert code == 3
    assert "synthetic failure" in err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kahlerlab.cli", "list-checks"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert "check_bs_scalar_flat_n2" in proc.stdout
