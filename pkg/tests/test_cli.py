"""CLI behavior: flags, output formats, exit codes, determinism."""
import pytest

from lotzkit import cli, oracle
from lotzkit.oracle import PositionClassification
from lotzkit.verify import PARITY_TABLE


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_single_trial_k2_coincides(capsys):
    code, out, _ = run_cli(capsys, "run", "--n", "8", "--k", "2", "--measure", "total", "--seed", "1")
    assert code == 0
    fields = dict(part.split("=") for part in out.split())
    assert fields["iters_to_cover"] == fields["iters_to_opt"]
    assert fields["capped"] == "false"


def test_run_best_init_is_immediately_optimal(capsys):
    code, out, _ = run_cli(
        capsys, "run", "--init", "best", "--n", "16", "--k", "4", "--measure", "sorted"
    )
    assert code == 0
    fields = dict(part.split("=") for part in out.split())
    assert fields["iters_to_opt"] == "0"


def test_run_rejects_bad_k(capsys):
    code, _, err = run_cli(capsys, "run", "--n", "8", "--k", "1")
    assert code == 2
    assert "k must be in" in err


def test_run_capped_exit_code(capsys):
    code, out, _ = run_cli(
        capsys, "run", "--n", "16", "--k", "4", "--seed", "3", "--max-iters", "5"
    )
    assert code == 1
    assert "capped=true" in out


def test_run_appends_csv(tmp_path, capsys):
    out_path = tmp_path / "one.csv"
    code, _, _ = run_cli(
        capsys, "run", "--n", "8", "--k", "2", "--seed", "9", "--out", str(out_path)
    )
    assert code == 0
    lines = out_path.read_text().strip().split("\n")
    assert lines[0].startswith("experiment,algorithm,measure")
    assert len(lines) == 2
    run_cli(capsys, "run", "--n", "8", "--k", "2", "--seed", "10", "--out", str(out_path))
    assert len(out_path.read_text().strip().split("\n")) == 3


def test_env_seed_override(capsys, monkeypatch):
    monkeypatch.setenv("EDO_SEED", "777")
    code, out, _ = run_cli(capsys, "run", "--n", "8", "--k", "2")
    assert code == 0
    assert "seed=777" in out


def test_oracle_text_output(capsys):
    code, out, _ = run_cli(capsys, "oracle", "--n", "8", "--k", "2")
    assert code == 0
    assert "mu_max=16" in out
    code, out, _ = run_cli(capsys, "oracle", "--n", "8", "--k", "8")
    assert code == 0
    assert "mu_max=37" in out


def test_oracle_csv_parity_matches_table(capsys):
    for n, k in [(8, 2), (9, 4), (9, 5), (10, 7), (13, 6), (12, 3)]:
        code, out, _ = run_cli(capsys, "oracle", "--n", str(n), "--k", str(k), "--format", "csv")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "n,k,position,b_opt,mu_max,parity,opt_total"
        assert len(lines) == 1 + n
        parity = int(lines[1].split(",")[5])
        assert parity == PARITY_TABLE[(n % 2, k % 4)]


def test_oracle_domain_error(capsys):
    code, _, err = run_cli(capsys, "oracle", "--n", "8", "--k", "20")
    assert code == 2 and "error" in err


def test_verify_passes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--max-n", "6")
    assert code == 0
    assert out.count("[PASS]") == 4 and "[FAIL]" not in out


def test_verify_guard(capsys):
    code, _, err = run_cli(capsys, "verify", "--max-n", "30")
    assert code == 2 and "guarded" in err


def test_verify_negative_control(capsys, monkeypatch):
    # corrupt the closed form; verify must notice and exit nonzero
    true_classify = oracle.classify_position

    def corrupted(i, params):
        c = true_classify(i, params)
        return PositionClassification(m1=c.m1 + 2, m0=c.m0, m_free=c.m_free, a=c.a)

    monkeypatch.setattr(oracle, "classify_position", corrupted)
    code, out, _ = run_cli(capsys, "verify", "--max-n", "5")
    assert code == 1
    assert "[FAIL]" in out


def test_experiment_writes_csvs(tmp_path, capsys):
    code, _, err = run_cli(
        capsys,
        "experiment",
        "--which",
        "fig5",
        "--measure",
        "total",
        "--runs",
        "2",
        "--seed",
        "5",
        "--scale",
        "small",
        "--out-dir",
        str(tmp_path / "out"),
        "--jobs",
        "1",
    )
    assert code == 0
    assert (tmp_path / "out" / "runs.csv").exists()
    assert (tmp_path / "out" / "summary.csv").exists()
    assert "runs done" in err


def test_unknown_experiment_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["experiment", "--which", "fig9"])
    assert exc.value.code == 2
