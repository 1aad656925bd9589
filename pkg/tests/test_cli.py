import json
import math

import pytest

from powerbin import ParetoParams, pareto_sample, write_synthetic_dataset
from powerbin.cli import main, parse_config


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def pareto_file(tmp_path):
    xs = pareto_sample(ParetoParams(1.5, 1.0), 800, 12345)
    path = tmp_path / "values.txt"
    path.write_text("\n".join(repr(float(x)) for x in xs) + "\n")
    return str(path)


def test_fit_hand_case(tmp_path, capsys):
    path = tmp_path / "e.txt"
    path.write_text(f"{math.e!r}\n{math.e!r}\n{math.e!r}\n")
    code, out, _ = run_cli(capsys, "fit", str(path), "--xm", "1")
    assert code == 0
    payload = json.loads(out)
    assert payload["alpha_hat"] == pytest.approx(1.0)
    assert payload["method"] == "mle_continuous"
    assert payload["lambda"] == 1.0


def test_fit_binned_and_regression(pareto_file, capsys):
    code, out, _ = run_cli(capsys, "fit", pareto_file, "--xm", "1", "--lambda", "2")
    assert code == 0
    assert json.loads(out)["method"] == "mle_binned"
    code, out, _ = run_cli(capsys, "fit", pareto_file, "--xm", "1",
                           "--method", "regression")
    assert code == 0
    payload = json.loads(out)
    assert payload["method"] == "regression"
    assert payload["alpha_hat"] == pytest.approx(1.5, rel=0.2)


def test_fit_json_round_trips(pareto_file, capsys):
    _, out, _ = run_cli(capsys, "fit", pareto_file, "--xm", "1")
    assert json.dumps(json.loads(out), indent=2) == out.strip()


def test_fit_formats(pareto_file, capsys):
    code, out, _ = run_cli(capsys, "fit", pareto_file, "--xm", "1",
                           "--format", "human")
    assert code == 0 and "alpha_hat = " in out
    code, out, _ = run_cli(capsys, "fit", pareto_file, "--xm", "1",
                           "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.split(",")[0] == "alpha_hat"
    assert len(header.split(",")) == len(row.split(","))


def test_gof_seed_reporting_and_reproducibility(pareto_file, capsys):
    code, out1, err = run_cli(capsys, "gof", pareto_file, "--xm", "1",
                              "--lambda", "2", "--boot", "99", "--seed", "7")
    assert code == 0
    assert "master seed: 7" in err
    payload = json.loads(out1)
    assert payload["seed"] == 7
    assert 0.0 < payload["p_value"] <= 1.0
    assert payload["n_bootstrap"] == 99
    _, out2, _ = run_cli(capsys, "gof", pareto_file, "--xm", "1",
                         "--lambda", "2", "--boot", "99", "--seed", "7")
    assert out1 == out2
    # fresh seed when omitted, still reported
    _, out3, err3 = run_cli(capsys, "gof", pareto_file, "--xm", "1", "--quick")
    assert isinstance(json.loads(out3)["seed"], int)
    assert "master seed:" in err3


def test_gof_null_pvalues_spread_across_seeds(tmp_path, capsys):
    # clean data at its own fitted null: p should rarely be extreme
    xs = pareto_sample(ParetoParams(1.5, 1.0), 300, 555)
    path = tmp_path / "clean.txt"
    path.write_text("\n".join(repr(float(x)) for x in xs) + "\n")
    accepted = 0
    for seed in range(30):
        _, out, _ = run_cli(capsys, "gof", str(path), "--xm", "1", "--lambda", "2",
                            "--boot", "39", "--seed", str(seed))
        accepted += json.loads(out)["p_value"] > 0.05
    assert accepted >= 24  # ~95% in expectation, loose floor


def test_gof_quick_verdict(pareto_file, capsys):
    code, out, _ = run_cli(capsys, "gof", pareto_file, "--xm", "1",
                           "--lambda", "2", "--quick", "--seed", "3")
    payload = json.loads(out)
    assert code == 0
    assert payload["p_value"] is None
    assert payload["n_bootstrap"] == 19
    assert isinstance(payload["reject_at_005"], bool)


def test_gof_threads_do_not_change_output(pareto_file, capsys):
    _, out1, _ = run_cli(capsys, "gof", pareto_file, "--xm", "1", "--lambda", "2",
                         "--boot", "99", "--seed", "5", "--threads", "1")
    _, out2, _ = run_cli(capsys, "gof", pareto_file, "--xm", "1", "--lambda", "2",
                         "--boot", "99", "--seed", "5", "--threads", "3")
    assert out1 == out2


def test_exit_codes(tmp_path, capsys):
    missing = str(tmp_path / "nope.txt")
    code, _, err = run_cli(capsys, "fit", missing, "--xm", "1")
    assert code == 4 and "error" in err

    path = tmp_path / "low.txt"
    path.write_text("1.0\n1.5\n1.9\n")
    code, _, err = run_cli(capsys, "fit", str(path), "--xm", "100")
    assert code == 2  # nothing above the threshold

    # every value in bin zero: estimator undefined -> computation error
    code, _, err = run_cli(capsys, "fit", str(path), "--xm", "1", "--lambda", "2")
    assert code == 3 and "bin 0" in err


def test_lambda_limit_round_trip(capsys):
    code, out, _ = run_cli(capsys, "lambda-limit", "--alpha", "1.5",
                           "--n", "1000000", "--tol", "0.005")
    assert code == 0
    payload = json.loads(out)
    lam = payload["lambda_limit"]
    assert lam == pytest.approx(57.3616, rel=1e-4)
    assert (1 - lam ** -3.0) ** 1_000_000 == pytest.approx(0.005, abs=1e-8)
    code, _, _ = run_cli(capsys, "lambda-limit", "--alpha", "1.5",
                         "--n", "100", "--tol", "0")
    assert code == 2


def test_simulate_custom_deterministic_across_threads(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(
        "preset = custom\n"
        "alpha = 1.5\n"
        "n = 150\n"
        "replicates = 25\n"
        "lambda_grid = 1,2\n"
        "noise_kind = additive\n"
        "sigma = 0.2\n"
        "gof = quick\n"
        "seed = 99\n"
    )
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    code, stdout, _ = run_cli(capsys, "simulate", str(cfg), "--out-dir", str(out1),
                              "--threads", "1")
    assert code == 0
    listing = json.loads(stdout)
    assert listing["seed"] == 99
    code, _, _ = run_cli(capsys, "simulate", str(cfg), "--out-dir", str(out2),
                         "--threads", "3")
    assert code == 0
    for name in ("custom_cells.csv", "custom_replicates.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    manifest = json.loads((out1 / "custom_manifest.json").read_text())
    assert manifest["seed"] == 99
    assert manifest["preset"] == "custom"


def test_simulate_resume_reuses_blocks(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(
        "preset = custom\nn = 120\nreplicates = 10\nlambda_grid = 2\n"
        "noise_kind = none\ngof = quick\nseed = 5\n"
    )
    outdir = tmp_path / "out"
    code, _, _ = run_cli(capsys, "simulate", str(cfg), "--out-dir", str(outdir),
                         "--resume")
    assert code == 0
    blocks = list((outdir / "custom_blocks").glob("block_*.json"))
    assert len(blocks) == 10
    first = (outdir / "custom_cells.csv").read_bytes()
    code, _, _ = run_cli(capsys, "simulate", str(cfg), "--out-dir", str(outdir),
                         "--resume")
    assert code == 0
    assert (outdir / "custom_cells.csv").read_bytes() == first


def test_simulate_config_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("preset = custom\nlambda_grid = \nbogus_key = 3\nn 12\n")
    code, _, err = run_cli(capsys, "simulate", str(cfg))
    assert code == 2
    assert "line 2" in err and "line 3" in err and "line 4" in err

    cfg2 = tmp_path / "nopreset.cfg"
    cfg2.write_text("alpha = 1.5\n")
    code, _, err = run_cli(capsys, "simulate", str(cfg2))
    assert code == 2 and "preset" in err


def test_parse_config_values(tmp_path):
    cfg = tmp_path / "ok.cfg"
    cfg.write_text(
        "# comment\npreset = fig2\nalpha = 1.5  # inline comment\n"
        "lambda_grid = 1,2,4\nnoise_kinds = additive, multiplicative\n"
    )
    values = parse_config(str(cfg))
    assert values["preset"] == "fig2"
    assert values["alpha"] == 1.5
    assert values["lambda_grid"] == [1.0, 2.0, 4.0]
    assert values["noise_kinds"] == ["additive", "multiplicative"]


def test_dataset_command(tmp_path, capsys):
    path = tmp_path / "wealth.txt"
    write_synthetic_dataset("wealth", path, seed=2)
    report_path = tmp_path / "report.json"
    tail_path = tmp_path / "tail.csv"
    code, _, err = run_cli(
        capsys, "dataset", str(path), "--name", "wealth", "--xm", "1e9",
        "--lambdas", "1,2", "--boot", "99", "--seed", "21",
        "--out", str(report_path), "--tail-csv", str(tail_path),
    )
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["dataset"] == "wealth"
    assert report["seed"] == 21
    assert len(report["fits"]) == 2
    assert report["chi_square"] is None
    lines = tail_path.read_text().splitlines()
    assert lines[0] == "x,tail_prob"
    assert len(lines) == 1 + report["counts"]["retained"]

    # named dataset with the wrong threshold is a validation error
    code, _, _ = run_cli(capsys, "dataset", str(path), "--name", "wealth",
                         "--xm", "5e8", "--lambdas", "1", "--seed", "1")
    assert code == 2


def test_tolerance_command_smoke(capsys):
    code, out, _ = run_cli(
        capsys, "tolerance", "--alpha", "1.5", "--lambda", "2", "--n", "200",
        "--kind", "additive", "--seed", "3", "--target", "0.5",
        "--half-width", "0.05", "--rel-window", "0.05",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["sigma_hat"] > 0
    assert payload["seed"] == 3
    assert isinstance(payload["trace"], list)
