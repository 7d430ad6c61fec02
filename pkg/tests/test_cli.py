import json
import math

import pytest

from betapoly.cli import dispatch
from betapoly.sampler import BetaParams, SeedPolicy, sample_batch, write_points_csv

CONSTANTS_KEYS = {"M", "A", "B", "C", "K_n", "I"}
VERIFY_KEYS = {
    "gradient_residual",
    "det_negG",
    "analytic_det",
    "radial_partials",
    "analytic_partials",
    "A6_pass",
    "A7_pass",
}


def _run(capsys, argv):
    code = dispatch(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_constants_json_schema_and_values(capsys):
    code, out, _ = _run(
        capsys, ["constants", "--objective", "perimeter", "--n", "3", "--beta", "0", "--json"]
    )
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == CONSTANTS_KEYS
    assert payload["C"] == pytest.approx(4.0)
    assert payload["A"] == pytest.approx(0.75)
    assert payload["M"] == pytest.approx(3.0 * math.sqrt(3.0))
    assert payload["B"] == pytest.approx(payload["K_n"] * payload["I"], rel=1e-12)


def test_constants_human_output(capsys):
    code, out, _ = _run(capsys, ["constants", "--objective", "area", "--n", "4", "--beta", "0.5"])
    assert code == 0
    assert out.splitlines()[0].startswith("M = ")


def test_missing_flag_names_it(capsys):
    code, _, err = _run(capsys, ["constants", "--objective", "perimeter", "--beta", "0"])
    assert code == 1
    assert err.startswith("error:")
    assert "--n" in err


def test_unknown_subcommand_exits_1(capsys):
    code, _, err = _run(capsys, ["frobnicate"])
    assert code == 1
    assert "error:" in err


def test_no_subcommand_exits_1(capsys):
    code, _, err = _run(capsys, [])
    assert code == 1
    assert "subcommand" in err


def test_invalid_objective_exits_1(capsys):
    code, _, err = _run(capsys, ["constants", "--objective", "volume", "--n", "3", "--beta", "0"])
    assert code == 1


def test_domain_error_exits_1(capsys):
    code, _, err = _run(
        capsys, ["constants", "--objective", "perimeter", "--n", "3", "--beta", "-2", "--json"]
    )
    assert code == 1
    assert "beta" in err


def test_sample_writes_deterministic_csv(tmp_path, capsys):
    out = tmp_path / "pts.csv"
    argv = ["sample", "--beta", "0", "--count", "50", "--seed", "7", "--out", str(out)]
    assert dispatch(argv) == 0
    first = out.read_bytes()
    assert dispatch(argv) == 0
    assert out.read_bytes() == first
    assert first.decode().splitlines()[0] == "x,y"
    capsys.readouterr()


def test_umax_cli_agrees_with_bruteforce(tmp_path, capsys):
    pts = sample_batch(BetaParams(0.0), 10, SeedPolicy(3), 0)
    path = tmp_path / "pts.csv"
    write_points_csv(path, pts)
    code, out, _ = _run(capsys, ["umax", "--in", str(path), "--n", "3", "--objective", "area"])
    assert code == 0
    fast = json.loads(out)
    code, out, _ = _run(
        capsys,
        ["umax", "--in", str(path), "--n", "3", "--objective", "area", "--brute-force"],
    )
    assert code == 0
    slow = json.loads(out)
    assert set(fast) == {"value", "vertex_indices", "vertex_count"}
    assert fast["value"] == pytest.approx(slow["value"], rel=1e-12)
    assert fast["vertex_indices"] == slow["vertex_indices"]


def test_umax_missing_file_is_runtime_error(capsys):
    code, _, err = _run(
        capsys, ["umax", "--in", "/nonexistent/pts.csv", "--n", "3", "--objective", "area"]
    )
    assert code == 2


def test_verify_json_schema(capsys):
    code, out, _ = _run(capsys, ["verify", "--kernel", "perimeter", "--n", "4", "--json"])
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == VERIFY_KEYS
    assert payload["A6_pass"] is True and payload["A7_pass"] is True
    assert payload["gradient_residual"] < 1e-6
    assert payload["det_negG"] == pytest.approx(payload["analytic_det"], rel=1e-4)
    assert len(payload["radial_partials"]) == 4
    assert payload["radial_partials"][0] == pytest.approx(payload["analytic_partials"], abs=1e-5)


def test_verify_step_override(capsys):
    code, out, _ = _run(
        capsys, ["verify", "--kernel", "area", "--n", "3", "--step", "1e-4", "--json"]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["det_negG"] == pytest.approx(payload["analytic_det"], rel=1e-3)


def test_config_file_supplies_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"constants": {"objective": "perimeter", "n": 3, "beta": 0.0, "as_json": True}}))
    code, out, _ = _run(capsys, ["--config", str(cfg), "constants"])
    assert code == 0
    assert json.loads(out)["C"] == pytest.approx(4.0)
    # explicit flag beats the file: n=4 gives C = 5.5
    code, out, _ = _run(capsys, ["--config", str(cfg), "constants", "--n", "4"])
    assert code == 0
    assert json.loads(out)["C"] == pytest.approx(5.5)


def test_bad_config_exits_1(tmp_path, capsys):
    cfg = tmp_path / "broken.json"
    cfg.write_text("{not json")
    code, _, err = _run(capsys, ["--config", str(cfg), "constants", "--objective", "perimeter",
                                 "--n", "3", "--beta", "0"])
    assert code == 1
    assert "config" in err


def test_simulate_cli_files_and_thread_determinism(tmp_path, capsys):
    outs = []
    for threads, sub in (("1", "a"), ("2", "b")):
        out_dir = tmp_path / sub
        argv = [
            "--threads", threads,
            "simulate", "--objective", "perimeter", "--n", "3", "--beta", "0",
            "--N", "40,80", "--trials", "30", "--seed", "5", "--out-dir", str(out_dir),
        ]
        assert dispatch(argv) == 0
        outs.append(out_dir)
    capsys.readouterr()
    a, b = outs
    assert (a / "trials.csv").read_bytes() == (b / "trials.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()
    assert (a / "ecdf.csv").read_bytes() == (b / "ecdf.csv").read_bytes()
    lines = (a / "trials.csv").read_text().splitlines()
    assert lines[0] == "N,trial,H,T,hull_size,micros"
    assert len(lines) == 1 + 2 * 30
    summary = json.loads((a / "summary.json").read_text())
    assert summary["consistency"]["N"] == 80
    assert [row["N"] for row in summary["per_N"]] == [40, 80]


def test_tailprobe_cli(tmp_path, capsys):
    outs = []
    for sub in ("tail_a", "tail_b"):
        out_dir = tmp_path / sub
        argv = [
            "tailprobe", "--objective", "perimeter", "--n", "3", "--beta", "0",
            "--eps", "0.4,0.5", "--draws", "200000", "--seed", "9", "--out-dir", str(out_dir),
        ]
        assert dispatch(argv) == 0
        outs.append(out_dir)
    capsys.readouterr()
    a, b = outs
    assert (a / "tail.csv").read_bytes() == (b / "tail.csv").read_bytes()
    assert (a / "tail_summary.json").read_bytes() == (b / "tail_summary.json").read_bytes()
    lines = (a / "tail.csv").read_text().splitlines()
    assert lines[0] == "eps,draws,hits,p_hat,p_pred"
    assert len(lines) == 3
    summary = json.loads((a / "tail_summary.json").read_text())
    assert {"fitted_slope", "predicted_slope", "hits", "epsilon_grid"} <= set(summary)
    assert summary["predicted_slope"] == pytest.approx(4.0)


def test_threads_validation(capsys):
    code, _, err = _run(capsys, ["--threads", "0", "constants", "--objective", "perimeter",
                                 "--n", "3", "--beta", "0"])
    assert code == 1
    assert "threads" in err


def test_config_can_set_threads(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "threads": 2,
        "simulate": {"objective": "perimeter", "n": 3, "beta": 0.0,
                     "N_list": [30, 60], "trials": 10, "seed": 8,
                     "out_dir": str(tmp_path / "out")},
    }))
    assert dispatch(["--config", str(cfg), "simulate"]) == 0
    capsys.readouterr()
    assert (tmp_path / "out" / "trials.csv").exists()


def test_simulate_delta_flag_controls_consistency_cutoff(tmp_path, capsys):
    out_dir = tmp_path / "out"
    argv = [
        "simulate", "--objective", "perimeter", "--n", "3", "--beta", "0",
        "--N", "30,60", "--trials", "10", "--seed", "2", "--delta", "0.5",
        "--out-dir", str(out_dir),
    ]
    assert dispatch(argv) == 0
    capsys.readouterr()
    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["consistency"]["delta"] == pytest.approx(0.5)
