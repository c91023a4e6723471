import math
import shutil
import subprocess

import numpy as np
import pytest

from grouse import csvio
from grouse.cli import main
from grouse.completion import low_rank_problem
from grouse.experiments import OUTPUT_ENV
from grouse.linalg import subspace_error


def write_cfg(path, **values):
    path.write_text("".join(f"{k} = {v}\n" for k, v in values.items()), encoding="utf-8")
    return path


@pytest.fixture
def static_cfg(tmp_path):
    return write_cfg(
        tmp_path / "static.cfg", experiment="static", n=60, d=3, density=0.4,
        step_c=50.0, horizon=600, report_every=50, dump_bases_at="100,300,600",
    )


def test_run_static_writes_consistent_telemetry(tmp_path, static_cfg, capsys):
    out = tmp_path / "out"
    assert main(["run", str(static_cfg), "--out", str(out)]) == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("static: steps=600 final_error=")
    rows = csvio.read_telemetry(out / "telemetry.csv")
    assert [r.t for r in rows] == list(range(50, 601, 50))
    by_t = {r.t: r for r in rows}
    for t in (100, 300, 600):
        U = csvio.read_matrix(out / f"basis_{t}.csv")
        W = csvio.read_matrix(out / f"truth_{t}.csv")
        assert subspace_error(U, W) == by_t[t].subspace_error
    assert rows[-1].subspace_error < 1e-6
    assert (out / "config.cfg").is_file()


def test_seed_flag_changes_run(tmp_path, static_cfg):
    main(["run", str(static_cfg), "--out", str(tmp_path / "a")])
    main(["run", str(static_cfg), "--out", str(tmp_path / "b")])
    main(["run", str(static_cfg), "--out", str(tmp_path / "c"), "--seed", "5"])
    a, b, c = (csvio.read_telemetry(tmp_path / x / "telemetry.csv") for x in "abc")
    assert [r.residual_signal for r in a] == [r.residual_signal for r in b]
    assert [r.residual_signal for r in a] != [r.residual_signal for r in c]


def test_output_env_redirect(tmp_path, static_cfg, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "redirected"))
    assert main(["run", str(static_cfg), "--set", "horizon=10"]) == 0
    assert (tmp_path / "redirected" / "telemetry.csv").is_file()


def test_malformed_config_is_usage_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "bad.cfg", experiment="static", step_c="fast")
    assert main(["run", str(cfg)]) == 2
    assert "step_c" in capsys.readouterr().err


def test_unknown_override_is_usage_error(tmp_path, static_cfg, capsys):
    assert main(["run", str(static_cfg), "--set", "colour=blue"]) == 2
    assert "colour" in capsys.readouterr().err


def test_missing_config_is_io_error(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.cfg")]) == 1
    assert "I/O error" in capsys.readouterr().err


def test_missing_stream_input_is_usage_error_naming_field(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "c.cfg", experiment="stream_csv", input_path=tmp_path / "x.csv")
    assert main(["run", str(cfg)]) == 2
    assert "input_path" in capsys.readouterr().err


def test_unparseable_stream_input_is_io_error(tmp_path, capsys):
    data = tmp_path / "bad.csv"
    data.write_text("a,b,c\n1,2,3\n1,2\n", encoding="utf-8")
    cfg = write_cfg(tmp_path / "c.cfg", experiment="stream_csv", input_path=data, d=1)
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert ":3:" in capsys.readouterr().err


def test_stream_csv_run_on_standin(tmp_path, capsys):
    rng = np.random.default_rng(0)
    T, n = 400, 30
    data = rng.standard_normal((T, 3)) @ rng.standard_normal((3, n)) + 0.01 * rng.standard_normal((T, n))
    path = tmp_path / "standin.csv"
    csvio.write_stream_csv(path, data)
    cfg = write_cfg(
        tmp_path / "c.cfg", experiment="stream_csv", input_path=path, d=3,
        density=0.5, schedule="constant", step_c=0.1, report_every=20,
    )
    out = tmp_path / "o"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    line = capsys.readouterr().out
    assert "reconstruction_error=" in line and "svd_baseline_error=" in line
    preds = csvio.read_stream_matrix(out / "predictions.csv")
    assert preds.shape == (T, n)
    rows = csvio.read_telemetry(out / "telemetry.csv")
    assert all(math.isnan(r.subspace_error) for r in rows)


def test_complete_command(tmp_path, capsys):
    problem, truth = low_rank_problem(40, 30, 2, 0.6, seed=1)
    entries = tmp_path / "e.csv"
    csvio.write_entries_csv(entries, problem.rows, problem.cols, problem.values)
    out = tmp_path / "o"
    assert main(["complete", str(entries), "--rank", "2", "--rows", "40", "--cols", "30",
                 "--passes", "20", "--step", "3", "--out", str(out)]) == 0
    assert "complete: 40x30 rank=2" in capsys.readouterr().out
    X = csvio.read_matrix(out / "reconstruction.csv")
    assert np.linalg.norm(X - truth) / np.linalg.norm(truth) < 1e-4
    U = csvio.read_matrix(out / "basis.csv")
    A = csvio.read_matrix(out / "coefficients.csv")
    np.testing.assert_allclose(U @ A, X, atol=1e-12)
    header, hist = csvio.read_table(out / "fit_history.csv")
    assert header == ["pass", "observed_rms"] and hist.shape == (20, 2)


def test_complete_bad_rank(tmp_path, capsys):
    entries = tmp_path / "e.csv"
    csvio.write_entries_csv(entries, [0, 1], [0, 1], [1.0, 2.0])
    assert main(["complete", str(entries), "--rank", "5"]) == 2


def test_bench_command(tmp_path, capsys):
    out = tmp_path / "b"
    assert main(["bench", "--n", "100", "200", "400", "--steps", "1000", "--warmup", "50",
                 "--out", str(out)]) == 0
    header, data = csvio.read_table(out / "bench.csv")
    assert header == ["n", "d", "n_observed", "median_ns", "steps"]
    np.testing.assert_array_equal(data[:, 0], [100, 200, 400])
    assert np.all(data[:, 3] > 0)


def test_completion_experiment_run(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path / "c.cfg", experiment="completion", n=50, n_cols=40, d=2,
        density=0.5, sampling="bernoulli", step_c=0.3, passes=4, save_matrices="true",
    )
    out = tmp_path / "o"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    header, data = csvio.read_table(out / "completion_passes.csv")
    assert header == ["pass", "presentations", "observed_rms", "relative_error"]
    assert data.shape == (4, 4)
    assert csvio.read_matrix(out / "reconstruction.csv").shape == (50, 40)


@pytest.mark.skipif(shutil.which("grouse") is None, reason="console script not installed")
def test_console_script(tmp_path, static_cfg):
    proc = subprocess.run(
        ["grouse", "run", str(static_cfg), "--set", "horizon=20", "--out", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.startswith("static: steps=20")
