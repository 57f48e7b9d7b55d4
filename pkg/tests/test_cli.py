import csv
import io
import json
import os
import subprocess
import sys

import pytest

from alphacev.cli import (
    CSV_HEADER,
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_VALIDATION,
    emit_plot_data,
    main,
    parse_config,
    read_plot_data,
)
from alphacev.convergence import RateReport, StrongErrorReport, reference_lines


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_header_is_exact(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["strong-error", "--n", "8", "--samples", "200", "--out", str(out)]) == EXIT_OK
    table = rows(out)
    assert ",".join(table[0]) == "scheme,alpha,gamma,a,k,sigma1,sigma2,x0,T,n,samples,seed,metric,value,stderr"
    assert tuple(table[0]) == CSV_HEADER
    assert table[1][12] == "s_n" and float(table[1][13]) > 0


def test_simulate_noise_free_matches_recursion(tmp_path):
    out = tmp_path / "path.csv"
    assert main(["simulate", "--sigma1", "0", "--sigma2", "0", "--n", "16", "--out", str(out)]) == EXIT_OK
    table = rows(out)
    assert table[0] == ["step", "t", "x"] and len(table) == 18
    x, dt = 1.0, 1 / 16
    for i, (step, t, value) in enumerate(table[1:]):
        assert int(step) == i and float(t) == i * dt
        assert float(value) == pytest.approx(x, rel=1e-14)
        x = (x + 1.05 * dt) / (1 + 2.0 * dt)


def test_validation_failure_exit_code(tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert main(["simulate", "--gamma", "0.9", "--out", str(out)]) == EXIT_VALIDATION
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["ok"] is False and any("2*gamma" in v for v in err["violations"])
    assert not out.exists()
    assert main(["diagnostics", "--a", "0.01", "--sigma1", "1"]) == EXIT_VALIDATION
    assert main(["simulate", "--x0", "-1"]) == EXIT_VALIDATION


def test_runtime_failure_exit_code(tmp_path):
    bad = tmp_path / "missing" / "dir" / "out.csv"
    assert main(["simulate", "--n", "4", "--out", str(bad)]) == EXIT_RUNTIME
    assert main(["strong-error", "--n", "8", "--samples", "10"]) == EXIT_RUNTIME


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# sweep\nalpha = 1.7\nsigma1 = 0.2  # diffusion\nalphas = 1.3,1.6\nscheme = drift-implicit\nn0 = 16\n")
    config = parse_config(["rate-sweep", "--config", str(cfg), "--sigma1", "0.3"])
    assert config.alpha == 1.7 and config.sigma1 == 0.3
    assert config.alphas == (1.3, 1.6) and config.n0 == 16 and config.scheme == "drift_implicit"
    cfg.write_text("bogus = 1\n")
    with pytest.raises(ValueError):
        parse_config(["simulate", "--config", str(cfg)])


def test_rate_sweep_rows_and_plot(tmp_path):
    out, plot = tmp_path / "r.csv", tmp_path / "r.txt"
    argv = ["rate-sweep", "--alphas", "1.3,1.7", "--n0", "8", "--samples", "300", "--out", str(out),
            "--plot", str(plot)]
    assert main(argv) == EXIT_OK
    table = rows(out)[1:]
    rate_rows = [r for r in table if r[12] == "rate"]
    assert [float(r[1]) for r in rate_rows] == [1.3, 1.7]
    for alpha in ("1.3", "1.7"):
        metrics = {r[12]: float(r[13]) for r in table if r[1] == alpha}
        assert metrics["ref_half"] == 0.5
        assert metrics["ref_inv2alpha"] == 1 / (2 * float(alpha))
        assert metrics["ref_alpha_quarter"] == float(alpha) / 4
    parsed = read_plot_data(plot)
    assert [r[0] for r in parsed] == ["rate", "ref_half", "ref_inv2alpha", "ref_alpha_quarter"] * 2


def test_rate_sweep_skips_and_refuses(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["rate-sweep", "--gamma", "0.6", "--alphas", "1.1,1.5", "--n0", "8", "--samples", "200",
                 "--out", str(out)]) == EXIT_OK
    assert "skipped_alpha" in capsys.readouterr().err
    assert {r[1] for r in rows(out)[1:]} == {"1.5"}
    assert main(["rate-sweep", "--gamma", "0.6", "--alphas", "1.1", "--n0", "8", "--out", str(out)]) == EXIT_VALIDATION


def test_diagnostics_metrics(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["diagnostics", "--n", "16", "--samples", "10000", "--out", str(out)]) == EXIT_OK
    metrics = [r[12] for r in rows(out)[1:]]
    assert metrics == ["dneg_freq", "dneg_bound", "moment", "inv_moment"]


def test_plot_data_cardinality_and_round_trip():
    rep = RateReport("implicit", 1.4, 0.4123456789012345, 0.0123, "log10-difference", ((64, 0.01), (640, 0.004)),
                     reference_lines=reference_lines(1.4))
    text = emit_plot_data([rep])
    parsed = read_plot_data(text)
    assert len(parsed) == 4
    assert parsed[0] == ("rate", 1.4, 0.4123456789012345, 0.0123)
    assert parsed[2][2] == 1 / 2.8
    errs = [StrongErrorReport("implicit", n, 100, 0.1 / n**0.5 + 1e-17, 1e-3 / n) for n in (8, 16, 32)]
    back = read_plot_data(emit_plot_data(errs))
    assert [(x, y, se) for _, x, y, se in back] == [(e.n, e.s_n, e.stderr) for e in errs]


def test_plot_data_rejects_empty():
    with pytest.raises(ValueError):
        emit_plot_data([])


def test_figure1_plot_file(tmp_path):
    plot = tmp_path / "fig1.txt"
    argv = ["rate-sweep", "--sigma1", "1", "--sigma2", "0", "--alphas", "1.2,1.6", "--n0", "8",
            "--samples", "200", "--out", str(tmp_path / "f.csv"), "--plot", str(plot)]
    assert main(argv) == EXIT_OK
    series = {(s, x): y for s, x, y, _ in read_plot_data(plot)}
    assert series[("ref_half", 1.2)] == 0.5 and series[("ref_inv2alpha", 1.6)] == 1 / 3.2


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["strong-error", "--n", "8", "--samples", "5000", "--seed", "9"]
    assert main(base + ["--workers", "1", "--out", str(a)]) == EXIT_OK
    assert main(base + ["--workers", "3", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point(tmp_path):
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "alphacev", "simulate", "--n", "4"], capture_output=True,
                          text=True, env=env)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "step,t,x"
