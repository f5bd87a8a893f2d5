import math

import pytest

from pistonwork import cli, states, work


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_work_subcommand(capsys):
    code, out, err = run_cli(capsys, "work", "--state", "coherent", "--nbar", "4",
                             "--n-particles", "inf")
    assert code == 0
    lines = dict(line.split(" ", 1) for line in out.strip().splitlines())
    ref = work.mean_work(states.coherent(4.0))
    assert lines["w_bar"] == f"{ref.w_bar:.12g}"
    assert lines["p_s"] == f"{ref.p_s:.12g}"
    assert lines["scope"] == "subensemble"


def test_work_whole_ensemble_scaling(capsys):
    _, sub, _ = run_cli(capsys, "work", "--alpha0", "1", "--epsilon", "1")
    _, whole, _ = run_cli(capsys, "work", "--alpha0", "1", "--epsilon", "1",
                          "--whole-ensemble", "true")
    sub_vals = dict(l.split(" ", 1) for l in sub.strip().splitlines())
    whole_vals = dict(l.split(" ", 1) for l in whole.strip().splitlines())
    assert whole_vals["scope"] == "whole-ensemble"
    scaled = float(sub_vals["w_bar"]) * float(sub_vals["p_s"])
    assert math.isclose(float(whole_vals["w_bar"]), scaled, rel_tol=1e-10)


def test_potential_subcommand(capsys):
    code, out, _ = run_cli(capsys, "potential", "--alpha", "1", "--x", "1")
    assert code == 0
    assert out.strip() == "v 1"


def test_equilibrium_subcommand(capsys):
    code, out, _ = run_cli(capsys, "equilibrium", "--alpha", "1",
                           "--n-particles", "500")
    assert code == 0
    vals = dict(l.split(" ", 1) for l in out.strip().splitlines())
    assert float(vals["mean"]) == pytest.approx(1.002)
    assert float(vals["snr"]) == pytest.approx(math.sqrt(501.0))
    # pointwise query adds a pdf line
    code, out, _ = run_cli(capsys, "equilibrium", "--alpha", "1",
                           "--n-particles", "1", "--x", "1")
    vals = dict(l.split(" ", 1) for l in out.strip().splitlines())
    assert float(vals["pdf"]) == pytest.approx(math.exp(-1.0))


def test_mixture_subcommand(capsys, tmp_path):
    grid = tmp_path / "grid.csv"
    code, out, _ = run_cli(capsys, "mixture", "--alpha0", "1", "--epsilon", "0.1",
                           "--n-particles", "500", "--grid-out", str(grid))
    assert code == 0
    vals = dict(l.split(" ", 1) for l in out.strip().splitlines())
    assert float(vals["mean"]) > 1.0
    assert vals["divergent"] == "false"
    body = grid.read_text().splitlines()
    data = [l for l in body if l and not l.startswith("#") and not l.startswith("x,")]
    assert len(data) == 2000


def test_langevin_subcommand(capsys):
    args = ("langevin", "--n-particles", "10", "--alpha", "1", "--samples", "400",
            "--ensemble", "8", "--burn-in", "50", "--thin", "2", "--seed", "3")
    code, out, _ = run_cli(capsys, *args)
    assert code == 0
    vals = dict(l.split(" ", 1) for l in out.strip().splitlines())
    assert int(vals["retained"]) == 400
    assert "ks_statistic" in vals
    # byte-identical reruns
    assert run_cli(capsys, *args)[1] == out


def test_langevin_dump(tmp_path, capsys):
    dump = tmp_path / "raw.csv"
    code, _, _ = run_cli(capsys, "langevin", "--n-particles", "5", "--alpha", "1",
                         "--samples", "60", "--ensemble", "3", "--burn-in", "10",
                         "--thin", "2", "--seed", "1", "--dump", str(dump))
    assert code == 0
    lines = dump.read_text().splitlines()
    assert lines[0].startswith("# pistonwork")
    assert lines[1] == "walker,step,x"
    assert len(lines) == 2 + 60
    first = lines[2].split(",")
    assert first[0] == "0" and int(first[1]) > 10


def test_sweep_subcommand(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run_cli(capsys, "sweep", "--target", "mean_work",
                         "--axis", "epsilon=0.5,1", "--fix", "alpha0=1",
                         "--fix", "n_particles=inf", "--out", str(out))
    assert code == 0
    data = [l for l in out.read_text().splitlines()
            if l and not l.startswith("#") and not l.startswith("epsilon,")]
    assert len(data) == 2


def test_sweep_range_axis(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, _ = run_cli(capsys, "sweep", "--target", "potential",
                         "--axis", "x=0.5:2.5:5", "--fix", "alpha=1",
                         "--out", str(out))
    assert code == 0
    data = [l for l in out.read_text().splitlines()
            if l and not l.startswith("#") and not l.startswith("x,")]
    assert len(data) == 5
    assert data[0].split(",")[0] == "0.5"
    assert data[-1].split(",")[0] == "2.5"


def test_figure_subcommand(tmp_path, capsys):
    out = tmp_path / "fig9.csv"
    code, _, _ = run_cli(capsys, "figure", "fig9", "--out", str(out),
                         "--plot", "false")
    assert code == 0
    body = out.read_text()
    data = [l for l in body.splitlines()
            if l and not l.startswith("#") and not l.startswith("state,")]
    assert len(data) == 63
    assert not (tmp_path / "fig9.png").exists()
    # determinism across invocations
    out2 = tmp_path / "again.csv"
    run_cli(capsys, "figure", "fig9", "--out", str(out2), "--plot", "false")
    assert out2.read_text() == body


def test_figure_renders_plot(tmp_path, capsys):
    out = tmp_path / "fig2.csv"
    code, _, _ = run_cli(capsys, "figure", "fig2", "--out", str(out))
    assert code == 0
    png = tmp_path / "fig2.png"
    assert png.exists()
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_config_file_flags_win(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha0 = 2\nepsilon = 0\n# comment line\n")
    code, out, _ = run_cli(capsys, "work", "--config", str(cfg))
    assert code == 0
    vals = dict(l.split(" ", 1) for l in out.strip().splitlines())
    assert math.isclose(float(vals["w_bar"]), -math.log(2.0), rel_tol=1e-12)
    # a flag overrides the file value
    code, out, _ = run_cli(capsys, "work", "--config", str(cfg), "--alpha0", "4")
    vals = dict(l.split(" ", 1) for l in out.strip().splitlines())
    assert math.isclose(float(vals["w_bar"]), -math.log(4.0), rel_tol=1e-12)


def test_exit_code_one_on_bad_input(capsys):
    assert run_cli(capsys, "work", "--frobnicate", "1")[0] == 1
    assert run_cli(capsys, "potential", "--alpha", "1")[0] == 1          # missing --x
    assert run_cli(capsys, "work", "--state", "laser", "--nbar", "1")[0] == 1
    assert run_cli(capsys, "work", "--alpha0", "one", "--epsilon", "1")[0] == 1
    assert run_cli(capsys, "nosuchcommand")[0] == 1
    assert run_cli(capsys)[0] == 1
    assert run_cli(capsys, "work", "--state", "squeezed", "--nbar", "1",
                   "--r", "2")[0] == 1


def test_exit_code_one_on_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("alpha0 = 1\nepsilon = 1\nbogus_key = 3\n")
    assert run_cli(capsys, "work", "--config", str(cfg))[0] == 1


def test_exit_code_two_on_numerical_failure(capsys):
    code, _, err = run_cli(capsys, "work", "--alpha0", "-5", "--epsilon", "0.01")
    assert code == 2
    assert err.strip() != ""


def test_help_mentions_units(capsys):
    assert cli.main(["work", "--help"]) == 0
    out = capsys.readouterr().out
    assert "dimensionless" in out
    for sub in ("potential", "equilibrium", "mixture", "sweep", "langevin", "figure"):
        assert cli.main([sub, "--help"]) == 0
        assert "dimensionless" in capsys.readouterr().out
    assert cli.main(["--help"]) == 0


def test_version_flag(capsys):
    from pistonwork import __version__
    assert cli.main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out
