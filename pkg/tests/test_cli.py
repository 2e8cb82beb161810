"""Config parsing, subcommand output, and exit-code contract of the CLI."""

import numpy as np
import pytest

from leakycavity import cli
from leakycavity.cli import ConfigError, RunConfig, load_config
from leakycavity.numerics import OdeSolveError


def run_cli(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return header, rows


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


CASE_B = """\
# canonical narrow-reservoir configuration, units 2*Omega = 1
system.omega0 = 100.0
system.Omega = 0.5
reservoir.alpha = 0.1
reservoir.lambda = 0.1005037815259212   # 2*Omega/sqrt(99)
evolve.t_max = 300.0
evolve.n_output = 601
solver.mode = analytic
"""


# ---------------------------------------------------------------- config


def test_defaults_and_omega1_fallback():
    cfg = load_config(None, [])
    assert cfg.omega0 == 100.0 and cfg.Omega == 0.5
    assert cfg.omega1 is None
    assert cfg.spectrum().omega1 == pytest.approx(99.5, abs=0.0)
    assert cfg.output_path == "-" and cfg.precision == 12


def test_config_file_with_comments(tmp_path):
    path = write_config(tmp_path, CASE_B)
    cfg = load_config(path, [])
    assert cfg.lam == pytest.approx(0.1005037815259212, rel=1e-15)
    assert cfg.t_max == 300.0 and cfg.n_output == 601
    assert cfg.solver_mode == "analytic"


def test_set_overrides_config_file(tmp_path):
    path = write_config(tmp_path, CASE_B)
    cfg = load_config(path, ["evolve.t_max=10", "reservoir.alpha=0.2"])
    assert cfg.t_max == 10.0 and cfg.alpha == 0.2
    assert cfg.n_output == 601  # untouched keys survive


def test_config_rejections(tmp_path):
    with pytest.raises(ConfigError, match="unknown config key"):
        load_config(None, ["reservoir.width=1.0"])
    with pytest.raises(ConfigError, match="bad value"):
        load_config(None, ["reservoir.alpha=wide"])
    with pytest.raises(ConfigError, match="key=value"):
        load_config(None, ["reservoir.alpha"])
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "missing.cfg"), [])
    path = write_config(tmp_path, "system.omega0\n")
    with pytest.raises(ConfigError, match="expected 'section.key = value'"):
        load_config(path, [])


def test_kappa_tied_to_phenomenological_mode():
    cfg = load_config(None, ["solver.mode=phenomenological", "solver.kappa=0.1"])
    assert cfg.kappa == 0.1
    with pytest.raises(ConfigError, match="kappa is required"):
        load_config(None, ["solver.mode=phenomenological"])
    with pytest.raises(ConfigError, match="only meaningful"):
        load_config(None, ["solver.kappa=0.1"])


def test_invariant_rejections():
    with pytest.raises(ConfigError, match="positive"):
        RunConfig(omega0=-1.0)
    with pytest.raises(ConfigError, match="n_output"):
        RunConfig(n_output=1)
    with pytest.raises(ConfigError, match="solver.mode"):
        RunConfig(solver_mode="magic")
    with pytest.raises(ConfigError, match="rates.mode"):
        RunConfig(rates_mode="exact")


# ---------------------------------------------------------------- evolve


def test_evolve_case_b_final_ground_population(tmp_path, capsys):
    path = write_config(tmp_path, CASE_B)
    code, out, err = run_cli(["evolve", "--config", path], capsys)
    assert code == 0 and err == ""
    header, rows = parse_csv(out)
    assert header == ["t", "P_E0", "P_minus", "P_plus", "re_coh", "im_coh",
                      "P_0g", "P_1g", "P_0e", "P_atom_g", "P_atom_e"]
    assert rows.shape == (601, 11)
    final = dict(zip(header, rows[-1]))
    assert final["t"] == 300.0
    assert 0.45 <= final["P_0g"] <= 0.58
    # trace is 1 in both bases and the bare columns match their aliases
    dressed = rows[:, 1] + rows[:, 2] + rows[:, 3]
    bare = rows[:, 6] + rows[:, 7] + rows[:, 8]
    assert np.max(np.abs(dressed - 1.0)) < 1e-9
    assert np.max(np.abs(bare - 1.0)) < 1e-9
    assert np.array_equal(rows[:, 8], rows[:, 10])  # P_0e is P_atom_e


# ---------------------------------------------------------------- rates


def test_rates_quadrature_emits_oracle_columns(tmp_path, capsys):
    path = write_config(tmp_path, CASE_B)
    code, out, err = run_cli(
        ["rates", "--config", path, "--set", "rates.mode=quadrature",
         "--set", "evolve.t_max=2.0", "--set", "evolve.n_output=5"], capsys)
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["t", "gamma_minus", "gamma_plus",
                      "gamma_minus_oracle", "gamma_plus_oracle"]
    assert rows.shape == (5, 5)
    assert np.all(rows[0] == 0.0)  # every rate is exactly zero at t = 0
    alpha = 0.1
    assert np.max(np.abs(rows[1:, 3] - rows[1:, 1])) < 1e-6 * alpha
    assert np.max(np.abs(rows[1:, 4] - rows[1:, 2])) < 1e-6 * alpha


def test_rates_closed_form_only_columns(tmp_path, capsys):
    path = write_config(tmp_path, CASE_B)
    code, out, _ = run_cli(
        ["rates", "--config", path, "--set", "evolve.t_max=5.0",
         "--set", "evolve.n_output=11"], capsys)
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["t", "gamma_minus", "gamma_plus"]
    assert rows.shape == (11, 3)


# ---------------------------------------------------------------- figures


def test_figures_rates_start_at_zero(capsys):
    code, out, err = run_cli(["figures", "--id", "1", "--case", "a"], capsys)
    assert code == 0 and err == ""
    header, rows = parse_csv(out)
    assert header == ["t", "gamma_minus", "gamma_plus"]
    assert rows[0, 0] == 0.0 and rows[0, 1] == 0.0 and rows[0, 2] == 0.0


def test_figures_size_overrides(capsys):
    code, out, _ = run_cli(
        ["figures", "--id", "1", "--case", "a",
         "--t-max", "2.0", "--n-points", "5"], capsys)
    assert code == 0
    _, rows = parse_csv(out)
    assert rows.shape == (5, 3)
    assert rows[-1, 0] == 2.0


def test_figures_deterministic_output_files(tmp_path, capsys):
    paths = [str(tmp_path / name) for name in ("one.csv", "two.csv")]
    for out_path in paths:
        code, _, _ = run_cli(
            ["figures", "--id", "2", "--case", "b",
             "--set", f"output.path={out_path}"], capsys)
        assert code == 0
    first, second = (open(p, "rb").read() for p in paths)
    assert first == second
    assert first.startswith(b"t,P_0g\n")


# ---------------------------------------------------------------- sweep


def test_sweep_lambda_table(tmp_path, capsys):
    path = write_config(tmp_path, CASE_B)
    code, out, err = run_cli(
        ["sweep", "--config", path, "--param", "lambda",
         "--from", "0.2", "--to", "1.0", "--steps", "3",
         "--set", "evolve.t_max=100.0", "--set", "evolve.n_output=1001"],
        capsys)
    assert code == 0 and err == ""
    header, rows = parse_csv(out)
    assert header == ["lambda", "rate_ratio", "trapped_value",
                      "plateau_start", "plateau_end"]
    assert rows.shape == (3, 5)
    lams = rows[:, 0]
    assert np.all(np.diff(lams) > 0) and lams[0] == 0.2 and lams[-1] == 1.0
    # stationary ratio lam^2 / (4 Omega^2 + lam^2) with 2 Omega = 1
    expected = lams**2 / (1.0 + lams**2)
    assert np.max(np.abs(rows[:, 1] - expected)) < 1e-12


def test_sweep_bad_range_is_config_error(tmp_path, capsys):
    path = write_config(tmp_path, CASE_B)
    code, _, err = run_cli(
        ["sweep", "--config", path, "--param", "lambda",
         "--from", "0.5", "--to", "0.1", "--steps", "3"], capsys)
    assert code == 2
    assert err.startswith("error: config:") and err.count("\n") == 1


# ---------------------------------------------------------------- exit codes


def test_no_arguments_prints_usage(capsys):
    code, out, err = run_cli([], capsys)
    assert code == 2 and out == ""
    assert "usage" in err and "subcommands" in err


def test_help_exits_zero(capsys):
    code, out, _ = run_cli(["-h"], capsys)
    assert code == 0
    assert "usage" in out


def test_unknown_subcommand_exit_64(capsys):
    code, _, err = run_cli(["render", "--config", "x.cfg"], capsys)
    assert code == 64
    assert "unknown subcommand" in err


def test_missing_config_flag_exit_2(capsys):
    code, _, err = run_cli(["evolve"], capsys)
    assert code == 2
    assert "usage" in err


def test_malformed_config_exit_2(tmp_path, capsys):
    path = write_config(tmp_path, "reservoir.alpha = -3\n")
    code, _, err = run_cli(["evolve", "--config", path], capsys)
    assert code == 2
    assert err.startswith("error: config:") and err.count("\n") == 1


def test_numerical_failure_exit_3(tmp_path, capsys, monkeypatch):
    def explode(*args, **kwargs):
        raise OdeSolveError("step size underflow", last_t=0.5)

    monkeypatch.setattr(cli, "evolve_tcl_ode", explode)
    path = write_config(tmp_path, CASE_B)
    code, _, err = run_cli(
        ["evolve", "--config", path, "--set", "solver.mode=tcl-ode"], capsys)
    assert code == 3
    assert err.startswith("error: numerical:") and err.count("\n") == 1
