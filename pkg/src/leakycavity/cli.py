"""Batch front-end: config parsing, subcommand dispatch, CSV emission.

Subcommands: rates, evolve, figures, sweep.  Configuration is a flat
text file of ``section.key = value`` lines ('#' starts a comment);
``--set section.key=value`` overrides individual entries.  Output is
CSV with a header row, 12 significant digits by default, written to
output.path ('-' means stdout).  Runs are fully deterministic: the same
config yields byte-identical output.

Exit codes: 0 success, 2 malformed config or usage, 3 numerical failure,
64 unknown subcommand.
"""

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from .analysis import asymptotic_rate_ratio, detect_plateau, figure_data
from .dynamics import (SystemParams, evolve_analytic, evolve_phenomenological,
                       evolve_tcl_ode)
from .numerics import OdeSolveError, QuadratureError, ToleranceSpec
from .spectral import LorentzianSpectrum, rate_closed_form, rate_quadrature_oracle

__all__ = ["RunConfig", "ConfigError", "main", "console_main"]


class ConfigError(ValueError):
    """Malformed configuration: unknown key, bad literal, broken invariant."""


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters; field names flatten the config sections."""

    omega0: float = 100.0
    Omega: float = 0.5
    alpha: float = 0.1
    lam: float = 1.0 / 3.0
    omega1: float = None  # defaults to omega0 - Omega when unset
    t_max: float = 100.0
    n_output: int = 2001
    solver_mode: str = "analytic"
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    kappa: float = None
    rates_mode: str = "closed-form"
    window_halfwidths: int = 200
    output_path: str = "-"
    precision: int = 12

    def __post_init__(self):
        for name in ("omega0", "Omega", "alpha", "lam", "t_max"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.omega1 is not None and not self.omega1 > 0.0:
            raise ConfigError(f"omega1 must be positive, got {self.omega1}")
        if self.n_output < 2:
            raise ConfigError(f"evolve.n_output must be >= 2, got {self.n_output}")
        if self.precision < 1:
            raise ConfigError(f"output.precision must be >= 1, got {self.precision}")
        if self.solver_mode not in ("analytic", "tcl-ode", "phenomenological"):
            raise ConfigError(f"unknown solver.mode {self.solver_mode!r}")
        if self.rates_mode not in ("closed-form", "quadrature"):
            raise ConfigError(f"unknown rates.mode {self.rates_mode!r}")
        if not self.rel_tol > 0.0 or self.abs_tol < 0.0:
            raise ConfigError("solver tolerances must have rel_tol > 0, abs_tol >= 0")
        if self.window_halfwidths < 10:
            raise ConfigError("rates.window_halfwidths must be >= 10")
        if self.solver_mode == "phenomenological":
            if self.kappa is None:
                raise ConfigError("solver.kappa is required when solver.mode = phenomenological")
            if self.kappa < 0.0:
                raise ConfigError(f"solver.kappa must be nonnegative, got {self.kappa}")
        elif self.kappa is not None:
            raise ConfigError("solver.kappa is only meaningful with solver.mode = phenomenological")

    def system(self):
        return SystemParams(omega0=self.omega0, Omega=self.Omega)

    def spectrum(self):
        omega1 = self.omega0 - self.Omega if self.omega1 is None else self.omega1
        return LorentzianSpectrum(alpha=self.alpha, lam=self.lam, omega1=omega1)

    def tolerance(self):
        return ToleranceSpec(rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                             max_steps=1_000_000)

    def grid(self):
        return np.linspace(0.0, self.t_max, self.n_output)


# config-file key -> (RunConfig field, parser)
_KEYMAP = {
    "system.omega0": ("omega0", float),
    "system.Omega": ("Omega", float),
    "reservoir.alpha": ("alpha", float),
    "reservoir.lambda": ("lam", float),
    "reservoir.omega1": ("omega1", float),
    "evolve.t_max": ("t_max", float),
    "evolve.n_output": ("n_output", int),
    "solver.mode": ("solver_mode", str),
    "solver.rel_tol": ("rel_tol", float),
    "solver.abs_tol": ("abs_tol", float),
    "solver.kappa": ("kappa", float),
    "rates.mode": ("rates_mode", str),
    "rates.window_halfwidths": ("window_halfwidths", int),
    "output.path": ("output_path", str),
    "output.precision": ("precision", int),
}


def _parse_pair(key, value):
    key = key.strip()
    if key not in _KEYMAP:
        raise ConfigError(f"unknown config key {key!r}")
    field, conv = _KEYMAP[key]
    try:
        return field, conv(value.strip())
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value.strip()!r}") from None


def _read_config_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'section.key = value'")
        key, value = line.split("=", 1)
        field, parsed = _parse_pair(key, value)
        updates[field] = parsed
    return updates


def load_config(config_path, set_pairs):
    updates = {} if config_path is None else _read_config_file(config_path)
    for item in set_pairs:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        field, parsed = _parse_pair(key, value)
        updates[field] = parsed
    return RunConfig(**updates)


def write_csv(columns, values, path, precision):
    fmt = f"%.{precision}g"
    lines = [",".join(columns)]
    for row in np.atleast_2d(np.asarray(values, dtype=float)):
        lines.append(",".join(fmt % v for v in row))
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _trajectory_table(traj):
    cols = ["t", "P_E0", "P_minus", "P_plus", "re_coh", "im_coh",
            "P_0g", "P_1g", "P_0e", "P_atom_g", "P_atom_e"]
    coh = traj.column("coh")
    data = np.column_stack(
        [traj.times,
         traj.column("P_E0"), traj.column("P_minus"), traj.column("P_plus"),
         coh.real, coh.imag,
         traj.column("P_0g"), traj.column("P_1g"), traj.column("P_0e"),
         traj.column("P_atom_g"), traj.column("P_atom_e")])
    return cols, data


def cmd_rates(args, cfg):
    sys_params = cfg.system()
    s = cfg.spectrum()
    ts = cfg.grid()
    cols = ["t", "gamma_minus", "gamma_plus"]
    data = [ts,
            rate_closed_form(s, sys_params.omega_minus, ts),
            rate_closed_form(s, sys_params.omega_plus, ts)]
    if cfg.rates_mode == "quadrature":
        cols += ["gamma_minus_oracle", "gamma_plus_oracle"]
        K = cfg.window_halfwidths
        data.append([rate_quadrature_oracle(s, sys_params.omega_minus, t, K) for t in ts])
        data.append([rate_quadrature_oracle(s, sys_params.omega_plus, t, K) for t in ts])
    write_csv(cols, np.column_stack(data), cfg.output_path, cfg.precision)
    return 0


def cmd_evolve(args, cfg):
    sys_params = cfg.system()
    ts = cfg.grid()
    if cfg.solver_mode == "analytic":
        traj = evolve_analytic(sys_params, cfg.spectrum(), ts)
    elif cfg.solver_mode == "tcl-ode":
        traj = evolve_tcl_ode(sys_params, cfg.spectrum(), ts,
                              rate_mode=cfg.rates_mode, tol=cfg.tolerance())
    else:
        traj = evolve_phenomenological(sys_params, cfg.kappa, ts,
                                       tol=cfg.tolerance())
    cols, data = _trajectory_table(traj)
    write_csv(cols, data, cfg.output_path, cfg.precision)
    return 0


def cmd_figures(args, cfg):
    table = figure_data(args.id, args.case, t_max=args.t_max,
                        n_points=args.n_points)
    write_csv(table.columns, table.values, cfg.output_path, cfg.precision)
    return 0


def cmd_sweep(args, cfg):
    if not args.lo > 0.0 or args.hi < args.lo or args.steps < 1:
        raise ConfigError("sweep needs 0 < --from <= --to and --steps >= 1")
    sys_params = cfg.system()
    ts = cfg.grid()
    period = np.pi / sys_params.Omega
    rows = []
    for lam in np.linspace(args.lo, args.hi, args.steps):
        s = LorentzianSpectrum(alpha=cfg.alpha, lam=float(lam),
                               omega1=sys_params.omega_minus)
        ratio = asymptotic_rate_ratio(s, sys_params)
        traj = evolve_analytic(sys_params, s, ts)
        report = detect_plateau(ts, traj.column("P_atom_e"), osc_period=period)
        rows.append([lam, ratio, report.trapped_value,
                     report.plateau_start, report.plateau_end])
    write_csv(["lambda", "rate_ratio", "trapped_value",
               "plateau_start", "plateau_end"],
              np.asarray(rows), cfg.output_path, cfg.precision)
    return 0


_COMMANDS = {
    "rates": cmd_rates,
    "evolve": cmd_evolve,
    "figures": cmd_figures,
    "sweep": cmd_sweep,
}

_USAGE = """\
usage: leakycavity <subcommand> [options]

subcommands:
  rates    tabulate the two dressed-channel decay rates on a time grid
  evolve   propagate the master equation and tabulate populations
  figures  emit one of the reference tables (--id 1|2|3 --case a|b)
  sweep    scan the spectral width and report trapping per point

common options: --config FILE, --set section.key=value (repeatable)
"""


def _build_parser(cmd):
    parser = argparse.ArgumentParser(prog=f"leakycavity {cmd}")
    parser.add_argument("--config", required=cmd != "figures",
                        help="path to a 'section.key = value' config file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config entry")
    if cmd == "figures":
        parser.add_argument("--id", type=int, choices=(1, 2, 3), required=True)
        parser.add_argument("--case", choices=("a", "b"), required=True)
        parser.add_argument("--t-max", type=float, default=None, dest="t_max")
        parser.add_argument("--n-points", type=int, default=None, dest="n_points")
    if cmd == "sweep":
        parser.add_argument("--param", choices=("lambda",), required=True)
        parser.add_argument("--from", type=float, required=True, dest="lo")
        parser.add_argument("--to", type=float, required=True, dest="hi")
        parser.add_argument("--steps", type=int, required=True)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        stream = sys.stderr if not argv else sys.stdout
        stream.write(_USAGE)
        return 2 if not argv else 0
    cmd, rest = argv[0], argv[1:]
    if cmd not in _COMMANDS:
        sys.stderr.write(f"error: usage: unknown subcommand {cmd!r}, "
                         "expected rates, evolve, figures or sweep\n")
        return 64
    try:
        args = _build_parser(cmd).parse_args(rest)
    except SystemExit as exc:  # argparse prints usage itself
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config, args.set)
        return _COMMANDS[cmd](args, cfg)
    except (QuadratureError, OdeSolveError) as exc:
        sys.stderr.write(f"error: numerical: {exc}\n")
        return 3
    except (ConfigError, ValueError) as exc:
        sys.stderr.write(f"error: config: {exc}\n")
        return 2


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
