"""Command-line front end.

Subcommands: potential, equilibrium, mixture, work, sweep, langevin, figure.
Scalar results go to stdout as `name value` lines with 12 significant
digits; datasets go to the file given by --out; diagnostics go to stderr.
Exit codes: 0 success, 1 invalid input, 2 numerical failure (no stable
ensemble / quadrature breakdown).

Any subcommand accepts --config FILE with `key = value` lines mirroring its
flags; explicit flags win over the config file.
"""

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import equilibrium, langevin, states, sweep, work
from .errors import (
    IntegrationFailureError,
    InvalidParameterError,
    NoStableEnsembleError,
)
from .version import VERSION

UNITS_NOTE = (
    "Units: everything is dimensionless. The piston position x is measured\n"
    "in L = N*kBT/F0, energies and work in N*kBT (so reported w is the\n"
    "normalized work), and the potential slope is alpha = 1 + kappa*XM/F0.\n"
    "Pass --n-particles inf for the thermodynamic limit."
)

_REQUIRED = object()


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant whose errors raise instead of exiting with code 2."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved invocation: subcommand plus flat parameter map."""

    subcommand: str
    parameters: dict
    seed: int = 0
    output: str | None = None


def _as_float(text):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"expected a number, got {text!r}") from None


def _as_int(text):
    try:
        return int(str(text), 10)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"expected an integer, got {text!r}") from None


def _as_positive_int(text):
    value = _as_int(text)
    if value < 1:
        raise InvalidParameterError(f"expected a positive integer, got {value}")
    return value


def _as_n_particles(text):
    if str(text).lower() in ("inf", "infinity", "none"):
        return None
    return _as_positive_int(text)


def _as_state(text):
    kind = str(text).lower()
    kind = states._KIND_ALIASES.get(kind, kind)
    if kind not in states.PRESET_KINDS:
        raise InvalidParameterError(
            f"unknown state '{text}'; choose from {', '.join(states.PRESET_KINDS)}"
        )
    return kind


def _as_bool(text):
    if isinstance(text, bool):
        return text
    lowered = str(text).lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise InvalidParameterError(f"expected a boolean, got {text!r}")


def _as_str(text):
    return str(text)


# Option tables: dest -> (converter, default, help).  _REQUIRED marks
# parameters that must come from a flag or the config file.
_DIST_OPTS = {
    "state": (_as_state, None, "named radiation state (coherent, thermal, "
              "squeezed, fock, phase-randomized)"),
    "nbar": (_as_float, None, "mean photon number for coherent/thermal/"
             "squeezed/phase-randomized"),
    "n": (_as_int, None, "occupation for the fock state"),
    "r": (_as_float, None, "squeezing parameter"),
    "tau": (_as_float, None, "phase jitter std for phase-randomized"),
    "alpha0": (_as_float, None, "mean slope of a raw Gaussian slope law"),
    "epsilon": (_as_float, None, "slope std of a raw Gaussian slope law "
                "(0 = point mass)"),
}

_SUBCOMMANDS = {}


def _register(name, options, needs_seed=False):
    def wrap(fn):
        _SUBCOMMANDS[name] = (options, fn, needs_seed)
        return fn

    return wrap


def _build_dist(p):
    if p.get("state") is not None:
        if p.get("alpha0") is not None or p.get("epsilon") is not None:
            raise InvalidParameterError(
                "give either --state or --alpha0/--epsilon, not both"
            )
        preset = states.StatePreset(
            kind=p["state"], nbar=p.get("nbar"), n=p.get("n"), r=p.get("r"),
            tau=p.get("tau"),
        )
        return states.from_preset(preset)
    if p.get("alpha0") is None or p.get("epsilon") is None:
        raise InvalidParameterError(
            "describe the slope law with --state ... or --alpha0 and --epsilon"
        )
    return states.Gaussian(p["alpha0"], p["epsilon"])


def _emit(name, value):
    if value is None:
        print(f"{name} inf")
    elif isinstance(value, bool):
        print(f"{name} {'true' if value else 'false'}")
    elif isinstance(value, float):
        print(f"{name} {value:.12g}")
    else:
        print(f"{name} {value}")


@_register(
    "potential",
    {
        "alpha": (_as_float, _REQUIRED, "potential slope (any sign)"),
        "x": (_as_float, _REQUIRED, "piston position, > 0"),
    },
)
def _cmd_potential(rc):
    _emit("v", equilibrium.potential(rc.parameters["x"], rc.parameters["alpha"]))
    return 0


@_register(
    "equilibrium",
    {
        "alpha": (_as_float, _REQUIRED, "potential slope, > 0"),
        "n_particles": (_as_positive_int, _REQUIRED, "gas particle count"),
        "x": (_as_float, None, "also report the stationary density at x"),
    },
)
def _cmd_equilibrium(rc):
    p = rc.parameters
    eq = equilibrium.GammaEquilibrium(p["n_particles"], p["alpha"])
    mean, variance, snr = equilibrium.gamma_moments(eq)
    _emit("mean", mean)
    _emit("variance", variance)
    _emit("snr", snr)
    if p["x"] is not None:
        _emit("pdf", equilibrium.gamma_pdf(p["x"], eq))
    return 0


@_register(
    "mixture",
    {
        **_DIST_OPTS,
        "n_particles": (_as_positive_int, _REQUIRED, "gas particle count"),
        "x": (_as_float, None, "also report the mixture density at x"),
        "grid_out": (_as_str, None, "write the plotting grid (x, density) "
                     "to this CSV path"),
    },
)
def _cmd_mixture(rc):
    p = rc.parameters
    dist = _build_dist(p)
    mm = equilibrium.mixture_moments(dist, p["n_particles"])
    _emit("p_s", work.success_probability(dist))
    _emit("mean", mm.mean)
    _emit("std", mm.std)
    _emit("snr", mm.snr)
    _emit("divergent", mm.divergent)
    _emit("sensitivity", mm.sensitivity)
    if p["x"] is not None:
        _emit("pdf", equilibrium.mixture_pdf(dist, p["n_particles"], p["x"]))
    if p["grid_out"] is not None:
        grid = equilibrium.mixture_density(dist, p["n_particles"])
        with open(p["grid_out"], "w", encoding="utf-8") as handle:
            handle.write(f"# pistonwork {VERSION}\n")
            handle.write(f"# p_s={grid.p_s:.12g}\n")
            handle.write("x,density\n")
            for x, rho in zip(grid.x, grid.density):
                handle.write(f"{x:.12g},{rho:.12g}\n")
        print(f"wrote {p['grid_out']}", file=sys.stderr)
    return 0


@_register(
    "work",
    {
        **_DIST_OPTS,
        "n_particles": (_as_n_particles, None,
                        "gas particle count, or inf (default inf)"),
        "mc_samples": (_as_positive_int, None,
                       "use Monte Carlo with this many samples instead of "
                       "quadrature"),
        "seed": (_as_int, 0, "random seed for the Monte Carlo route"),
        "tol": (_as_float, 1e-12, "quadrature tolerance"),
        "whole_ensemble": (_as_bool, False,
                           "report the whole-ensemble work w_bar * p_s "
                           "instead of the success-conditioned value"),
    },
    needs_seed=True,
)
def _cmd_work(rc):
    p = rc.parameters
    dist = _build_dist(p)
    n = p["n_particles"]
    if p["mc_samples"] is not None:
        result = work.mean_work_mc(dist, n, samples=p["mc_samples"], seed=p["seed"])
    else:
        result = work.mean_work(dist, n, tol=p["tol"])
    w_bar = result.w_bar
    scale = 1.0
    if p["whole_ensemble"]:
        scale = result.p_s
        w_bar = result.w_bar * scale
    _emit("w_bar", w_bar)
    _emit("p_s", result.p_s)
    _emit("n_correction", result.n_correction)
    if result.quad_error is not None:
        _emit("quad_error", result.quad_error * scale)
    if result.mc_stderr is not None:
        _emit("mc_stderr", result.mc_stderr * scale)
        _emit("mc_trials", result.mc_trials)
    _emit("scope", "whole-ensemble" if p["whole_ensemble"] else "subensemble")
    return 0


@_register(
    "langevin",
    {
        "n_particles": (_as_positive_int, _REQUIRED, "gas particle count"),
        "alpha": (_as_float, _REQUIRED, "potential slope, > 0"),
        "samples": (_as_positive_int, 100_000,
                    "total retained samples across the ensemble"),
        "seed": (_as_int, 0, "random seed"),
        "dt": (_as_float, None, "time step (default 0.05/(alpha*N))"),
        "ensemble": (_as_positive_int, None, "number of independent walkers"),
        "burn_in": (_as_int, None, "discarded steps per walker"),
        "thin": (_as_positive_int, None, "steps between retained samples"),
        "x0": (_as_float, None, "initial position (default 1/alpha)"),
        "dump": (_as_str, None, "write retained samples (walker, step, x) "
                 "to this CSV path"),
    },
    needs_seed=True,
)
def _cmd_langevin(rc):
    p = rc.parameters
    config = langevin.plan_run(
        p["n_particles"], p["alpha"], p["samples"], p["seed"], dt=p["dt"],
        ensemble=p["ensemble"], burn_in=p["burn_in"], thin=p["thin"], x0=p["x0"],
    )
    want_dump = p["dump"] is not None
    result = langevin.run(config, return_samples=want_dump)
    summary, samples = result if want_dump else (result, None)
    _emit("mean", summary.mean)
    _emit("variance", summary.variance)
    _emit("snr", summary.snr)
    _emit("mean_stderr", summary.mean_stderr)
    _emit("variance_stderr", summary.variance_stderr)
    _emit("ks_statistic", summary.ks_statistic)
    _emit("ks_critical_1pct", langevin.ks_critical_value(summary.retained))
    _emit("retained", summary.retained)
    _emit("rejected_steps", summary.rejected_steps)
    _emit("dt", config.dt)
    if summary.warning:
        print(f"warning: {summary.warning}", file=sys.stderr)
    if want_dump:
        steps = langevin.retained_step_indices(config)
        with open(p["dump"], "w", encoding="utf-8") as handle:
            handle.write(f"# pistonwork {VERSION}\n")
            handle.write("walker,step,x\n")
            for walker in range(samples.shape[0]):
                for step_index, value in zip(steps, samples[walker]):
                    handle.write(f"{walker},{step_index},{value:.12g}\n")
        print(f"wrote {p['dump']}", file=sys.stderr)
    return 0


def _parse_axis(text):
    name, sep, body = str(text).partition("=")
    name, body = name.strip(), body.strip()
    if not sep or not name or not body:
        raise InvalidParameterError(
            f"axis must look like name=v1,v2,... or name=lo:hi:count, got {text!r}"
        )
    if ":" in body:
        parts = body.split(":")
        if len(parts) != 3:
            raise InvalidParameterError(f"range axis needs lo:hi:count, got {body!r}")
        lo, hi = _as_float(parts[0]), _as_float(parts[1])
        count = _as_positive_int(parts[2])
        return name, tuple(float(v) for v in np.linspace(lo, hi, count))
    values = []
    for token in body.split(","):
        token = token.strip()
        try:
            values.append(float(token))
        except ValueError:
            values.append(token)
    return name, tuple(values)


def _parse_fixed(pairs):
    fixed = {}
    for text in pairs or ():
        key, sep, value = str(text).partition("=")
        key, value = key.strip().replace("-", "_"), value.strip()
        if not sep or not key:
            raise InvalidParameterError(f"--fix needs key=value, got {text!r}")
        if value.lower() in ("inf", "none"):
            fixed[key] = None
        else:
            try:
                as_float = float(value)
            except ValueError:
                fixed[key] = value
                continue
            fixed[key] = int(as_float) if as_float == int(as_float) else as_float
    return fixed


@_register(
    "sweep",
    {
        "target": (_as_str, _REQUIRED,
                   "observable to sweep: " + ", ".join(sorted(sweep.TARGETS))),
        "out": (_as_str, _REQUIRED, "CSV output path"),
        "seed": (_as_int, 0, "base seed for stochastic targets"),
    },
    needs_seed=True,
)
def _cmd_sweep(rc, axes=(), fixed=()):
    p = rc.parameters
    axis_list = tuple(_parse_axis(a) for a in axes)
    spec = sweep.SweepSpec(
        target=p["target"],
        axes=axis_list,
        fixed=_parse_fixed(fixed),
        output=p["out"],
        seed=p["seed"],
    )
    rows = sweep.run_sweep(spec)
    sweep.write_csv(spec, rows, p["out"])
    print(f"wrote {p['out']} ({len(rows)} rows)", file=sys.stderr)
    return 0


@_register(
    "figure",
    {
        "out": (_as_str, None, "CSV output path (default <preset>.csv)"),
        "seed": (_as_int, 0, "base seed for stochastic targets"),
        "plot": (_as_bool, True, "render a PNG next to the CSV"),
    },
    needs_seed=True,
)
def _cmd_figure(rc, preset_name=None):
    p = rc.parameters
    out = p["out"] or f"{preset_name}.csv"
    preset, rows = sweep.run_figure(preset_name, out, seed=p["seed"])
    print(f"wrote {out} ({len(rows)} rows)", file=sys.stderr)
    if p["plot"]:
        from . import plots  # deferred: matplotlib is slow to import

        png = out[:-4] + ".png" if out.endswith(".csv") else out + ".png"
        plots.render(preset, rows, png)
        print(f"wrote {png}", file=sys.stderr)
    return 0


def _load_config_file(path):
    values = {}
    try:
        with open(path, encoding="utf-8") as handle:
            for number, raw in enumerate(handle, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise InvalidParameterError(
                        f"{path}:{number}: expected key = value"
                    )
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise InvalidParameterError(f"cannot read config file: {exc}") from None
    return values


def _resolve(args, options):
    """Merge flag values, config-file values, and defaults (flags win)."""
    config = _load_config_file(args.config) if args.config else {}
    unknown = set(config) - set(options)
    if unknown:
        raise InvalidParameterError(
            f"unknown config keys: {', '.join(sorted(unknown))}"
        )
    resolved = {}
    for dest, (convert, default, _help) in options.items():
        value = getattr(args, dest)
        if value is None and dest in config:
            value = config[dest]
        if value is None:
            if default is _REQUIRED:
                flag = "--" + dest.replace("_", "-")
                raise InvalidParameterError(f"missing required parameter {flag}")
            resolved[dest] = default
        else:
            resolved[dest] = convert(value)
    return resolved


def build_parser():
    parser = _Parser(
        prog="pistonwork",
        description="Quasistatic work extraction statistics of a gas-loaded "
        "piston under a noisy harmonic load.",
        epilog=UNITS_NOTE,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"pistonwork {VERSION}")
    subparsers = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    for name, (options, _fn, _seeded) in _SUBCOMMANDS.items():
        sub = subparsers.add_parser(
            name,
            epilog=UNITS_NOTE,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        sub.add_argument("--config", default=None, metavar="FILE",
                         help="key = value file mirroring the flags below")
        if name == "figure":
            sub.add_argument("preset", choices=sorted(sweep.PRESETS),
                             help="figure preset name")
        if name == "sweep":
            sub.add_argument("--axis", action="append", default=None,
                             metavar="NAME=VALUES",
                             help="axis grid, name=v1,v2,... or name=lo:hi:count "
                             "(repeatable; order sets row order)")
            sub.add_argument("--fix", action="append", default=None,
                             metavar="KEY=VALUE",
                             help="fixed parameter (repeatable)")
        for dest, (_convert, default, help_text) in options.items():
            flag = "--" + dest.replace("_", "-")
            if default not in (None, _REQUIRED) and default is not False:
                help_text = f"{help_text} (default {default})"
            sub.add_argument(flag, dest=dest, default=None, metavar="V",
                             help=help_text)
    return parser


def main(argv=None):
    """Entry point returning an exit code (0 ok, 1 bad input, 2 numerics)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.subcommand:
            parser.print_usage(sys.stderr)
            return 1
        options, handler, _seeded = _SUBCOMMANDS[args.subcommand]
        resolved = _resolve(args, options)
        rc = RunConfig(
            subcommand=args.subcommand,
            parameters=resolved,
            seed=resolved.get("seed", 0),
            output=resolved.get("out"),
        )
        if args.subcommand == "sweep":
            return handler(rc, axes=args.axis or (), fixed=args.fix or ())
        if args.subcommand == "figure":
            return handler(rc, preset_name=args.preset)
        return handler(rc)
    except SystemExit as exc:  # argparse --help/--version
        return int(exc.code or 0)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvalidParameterError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 1
    except (NoStableEnsembleError, IntegrationFailureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
