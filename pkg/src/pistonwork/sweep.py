"""Parameter-grid execution over the library's observables.

A sweep names a target observable, a list of axes (parameter name + grid
values, swept lexicographically with the last axis fastest), and fixed
parameters.  Each grid point becomes one CSV row; errors at a point are
captured in the row's status column instead of aborting the grid, so a
single file can show exactly where the model stops being defined
(no-stable-ensemble regions, divergent moments, ...).

Rows are a pure function of the sweep spec and seed: running the same spec
twice — or the grid points in any order — yields byte-identical CSV output.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import equilibrium, states, work
from .errors import (
    IntegrationFailureError,
    InvalidParameterError,
    NoStableEnsembleError,
    NoStationaryStateError,
)
from .version import VERSION


@dataclass(frozen=True)
class SweepSpec:
    """Declarative description of one grid run."""

    target: str
    axes: tuple
    fixed: dict = field(default_factory=dict)
    output: str | None = None
    seed: int = 0


@dataclass
class SweepRow:
    """One grid point: axis values, observable outputs, and a status tag."""

    params: dict
    outputs: dict
    status: str = "ok"


def _int_like(value, name):
    if value is None or float(value) != int(value):
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _n_particles(params, *, default="required"):
    if "n_particles" not in params:
        if default == "required":
            raise InvalidParameterError("missing parameter 'n_particles'")
        return None
    value = params["n_particles"]
    if value is None:
        return None
    return _int_like(value, "n_particles")


def _dist_from(params):
    """Build the slope distribution a grid point describes.

    Either a named state (state=coherent|thermal|squeezed|fock|
    phase-randomized with nbar/n/r/tau) or a raw Gaussian via alpha0 and
    epsilon.
    """
    if "state" in params:
        kind = str(params["state"])
        nbar = params.get("nbar")
        n = params.get("n")
        if n is None and kind == "fock" and nbar is not None:
            n = _int_like(nbar, "fock occupation")
        preset = states.StatePreset(
            kind=kind, nbar=nbar, n=n, r=params.get("r"), tau=params.get("tau")
        )
        return states.from_preset(preset)
    if "alpha0" not in params or "epsilon" not in params:
        raise InvalidParameterError(
            "grid point needs either state=... or alpha0= and epsilon="
        )
    return states.Gaussian(float(params["alpha0"]), float(params["epsilon"]))


def _t_potential(params):
    v = equilibrium.potential(float(params["x"]), float(params["alpha"]))
    return {"v": v}, "ok"


def _t_gamma_pdf(params):
    eq = equilibrium.GammaEquilibrium(_n_particles(params), float(params["alpha"]))
    return {"pdf": equilibrium.gamma_pdf(float(params["x"]), eq)}, "ok"


def _t_gamma_moments(params):
    eq = equilibrium.GammaEquilibrium(_n_particles(params), float(params["alpha"]))
    mean, variance, snr = equilibrium.gamma_moments(eq)
    return {"mean": mean, "variance": variance, "snr": snr}, "ok"


def _t_mixture_pdf(params):
    dist = _dist_from(params)
    n = _n_particles(params)
    pdf = equilibrium.mixture_pdf(dist, n, float(params["x"]))
    return {"pdf": pdf, "p_s": work.success_probability(dist)}, "ok"


def _t_mixture_moments(params):
    dist = _dist_from(params)
    mm = equilibrium.mixture_moments(dist, _n_particles(params))
    outputs = {
        "mean": mm.mean,
        "std": mm.std,
        "snr": mm.snr,
        "sensitivity": mm.sensitivity,
    }
    return outputs, ("divergent-moment" if mm.divergent else "ok")


def _t_mean_work(params):
    dist = _dist_from(params)
    result = work.mean_work(dist, _n_particles(params, default=None))
    return {
        "w_bar": result.w_bar,
        "p_s": result.p_s,
        "quad_error": result.quad_error,
    }, "ok"


def _t_mean_work_mc(params):
    dist = _dist_from(params)
    result = work.mean_work_mc(
        dist,
        _n_particles(params, default=None),
        samples=_int_like(params.get("samples", 100_000), "samples"),
        seed=params["_seed"],
    )
    return {
        "w_bar": result.w_bar,
        "p_s": result.p_s,
        "mc_stderr": result.mc_stderr,
    }, "ok"


def _t_success_probability(params):
    return {"p_s": work.success_probability(_dist_from(params))}, "ok"


# target name -> (output column order, evaluator)
TARGETS = {
    "potential": (("v",), _t_potential),
    "gamma_pdf": (("pdf",), _t_gamma_pdf),
    "gamma_moments": (("mean", "variance", "snr"), _t_gamma_moments),
    "mixture_pdf": (("pdf", "p_s"), _t_mixture_pdf),
    "mixture_moments": (("mean", "std", "snr", "sensitivity"), _t_mixture_moments),
    "mean_work": (("w_bar", "p_s", "quad_error"), _t_mean_work),
    "mean_work_mc": (("w_bar", "p_s", "mc_stderr"), _t_mean_work_mc),
    "success_probability": (("p_s",), _t_success_probability),
}


def output_columns(target):
    if target not in TARGETS:
        raise InvalidParameterError(
            f"unknown sweep target '{target}'; known: {', '.join(sorted(TARGETS))}"
        )
    return TARGETS[target][0]


def run_sweep(spec):
    """Evaluate the target at every grid point, capturing per-point errors.

    Row order is the lexicographic product of the axes as declared.  A
    point that raises maps to a status tag (invalid-parameter,
    no-stable-ensemble, integration-failure) with empty outputs; divergent
    mixture moments keep their values under status divergent-moment.
    """
    columns, evaluate = TARGETS.get(spec.target, (None, None))
    if evaluate is None:
        raise InvalidParameterError(f"unknown sweep target '{spec.target}'")
    if not spec.axes or any(len(values) == 0 for _, values in spec.axes):
        raise InvalidParameterError("sweep needs at least one nonempty axis")
    names = [name for name, _ in spec.axes]
    rows = []
    for index, combo in enumerate(itertools.product(*(v for _, v in spec.axes))):
        params = dict(spec.fixed)
        params.update(zip(names, combo))
        params["_seed"] = spec.seed + index
        try:
            outputs, status = evaluate(params)
            bad = [
                k for k, v in outputs.items()
                if isinstance(v, float) and not math.isfinite(v)
            ]
            if bad:
                outputs, status = {}, "integration-failure"
        except NoStationaryStateError:
            outputs, status = {}, "no-stable-ensemble"
        except NoStableEnsembleError:
            outputs, status = {}, "no-stable-ensemble"
        except InvalidParameterError:
            outputs, status = {}, "invalid-parameter"
        except IntegrationFailureError:
            outputs, status = {}, "integration-failure"
        rows.append(SweepRow(params=dict(zip(names, combo)), outputs=outputs,
                             status=status))
    return rows


def format_value(value):
    """Deterministic CSV rendering: 12 significant digits for floats."""
    if value is None:
        return "inf"
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def write_csv(spec, rows, path, extra_metadata=()):
    """Write rows with '#' metadata (spec echo, tool version, seed)."""
    columns = output_columns(spec.target)
    names = [name for name, _ in spec.axes]
    lines = [f"# pistonwork {VERSION}"]
    lines.extend(extra_metadata)
    lines.append(f"# target={spec.target}")
    for name, values in spec.axes:
        lines.append(f"# axis {name}=" + ",".join(format_value(v) for v in values))
    for key, value in spec.fixed.items():
        lines.append(f"# fixed {key}={format_value(value)}")
    lines.append(f"# seed={spec.seed}")
    lines.append(",".join(list(names) + list(columns) + ["status"]))
    for row in rows:
        cells = [format_value(row.params[name]) for name in names]
        cells.extend(
            format_value(row.outputs[c]) if c in row.outputs else ""
            for c in columns
        )
        cells.append(row.status)
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def _grid(lo, hi, count=61):
    return tuple(float(v) for v in np.linspace(lo, hi, count))


@dataclass(frozen=True)
class FigurePreset:
    """A named, version-controlled sweep that reproduces one report figure."""

    name: str
    target: str
    axes: tuple
    fixed: dict
    x_axis: str
    y_column: str
    group_axis: str | None
    title: str
    log_y: bool = False


_NBAR_AXIS = ("nbar", tuple(float(v) for v in range(21)))

PRESETS = {
    "fig2": FigurePreset(
        name="fig2",
        target="potential",
        axes=(("alpha", (-1.0, 0.0, 0.5, 1.0, 1.5)), ("x", _grid(0.05, 4.0))),
        fixed={},
        x_axis="x",
        y_column="v",
        group_axis="alpha",
        title="piston potential v(x) = alpha*x - ln(x)",
    ),
    "fig3": FigurePreset(
        name="fig3",
        target="gamma_pdf",
        axes=(("alpha", (0.5, 1.0, 1.5)), ("x", _grid(0.02, 3.5))),
        fixed={"n_particles": 500},
        x_axis="x",
        y_column="pdf",
        group_axis="alpha",
        title="stationary position density, N = 500",
    ),
    "fig4": FigurePreset(
        name="fig4",
        target="mixture_pdf",
        axes=(("epsilon", (0.0, 0.5, 1.0, 3.0)), ("x", _grid(0.02, 8.0))),
        fixed={"n_particles": 500, "alpha0": 1.0},
        x_axis="x",
        y_column="pdf",
        group_axis="epsilon",
        title="mixture position density under slope noise, N = 500",
    ),
    "fig5": FigurePreset(
        name="fig5",
        target="mixture_moments",
        axes=(("epsilon", _grid(0.0, 3.0)),),
        fixed={"n_particles": 500, "alpha0": 1.0},
        x_axis="epsilon",
        y_column="mean",
        group_axis=None,
        title="mixture mean position vs slope noise (delta-regularized)",
    ),
    "fig6": FigurePreset(
        name="fig6",
        target="mixture_moments",
        axes=(("epsilon", _grid(0.0, 3.0)),),
        fixed={"n_particles": 500, "alpha0": 1.0},
        x_axis="epsilon",
        y_column="std",
        group_axis=None,
        title="mixture position std vs slope noise (delta-regularized)",
    ),
    "fig7": FigurePreset(
        name="fig7",
        target="mean_work",
        axes=(("epsilon", _grid(0.0, 3.0)),),
        fixed={"alpha0": 1.0, "n_particles": None},
        x_axis="epsilon",
        y_column="w_bar",
        group_axis=None,
        title="mean work vs slope noise, alpha0 = 1",
    ),
    "fig8": FigurePreset(
        name="fig8",
        target="mean_work",
        axes=(("epsilon", (0.0, 1.5, 3.0)), ("alpha0", _grid(0.1, 10.0))),
        fixed={"n_particles": None},
        x_axis="alpha0",
        y_column="w_bar",
        group_axis="epsilon",
        title="mean work vs mean slope",
    ),
    "fig9": FigurePreset(
        name="fig9",
        target="mean_work",
        axes=(("state", ("coherent", "thermal", "fock")), _NBAR_AXIS),
        fixed={"n_particles": None},
        x_axis="nbar",
        y_column="w_bar",
        group_axis="state",
        title="mean work vs photon number",
    ),
    "fig10": FigurePreset(
        name="fig10",
        target="success_probability",
        axes=(("state", ("coherent", "thermal", "fock")), _NBAR_AXIS),
        fixed={},
        x_axis="nbar",
        y_column="p_s",
        group_axis="state",
        title="success probability vs photon number",
    ),
    "fig11": FigurePreset(
        name="fig11",
        target="mean_work",
        axes=(("state", ("coherent", "squeezed", "phase-randomized")), _NBAR_AXIS),
        fixed={"n_particles": None, "r": 2.0, "tau": math.pi / 4.0},
        x_axis="nbar",
        y_column="w_bar",
        group_axis="state",
        title="mean work vs photon number (squeezed r=2, phase jitter tau=pi/4)",
    ),
    "fig12": FigurePreset(
        name="fig12",
        target="success_probability",
        axes=(("state", ("coherent", "squeezed", "phase-randomized")), _NBAR_AXIS),
        fixed={"r": 2.0, "tau": math.pi / 4.0},
        x_axis="nbar",
        y_column="p_s",
        group_axis="state",
        title="success probability vs photon number (squeezed/phase jitter)",
    ),
}


def figure_preset(name):
    if name not in PRESETS:
        raise InvalidParameterError(
            f"unknown figure preset '{name}'; known: {', '.join(sorted(PRESETS))}"
        )
    return PRESETS[name]


def preset_spec(preset, out_path=None, seed=0):
    """SweepSpec for a named preset."""
    return SweepSpec(
        target=preset.target,
        axes=preset.axes,
        fixed=preset.fixed,
        output=out_path,
        seed=seed,
    )


def run_figure(name, out_path, seed=0):
    """Run a preset and write its CSV; returns (preset, rows)."""
    preset = figure_preset(name)
    spec = preset_spec(preset, out_path, seed)
    rows = run_sweep(spec)
    write_csv(spec, rows, out_path, extra_metadata=(f"# preset={name}",))
    return preset, rows
