"""Command-line front end: densities, attenuation curves, decoherence times,
parameter sweeps, and the self-verification gate, emitted as CSV or JSON.

Configs are single JSON documents. SI configs carry explicit unit suffixes
(mass_kg, sigma_m, separation_m, velocity_m_per_s, temperature_K,
gamma_per_s); dimensionless configs select ``"units": "reduced"`` and give
separation (d/sigma), velocity (in sigma per quantum spreading time) and
theta (squared thermal velocity in the same unit) directly. For reduced
configs every time option and output column is in units of the quantum
spreading time and every length in units of sigma.

Every number is emitted in scientific notation with 17 significant digits
(round-trip exact for doubles), comma-separated CSV with '#'-prefixed
metadata lines, LF endings, no locale dependence. Exit codes: 0 success,
1 verification failure, 2 usage or physics-input error.

The ``CATDEC_THREADS`` environment variable caps sweep parallelism
(0 = one worker per CPU).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import analysis, closedform, numeric, verification
from .errors import (
    DegenerateInputError,
    GridSizeError,
    QuadratureConvergenceError,
    ShortTimeWindowError,
)
from .units import (
    CODATA,
    CatParams,
    PhysicalConstants,
    derive_scales,
    from_reduced,
    nondimensionalize,
)

__all__ = ["RunConfig", "load_config", "config_to_dict", "main"]


# --- configuration ---------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Validated run inputs plus output options."""

    params: CatParams
    consts: PhysicalConstants
    units: str  # "si" | "reduced"
    gamma: float | None = None
    output_format: str = "csv"
    output_path: str | None = None
    oracle: bool = False
    quadrature: numeric.QuadratureSpec = numeric.QuadratureSpec()
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.units not in ("si", "reduced"):
            raise ValueError(f"units must be 'si' or 'reduced', got {self.units!r}")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"output_format must be 'csv' or 'json', got {self.output_format!r}")
        if self.gamma is not None and not self.gamma > 0.0:
            raise ValueError("gamma must be strictly positive when given")


_SI_KEYS = ("mass_kg", "sigma_m", "separation_m", "velocity_m_per_s", "temperature_K")
_REDUCED_KEYS = ("separation", "velocity", "theta")


def _config_from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ValueError("config must be a JSON object")
    units = doc.get("units", "si")
    known = {
        "units", "gamma_per_s", "gamma", "output_format", "output_path",
        "oracle", "seed", "quadrature", *_SI_KEYS, *_REDUCED_KEYS,
    }
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if units == "si":
        missing = [k for k in ("mass_kg", "sigma_m", "separation_m", "temperature_K") if k not in doc]
        if missing:
            raise ValueError(f"SI config missing keys: {missing}")
        params = CatParams(
            mass=float(doc["mass_kg"]),
            sigma=float(doc["sigma_m"]),
            separation=float(doc["separation_m"]),
            drift_velocity=float(doc.get("velocity_m_per_s", 0.0)),
            temperature=float(doc["temperature_K"]),
        )
        consts = CODATA
        gamma = doc.get("gamma_per_s")
    elif units == "reduced":
        if "separation" not in doc:
            raise ValueError("reduced config missing key: separation")
        params, consts = from_reduced(
            float(doc["separation"]),
            float(doc.get("velocity", 0.0)),
            float(doc.get("theta", 0.0)),
        )
        gamma = doc.get("gamma")
        if gamma is not None:
            # stored per quantum spreading time; CatParams side uses 1/time
            gamma = float(gamma) / derive_scales(params, consts).t_quantum
    else:
        raise ValueError(f"units must be 'si' or 'reduced', got {units!r}")
    quad = doc.get("quadrature", {})
    if not isinstance(quad, dict):
        raise ValueError("quadrature must be an object")
    spec = numeric.QuadratureSpec(
        order=int(quad.get("order", 80)),
        convergence_tol=float(quad.get("convergence_tol", 1e-12)),
        max_order=int(quad.get("max_order", 2048)),
    )
    seed = doc.get("seed")
    return RunConfig(
        params=params,
        consts=consts,
        units=units,
        gamma=None if gamma is None else float(gamma),
        output_format=str(doc.get("output_format", "csv")),
        output_path=doc.get("output_path"),
        oracle=bool(doc.get("oracle", False)),
        quadrature=spec,
        seed=None if seed is None else int(seed),
    )


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return _config_from_dict(json.load(fh))


def config_to_dict(config: RunConfig) -> dict:
    """Serialize a RunConfig; parsing the result yields an equal RunConfig."""
    doc: dict = {"units": config.units}
    if config.units == "si":
        doc.update(
            mass_kg=config.params.mass,
            sigma_m=config.params.sigma,
            separation_m=config.params.separation,
            velocity_m_per_s=config.params.drift_velocity,
            temperature_K=config.params.temperature,
        )
        if config.gamma is not None:
            doc["gamma_per_s"] = config.gamma
    else:
        red = nondimensionalize(config.params, config.consts)
        doc.update(separation=red.r, velocity=red.u, theta=red.theta)
        if config.gamma is not None:
            doc["gamma"] = config.gamma * red.scales.t_quantum
    doc["output_format"] = config.output_format
    if config.output_path is not None:
        doc["output_path"] = config.output_path
    doc["oracle"] = config.oracle
    doc["quadrature"] = {
        "order": config.quadrature.order,
        "convergence_tol": config.quadrature.convergence_tol,
        "max_order": config.quadrature.max_order,
    }
    if config.seed is not None:
        doc["seed"] = config.seed
    return doc


# --- unit bookkeeping for emitted quantities --------------------------------


@dataclass(frozen=True)
class _Units:
    """Conversion factors from internal (SI-like) to emitted working units."""

    time: float
    length: float
    velocity: float
    time_label: str
    length_label: str
    velocity_label: str
    density_label: str


def _working_units(config: RunConfig) -> _Units:
    if config.units == "si":
        return _Units(1.0, 1.0, 1.0, "s", "m", "m/s", "1/m")
    scales = derive_scales(config.params, config.consts)
    return _Units(
        time=scales.t_quantum,
        length=scales.x_unit,
        velocity=scales.x_unit / scales.t_quantum,
        time_label="t_quantum",
        length_label="sigma",
        velocity_label="sigma/t_quantum",
        density_label="1/sigma",
    )


# --- deterministic emission --------------------------------------------------


def format_float(value) -> str:
    """Scientific notation with 17 significant digits; doubles round-trip."""
    v = float(value)
    if math.isnan(v):
        return "nan"
    return f"{v:.16e}"


def _meta_str(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_csv(path: str, meta: dict, columns: dict) -> None:
    """Comma-separated columns with '#'-prefixed metadata, LF endings.

    ``columns`` maps names to equal-length sequences; None entries become
    empty cells; every number is rendered by :func:`format_float`.
    """
    names = list(columns)
    series = [list(columns[name]) for name in names]
    n_rows = len(series[0]) if series else 0
    for name, col in zip(names, series):
        if len(col) != n_rows:
            raise ValueError(f"column {name!r} has inconsistent length")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for key, value in meta.items():
            fh.write(f"# {key} = {_meta_str(value)}\n")
        fh.write(",".join(names) + "\n")
        for i in range(n_rows):
            cells = []
            for col in series:
                v = col[i]
                if v is None or (isinstance(v, float) and math.isnan(v)):
                    cells.append("")
                elif isinstance(v, str):
                    cells.append(v)
                else:
                    cells.append(format_float(v))
            fh.write(",".join(cells) + "\n")


def _render_json(obj, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {_render_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "null"
        return format_float(v)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot render {type(obj)!r}")


def write_json(path: str, meta: dict, columns: dict) -> None:
    """Structured JSON with the same 17-significant-digit float rendering."""
    doc = {"meta": meta, "columns": {k: list(v) for k, v in columns.items()}}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(_render_json(doc, 0) + "\n")


def _emit(config: RunConfig, path: str, meta: dict, columns: dict) -> None:
    if config.output_format == "json":
        write_json(path, meta, columns)
    else:
        write_csv(path, meta, columns)


def _none_if_nan(v):
    return None if v is None or (isinstance(v, float) and math.isnan(v)) else v


# --- subcommands -------------------------------------------------------------


def _resolve_out(config: RunConfig, args) -> str | None:
    return args.out if args.out is not None else config.output_path


def _load(args) -> RunConfig:
    """Load the config and apply command-line overrides."""
    config = load_config(args.config)
    changes = {}
    if getattr(args, "format", None):
        changes["output_format"] = args.format
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    return replace(config, **changes) if changes else config


def cmd_tau(args) -> int:
    config = _load(args)
    units = _working_units(config)
    report = analysis.decoherence_report(config.params, config.gamma, config.consts)
    rows = {
        "tau_d": (report.tau_d / units.time, units.time_label),
        "v_thermal": (report.v_thermal / units.velocity, units.velocity_label),
    }
    if report.gamma is not None:
        rows["gamma"] = (report.gamma * units.time, f"1/{units.time_label}")
        rows["tau_literature"] = (report.tau_literature / units.time, units.time_label)
        rows["gamma_tau_product"] = (report.gamma_tau_product, "")
    for name, (value, label) in rows.items():
        suffix = f" {label}" if label else ""
        print(f"{name} = {format_float(value)}{suffix}")
    if report.in_high_temperature_regime is not None:
        flag = "yes" if report.in_high_temperature_regime else "no"
        print(f"high_temperature_regime = {flag}")
        if not report.in_high_temperature_regime:
            print("warning: k*T <= hbar*gamma, outside the regime of validity", file=sys.stderr)
    out = _resolve_out(config, args)
    if out:
        meta = {"catdec": "tau", "units": config.units}
        columns = {name: [value] for name, (value, _) in rows.items()}
        if report.in_high_temperature_regime is not None:
            columns["high_temperature_regime"] = [1.0 if report.in_high_temperature_regime else 0.0]
        _emit(config, out, meta, columns)
    return 0


def cmd_density(args) -> int:
    config = _load(args)
    oracle = args.oracle or config.oracle
    units = _working_units(config)
    t_si = args.t * units.time
    if t_si < 0.0:
        raise ValueError("--t must be nonnegative")
    red = nondimensionalize(config.params, config.consts)
    tt = t_si / red.scales.t_quantum
    if oracle:
        grid = numeric.build_grid(config.params, t_si, config.consts)
        x_red = grid.points()
        thermal = numeric.thermal_average(
            config.params, t_si, grid, config.quadrature, config.consts
        ).exported_values()
    else:
        half = 0.5 * red.r + abs(red.u) * tt + 8.0 * math.sqrt(1.0 + (1.0 + red.theta) * tt * tt)
        n = max(16, args.points)
        x_red = np.linspace(-half, half, n)
        thermal = closedform._thermal_density(x_red, tt, red.r, red.theta)
    density = closedform._density(x_red, tt, red.r, red.u)
    # reduced-unit samples scale to working units through sigma
    x_out = x_red * (red.scales.x_unit / units.length)
    scale = units.length / red.scales.x_unit
    meta = {
        "catdec": "density",
        "units": config.units,
        "t": args.t,
        "x_unit": units.length_label,
        "density_unit": units.density_label,
        "oracle": oracle,
    }
    columns = {"x": x_out, "P": density * scale, "P_T": thermal * scale}
    out = _resolve_out(config, args)
    if not out:
        raise ValueError("density requires an output path (--out or config output_path)")
    _emit(config, out, meta, columns)
    return 0


def cmd_attenuation(args) -> int:
    config = _load(args)
    oracle = args.oracle or config.oracle
    units = _working_units(config)
    if not args.tmax > 0.0:
        raise ValueError("--tmax must be positive")
    if args.points < 2:
        raise ValueError("--points must be at least 2")
    t_work = np.linspace(0.0, args.tmax, args.points)
    curve = analysis.build_curve(
        config.params,
        t_work * units.time,
        with_oracle=oracle,
        spec=config.quadrature,
        consts=config.consts,
    )
    meta = {
        "catdec": "attenuation",
        "units": config.units,
        "t_unit": units.time_label,
        "tau_d": None if curve.tau_d is None else curve.tau_d / units.time,
        "tau_fit": None if curve.tau_fit is None else curve.tau_fit / units.time,
        "log_attenuation_asymptote": analysis.log_attenuation_asymptote(config.params, config.consts),
        "attenuation_asymptote": analysis.attenuation_asymptote(config.params, config.consts),
    }
    columns = {
        "t": curve.times / units.time,
        "log_a_closedform": curve.log_a_closedform,
        "log_a_exact": curve.log_a_exact,
    }
    if curve.log_a_oracle is not None:
        columns["log_a_oracle"] = [_none_if_nan(float(v)) for v in curve.log_a_oracle]
    out = _resolve_out(config, args)
    if not out:
        raise ValueError("attenuation requires an output path (--out or config output_path)")
    _emit(config, out, meta, columns)
    return 0


def cmd_verify(args) -> int:
    consts = CODATA
    if args.perturb_hbar:
        consts = PhysicalConstants(
            hbar=CODATA.hbar * (1.0 + args.perturb_hbar), k_boltzmann=CODATA.k_boltzmann
        )
    level = "full" if args.full else "fast"
    results = verification.run_checks(level, consts)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    n_passed = sum(r.passed for r in results)
    print(f"verify {level}: {n_passed}/{len(results)} checks passed")
    return 0 if n_passed == len(results) else 1


def cmd_sweep(args) -> int:
    config = _load(args)
    units = _working_units(config)
    with open(args.spec, "r", encoding="utf-8") as fh:
        plan = json.load(fh)
    if not isinstance(plan, dict):
        raise ValueError("sweep spec must be a JSON object")
    axis = plan.get("axis")
    values = plan.get("values")
    outputs = plan.get("outputs", ["tau_d"])
    if not isinstance(values, list) or not values:
        raise ValueError("sweep spec needs a nonempty 'values' list")
    at_time = plan.get("time")
    if at_time is not None:
        at_time = float(at_time) * units.time

    # map working-unit axis names and values onto the underlying parameters
    axis_scale = 1.0
    axis_name = axis
    if config.units == "reduced":
        reduced_axes = {"separation": ("separation", 1.0), "velocity": ("drift_velocity", 0.5),
                        "theta": ("temperature", 0.25)}
        if axis not in reduced_axes:
            raise ValueError(
                f"axis for a reduced config must be one of {sorted(reduced_axes)}, got {axis!r}"
            )
        axis_name, axis_scale = reduced_axes[axis]
    elif axis not in analysis.SWEEP_AXES:
        raise ValueError(f"axis must be one of {analysis.SWEEP_AXES}, got {axis!r}")

    rows = analysis.sweep(
        config.params,
        axis_name,
        [float(v) * axis_scale for v in values],
        outputs,
        gamma=config.gamma,
        at_time=at_time,
        consts=config.consts,
    )
    convert = {
        "tau_d": 1.0 / units.time,
        "tau_literature": 1.0 / units.time,
        "t_quantum": 1.0 / units.time,
        "v_thermal": 1.0 / units.velocity,
    }
    columns: dict = {axis: [float(v) for v in values]}
    for name in outputs:
        factor = convert.get(name, 1.0)
        columns[name] = [row[name] * factor for row in rows]
    if any("error" in row for row in rows):
        columns["error"] = [row.get("error", "") for row in rows]
    meta = {"catdec": "sweep", "units": config.units, "axis": axis}
    out = _resolve_out(config, args)
    if not out:
        raise ValueError("sweep requires an output path (--out or config output_path)")
    _emit(config, out, meta, columns)
    return 0


# --- entry point --------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catdec",
        description="Thermal decoherence of a two-packet superposition: "
        "densities, attenuation curves, decoherence times, sweeps, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_out: bool):
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--format", dest="format", choices=("csv", "json"), default=None,
                       help="override the config output format")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p_tau = sub.add_parser("tau", help="decoherence time report")
    add_common(p_tau, needs_out=False)
    p_tau.set_defaults(func=cmd_tau)

    p_density = sub.add_parser("density", help="position densities at one time")
    add_common(p_density, needs_out=True)
    p_density.add_argument("--t", type=float, required=True,
                           help="time (working units: seconds, or t_quantum for reduced configs)")
    p_density.add_argument("--points", type=int, default=1024,
                           help="sample count for the closed-form grid")
    p_density.add_argument("--oracle", action="store_true",
                           help="compute the thermal column by velocity quadrature on a transform grid")
    p_density.set_defaults(func=cmd_density)

    p_att = sub.add_parser("attenuation", help="attenuation curve by all routes")
    add_common(p_att, needs_out=True)
    p_att.add_argument("--tmax", type=float, required=True, help="last time on the grid (working units)")
    p_att.add_argument("--points", type=int, default=200, help="number of grid times")
    p_att.add_argument("--oracle", action="store_true", help="add the numeric-extraction column")
    p_att.set_defaults(func=cmd_attenuation)

    p_verify = sub.add_parser("verify", help="run the self-verification gate")
    p_verify.add_argument("--full", action="store_true",
                          help="include the spectral, end-to-end and Monte Carlo suites")
    p_verify.add_argument("--perturb-hbar", type=float, default=0.0, metavar="REL",
                          help="gate self-test: scale hbar by (1+REL) and expect failure")
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="tabulate outputs along one parameter axis")
    add_common(p_sweep, needs_out=True)
    p_sweep.add_argument("--spec", required=True, help="JSON sweep plan: axis, values, outputs[, time]")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return _run(args)


def _run(args) -> int:
    try:
        return args.func(args)
    except (DegenerateInputError, GridSizeError, QuadratureConvergenceError,
            ShortTimeWindowError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
