"""Decoherence-time results, attenuation curves, and parameter sweeps.

The decoherence time here is the short-time Gaussian decay constant of the
attenuation factor, tau_d = sqrt(8)*sigma^2/(v_thermal*d) with
v_thermal = sqrt(k*T/m). It is independent of any dissipative coupling rate;
the contrasting dissipation-based literature value hbar^2/(gamma*m*k*T*d^2)
is provided for comparison.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import closedform, motion, numeric
from .errors import (
    AliasingError,
    DegenerateInputError,
    GridSizeError,
    InterferenceFloorError,
    QuadratureConvergenceError,
    ShortTimeWindowError,
)
from .units import CODATA, CatParams, PhysicalConstants, derive_scales, nondimensionalize

__all__ = [
    "AttenuationCurve",
    "DecoherenceReport",
    "decoherence_time",
    "literature_decoherence_time",
    "decoherence_report",
    "attenuation_asymptote",
    "log_attenuation_asymptote",
    "default_fit_window",
    "short_time_fit",
    "build_curve",
    "sweep",
    "SWEEP_AXES",
    "SWEEP_OUTPUTS",
]

# Default short-time fit window as a fraction of the smaller timescale; keeps
# the neglected denominator terms of the attenuation exponent below ~1e-3.
SHORT_TIME_FRACTION = 0.02


@dataclass
class AttenuationCurve:
    """Attenuation log-values on a time grid, per computational route.

    ``log_a_oracle`` is present only when requested; entries that a numeric
    route could not produce are NaN. ``tau_d`` and ``tau_fit`` are None when
    undefined (zero separation or temperature, or too few short-time points).
    """

    times: np.ndarray
    log_a_closedform: np.ndarray
    log_a_exact: np.ndarray
    log_a_oracle: np.ndarray | None = None
    tau_d: float | None = None
    tau_fit: float | None = None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size < 1:
            raise ValueError("times must be a nonempty 1-d array")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if times[0] < 0.0:
            raise ValueError("times must be nonnegative")
        self.times = times
        for name in ("log_a_closedform", "log_a_exact", "log_a_oracle"):
            column = getattr(self, name)
            if column is None:
                continue
            column = np.asarray(column, dtype=float)
            if column.shape != times.shape:
                raise ValueError(f"{name} must match times in length")
            if np.any(column > 1e-15):
                raise ValueError(f"{name} must be nonpositive")
            setattr(self, name, column)


@dataclass(frozen=True)
class DecoherenceReport:
    """Decoherence time and companions for one parameter set.

    ``tau_literature``, ``gamma_tau_product`` and the high-temperature flag
    (k*T > hbar*gamma, the regime in which the thermal result applies) are
    None when no coupling rate gamma was supplied.
    """

    tau_d: float
    v_thermal: float
    gamma: float | None = None
    tau_literature: float | None = None
    gamma_tau_product: float | None = None
    in_high_temperature_regime: bool | None = None

    def __post_init__(self) -> None:
        if not (self.tau_d > 0.0 and self.v_thermal > 0.0):
            raise ValueError("tau_d and v_thermal must be positive")


def decoherence_time(params: CatParams, consts: PhysicalConstants = CODATA) -> float:
    """Short-time decay constant sqrt(8)*sigma^2/(v_thermal*separation).

    Raises :class:`DegenerateInputError` at zero separation or temperature,
    where the attenuation stays identically 1 and no decay time exists.
    """
    if params.separation == 0.0:
        raise DegenerateInputError("no interference: separation is zero")
    if params.temperature == 0.0:
        raise DegenerateInputError("no thermal decoherence: temperature is zero")
    scales = derive_scales(params, consts)
    return math.sqrt(8.0) * params.sigma * params.sigma / (scales.v_thermal * params.separation)


def literature_decoherence_time(
    params: CatParams, gamma: float, consts: PhysicalConstants = CODATA
) -> float:
    """Dissipation-based comparison value hbar^2/(gamma*m*k*T*d^2)."""
    if not gamma > 0.0:
        raise DegenerateInputError("gamma must be strictly positive")
    if params.separation == 0.0:
        raise DegenerateInputError("no interference: separation is zero")
    if params.temperature == 0.0:
        raise DegenerateInputError("no thermal decoherence: temperature is zero")
    d2 = params.separation * params.separation
    return (consts.hbar * consts.hbar) / (
        gamma * params.mass * consts.k_boltzmann * params.temperature * d2
    )


def decoherence_report(
    params: CatParams, gamma: float | None = None, consts: PhysicalConstants = CODATA
) -> DecoherenceReport:
    """Bundle tau_d, v_thermal and (when gamma is given) the comparison values."""
    tau_d = decoherence_time(params, consts)
    scales = derive_scales(params, consts)
    if gamma is None:
        return DecoherenceReport(tau_d=tau_d, v_thermal=scales.v_thermal)
    tau_lit = literature_decoherence_time(params, gamma, consts)
    return DecoherenceReport(
        tau_d=tau_d,
        v_thermal=scales.v_thermal,
        gamma=gamma,
        tau_literature=tau_lit,
        gamma_tau_product=gamma * tau_d,
        in_high_temperature_regime=consts.k_boltzmann * params.temperature > consts.hbar * gamma,
    )


def log_attenuation_asymptote(params: CatParams, consts: PhysicalConstants = CODATA) -> float:
    """Large-time limit of the log attenuation, -theta*r^2/(8*(1+theta))."""
    red = nondimensionalize(params, consts)
    return -(red.theta * (red.r * red.r)) / (8.0 * (1.0 + red.theta)) + 0.0


def attenuation_asymptote(params: CatParams, consts: PhysicalConstants = CODATA) -> float:
    """Floor value a(inf) = exp(-d^2/(8*sigma^2 + 2*hbar^2/(m*k*T))); 1 at T = 0.

    Underflows gracefully to 0.0 for macroscopic separations.
    """
    return float(np.exp(log_attenuation_asymptote(params, consts)))


def default_fit_window(params: CatParams, consts: PhysicalConstants = CODATA) -> float:
    """Default short-time window: SHORT_TIME_FRACTION of the smaller timescale."""
    scales = derive_scales(params, consts)
    return SHORT_TIME_FRACTION * min(scales.t_quantum, scales.t_thermal)


def short_time_fit(curve: AttenuationCurve, window: float) -> float:
    """Fit log_a = -(t/tau)^2 over the points with t <= window.

    Least squares in the single parameter 1/tau^2; stores tau_fit on the
    curve and returns it. Raises :class:`ShortTimeWindowError` with fewer
    than five qualifying points or when there is no decay to fit.
    """
    if not window > 0.0:
        raise ShortTimeWindowError("fit window must be positive")
    mask = (curve.times <= window) & np.isfinite(curve.log_a_closedform)
    if int(np.count_nonzero(mask)) < 5:
        raise ShortTimeWindowError(
            f"need at least 5 samples with t <= {window:g}, have {int(np.count_nonzero(mask))}"
        )
    t2 = curve.times[mask] ** 2
    decay = -curve.log_a_closedform[mask]
    denom = float(np.sum(t2 * t2))
    slope = float(np.sum(t2 * decay)) / denom if denom > 0.0 else 0.0
    if slope <= 0.0:
        raise ShortTimeWindowError("no decay inside the fit window (attenuation is flat)")
    tau = 1.0 / math.sqrt(slope)
    curve.tau_fit = tau
    return tau


def build_curve(
    params: CatParams,
    t_grid,
    *,
    with_oracle: bool = False,
    spec: numeric.QuadratureSpec | None = None,
    consts: PhysicalConstants = CODATA,
    fit_window: float | None = None,
) -> AttenuationCurve:
    """Evaluate the attenuation log along ``t_grid`` by every requested route.

    The closed-form and motion-model routes are always filled; the numeric
    route only when ``with_oracle`` is set, with per-point failures recorded
    as NaN instead of aborting the curve.
    """
    times = np.asarray(t_grid, dtype=float)
    log_cf = closedform.log_attenuation(params, times, consts)
    model = motion.free_particle_model(params.mass, params.temperature, consts)
    log_ex = motion.exact_log_attenuation(model, params.sigma, params.separation, times)
    log_or = None
    if with_oracle:
        log_or = np.full(times.shape, np.nan)
        for i, ti in enumerate(times):
            try:
                log_or[i] = math.log(numeric.numeric_attenuation(params, ti, spec, consts=consts))
            except (
                InterferenceFloorError,
                AliasingError,
                QuadratureConvergenceError,
                GridSizeError,
            ):
                pass
    curve = AttenuationCurve(times, log_cf, log_ex, log_or)
    try:
        curve.tau_d = decoherence_time(params, consts)
    except DegenerateInputError:
        curve.tau_d = None
    window = fit_window if fit_window is not None else default_fit_window(params, consts)
    try:
        short_time_fit(curve, window)
    except ShortTimeWindowError:
        curve.tau_fit = None
    return curve


SWEEP_AXES = ("mass", "sigma", "separation", "temperature")


def _out_tau_d(params, consts, gamma, at_time):
    return decoherence_time(params, consts)


def _out_v_thermal(params, consts, gamma, at_time):
    return derive_scales(params, consts).v_thermal


def _out_t_quantum(params, consts, gamma, at_time):
    return derive_scales(params, consts).t_quantum


def _out_tau_literature(params, consts, gamma, at_time):
    if gamma is None:
        raise DegenerateInputError("tau_literature requires gamma")
    return literature_decoherence_time(params, gamma, consts)


def _out_gamma_tau_product(params, consts, gamma, at_time):
    if gamma is None:
        raise DegenerateInputError("gamma_tau_product requires gamma")
    return gamma * decoherence_time(params, consts)


def _out_asymptote(params, consts, gamma, at_time):
    return attenuation_asymptote(params, consts)


def _out_log_asymptote(params, consts, gamma, at_time):
    return log_attenuation_asymptote(params, consts)


def _out_attenuation(params, consts, gamma, at_time):
    if at_time is None:
        raise DegenerateInputError("attenuation output requires a time")
    return float(closedform.attenuation(params, at_time, consts))


def _out_log_attenuation(params, consts, gamma, at_time):
    if at_time is None:
        raise DegenerateInputError("log_attenuation output requires a time")
    return float(closedform.log_attenuation(params, at_time, consts))


SWEEP_OUTPUTS = {
    "tau_d": _out_tau_d,
    "v_thermal": _out_v_thermal,
    "t_quantum": _out_t_quantum,
    "tau_literature": _out_tau_literature,
    "gamma_tau_product": _out_gamma_tau_product,
    "asymptote": _out_asymptote,
    "log_asymptote": _out_log_asymptote,
    "attenuation": _out_attenuation,
    "log_attenuation": _out_log_attenuation,
}


def resolve_workers(max_workers: int | None = None) -> int:
    """Worker count for sweeps: explicit arg, else CATDEC_THREADS (0 = auto)."""
    if max_workers is None:
        raw = os.environ.get("CATDEC_THREADS", "").strip()
        if not raw:
            return 1
        max_workers = int(raw)
    if max_workers < 0:
        raise ValueError("worker count must be nonnegative")
    if max_workers == 0:
        return os.cpu_count() or 1
    return max_workers


def sweep(
    base: CatParams,
    axis: str,
    values,
    outputs,
    *,
    gamma: float | None = None,
    at_time: float | None = None,
    consts: PhysicalConstants = CODATA,
    max_workers: int | None = None,
) -> list[dict]:
    """One row per value of ``axis``, carrying the requested derived outputs.

    Rows come back in input order regardless of the execution schedule.
    Per-row physics errors are recorded in the row (NaN value plus an
    ``error`` message) instead of failing the sweep.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    outputs = list(outputs)
    for name in outputs:
        if name not in SWEEP_OUTPUTS:
            raise ValueError(f"unknown output {name!r}; known: {sorted(SWEEP_OUTPUTS)}")

    def one_row(value: float) -> dict:
        row: dict = {axis: float(value)}
        errors = []
        try:
            varied = replace(base, **{axis: float(value)})
        except ValueError as exc:
            for name in outputs:
                row[name] = float("nan")
            row["error"] = str(exc)
            return row
        for name in outputs:
            try:
                row[name] = float(SWEEP_OUTPUTS[name](varied, consts, gamma, at_time))
            except (DegenerateInputError, ValueError) as exc:
                row[name] = float("nan")
                errors.append(str(exc))
        if errors:
            row["error"] = errors[0]
        return row

    workers = resolve_workers(max_workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one_row, values))
    return [one_row(v) for v in values]
