"""Closed-form observables of a free-particle two-packet superposition.

The state at t = 0 is a normalized pair of Gaussian packets of width sigma
centered at +-d/2, sharing a momentum kick m*v. Free evolution spreads each
packet; the position density is a pair of Gaussians plus an oscillatory
interference (cross) term. Averaging that density over a Maxwell
distribution of velocities yields the finite-temperature density, whose
cross term is suppressed by the attenuation factor ``a(t)`` computed here.

Conventions
-----------
* All kernels prefixed with ``_`` take dimensionless arguments: positions in
  units of sigma, times in units of the quantum spreading time
  ``2*m*sigma**2/hbar`` (see :mod:`catdec.units`).
* The public functions accept SI (or any consistent) units together with a
  :class:`~catdec.units.PhysicalConstants` record and scale internally.
* Wavefunction values carry 1/sqrt(length), densities 1/length.
* The quartic root in the evolved prefactor is the principal square root
  applied twice; only moduli and overlap magnitudes are observable, so the
  branch convention is internal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .units import CODATA, CatParams, PhysicalConstants, nondimensionalize

__all__ = [
    "WidthPair",
    "initial_wavefunction",
    "evolved_wavefunction",
    "probability",
    "thermal_probability",
    "packet_width_sq",
    "attenuation",
    "log_attenuation",
]

# separation/sigma beyond which the packet overlap exp(-r^2/8) (< 1e-195) is
# treated as exactly zero to keep it out of denormal territory
OVERLAP_CUTOFF = 60.0

_QUARTER_ROOT_2PI = (2.0 * np.pi) ** 0.25


def _overlap(r: float) -> float:
    """Overlap magnitude of the two initial packets, exp(-r^2/8)."""
    if r > OVERLAP_CUTOFF:
        return 0.0
    return float(np.exp(-(r * r) / 8.0))


def _norm_const_sq(r: float) -> float:
    """Squared normalization 1/(2*(1 + exp(-r^2/8))) of the superposition."""
    return 1.0 / (2.0 * (1.0 + _overlap(r)))


def _norm_const(r: float) -> float:
    return float(np.sqrt(_norm_const_sq(r)))


def _initial_psi(x, r: float, u: float):
    """Reduced-unit initial wavefunction: two unit-width packets at +-r/2."""
    x = np.asarray(x, dtype=float)
    dm = x - 0.5 * r
    dp = x + 0.5 * r
    gm = np.exp(-(dm * dm) * 0.25)
    gp = np.exp(-(dp * dp) * 0.25)
    phase = np.exp(1j * (0.5 * u * x))
    return _norm_const(r) / _QUARTER_ROOT_2PI * phase * (gm + gp)


def _evolved_psi(x, t, r: float, u: float):
    """Reduced-unit wavefunction after free evolution for reduced time t.

    Each packet acquires the complex variance 1 + i*t; the global phase
    carries the drift momentum and kinetic energy. At t = 0 this reproduces
    :func:`_initial_psi` bit-for-bit.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    w2 = 1.0 + t * t
    inv_var = (1.0 - 1j * t) / (4.0 * w2)  # 1/(4*(1 + i*t))
    z = 1.0 + 1j * t
    pref = 1.0 / np.sqrt(np.sqrt(2.0 * np.pi * (z * z)))
    phase = np.exp(1j * (0.5 * u * x - 0.25 * (u * u) * t))
    dm = x - 0.5 * r - u * t
    dp = x + 0.5 * r - u * t
    gm = np.exp(-(dm * dm) * inv_var)
    gp = np.exp(-(dp * dp) * inv_var)
    return _norm_const(r) * pref * phase * (gm + gp)


def _density_terms(x, t, r: float, u: float):
    """The three reduced-unit density contributions at drift u.

    Returns (packet at +r/2, packet at -r/2, interference cross term), each
    including the common normalization so that their sum is the density.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    w2 = 1.0 + t * t
    inv2w2 = 0.5 / w2
    xi = x - u * t
    dm = xi - 0.5 * r
    dp = xi + 0.5 * r
    amp = _norm_const_sq(r) / np.sqrt(2.0 * np.pi * w2)
    g1 = amp * np.exp(-(dm * dm) * inv2w2)
    g2 = amp * np.exp(-(dp * dp) * inv2w2)
    cross = (
        2.0
        * amp
        * np.exp(-(xi * xi + 0.25 * (r * r)) * inv2w2)
        * np.cos((t * r) * xi * inv2w2)
    )
    return g1, g2, cross


def _density(x, t, r: float, u: float):
    """Reduced-unit position density at drift velocity u."""
    g1, g2, cross = _density_terms(x, t, r, u)
    return g1 + g2 + cross


def _thermal_w2(t, theta: float):
    """Reduced thermal packet variance 1 + t^2 + theta*t^2."""
    tt2 = t * t
    return 1.0 + tt2 + theta * tt2


def _thermal_density(x, t, r: float, theta: float):
    """Reduced-unit density averaged over the Maxwell velocity distribution.

    The drift velocity is integrated out, so the result depends only on
    (r, theta) and is even in x. At theta = 0 it coincides with
    ``_density(x, t, r, u=0)``.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    tt2 = t * t
    w2c = 1.0 + tt2
    th_tt2 = theta * tt2
    w2 = 1.0 + tt2 + th_tt2
    inv2w2 = 0.5 / w2
    dm = x - 0.5 * r
    dp = x + 0.5 * r
    amp = _norm_const_sq(r) / np.sqrt(2.0 * np.pi * w2)
    g1 = amp * np.exp(-(dm * dm) * inv2w2)
    g2 = amp * np.exp(-(dp * dp) * inv2w2)
    env = (x * x) * inv2w2 + (w2 + th_tt2 * tt2) * ((r * r) / 8.0) / (w2c * w2)
    cross = 2.0 * amp * np.exp(-env) * np.cos((t * r) * x * inv2w2)
    return g1 + g2 + cross


def _fringe_wavenumber(t, r: float, theta: float):
    """Spatial frequency of the thermal interference fringes, t*r/(2*w2)."""
    t = np.asarray(t, dtype=float)
    return (t * r) * (0.5 / _thermal_w2(t, theta))


def _log_attenuation(t, r: float, theta: float):
    """Log of the interference attenuation factor, always <= 0.

    The exponent is (theta*t^2/w2)*(r^2/8) with w2 = 1 + t^2 + theta*t^2;
    it grows monotonically from 0 to the finite limit theta*r^2/(8*(1+theta)).
    """
    t = np.asarray(t, dtype=float)
    tt2 = t * t
    w2 = 1.0 + tt2 + theta * tt2
    return -((theta * tt2) / w2) * ((r * r) / 8.0) + 0.0


# --- public, unit-carrying API -------------------------------------------


def initial_wavefunction(params: CatParams, x, consts: PhysicalConstants = CODATA):
    """Normalized two-packet wavefunction at t = 0, evaluated at x."""
    red = nondimensionalize(params, consts)
    s = red.scales
    return _initial_psi(np.asarray(x, dtype=float) / s.x_unit, red.r, red.u) / np.sqrt(s.x_unit)


def evolved_wavefunction(params: CatParams, x, t, consts: PhysicalConstants = CODATA):
    """Freely evolved wavefunction at position x and time t >= 0."""
    red = nondimensionalize(params, consts)
    s = red.scales
    xr = np.asarray(x, dtype=float) / s.x_unit
    tr = np.asarray(t, dtype=float) / s.t_quantum
    return _evolved_psi(xr, tr, red.r, red.u) / np.sqrt(s.x_unit)


def probability(params: CatParams, x, t, consts: PhysicalConstants = CODATA):
    """Position density |psi(x, t)|^2 at the configured drift velocity."""
    red = nondimensionalize(params, consts)
    s = red.scales
    xr = np.asarray(x, dtype=float) / s.x_unit
    tr = np.asarray(t, dtype=float) / s.t_quantum
    return _density(xr, tr, red.r, red.u) / s.x_unit


def thermal_probability(params: CatParams, x, t, consts: PhysicalConstants = CODATA):
    """Position density averaged over the Maxwell velocity distribution.

    At T = 0 this equals ``probability`` evaluated at zero drift velocity.
    """
    red = nondimensionalize(params, consts)
    s = red.scales
    xr = np.asarray(x, dtype=float) / s.x_unit
    tr = np.asarray(t, dtype=float) / s.t_quantum
    return _thermal_density(xr, tr, red.r, red.theta) / s.x_unit


@dataclass(frozen=True)
class WidthPair:
    """Single-packet variances at time t.

    ``w2_conditional`` is the variance at fixed drift velocity,
    sigma^2*(1 + (t/t_quantum)^2); ``w2_thermal`` adds the thermal spread
    (k*T/m)*t^2. Both are areas in the square of the input length unit.
    """

    w2_conditional: object
    w2_thermal: object

    def __post_init__(self) -> None:
        if np.any(np.asarray(self.w2_conditional) <= 0.0):
            raise ValueError("conditional variance must be positive")
        if np.any(np.asarray(self.w2_thermal) < np.asarray(self.w2_conditional)):
            raise ValueError("thermal variance cannot fall below the conditional one")


def packet_width_sq(params: CatParams, t, consts: PhysicalConstants = CODATA) -> WidthPair:
    """Conditional and thermal single-packet variances at time t."""
    red = nondimensionalize(params, consts)
    s = red.scales
    tr = np.asarray(t, dtype=float) / s.t_quantum
    tt2 = tr * tr
    s2 = s.x_unit * s.x_unit
    w2c = s2 * (1.0 + tt2)
    w2t = w2c + s2 * (red.theta * tt2)
    return WidthPair(w2c, w2t)


def log_attenuation(params: CatParams, t, consts: PhysicalConstants = CODATA):
    """Exact exponent of the attenuation factor, usable where a(t) underflows."""
    red = nondimensionalize(params, consts)
    tr = np.asarray(t, dtype=float) / red.scales.t_quantum
    return _log_attenuation(tr, red.r, red.theta)


def attenuation(params: CatParams, t, consts: PhysicalConstants = CODATA):
    """Interference attenuation factor a(t) in (0, 1]; a(0) = 1.

    Computed in the log domain and exponentiated; for strongly macroscopic
    separations the value underflows to 0.0 and :func:`log_attenuation`
    should be used instead.
    """
    return np.exp(log_attenuation(params, t, consts))
