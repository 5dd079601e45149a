"""Physical constants, cat-state inputs, and the reduced-unit scaling layer.

All heavy math in this package runs on dimensionless variables: lengths in
units of the packet width ``sigma`` and times in units of the quantum
spreading time ``2*m*sigma**2/hbar``. SI values appear only at the API
boundary. This keeps intermediate products such as ``hbar**2`` (~1e-68 in
SI units) far away from the underflow threshold of double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants as _codata

__all__ = [
    "PhysicalConstants",
    "CODATA",
    "CatParams",
    "Scales",
    "ReducedParams",
    "derive_scales",
    "nondimensionalize",
    "redimensionalize",
    "from_reduced",
]


def _require_finite(**fields: float) -> None:
    for name, value in fields.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PhysicalConstants:
    """Reduced Planck constant and Boltzmann constant, SI (CODATA) by default.

    The defaults come from :mod:`scipy.constants` at full double precision.
    Alternative unit systems are supported only through explicit
    construction, e.g. ``PhysicalConstants.natural()`` for hbar = k = 1.
    """

    hbar: float = _codata.hbar
    k_boltzmann: float = _codata.k

    def __post_init__(self) -> None:
        _require_finite(hbar=self.hbar, k_boltzmann=self.k_boltzmann)
        if self.hbar <= 0.0 or self.k_boltzmann <= 0.0:
            raise ValueError("physical constants must be strictly positive")

    @classmethod
    def natural(cls, hbar: float = 1.0, k_boltzmann: float = 1.0) -> "PhysicalConstants":
        """Unit-system override, e.g. hbar = k = 1 for dimensionless work."""
        return cls(hbar=hbar, k_boltzmann=k_boltzmann)


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class CatParams:
    """Inputs for a free particle prepared in a two-Gaussian superposition.

    Parameters
    ----------
    mass : float
        Particle mass [kg].
    sigma : float
        Width of each packet [m].
    separation : float
        Distance between the two packet centers [m].
    drift_velocity : float
        Common packet velocity [m/s].
    temperature : float
        Environment temperature [K]. Zero is a valid input and selects the
        pure quantum-spreading limit (no thermal velocity distribution).
    """

    mass: float
    sigma: float
    separation: float
    drift_velocity: float = 0.0
    temperature: float = 0.0

    def __post_init__(self) -> None:
        _require_finite(
            mass=self.mass,
            sigma=self.sigma,
            separation=self.separation,
            drift_velocity=self.drift_velocity,
            temperature=self.temperature,
        )
        if self.mass <= 0.0:
            raise ValueError("mass must be strictly positive")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be strictly positive")
        if self.separation < 0.0:
            raise ValueError("separation must be nonnegative")
        if self.temperature < 0.0:
            raise ValueError("temperature must be nonnegative")


@dataclass(frozen=True)
class Scales:
    """Characteristic scales of a parameter set.

    ``x_unit`` is the packet width, ``t_quantum = 2*m*sigma**2/hbar`` the
    quantum spreading time (a single packet's variance doubles there),
    ``v_thermal = sqrt(k*T/m)`` the thermal velocity, and
    ``t_thermal = sigma/v_thermal`` the time for thermal motion to cross one
    packet width. At T = 0, ``v_thermal`` is 0 and ``t_thermal`` is inf.
    """

    x_unit: float
    t_quantum: float
    t_thermal: float
    v_thermal: float

    def __post_init__(self) -> None:
        if not (self.x_unit > 0.0 and self.t_quantum > 0.0):
            raise ValueError("x_unit and t_quantum must be strictly positive")
        if self.v_thermal < 0.0 or self.t_thermal <= 0.0:
            raise ValueError("thermal scales out of range")


@dataclass(frozen=True)
class ReducedParams:
    """Dimensionless parameter set.

    ``r`` is separation/sigma, ``u`` the drift velocity in units of
    sigma/t_quantum, and ``theta`` the squared thermal velocity in the same
    velocity unit. All densities and attenuation values depend on the inputs
    only through (r, u, theta) and the reduced time t/t_quantum.
    """

    r: float
    u: float
    theta: float
    scales: Scales


def derive_scales(params: CatParams, consts: PhysicalConstants = CODATA) -> Scales:
    """Characteristic length, quantum time, and thermal scales for ``params``."""
    sigma = params.sigma
    t_quantum = 2.0 * params.mass * sigma * sigma / consts.hbar
    if params.temperature > 0.0:
        v_thermal = math.sqrt(consts.k_boltzmann * params.temperature / params.mass)
        t_thermal = sigma / v_thermal
    else:
        v_thermal = 0.0
        t_thermal = math.inf
    return Scales(x_unit=sigma, t_quantum=t_quantum, t_thermal=t_thermal, v_thermal=v_thermal)


def nondimensionalize(params: CatParams, consts: PhysicalConstants = CODATA) -> ReducedParams:
    """Map SI inputs onto the dimensionless (r, u, theta) record."""
    scales = derive_scales(params, consts)
    q = scales.x_unit / scales.t_quantum
    ratio = scales.t_quantum / scales.x_unit
    theta = (consts.k_boltzmann * params.temperature / params.mass) * (ratio * ratio)
    return ReducedParams(
        r=params.separation / scales.x_unit,
        u=params.drift_velocity / q,
        theta=theta,
        scales=scales,
    )


def redimensionalize(reduced: ReducedParams, consts: PhysicalConstants = CODATA) -> CatParams:
    """Invert :func:`nondimensionalize`; round-trips to a few ulp per field."""
    s = reduced.scales
    sigma = s.x_unit
    mass = consts.hbar * s.t_quantum / (2.0 * sigma * sigma)
    q = sigma / s.t_quantum
    ratio = s.t_quantum / sigma
    kt_over_m = reduced.theta / (ratio * ratio)
    return CatParams(
        mass=mass,
        sigma=sigma,
        separation=reduced.r * sigma,
        drift_velocity=reduced.u * q,
        temperature=kt_over_m * mass / consts.k_boltzmann,
    )


def from_reduced(r: float, u: float = 0.0, theta: float = 0.0) -> tuple[CatParams, PhysicalConstants]:
    """Concrete realization of a dimensionless parameter set.

    Builds the hbar = k = mass = sigma = 1 unit system, in which the quantum
    spreading time is exactly 2. Because every scale factor is a power of
    two, ``nondimensionalize`` recovers (r, u, theta) bit-exactly.

    Returns
    -------
    (params, consts) ready for any API in this package.
    """
    consts = PhysicalConstants.natural()
    params = CatParams(
        mass=1.0,
        sigma=1.0,
        separation=r,
        drift_velocity=0.5 * u,
        temperature=0.25 * theta,
    )
    return params, consts
