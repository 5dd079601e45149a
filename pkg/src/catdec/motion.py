"""General attenuation formula driven by a pluggable stochastic motion model.

The attenuation of the interference term can be written for any stationary
motion of the packet centers in terms of two lag functions: the mean-square
displacement ``s(t) = <{x(t1) - x(t1+t)}^2>`` and the magnitude ``chi(t)``
of the (purely imaginary) unequal-time position commutator
``[x(t1), x(t1+t)] = i*chi(t)``. The effective single-packet variance is

    w2_exact(t) = sigma^2 + chi(t)^2/(4*sigma^2) + s(t)

(the commutator enters squared, so the imaginary unit turns the formal minus
sign into a plus), and the attenuation exponent is s(t)*d^2/(8*sigma^2*
w2_exact(t)). For a free particle, s(t) = (k*T/m)*t^2 and chi(t) = hbar*t/m,
which reproduces :func:`catdec.closedform.attenuation` identically.

Only the free-particle model ships here; models with dissipation can be
supplied by the caller as a pair of vectorized scalar functions of the lag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .units import CODATA, PhysicalConstants

__all__ = [
    "MotionModel",
    "free_particle_model",
    "exact_width_sq",
    "exact_attenuation",
    "exact_log_attenuation",
]


@dataclass(frozen=True)
class MotionModel:
    """Stationary packet-center motion: mean-square displacement and commutator.

    Both callables must be pure, vectorized over the lag, and depend only on
    the lag (stationarity); ``mean_square_displacement`` returns an area,
    ``commutator_magnitude`` an area (length^2, the hbar*t/m combination for
    free motion). Both must vanish at zero lag.
    """

    mean_square_displacement: Callable
    commutator_magnitude: Callable
    label: str = ""

    def __post_init__(self) -> None:
        s0 = float(self.mean_square_displacement(0.0))
        chi0 = float(self.commutator_magnitude(0.0))
        if s0 != 0.0:
            raise ValueError(f"mean_square_displacement(0) must be 0, got {s0!r}")
        if chi0 != 0.0:
            raise ValueError(f"commutator_magnitude(0) must be 0, got {chi0!r}")


def free_particle_model(
    mass: float, temperature: float, consts: PhysicalConstants = CODATA
) -> MotionModel:
    """Dissipation-free thermal motion: s(t) = (k*T/m)*t^2, chi(t) = hbar*t/m."""
    if mass <= 0.0:
        raise ValueError("mass must be strictly positive")
    if temperature < 0.0:
        raise ValueError("temperature must be nonnegative")
    kt_over_m = consts.k_boltzmann * temperature / mass
    hbar_over_m = consts.hbar / mass

    def displacement(t):
        return kt_over_m * np.square(np.asarray(t, dtype=float))

    def commutator(t):
        return hbar_over_m * np.asarray(t, dtype=float)

    return MotionModel(displacement, commutator, label="free particle")


def exact_width_sq(model: MotionModel, sigma: float, t):
    """Single-packet variance sigma^2 + chi^2/(4*sigma^2) + s(t)."""
    chi_over_sigma = np.asarray(model.commutator_magnitude(t), dtype=float) / sigma
    s_val = np.asarray(model.mean_square_displacement(t), dtype=float)
    return sigma * sigma + 0.25 * (chi_over_sigma * chi_over_sigma) + s_val


def exact_log_attenuation(model: MotionModel, sigma: float, separation: float, t):
    """Log attenuation exponent -(s/w2_exact)*(d^2/(8*sigma^2)), always <= 0."""
    if sigma <= 0.0:
        raise ValueError("sigma must be strictly positive")
    if separation < 0.0:
        raise ValueError("separation must be nonnegative")
    chi_over_sigma = np.asarray(model.commutator_magnitude(t), dtype=float) / sigma
    s_val = np.asarray(model.mean_square_displacement(t), dtype=float)
    w2_exact = sigma * sigma + 0.25 * (chi_over_sigma * chi_over_sigma) + s_val
    d_over_sigma = separation / sigma
    geom = (d_over_sigma * d_over_sigma) / 8.0
    return -(s_val / w2_exact) * geom + 0.0


def exact_attenuation(model: MotionModel, sigma: float, separation: float, t):
    """Attenuation factor exp of :func:`exact_log_attenuation`, in (0, 1]."""
    return np.exp(exact_log_attenuation(model, sigma, separation, t))
