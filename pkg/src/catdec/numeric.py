"""Independent numerical routes to the densities and the attenuation factor.

Everything here works on dimensionless grids (lengths in sigma, times in the
quantum spreading time; see :mod:`catdec.units`); SI inputs are scaled down
on entry. Three routes are provided:

* a momentum-space spectral propagator for the free evolution (exact up to
  transform rounding for band-limited states),
* Gauss-Hermite quadrature over the Maxwell velocity distribution (the
  Maxwell weight is exactly the Hermite weight after v = sqrt(2kT/m)*u), and
* a definitional extraction of the attenuation factor from sampled densities
  (interference envelope over twice the geometric mean of the packet terms).

None of these share the algebra of :mod:`catdec.closedform` beyond the
initial-state definition, which makes them usable as ground truth in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_hermite

from . import closedform
from .errors import (
    AliasingError,
    GridSizeError,
    InterferenceFloorError,
    QuadratureConvergenceError,
)
from .units import CODATA, CatParams, PhysicalConstants, nondimensionalize

__all__ = [
    "Grid1D",
    "ComplexField",
    "RealField",
    "QuadratureSpec",
    "MonteCarloResult",
    "build_grid",
    "initial_field",
    "spectral_propagate",
    "thermal_average",
    "spectral_thermal_density",
    "monte_carlo_thermal_average",
    "numeric_attenuation",
]

MAX_GRID_POINTS = 2**24
MIN_GRID_POINTS = 256

# Maxwell tail coverage: velocity nodes out to this many standard deviations
# carry weights above ~1e-19 and must fit on the grid without wrap-around.
_THERMAL_SPAN_STD = 6.5

# Quadrature nodes with normalized weight below this contribute less than
# 2048 * 1e-20 to any bounded integrand and are skipped.
_NEGLIGIBLE_WEIGHT = 1e-20

# Fraction of the spectral norm tolerated in the top eighth of the momentum
# band before propagation is refused as aliased.
_ALIAS_TOL = 1e-10


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic-convention grid: n_points samples, endpoint excluded.

    Coordinates are dimensionless (units of sigma). ``n_points`` must be a
    power of two >= 256 so transforms stay fast and the origin is a sample.
    """

    x_min: float
    x_max: float
    n_points: int
    dx: float = field(init=False)

    def __post_init__(self) -> None:
        n = self.n_points
        if n < MIN_GRID_POINTS or (n & (n - 1)) != 0:
            raise ValueError(f"n_points must be a power of two >= {MIN_GRID_POINTS}, got {n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        object.__setattr__(self, "dx", (self.x_max - self.x_min) / n)

    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers in FFT layout, matching np.fft.fft output order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)


@dataclass(frozen=True)
class ComplexField:
    """Sampled complex wavefunction on a :class:`Grid1D`."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise ValueError("values length must equal grid.n_points")
        object.__setattr__(self, "values", values)

    def norm(self) -> float:
        """Discrete L2 norm sum(|psi|^2)*dx."""
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx)

    def density(self) -> "RealField":
        return RealField(self.grid, np.abs(self.values) ** 2)


@dataclass(frozen=True)
class RealField:
    """Sampled probability density; tiny negative quadrature noise tolerated."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise ValueError("values length must equal grid.n_points")
        if np.min(values) < -1e-12:
            raise ValueError("density values below the -1e-12 noise floor")
        object.__setattr__(self, "values", values)

    def norm(self) -> float:
        return float(np.sum(self.values) * self.grid.dx)

    def exported_values(self) -> np.ndarray:
        """Values with negative quadrature noise clamped to zero."""
        return np.maximum(self.values, 0.0)


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Hermite velocity-average controls: start order, tolerance, cap."""

    order: int = 80
    convergence_tol: float = 1e-12
    max_order: int = 2048

    def __post_init__(self) -> None:
        if not (8 <= self.order <= self.max_order <= 2048):
            raise ValueError("need 8 <= order <= max_order <= 2048")
        if not self.convergence_tol > 0.0:
            raise ValueError("convergence_tol must be positive")


def _next_pow2(n: float) -> int:
    return 1 << max(0, math.ceil(math.log2(max(n, 1.0))))


def build_grid(params: CatParams, t_max, consts: PhysicalConstants = CODATA) -> Grid1D:
    """Grid that holds the state up to ``t_max`` without wrap-around or aliasing.

    The half-width covers the packet separation, the drift plus the sampled
    Maxwell-velocity excursions over t_max, and eight thermal widths of
    padding; the point count also guarantees a Nyquist wavenumber at least
    eight inverse widths above the largest packet momentum. Raises
    :class:`GridSizeError` past 2**24 points, which is where macroscopic
    SI-scale separations land; such runs need dimensionless inputs.
    """
    if t_max < 0.0:
        raise ValueError("t_max must be nonnegative")
    red = nondimensionalize(params, consts)
    tt = t_max / red.scales.t_quantum
    w_red = math.sqrt(1.0 + (1.0 + red.theta) * tt * tt)
    u_eff = abs(red.u) + _THERMAL_SPAN_STD * math.sqrt(2.0 * red.theta)
    half_width = 0.5 * red.r + u_eff * tt + 8.0 * w_red
    k_required = 0.5 * u_eff + 8.0
    n_needed = max(MIN_GRID_POINTS, 2.0 * half_width * k_required / math.pi)
    n = _next_pow2(n_needed)
    if n > MAX_GRID_POINTS:
        raise GridSizeError(
            f"grid would need {n} > 2^24 points (separation/sigma = {red.r:.3g}); "
            "macroscopic SI separations cannot be sampled -- run in reduced units"
        )
    return Grid1D(x_min=-half_width, x_max=half_width, n_points=n)


def initial_field(params: CatParams, grid: Grid1D, consts: PhysicalConstants = CODATA) -> ComplexField:
    """The initial two-packet state sampled on ``grid`` (reduced units)."""
    red = nondimensionalize(params, consts)
    return ComplexField(grid, closedform._initial_psi(grid.points(), red.r, red.u))


def _check_aliasing(psi_hat: np.ndarray, k: np.ndarray) -> None:
    band = np.abs(k) >= 0.875 * np.max(np.abs(k))
    power = np.abs(psi_hat) ** 2
    total = float(np.sum(power))
    if total == 0.0:
        return
    tail = float(np.sum(power[band])) / total
    if tail > _ALIAS_TOL:
        raise AliasingError(
            f"spectral mass {tail:.3e} near the Nyquist edge exceeds {_ALIAS_TOL:g}; "
            "the state is not resolved on this grid"
        )


def spectral_propagate(
    initial: ComplexField, params: CatParams, t, consts: PhysicalConstants = CODATA
) -> ComplexField:
    """Evolve a sampled state freely for time t >= 0 in momentum space.

    Unitary-normalized transforms; each mode is multiplied by
    exp(-i*k^2*t/t_quantum) (the reduced free dispersion). Norm is preserved
    to transform rounding. Raises :class:`AliasingError` when more than 1e-10
    of the spectral norm sits in the top eighth of the momentum band.
    """
    tt = float(t) / nondimensionalize(params, consts).scales.t_quantum
    if tt < 0.0:
        raise ValueError("t must be nonnegative")
    psi_hat = np.fft.fft(initial.values, norm="ortho")
    k = initial.grid.wavenumbers()
    _check_aliasing(psi_hat, k)
    if tt == 0.0:
        return ComplexField(initial.grid, initial.values.copy())
    evolved = np.fft.ifft(psi_hat * np.exp(-1j * (k * k) * tt), norm="ortho")
    return ComplexField(initial.grid, evolved)


def _hermite_average(fn, theta: float, spec: QuadratureSpec | None):
    """Average fn over the Maxwell velocity weight by order-doubling quadrature.

    ``fn`` maps a reduced drift velocity to an array; arrays of any common
    shape are allowed. Returns (values, orders, deltas, last_diff), where
    ``deltas`` are the max-norm differences between successive orders and
    ``last_diff`` the final elementwise difference (a per-entry noise
    estimate). Nodes are always accumulated in ascending order so results
    are schedule-independent.
    """
    if spec is None:
        spec = QuadratureSpec()
    scale = math.sqrt(2.0 * theta)
    inv_sqrt_pi = 1.0 / math.sqrt(math.pi)
    order = spec.order
    prev = None
    orders: list[int] = []
    deltas: list[float] = []
    while True:
        nodes, weights = roots_hermite(order)
        acc = None
        for node, weight in zip(nodes, weights):
            w_norm = weight * inv_sqrt_pi
            if w_norm < _NEGLIGIBLE_WEIGHT:
                continue
            term = w_norm * np.asarray(fn(scale * node), dtype=float)
            acc = term if acc is None else acc + term
        orders.append(order)
        if prev is not None:
            diff = acc - prev
            delta = float(np.max(np.abs(diff)))
            deltas.append(delta)
            if delta < spec.convergence_tol:
                return acc, orders, deltas, diff
        prev = acc
        if order >= spec.max_order:
            raise QuadratureConvergenceError(
                f"velocity quadrature not converged at order {order} "
                f"(last delta {deltas[-1] if deltas else float('nan'):.3e}, "
                f"tol {spec.convergence_tol:g})"
            )
        order = min(2 * order, spec.max_order)


def thermal_average(
    params: CatParams,
    t,
    grid: Grid1D,
    spec: QuadratureSpec | None = None,
    consts: PhysicalConstants = CODATA,
    density_fn=None,
) -> RealField:
    """Maxwell-average a velocity-conditioned density over the thermal spread.

    ``density_fn(u)`` must return density samples on ``grid`` for reduced
    drift velocity u; it defaults to the closed-form single-velocity density,
    so the default result is the thermally averaged density computed by
    quadrature instead of in closed form. At T = 0 the Maxwell weight
    collapses to a point mass at zero velocity and the u = 0 density is
    returned directly.
    """
    red = nondimensionalize(params, consts)
    tt = float(t) / red.scales.t_quantum
    x = grid.points()
    if density_fn is None:
        def density_fn(u):
            return closedform._density(x, tt, red.r, u)

    if red.theta == 0.0:
        return RealField(grid, np.asarray(density_fn(0.0), dtype=float))
    values, _, _, _ = _hermite_average(density_fn, red.theta, spec)
    return RealField(grid, values)


def spectral_thermal_density(
    params: CatParams,
    t,
    grid: Grid1D | None = None,
    spec: QuadratureSpec | None = None,
    consts: PhysicalConstants = CODATA,
) -> RealField:
    """Thermal density via initial state -> spectral propagation -> |.|^2 -> average.

    This is the fully numerical route: apart from the definition of the
    initial state it shares no algebra with the closed forms, so it serves
    as end-to-end ground truth for them.
    """
    if grid is None:
        grid = build_grid(params, t, consts)
    red = nondimensionalize(params, consts)
    x = grid.points()

    def propagated_density(u):
        psi0 = ComplexField(grid, closedform._initial_psi(x, red.r, u))
        return np.abs(spectral_propagate(psi0, params, t, consts).values) ** 2

    return thermal_average(params, t, grid, spec, consts, density_fn=propagated_density)


@dataclass(frozen=True)
class MonteCarloResult:
    """Sample-mean density with its pointwise standard error."""

    field: RealField
    std_error: np.ndarray
    n_samples: int
    seed: int


def monte_carlo_thermal_average(
    params: CatParams,
    t,
    grid: Grid1D,
    n_samples: int,
    seed: int,
    consts: PhysicalConstants = CODATA,
) -> MonteCarloResult:
    """Thermal density by averaging over Maxwell-sampled drift velocities.

    Deterministic for a fixed seed: the velocity stream comes from
    ``numpy.random.default_rng(seed)`` and is consumed in fixed-size chunks,
    accumulated in a fixed order (chunked Welford update).
    """
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    red = nondimensionalize(params, consts)
    tt = float(t) / red.scales.t_quantum
    x = grid.points()
    sqrt_theta = math.sqrt(red.theta)
    rng = np.random.default_rng(seed)
    chunk = max(256, 4_194_304 // grid.n_points)
    mean = np.zeros(grid.n_points)
    m2 = np.zeros(grid.n_points)
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        u_samples = rng.normal(0.0, sqrt_theta, size=m)
        vals = closedform._density(x[None, :], tt, red.r, u_samples[:, None])
        chunk_mean = vals.mean(axis=0)
        chunk_m2 = np.sum((vals - chunk_mean) ** 2, axis=0)
        total = done + m
        delta = chunk_mean - mean
        mean += delta * (m / total)
        m2 += chunk_m2 + (delta * delta) * (done * m / total)
        done = total
    variance = m2 / (done - 1)
    std_error = np.sqrt(variance / done)
    return MonteCarloResult(RealField(grid, mean), std_error, done, seed)


def numeric_attenuation(
    params: CatParams,
    t,
    spec: QuadratureSpec | None = None,
    *,
    grid: Grid1D | None = None,
    consts: PhysicalConstants = CODATA,
) -> float:
    """Attenuation factor extracted from thermally averaged density terms.

    The two packet terms and the interference term of the single-velocity
    density are Maxwell-averaged separately. The interference envelope is
    located as the peak modulus of the averaged cross term; there the known
    fringe phase is divided out and the envelope value is compared with
    twice the geometric mean of the packet terms at the same point. That
    pointwise ratio is position-independent for these densities, so the
    result is the attenuation factor itself, accurate to quadrature noise.
    Agrees with the closed-form a(t) wherever the envelope stays above the
    1e-300 floor.
    """
    red = nondimensionalize(params, consts)
    tt = float(t) / red.scales.t_quantum
    if grid is None:
        grid = build_grid(params, t, consts)
    x = grid.points()

    def branch_terms(u):
        return np.stack(closedform._density_terms(x, tt, red.r, u))

    if red.theta == 0.0:
        stacked = np.asarray(branch_terms(0.0), dtype=float)
        cross_noise = 0.0
    else:
        stacked, _, _, last_diff = _hermite_average(branch_terms, red.theta, spec)
        # Thermal averaging cancels the cross term almost completely in the
        # decohered regime; the surviving signal must stand clear of the
        # quadrature noise, estimated from the last order-doubling step.
        cross_noise = float(np.max(np.abs(last_diff[2])))
    packet1, packet2, cross = stacked

    signal = float(np.max(np.abs(cross)))
    if signal < max(1e-300, 100.0 * cross_noise):
        raise InterferenceFloorError(
            "interference envelope is below the extraction noise floor; "
            "use log_attenuation for this regime"
        )

    # The envelope peaks where |cross| peaks (the fringe cosine is near +-1
    # there, and the grid always samples the symmetry point x = 0 exactly).
    i_star = int(np.argmax(np.abs(cross)))
    kappa = float(closedform._fringe_wavenumber(tt, red.r, red.theta))
    fringe = math.cos(kappa * x[i_star])
    geometric_mean = math.sqrt(packet1[i_star] * packet2[i_star])
    return float(cross[i_star] / (2.0 * geometric_mean * fringe))
