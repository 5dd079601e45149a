"""Exception types shared across the package."""


class CatdecError(Exception):
    """Base class for all catdec-specific errors."""


class DegenerateInputError(CatdecError, ValueError):
    """Physically valid inputs for which the requested quantity is undefined.

    Raised e.g. for the decoherence time at zero separation or zero
    temperature, where the attenuation stays identically 1.
    """


class GridSizeError(CatdecError, ValueError):
    """The requested spatial grid would exceed the hard point-count cap."""


class AliasingError(CatdecError, RuntimeError):
    """A sampled wavefunction carries momentum content near the grid Nyquist edge."""


class QuadratureConvergenceError(CatdecError, RuntimeError):
    """Order doubling hit the quadrature order cap before reaching tolerance."""


class InterferenceFloorError(CatdecError, RuntimeError):
    """The interference envelope is numerically indistinguishable from zero.

    The attenuation cannot be extracted from sampled densities in this
    regime; use the log-domain closed form instead.
    """


class ShortTimeWindowError(CatdecError, ValueError):
    """Not enough short-time samples to fit the initial Gaussian decay."""
