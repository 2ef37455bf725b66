"""Exception types shared across the toolkit."""


class FisherStefanError(Exception):
    """Base class for numerical failures raised by this package."""


class NoCrossing(FisherStefanError):
    """The unstable manifold never reaches ``u = 0`` (no half-line wave)."""


class NumericalFailure(FisherStefanError):
    """An integrator, quadrature or time stepper did not produce a usable result."""


class Undecided(FisherStefanError):
    """A simulation was too short to classify as vanishing or spreading."""


class OutOfRange(ValueError):
    """A requested value lies outside the range the toolkit can resolve.

    ``limit`` carries the boundary that could still be resolved.
    """

    def __init__(self, message, limit=None):
        super().__init__(message)
        self.limit = limit


class SeriesDivergenceWarning(RuntimeWarning):
    """Successive terms of a power series failed to contract."""
