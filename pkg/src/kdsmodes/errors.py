"""Exception hierarchy.

Parameter problems derive from :class:`ParameterError` (a ``ValueError``) so
that callers can map them to a single "invalid input" exit path.
"""


class KdsError(Exception):
    """Base class for all errors raised by kdsmodes."""


class ParameterError(KdsError, ValueError):
    """Spacetime parameters are malformed or outside the supported family."""


class NotSubextremal(ParameterError):
    """The quartic mu(r) does not have the required number of real roots."""


class DegenerateRoots(ParameterError):
    """Two roots of mu(r) coincide to within tolerance (extremal case)."""


class OutOfChart(KdsError, ValueError):
    """A point lies outside the validity range of the requested chart."""


class QuadratureFailure(KdsError, ArithmeticError):
    pass


class StepUnderflow(KdsError, ArithmeticError):
    """Finite-difference step fell below the round-off floor."""


class NotParallel(KdsError, ArithmeticError):
    """nabla_W W is not parallel to W on the horizon."""


class BlockFormViolation(KdsError, ArithmeticError):
    def __init__(self, component, magnitude):
        super().__init__(f"component {component} = {magnitude:.3e} violates the null normal form")
        self.component = component
        self.magnitude = magnitude


class IntegrationFailure(KdsError, RuntimeError):
    pass


class ChartExit(IntegrationFailure):
    """A trajectory left the coordinate window it was launched in."""


LeftChart = ChartExit


class CharSetViolation(KdsError, ArithmeticError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotRadial(KdsError, ArithmeticError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class GridTooCoarse(KdsError, ValueError):
    pass


class LambdaZeroUnsupported(KdsError, NotImplementedError):
    """Spectral solving needs a cosmological horizon (Lambda > 0)."""


class EigensolverFailure(KdsError, RuntimeError):
    pass


class ZeroVector(KdsError, ValueError):
    pass


class IntervalOutOfDomain(KdsError, ValueError):
    pass
