"""Exceptions raised by the calculus engine and the verification pipeline."""


class QKTwistError(Exception):
    """Base class for all engine errors."""


class ChartMismatch(QKTwistError):
    """Operands live on different charts."""


class DegreeError(QKTwistError):
    """A form has the wrong degree for the requested operation."""


class DenominatorVanishes(QKTwistError):
    """A coefficient denominator vanishes at an evaluation point."""

    def __init__(self, component, point):
        super().__init__(f"denominator vanishes at {point} in component {component}")
        self.component = component
        self.point = point


class MomentMapMismatch(QKTwistError):
    """The supplied moment map candidate does not satisfy d(mu) = alpha_I."""


class NotClosed(QKTwistError):
    """A form required to be closed is not."""


class NotInvariant(QKTwistError):
    """A tensor required to be invariant under the symmetry is not."""


class NotExact(QKTwistError):
    """d(beta) differs from the prescribed curvature form."""


class NotBasic(QKTwistError):
    """A form on the extended chart is not basic for the lifted field."""


class NotACoframe(QKTwistError):
    """Supplied forms are linearly dependent at a sample point."""


class NotExpressible(QKTwistError):
    """d of a coframe element does not lie in the span of coframe wedges."""


class NullSymmetry(QKTwistError):
    """The rotating field is null and the twist pipeline cannot proceed."""


class PoleEverywhere(QKTwistError):
    """mu - c vanishes identically; the canonical deformation is undefined."""


class DegenerateAtPoint(QKTwistError):
    """A metric is degenerate at the evaluation point."""


class Unsolvable(QKTwistError):
    """An exact linear or polynomial system has no solution."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}
