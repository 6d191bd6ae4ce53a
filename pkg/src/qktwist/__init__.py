"""qktwist: exact exterior calculus and twist verification pipeline."""

from .chart import Chart, Point, sample_point, sample_points
from .errors import (
    ChartMismatch,
    DegenerateAtPoint,
    DegreeError,
    DenominatorVanishes,
    MomentMapMismatch,
    NotACoframe,
    NotBasic,
    NotClosed,
    NotExact,
    NotExpressible,
    NotInvariant,
    NullSymmetry,
    PoleEverywhere,
    QKTwistError,
    Unsolvable,
)
from .forms import (
    DifferentialForm,
    VectorField,
    bracket,
    exterior_derivative,
    interior_product,
    lie_derivative,
    scalar_derivative,
    wedge,
)
from .report import CheckResult, VerificationReport
from .scalars import CoefficientFunction, Polynomial, Rational, ScalarRing, parse_coefficient
from .tensors import (
    EndomorphismField,
    MetricTensor,
    endomorphism_from_two_form,
    form_to_matrix,
    two_form_from_endomorphism,
)
