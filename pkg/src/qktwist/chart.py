"""Charts: a coframe with declared structure equations plus scalar generators.

All computation happens on a single chart.  The coframe elements theta^i obey
declared 2-form structure equations d(theta^i); every scalar generator s_j has
a declared differential 1-form d(s_j).  A coordinate chart is the special case
theta^i = dx^i with zero structure equations and d(x_j) = theta^j.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import DenominatorVanishes, QKTwistError
from .scalars import CoefficientFunction, Polynomial, Rational, ScalarRing, parse_coefficient


class Chart:
    """Arena for exact exterior calculus.

    Treated as immutable once a model constructor has finished declaring the
    structure equations and scalar differentials; values built on a chart are
    safe to share across threads.
    """

    def __init__(self, name, coframe_names, scalar_names, relations=(), algebraic=(), circle_pairs=()):
        self.name = name
        self.coframe_names = tuple(coframe_names)
        self.dim = len(self.coframe_names)
        self.ring = ScalarRing(scalar_names, relations=relations, algebraic=algebraic)
        # circle pairs (cos_idx, sin_idx) are sampled on the rational unit circle
        self.circle_pairs = tuple(circle_pairs)
        self.structure: List = [None] * self.dim
        self.scalar_diffs: List = [None] * self.ring.nvars
        self._coframe_index = {n: i for i, n in enumerate(self.coframe_names)}

    # -- construction --------------------------------------------------------

    @classmethod
    def coordinate(cls, name: str, coordinates: Sequence[str]) -> "Chart":
        """Coordinate chart: theta^i = dx^i, all structure equations zero."""
        from .forms import DifferentialForm

        chart = cls(name, [f"d{c}" for c in coordinates], coordinates)
        for i in range(chart.dim):
            chart.structure[i] = DifferentialForm.zero(chart, 2)
            chart.scalar_diffs[i] = DifferentialForm.monomial(chart, (i,), Fraction(1))
        return chart

    def coframe_index(self, name: str) -> int:
        return self._coframe_index[name]

    def set_structure(self, i: int, form) -> None:
        if form.degree != 2:
            raise QKTwistError("structure equation must be a 2-form")
        self.structure[i] = form

    def set_scalar_diff(self, j: int, form) -> None:
        if form.degree != 1:
            raise QKTwistError("scalar differential must be a 1-form")
        self.scalar_diffs[j] = form

    def coefficient(self, text) -> CoefficientFunction:
        """Coefficient from the documented grammar (or a number passed through)."""
        if isinstance(text, CoefficientFunction):
            return text
        if isinstance(text, (int, Fraction)):
            return CoefficientFunction.const(self.ring, text)
        return parse_coefficient(self.ring, text)

    def scalar(self, name: str) -> CoefficientFunction:
        return CoefficientFunction.var(self.ring, name)

    def zero_coefficient(self) -> CoefficientFunction:
        return CoefficientFunction.const(self.ring, 0)

    def declared(self) -> bool:
        return all(f is not None for f in self.structure) and all(
            f is not None for f in self.scalar_diffs
        )

    # -- sampling -------------------------------------------------------------

    def free_scalars(self) -> List[int]:
        """Scalar indices that receive independent sample values."""
        taken = set()
        for c, s in self.circle_pairs:
            taken.add(c)
            taken.add(s)
        for v, _ in self.ring.algebraic:
            taken.add(v)
        return [i for i in range(self.ring.nvars) if i not in taken]

    def consistency_check(self, mode: str = "symbolic", points=(), name: Optional[str] = None):
        """Verify d(d theta^i) = 0 and d(d s_j) = 0 for the declared data."""
        from .forms import exterior_derivative
        from .report import CheckResult, VerificationReport

        report = VerificationReport(name or f"chart:{self.name}")
        for i, form in enumerate(self.structure):
            residual = exterior_derivative(form)
            report.add(
                CheckResult.residual_form(
                    f"d2_coframe_{self.coframe_names[i]}",
                    "d(d theta) = 0 for the declared structure equations",
                    residual,
                    mode=mode,
                    points=points,
                )
            )
        for j, form in enumerate(self.scalar_diffs):
            residual = exterior_derivative(form)
            report.add(
                CheckResult.residual_form(
                    f"d2_scalar_{self.ring.names[j]}",
                    "d(d s) = 0 for the declared scalar differentials",
                    residual,
                    mode=mode,
                    points=points,
                )
            )
        return report


class Point:
    """Exact rational values for the evaluable scalar generators of a chart."""

    __slots__ = ("chart", "values")

    def __init__(self, chart: Chart, values: Dict[int, Fraction]):
        self.chart = chart
        self.values = {k: Fraction(v) for k, v in values.items()}

    @classmethod
    def from_names(cls, chart: Chart, mapping) -> "Point":
        return cls(chart, {chart.ring.index(n): Fraction(v) for n, v in mapping.items()})

    def as_named(self) -> Dict[str, str]:
        return {self.chart.ring.names[i]: str(v) for i, v in sorted(self.values.items())}

    def __repr__(self):
        inner = ", ".join(f"{self.chart.ring.names[i]}={v}" for i, v in sorted(self.values.items()))
        return f"Point({inner})"


# Sampling uses Python's random.Random (Mersenne Twister), documented in the
# README: per free scalar draw a denominator d in 1..4 then a numerator in
# -10d..10d, giving the grid of rationals in [-10, 10] with denominator <= 4.
# Circle-pair scalars are drawn as cos = (1-m^2)/(1+m^2), sin = 2m/(1+m^2)
# with m on the same grid restricted to denominator <= 3, numerator in -8..8.


def _draw_fraction(rng: random.Random) -> Fraction:
    den = rng.randint(1, 4)
    num = rng.randint(-10 * den, 10 * den)
    return Fraction(num, den)


def sample_point(chart: Chart, rng: random.Random, avoid: Iterable = (), max_tries: int = 200) -> Point:
    """Draw a point with every coefficient in `avoid` nonzero and finite."""
    avoid = list(avoid)
    for _ in range(max_tries):
        values: Dict[int, Fraction] = {}
        for idx in chart.free_scalars():
            values[idx] = _draw_fraction(rng)
        for cos_idx, sin_idx in chart.circle_pairs:
            m = Fraction(rng.randint(-8, 8), rng.randint(1, 3))
            den = 1 + m * m
            values[cos_idx] = (1 - m * m) / den
            values[sin_idx] = 2 * m / den
        point = Point(chart, values)
        ok = True
        for coeff in avoid:
            try:
                value = coeff.eval_at(point.values)
            except DenominatorVanishes:
                ok = False
                break
            if isinstance(value, Fraction):
                if value == 0:
                    ok = False
                    break
            elif value.is_zero:
                ok = False
                break
        if ok:
            return point
    raise QKTwistError("could not sample an admissible point")


def sample_points(chart: Chart, count: int, seed: int, avoid: Iterable = ()) -> List[Point]:
    rng = random.Random(seed)
    return [sample_point(chart, rng, avoid=avoid) for _ in range(count)]
