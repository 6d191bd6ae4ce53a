"""Symmetric 2-tensors (metrics) and endomorphism fields on a chart."""

from __future__ import annotations

from fractions import Fraction
from typing import List

from .chart import Chart, Point
from .errors import ChartMismatch, QKTwistError
from .forms import DifferentialForm, VectorField, exterior_derivative, interior_product, lie_derivative, scalar_derivative
from .scalars import CoefficientFunction, Polynomial


def _coerce(chart, value) -> CoefficientFunction:
    if isinstance(value, CoefficientFunction):
        return value
    if isinstance(value, Polynomial):
        return CoefficientFunction(value)
    if isinstance(value, (int, Fraction)):
        return CoefficientFunction.const(chart.ring, value)
    raise QKTwistError(f"bad tensor entry type {type(value).__name__}")


class MetricTensor:
    """Symmetric matrix of coefficients in the chart coframe."""

    __slots__ = ("chart", "rows")

    def __init__(self, chart: Chart, rows):
        n = chart.dim
        rows = [[_coerce(chart, rows[i][j]) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if not (rows[i][j] - rows[j][i]).is_zero:
                    raise QKTwistError(f"metric not symmetric at ({i},{j})")
        self.chart = chart
        self.rows = tuple(tuple(r) for r in rows)

    @classmethod
    def diagonal(cls, chart: Chart, entries) -> "MetricTensor":
        n = chart.dim
        zero = CoefficientFunction.const(chart.ring, 0)
        rows = [[zero] * n for _ in range(n)]
        for i, e in enumerate(entries):
            rows[i][i] = _coerce(chart, e)
        return cls(chart, rows)

    @classmethod
    def zero(cls, chart: Chart) -> "MetricTensor":
        return cls.diagonal(chart, [0] * chart.dim)

    @classmethod
    def square_of_one_form(cls, alpha: DifferentialForm) -> "MetricTensor":
        """Symmetric square alpha . alpha (components alpha_i alpha_j)."""
        if alpha.degree != 1:
            raise QKTwistError("square_of_one_form expects a 1-form")
        chart = alpha.chart
        n = chart.dim
        comps = [alpha.component((i,)) for i in range(n)]
        rows = [[comps[i] * comps[j] for j in range(n)] for i in range(n)]
        return cls(chart, rows)

    def entry(self, i: int, j: int) -> CoefficientFunction:
        return self.rows[i][j]

    def __add__(self, other):
        if not isinstance(other, MetricTensor):
            return NotImplemented
        if self.chart is not other.chart:
            raise ChartMismatch("metrics on different charts")
        n = self.chart.dim
        return MetricTensor(
            self.chart,
            [[self.rows[i][j] + other.rows[i][j] for j in range(n)] for i in range(n)],
        )

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, value) -> "MetricTensor":
        coeff = _coerce(self.chart, value)
        n = self.chart.dim
        return MetricTensor(
            self.chart, [[self.rows[i][j] * coeff for j in range(n)] for i in range(n)]
        )

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, MetricTensor):
            return NotImplemented
        n = self.chart.dim
        return all(
            (self.rows[i][j] - other.rows[i][j]).is_zero for i in range(n) for j in range(n)
        )

    def __hash__(self):
        return hash(id(self.chart))

    def lower(self, X: VectorField) -> DifferentialForm:
        """The 1-form g(X, .)."""
        if X.chart is not self.chart:
            raise ChartMismatch("lower across charts")
        n = self.chart.dim
        comps = {}
        for k in range(n):
            acc = CoefficientFunction.const(self.chart.ring, 0)
            for m in range(n):
                acc = acc + X.comps[m] * self.rows[m][k]
            if not acc.is_zero:
                comps[(k,)] = acc
        return DifferentialForm(self.chart, 1, comps)

    def pair(self, X: VectorField, Y: VectorField) -> CoefficientFunction:
        return X.pair(self.lower(Y))

    def eval_at(self, point: Point):
        n = self.chart.dim
        return [[self.rows[i][j].eval_at(point.values, where=(i, j)) for j in range(n)] for i in range(n)]

    def lie_derivative(self, X: VectorField) -> "MetricTensor":
        """(L_X g) through Lie derivatives of the coframe."""
        chart = self.chart
        n = chart.dim
        ltheta = [lie_derivative(X, DifferentialForm.coframe(chart, m)) for m in range(n)]
        lt = [[ltheta[m].component((a,)) for a in range(n)] for m in range(n)]
        rows = []
        for a in range(n):
            row = []
            for b in range(n):
                acc = scalar_derivative(X, self.rows[a][b])
                for m in range(n):
                    acc = acc + self.rows[m][b] * lt[m][a] + self.rows[a][m] * lt[m][b]
                row.append(acc)
            rows.append(row)
        return MetricTensor(chart, rows)


class EndomorphismField:
    """Endomorphism of the frame: (A e_j) = sum_i rows[i][j] e_i."""

    __slots__ = ("chart", "rows")

    def __init__(self, chart: Chart, rows):
        n = chart.dim
        self.chart = chart
        self.rows = tuple(tuple(_coerce(chart, rows[i][j]) for j in range(n)) for i in range(n))

    @classmethod
    def identity(cls, chart: Chart) -> "EndomorphismField":
        return cls(chart, [[1 if i == j else 0 for j in range(chart.dim)] for i in range(chart.dim)])

    @classmethod
    def from_blocks(cls, chart: Chart, blocks) -> "EndomorphismField":
        """Block-diagonal endomorphism from a list of square matrices."""
        n = chart.dim
        rows = [[Fraction(0)] * n for _ in range(n)]
        offset = 0
        for block in blocks:
            k = len(block)
            for i in range(k):
                for j in range(k):
                    rows[offset + i][offset + j] = block[i][j]
            offset += k
        if offset != n:
            raise QKTwistError("blocks do not fill the dimension")
        return cls(chart, rows)

    def entry(self, i: int, j: int) -> CoefficientFunction:
        return self.rows[i][j]

    def apply(self, X: VectorField) -> VectorField:
        n = self.chart.dim
        comps = []
        for i in range(n):
            acc = CoefficientFunction.const(self.chart.ring, 0)
            for j in range(n):
                acc = acc + self.rows[i][j] * X.comps[j]
            comps.append(acc)
        return VectorField(self.chart, comps)

    def compose(self, other: "EndomorphismField") -> "EndomorphismField":
        n = self.chart.dim
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = CoefficientFunction.const(self.chart.ring, 0)
                for k in range(n):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            rows.append(row)
        return EndomorphismField(self.chart, rows)

    def scale(self, value) -> "EndomorphismField":
        coeff = _coerce(self.chart, value)
        n = self.chart.dim
        return EndomorphismField(self.chart, [[self.rows[i][j] * coeff for j in range(n)] for i in range(n)])

    def __add__(self, other):
        if not isinstance(other, EndomorphismField):
            return NotImplemented
        n = self.chart.dim
        return EndomorphismField(
            self.chart, [[self.rows[i][j] + other.rows[i][j] for j in range(n)] for i in range(n)]
        )

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def __eq__(self, other):
        if not isinstance(other, EndomorphismField):
            return NotImplemented
        n = self.chart.dim
        return all((self.rows[i][j] - other.rows[i][j]).is_zero for i in range(n) for j in range(n))

    def __hash__(self):
        return hash(id(self.chart))

    def residual_matrix(self, other: "EndomorphismField"):
        n = self.chart.dim
        return [[self.rows[i][j] - other.rows[i][j] for j in range(n)] for i in range(n)]

    def act_on_one_form(self, alpha: DifferentialForm) -> DifferentialForm:
        """(A alpha)(Y) = -alpha(A Y), the sign convention alpha_I = I alpha_0."""
        if alpha.degree != 1:
            raise QKTwistError("endomorphism acts on 1-forms here")
        n = self.chart.dim
        comps = {}
        for j in range(n):
            acc = CoefficientFunction.const(self.chart.ring, 0)
            for m in range(n):
                acc = acc + alpha.component((m,)) * self.rows[m][j]
            if not acc.is_zero:
                comps[(j,)] = -acc
        return DifferentialForm(self.chart, 1, comps)


def two_form_from_endomorphism(g: MetricTensor, A: EndomorphismField) -> DifferentialForm:
    """omega_A = g(A . , . ); requires the result to be antisymmetric."""
    chart = g.chart
    n = chart.dim
    omega = [[None] * n for _ in range(n)]
    for j in range(n):
        for k in range(n):
            acc = CoefficientFunction.const(chart.ring, 0)
            for m in range(n):
                acc = acc + A.rows[m][j] * g.rows[m][k]
            omega[j][k] = acc
    comps = {}
    for j in range(n):
        for k in range(j + 1, n):
            if not (omega[j][k] + omega[k][j]).is_zero:
                raise QKTwistError("g(A.,.) is not antisymmetric")
            if not omega[j][k].is_zero:
                comps[(j, k)] = omega[j][k]
    return DifferentialForm(chart, 2, comps)


def form_to_matrix(form: DifferentialForm):
    """Full antisymmetric matrix of a 2-form."""
    if form.degree != 2:
        raise QKTwistError("expected a 2-form")
    n = form.chart.dim
    zero = CoefficientFunction.const(form.chart.ring, 0)
    m = [[zero] * n for _ in range(n)]
    for (i, j), c in form.comps.items():
        m[i][j] = c
        m[j][i] = -c
    return m


def endomorphism_from_two_form(g: MetricTensor, omega: DifferentialForm) -> EndomorphismField:
    """The A with g(A e_j, e_k) = omega_{jk}, for diagonal-invertible g."""
    chart = g.chart
    n = chart.dim
    w = form_to_matrix(omega)
    from .linalg import matrix_inverse

    ginv = matrix_inverse([list(r) for r in g.rows])
    rows = []
    for m in range(n):
        row = []
        for j in range(n):
            acc = CoefficientFunction.const(chart.ring, 0)
            for k in range(n):
                acc = acc + w[j][k] * ginv[k][m]
            row.append(acc)
        rows.append(row)
    return EndomorphismField(chart, rows)
