"""Differential forms and vector fields with exact rational coefficients.

Forms are stored sparsely: strictly increasing multi-indices into the chart
coframe map to CoefficientFunctions; zero components are absent.  All signs
come from counting transpositions when merging index tuples, so results are
bit-for-bit reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple

from .chart import Chart, Point
from .errors import ChartMismatch, DegreeError, QKTwistError
from .scalars import CoefficientFunction, Polynomial


def _merge_indices(a: Tuple[int, ...], b: Tuple[int, ...]):
    """Merge two strictly increasing tuples; returns (sign, merged) or None."""
    sign = 1
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return None
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            if (len(a) - i) % 2:
                sign = -sign
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return sign, tuple(out)


def _coerce_scalar(chart: Chart, value) -> CoefficientFunction:
    if isinstance(value, CoefficientFunction):
        return value
    if isinstance(value, Polynomial):
        return CoefficientFunction(value)
    if isinstance(value, (int, Fraction)):
        return CoefficientFunction.const(chart.ring, value)
    if isinstance(value, str):
        return chart.coefficient(value)
    raise QKTwistError(f"cannot use {type(value).__name__} as a coefficient")


class DifferentialForm:
    """A p-form with CoefficientFunction components in the chart coframe."""

    __slots__ = ("chart", "degree", "comps")

    def __init__(self, chart: Chart, degree: int, comps: Dict[Tuple[int, ...], CoefficientFunction]):
        self.chart = chart
        self.degree = degree
        self.comps = comps

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "DifferentialForm":
        return cls(chart, degree, {})

    @classmethod
    def monomial(cls, chart: Chart, indices: Tuple[int, ...], coeff) -> "DifferentialForm":
        indices = tuple(indices)
        if list(indices) != sorted(set(indices)):
            raise QKTwistError("indices must be strictly increasing")
        coeff = _coerce_scalar(chart, coeff)
        if coeff.is_zero:
            return cls.zero(chart, len(indices))
        return cls(chart, len(indices), {indices: coeff})

    @classmethod
    def from_components(cls, chart: Chart, degree: int, mapping) -> "DifferentialForm":
        comps = {}
        for indices, coeff in mapping.items():
            indices = tuple(indices)
            if len(indices) != degree or list(indices) != sorted(set(indices)):
                raise QKTwistError(f"bad multi-index {indices} for degree {degree}")
            coeff = _coerce_scalar(chart, coeff)
            if not coeff.is_zero:
                comps[indices] = coeff
        return cls(chart, degree, comps)

    @classmethod
    def function(cls, chart: Chart, coeff) -> "DifferentialForm":
        """Degree-0 form."""
        return cls.monomial(chart, (), coeff)

    @classmethod
    def coframe(cls, chart: Chart, name_or_index) -> "DifferentialForm":
        i = name_or_index if isinstance(name_or_index, int) else chart.coframe_index(name_or_index)
        return cls.monomial(chart, (i,), Fraction(1))

    # -- basic algebra --------------------------------------------------------

    def _check_chart(self, other):
        if self.chart is not other.chart:
            raise ChartMismatch(f"{self.chart.name} vs {other.chart.name}")

    @property
    def is_zero(self) -> bool:
        return not self.comps

    def __add__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        self._check_chart(other)
        if self.degree != other.degree and self.comps and other.comps:
            raise DegreeError(f"adding degrees {self.degree} and {other.degree}")
        out = dict(self.comps)
        for idx, coeff in other.comps.items():
            cur = out.get(idx)
            total = coeff if cur is None else cur + coeff
            if total.is_zero:
                out.pop(idx, None)
            else:
                out[idx] = total
        return DifferentialForm(self.chart, max(self.degree, other.degree), out)

    def __neg__(self):
        return DifferentialForm(self.chart, self.degree, {i: -c for i, c in self.comps.items()})

    def __sub__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self + (-other)

    def scale(self, value) -> "DifferentialForm":
        coeff = _coerce_scalar(self.chart, value)
        if coeff.is_zero:
            return DifferentialForm.zero(self.chart, self.degree)
        out = {}
        for idx, c in self.comps.items():
            v = c * coeff
            if not v.is_zero:
                out[idx] = v
        return DifferentialForm(self.chart, self.degree, out)

    def __mul__(self, value):
        return self.scale(value)

    __rmul__ = __mul__

    def __truediv__(self, value):
        coeff = _coerce_scalar(self.chart, value)
        return self.scale(coeff.inverse())

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return (self - other).is_zero

    def __hash__(self):
        return hash((id(self.chart), self.degree))

    def component(self, indices) -> CoefficientFunction:
        return self.comps.get(tuple(indices), CoefficientFunction.const(self.chart.ring, 0))

    def eval_at(self, point: Point):
        """Exact component values at a point: dict multi-index -> field element."""
        return {idx: c.eval_at(point.values, where=idx) for idx, c in sorted(self.comps.items())}

    def __str__(self):
        if not self.comps:
            return "0"
        names = self.chart.coframe_names
        parts = []
        for idx in sorted(self.comps):
            basis = "^".join(names[i] for i in idx) if idx else "1"
            parts.append(f"({self.comps[idx]}) {basis}")
        return " + ".join(parts)

    __repr__ = __str__


def wedge(alpha: DifferentialForm, beta: DifferentialForm) -> DifferentialForm:
    """Graded-commutative exterior product."""
    alpha._check_chart(beta)
    degree = alpha.degree + beta.degree
    chart = alpha.chart
    if degree > chart.dim:
        return DifferentialForm.zero(chart, degree)
    out: Dict[Tuple[int, ...], CoefficientFunction] = {}
    for ia, ca in alpha.comps.items():
        for ib, cb in beta.comps.items():
            merged = _merge_indices(ia, ib)
            if merged is None:
                continue
            sign, idx = merged
            term = ca * cb
            if sign < 0:
                term = -term
            cur = out.get(idx)
            total = term if cur is None else cur + term
            if total.is_zero:
                out.pop(idx, None)
            else:
                out[idx] = total
    return DifferentialForm(chart, degree, out)


def exterior_derivative(form: DifferentialForm) -> DifferentialForm:
    """d, using the chart's scalar differentials and structure equations."""
    chart = form.chart
    out: Dict[Tuple[int, ...], CoefficientFunction] = {}

    def accumulate(idx, coeff):
        if coeff.is_zero:
            return
        cur = out.get(idx)
        total = coeff if cur is None else cur + coeff
        if total.is_zero:
            out.pop(idx, None)
        else:
            out[idx] = total

    for idx, coeff in form.comps.items():
        # d(coefficient) wedge theta^idx
        for s in range(chart.ring.nvars):
            partial = coeff.diff(s)
            if partial.is_zero:
                continue
            for sidx, sc in chart.scalar_diffs[s].comps.items():
                merged = _merge_indices(sidx, idx)
                if merged is None:
                    continue
                sign, target = merged
                term = partial * sc
                accumulate(target, -term if sign < 0 else term)
        # coefficient * sum_k (-1)^(k-1) d(theta^{i_k}) wedge theta^{rest}
        for pos in range(len(idx)):
            structure = chart.structure[idx[pos]]
            if structure.is_zero:
                continue
            rest = idx[:pos] + idx[pos + 1:]
            base_sign = -1 if pos % 2 else 1
            for pair, sc in structure.comps.items():
                merged = _merge_indices(pair, rest)
                if merged is None:
                    continue
                sign, target = merged
                term = coeff * sc
                accumulate(target, -term if sign * base_sign < 0 else term)
    return DifferentialForm(chart, form.degree + 1, out)


class VectorField:
    """Components in the frame dual to the chart coframe."""

    __slots__ = ("chart", "comps")

    def __init__(self, chart: Chart, comps):
        comps = [_coerce_scalar(chart, c) for c in comps]
        if len(comps) != chart.dim:
            raise QKTwistError("wrong number of vector components")
        self.chart = chart
        self.comps = tuple(comps)

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls(chart, [0] * chart.dim)

    @classmethod
    def frame(cls, chart: Chart, name_or_index) -> "VectorField":
        i = name_or_index if isinstance(name_or_index, int) else chart.coframe_index(name_or_index)
        return cls(chart, [1 if j == i else 0 for j in range(chart.dim)])

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        if self.chart is not other.chart:
            raise ChartMismatch("vector fields on different charts")
        return VectorField(self.chart, [a + b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return VectorField(self.chart, [-c for c in self.comps])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, value) -> "VectorField":
        coeff = _coerce_scalar(self.chart, value)
        return VectorField(self.chart, [c * coeff for c in self.comps])

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return all((a - b).is_zero for a, b in zip(self.comps, other.comps))

    def __hash__(self):
        return hash(id(self.chart))

    def pair(self, one_form: DifferentialForm) -> CoefficientFunction:
        if one_form.degree != 1:
            raise DegreeError("pairing expects a 1-form")
        acc = CoefficientFunction.const(self.chart.ring, 0)
        for (i,), c in one_form.comps.items():
            acc = acc + self.comps[i] * c
        return acc

    def __str__(self):
        names = self.chart.coframe_names
        parts = [f"({c}) e_{names[i]}" for i, c in enumerate(self.comps) if not c.is_zero]
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def scalar_derivative(X: VectorField, coeff) -> CoefficientFunction:
    """Directional derivative X(f) through the chart's scalar differentials."""
    chart = X.chart
    coeff = _coerce_scalar(chart, coeff)
    df = exterior_derivative(DifferentialForm.function(chart, coeff))
    return X.pair(df)


def interior_product(X: VectorField, form: DifferentialForm) -> DifferentialForm:
    """Contraction i_X, an antiderivation of degree -1."""
    if X.chart is not form.chart:
        raise ChartMismatch("contraction across charts")
    if form.degree == 0:
        return DifferentialForm.zero(form.chart, 0)
    out: Dict[Tuple[int, ...], CoefficientFunction] = {}
    for idx, coeff in form.comps.items():
        for pos in range(len(idx)):
            xc = X.comps[idx[pos]]
            if xc.is_zero:
                continue
            rest = idx[:pos] + idx[pos + 1:]
            term = coeff * xc
            if pos % 2:
                term = -term
            cur = out.get(rest)
            total = term if cur is None else cur + term
            if total.is_zero:
                out.pop(rest, None)
            else:
                out[rest] = total
    return DifferentialForm(form.chart, form.degree - 1, out)


def lie_derivative(X: VectorField, form: DifferentialForm) -> DifferentialForm:
    """Cartan formula L_X = d i_X + i_X d."""
    return exterior_derivative(interior_product(X, form)) + interior_product(
        X, exterior_derivative(form)
    )


def bracket(X: VectorField, Y: VectorField) -> VectorField:
    """Lie bracket in the chart frame, including structure-constant terms."""
    chart = X.chart
    if chart is not Y.chart:
        raise ChartMismatch("bracket across charts")
    comps = []
    for m in range(chart.dim):
        acc = scalar_derivative(X, Y.comps[m]) - scalar_derivative(Y, X.comps[m])
        # [e_l, e_j] = c^m_{lj} e_m with c^m_{lj} = -d(theta^m)(e_l, e_j)
        structure = chart.structure[m]
        for (l, j), c in structure.comps.items():
            acc = acc - c * (X.comps[l] * Y.comps[j] - X.comps[j] * Y.comps[l])
        comps.append(acc)
    return VectorField(chart, comps)
