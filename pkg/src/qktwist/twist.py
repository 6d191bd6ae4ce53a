"""Twist data, the twisted exterior differential, and the principal model.

The twisted differential d_W alpha = d alpha - (1/a) F ^ (i_X alpha) computes,
on the original chart, the exterior derivative of the transferred form on the
twist.  For exact F = d(beta) the principal bundle is modelled explicitly by
an extended chart with one extra coframe element theta (d theta = F) and a
scalar tau with d tau = theta - beta; forms that descend to the twist are the
basic ones for the lifted field X' (i_X' = 0 and L_X' = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .chart import Chart, Point
from .errors import (
    DegreeError,
    NotACoframe,
    NotBasic,
    NotExact,
    NotExpressible,
    NotInvariant,
    QKTwistError,
    Unsolvable,
)
from .forms import (
    DifferentialForm,
    VectorField,
    exterior_derivative,
    interior_product,
    lie_derivative,
    wedge,
)
from .linalg import matrix_inverse, rank
from .report import CheckResult, VerificationReport
from .scalars import CoefficientFunction, fe_is_zero
from .tensors import EndomorphismField, MetricTensor


@dataclass
class TwistData:
    X: VectorField
    F: DifferentialForm
    a: CoefficientFunction

    def __post_init__(self):
        if self.F.degree != 2:
            raise DegreeError("twist curvature form must be a 2-form")


def validate_twist_data(td: TwistData, mode="symbolic", points=()) -> VerificationReport:
    """dF = 0, L_X F = 0, da = -i_X F, a not identically zero.

    Integrality of the periods of F is not decidable on a single chart and is
    recorded as an assumption.
    """
    report = VerificationReport("twist_data")
    chart = td.X.chart
    report.add(CheckResult.residual_form(
        "curvature_closed", "dF = 0", exterior_derivative(td.F), mode=mode, points=points))
    report.add(CheckResult.residual_form(
        "curvature_invariant", "L_X F = 0", lie_derivative(td.X, td.F), mode=mode, points=points))
    da = exterior_derivative(DifferentialForm.function(chart, td.a))
    report.add(CheckResult.residual_form(
        "hamiltonian", "da = -i_X F", da + interior_product(td.X, td.F), mode=mode, points=points))
    report.add(CheckResult.boolean(
        "twist_function_nonzero", "a is not identically zero", not td.a.is_zero))
    report.add(CheckResult.info(
        "integral_periods", "F is assumed to have integral periods (not machine-checkable on a chart)"))
    return report


def twisted_derivative(td: TwistData, alpha: DifferentialForm, check_invariance=True) -> DifferentialForm:
    """d_W alpha = d alpha - (1/a) F ^ (i_X alpha); reduces to d when F = 0."""
    if td.a.is_zero:
        raise QKTwistError("twist function is identically zero")
    if check_invariance:
        l = lie_derivative(td.X, alpha)
        if not l.is_zero:
            raise NotInvariant(f"form is not X-invariant: L_X alpha = {l}")
    result = exterior_derivative(alpha)
    contraction = interior_product(td.X, alpha)
    if contraction.is_zero or td.F.is_zero:
        return result
    correction = wedge(td.F, contraction).scale(td.a.inverse())
    return result - correction


def twisted_integrability_check(td: TwistData, I: EndomorphismField) -> bool:
    """The transferred almost complex structure is integrable iff F is (1,1)."""
    from .hyperkahler import type_11_check

    minus_id = EndomorphismField.identity(I.chart).scale(-1)
    if not all(c.is_zero for row in I.compose(I).residual_matrix(minus_id) for c in row):
        raise QKTwistError("I does not square to -identity")
    return type_11_check(td.F, I)


class PrincipalExtension:
    """Base chart extended by the connection form theta and the fibre angle.

    Coframe indices 0..dim-1 are the base coframe, index dim is theta.
    Scalars keep their base indices; tau (with d tau = theta - beta) is
    appended, and optionally the structural rotation pair (cs, sn) with
    cs^2 + sn^2 = 1, d cs = -sn (theta - beta), d sn = cs (theta - beta).
    """

    def __init__(self, base: Chart, chart: Chart, td: TwistData, beta: DifferentialForm,
                 c: Fraction, rotation: bool):
        self.base = base
        self.chart = chart
        self.c = Fraction(c)
        self.rotation = rotation
        self.theta_index = base.dim
        self.tau_index = base.ring.nvars
        self._scalar_map = list(range(base.ring.nvars))
        self.beta = self.lift_form(beta)
        self.F = self.lift_form(td.F)
        self.a = self.lift_coefficient(td.a)
        base_X = self.lift_vector(td.X)
        theta_comp = [CoefficientFunction.const(chart.ring, 0)] * chart.dim
        theta_comp[self.theta_index] = self.a
        self.Xprime = base_X + VectorField(chart, theta_comp)

    @property
    def theta(self) -> DifferentialForm:
        return DifferentialForm.coframe(self.chart, self.theta_index)

    def lift_coefficient(self, coeff: CoefficientFunction) -> CoefficientFunction:
        return coeff.lift_to(self.chart.ring, self._scalar_map)

    def lift_form(self, form: DifferentialForm) -> DifferentialForm:
        comps = {idx: self.lift_coefficient(c) for idx, c in form.comps.items()}
        return DifferentialForm(self.chart, form.degree, comps)

    def lift_vector(self, X: VectorField) -> VectorField:
        comps = [self.lift_coefficient(c) for c in X.comps]
        comps += [CoefficientFunction.const(self.chart.ring, 0)] * (self.chart.dim - len(comps))
        return VectorField(self.chart, comps)

    def lift_metric(self, g: MetricTensor) -> MetricTensor:
        n = self.chart.dim
        zero = CoefficientFunction.const(self.chart.ring, 0)
        rows = [[zero] * n for _ in range(n)]
        for i in range(self.base.dim):
            for j in range(self.base.dim):
                rows[i][j] = self.lift_coefficient(g.rows[i][j])
        return MetricTensor(self.chart, rows)

    def rotation_matrix(self):
        """exp(i tau) as 2x2 blocks diag(i2, i2), i2 = [[0,-1],[1,0]]."""
        if not self.rotation:
            raise QKTwistError("extension was built without rotation scalars")
        cs = CoefficientFunction.var(self.chart.ring, "cs")
        sn = CoefficientFunction.var(self.chart.ring, "sn")
        zero = CoefficientFunction.const(self.chart.ring, 0)
        block = [[cs, -sn], [sn, cs]]
        out = [[zero] * 4 for _ in range(4)]
        for b in range(2):
            for i in range(2):
                for j in range(2):
                    out[2 * b + i][2 * b + j] = block[i][j]
        return out


def principal_extension(chart: Chart, td: TwistData, beta: DifferentialForm,
                        c, rotation_scalars: bool = False, name: Optional[str] = None) -> PrincipalExtension:
    """Extend the chart by the principal circle; requires F = d(beta) exactly."""
    residual = exterior_derivative(beta) - td.F
    if not residual.is_zero:
        raise NotExact(f"d beta - F = {residual}")
    c = Fraction(c)

    scalar_names = list(chart.ring.names) + ["tau"]
    relations = list(chart.ring.relations)
    algebraic = list(chart.ring.algebraic)
    circle_pairs = list(chart.circle_pairs)
    if rotation_scalars:
        cs_idx = len(scalar_names)
        sn_idx = cs_idx + 1
        scalar_names += ["cs", "sn"]
        nvars = len(scalar_names)
        one_mono = tuple(0 for _ in range(nvars))
        sn2 = tuple(2 if i == sn_idx else 0 for i in range(nvars))
        relations.append((cs_idx, [(one_mono, Fraction(1)), (sn2, Fraction(-1))]))
        circle_pairs.append((cs_idx, sn_idx))
    # relations/algebraic monomials must be padded to the new variable count
    nvars = len(scalar_names)

    def pad(regs):
        out = []
        for var, repl in regs:
            out.append((var, [(tuple(list(m) + [0] * (nvars - len(m))), co) for m, co in repl]))
        return out

    relations = pad(relations)

    ext = Chart(
        name or f"{chart.name}+theta",
        list(chart.coframe_names) + ["theta"],
        scalar_names,
        relations=relations,
        algebraic=algebraic,
        circle_pairs=circle_pairs,
    )
    scalar_map = list(range(chart.ring.nvars))

    def lift(form):
        return DifferentialForm(
            ext, form.degree,
            {idx: co.lift_to(ext.ring, scalar_map) for idx, co in form.comps.items()},
        )

    for i in range(chart.dim):
        ext.set_structure(i, lift(chart.structure[i]))
    ext.set_structure(chart.dim, lift(td.F))
    for j in range(chart.ring.nvars):
        ext.set_scalar_diff(j, lift(chart.scalar_diffs[j]))
    theta = DifferentialForm.coframe(ext, chart.dim)
    dtau = theta - lift(beta)
    tau_idx = chart.ring.nvars
    ext.set_scalar_diff(tau_idx, dtau)
    if rotation_scalars:
        cs = CoefficientFunction.var(ext.ring, "cs")
        sn = CoefficientFunction.var(ext.ring, "sn")
        ext.set_scalar_diff(tau_idx + 1, dtau.scale(-sn))
        ext.set_scalar_diff(tau_idx + 2, dtau.scale(cs))

    extension = PrincipalExtension(chart, ext, td, beta, c, rotation_scalars)
    consistency = ext.consistency_check()
    if not consistency.passed:
        raise QKTwistError(f"extended chart fails d^2 = 0: {consistency.failures()[0].name}")
    return extension


def basic_form_check(ext: PrincipalExtension, alpha: DifferentialForm) -> bool:
    """True iff alpha descends to the twist: i_X' alpha = 0 and L_X' alpha = 0."""
    if alpha.chart is not ext.chart:
        raise QKTwistError("form does not live on the extended chart")
    if not interior_product(ext.Xprime, alpha).is_zero:
        return False
    return lie_derivative(ext.Xprime, alpha).is_zero


@dataclass
class StructureConstants:
    """c^i_{jk} with d eta^i = -1/2 c^i_{jk} eta^j ^ eta^k."""

    size: int
    coefficients: Dict[Tuple[int, int, int], CoefficientFunction]
    all_constant: bool
    values: Optional[Dict[Tuple[int, int, int], object]]
    jacobi_zero: Optional[bool]

    def value(self, i, j, k):
        if (i, j, k) in self.values:
            return self.values[(i, j, k)]
        if (i, k, j) in self.values:
            return -self.values[(i, k, j)]
        return Fraction(0)


def structure_constants(
    coframe: Sequence[DifferentialForm],
    extension: Optional[PrincipalExtension] = None,
    points: Sequence[Point] = (),
) -> StructureConstants:
    """Structure functions of a coframe, via exact change of basis.

    With an extension, every supplied form must be basic and the connection
    form theta completes the basis; d of a basic form may not have theta
    components (NotExpressible reports the residual).  Without an extension
    the forms must span the whole chart coframe.
    """
    if not coframe:
        raise QKTwistError("empty coframe")
    chart = coframe[0].chart
    for form in coframe:
        if form.degree != 1 or form.chart is not chart:
            raise QKTwistError("coframe must consist of 1-forms on one chart")
    complement: List[DifferentialForm] = []
    if extension is not None:
        if chart is not extension.chart:
            raise QKTwistError("coframe does not live on the extension chart")
        for idx, form in enumerate(coframe):
            if not basic_form_check(extension, form):
                raise NotBasic(f"coframe element {idx} is not basic")
        complement = [extension.theta]
    k = len(coframe)
    total = list(coframe) + complement
    if len(total) != chart.dim:
        raise NotACoframe(f"need {chart.dim} independent forms, got {len(total)}")

    rows = [[form.component((p,)) for p in range(chart.dim)] for form in total]
    for point in points:
        numeric = [[c.eval_at(point.values) for c in row] for row in rows]
        if rank(numeric) != chart.dim:
            raise NotACoframe(f"coframe is dependent at {point.as_named()}")
    try:
        inv = matrix_inverse(rows)
    except Unsolvable as exc:
        raise NotACoframe(f"coframe is linearly dependent: {exc}") from exc

    zero = CoefficientFunction.const(chart.ring, 0)
    coefficients: Dict[Tuple[int, int, int], CoefficientFunction] = {}
    all_constant = True
    for i in range(k):
        d_eta = exterior_derivative(coframe[i])
        n = chart.dim
        w = [[zero] * n for _ in range(n)]
        for (p, q), coeff in d_eta.comps.items():
            w[p][q] = coeff
            w[q][p] = -coeff
        for m in range(n):
            for nn in range(m + 1, n):
                acc = zero
                for p in range(n):
                    ip = inv[p][m]
                    if ip.is_zero:
                        continue
                    for q in range(n):
                        if w[p][q].is_zero or inv[q][nn].is_zero:
                            continue
                        acc = acc + ip * w[p][q] * inv[q][nn]
                if acc.is_zero:
                    continue
                if m >= k or nn >= k:
                    raise NotExpressible(
                        f"d eta^{i} has a component on the complement: ({m},{nn}) = {acc}")
                coefficients[(i, m, nn)] = -acc
                if not _numeric_constant(acc):
                    all_constant = False

    values = None
    jacobi_zero = None
    if all_constant:
        values = {key: coeff.eval_at({}) for key, coeff in coefficients.items()}

        def cval(i, j, l):
            if j == l:
                return Fraction(0)
            if j < l:
                return values.get((i, j, l), Fraction(0))
            return -values.get((i, l, j), Fraction(0))

        jacobi_zero = True
        for l in range(k):
            for i in range(k):
                for j in range(i + 1, k):
                    for m in range(j + 1, k):
                        acc = Fraction(0)
                        for s in range(k):
                            acc = acc + cval(s, i, j) * cval(l, s, m)
                            acc = acc + cval(s, j, m) * cval(l, s, i)
                            acc = acc + cval(s, m, i) * cval(l, s, j)
                        if not fe_is_zero(acc):
                            jacobi_zero = False
    return StructureConstants(k, coefficients, all_constant, values, jacobi_zero)


def _numeric_constant(coeff: CoefficientFunction) -> bool:
    """Constant over the chart: only algebraic generators may appear."""
    algebraic = {v for v, _ in coeff.ring.algebraic}
    used = set(coeff.num.variables())
    for factor, _ in coeff.den:
        used |= factor.variables()
    return used <= algebraic
