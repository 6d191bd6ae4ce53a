"""HyperKahler structures, rotating symmetries and the derived one-forms.

Conventions fixed throughout the package:
  omega_A = g(A., .) for A in {I, J, K};  IJ = K = -JI;
  alpha_0 = g(X, .);  alpha_A = A alpha_0 with (A alpha)(Y) = -alpha(A Y),
  which coincides with the contraction i_X omega_A for Hermitian g;
  g_alpha = alpha_0^2 + alpha_I^2 + alpha_J^2 + alpha_K^2;
  G = d(alpha_0) + omega_I;  the moment map satisfies d(mu) = alpha_I.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .chart import Chart
from .errors import DegreeError, MomentMapMismatch, NotClosed, NotInvariant, QKTwistError
from .forms import (
    DifferentialForm,
    VectorField,
    exterior_derivative,
    interior_product,
    lie_derivative,
    wedge,
)
from .report import CheckResult, VerificationReport
from .scalars import CoefficientFunction
from .tensors import (
    EndomorphismField,
    MetricTensor,
    form_to_matrix,
    two_form_from_endomorphism,
)


@dataclass
class HyperKahlerStructure:
    chart: Chart
    g: MetricTensor
    I: EndomorphismField
    J: EndomorphismField
    K: EndomorphismField
    omega_I: DifferentialForm
    omega_J: DifferentialForm
    omega_K: DifferentialForm

    @classmethod
    def from_endomorphisms(cls, chart, g, I, J, K) -> "HyperKahlerStructure":
        return cls(
            chart, g, I, J, K,
            two_form_from_endomorphism(g, I),
            two_form_from_endomorphism(g, J),
            two_form_from_endomorphism(g, K),
        )

    def structures(self):
        return (
            ("I", self.I, self.omega_I),
            ("J", self.J, self.omega_J),
            ("K", self.K, self.omega_K),
        )


@dataclass
class SymmetryData:
    X: VectorField
    alpha0: DifferentialForm
    alphaI: DifferentialForm
    alphaJ: DifferentialForm
    alphaK: DifferentialForm
    g_alpha: MetricTensor
    G: DifferentialForm
    mu: CoefficientFunction
    normX2: CoefficientFunction
    report: VerificationReport = field(default=None, repr=False)


def _hermitian_residual(g: MetricTensor, A: EndomorphismField):
    """Matrix of g(A e_j, A e_k) - g(e_j, e_k)."""
    n = g.chart.dim
    zero = CoefficientFunction.const(g.chart.ring, 0)
    out = []
    for j in range(n):
        row = []
        for k in range(n):
            acc = zero
            for m in range(n):
                for p in range(n):
                    acc = acc + A.rows[m][j] * g.rows[m][p] * A.rows[p][k]
            row.append(acc - g.rows[j][k])
        out.append(row)
    return out


def verify_hyperkahler(h: HyperKahlerStructure, mode="symbolic", points=()) -> VerificationReport:
    """Quaternion relations, Hermitian conditions, closed Kahler forms."""
    report = VerificationReport(f"hyperkahler:{h.chart.name}")
    minus_id = EndomorphismField.identity(h.chart).scale(-1)
    report.add(CheckResult.residual_matrix(
        "quaternion_IJ_K", "I J = K", h.I.compose(h.J).residual_matrix(h.K)))
    report.add(CheckResult.residual_matrix(
        "quaternion_JI_minusK", "J I = -K", h.J.compose(h.I).residual_matrix(h.K.scale(-1))))
    for name, A, omega in h.structures():
        report.add(CheckResult.residual_matrix(
            f"square_{name}", f"{name}^2 = -identity", A.compose(A).residual_matrix(minus_id)))
        report.add(CheckResult.residual_matrix(
            f"hermitian_{name}", f"g({name}., {name}.) = g", _hermitian_residual(h.g, A)))
        report.add(CheckResult.residual_form(
            f"compatible_omega_{name}",
            f"omega_{name} = g({name}., .)",
            omega - two_form_from_endomorphism(h.g, A),
            mode=mode, points=points,
        ))
        report.add(CheckResult.residual_form(
            f"closed_omega_{name}", f"d omega_{name} = 0",
            exterior_derivative(omega), mode=mode, points=points))
    return report


def verify_rotating(h: HyperKahlerStructure, X: VectorField, mode="symbolic", points=()) -> VerificationReport:
    """L_X g = 0, L_X omega_I = 0, L_X omega_J = omega_K, L_X omega_K = -omega_J."""
    report = VerificationReport(f"rotating:{h.chart.name}")
    lg = h.g.lie_derivative(X)
    report.add(CheckResult.residual_matrix(
        "isometry", "L_X g = 0", [list(r) for r in lg.rows], mode=mode))
    report.add(CheckResult.residual_form(
        "invariant_omega_I", "L_X omega_I = 0",
        lie_derivative(X, h.omega_I), mode=mode, points=points))
    report.add(CheckResult.residual_form(
        "rotates_J_to_K", "L_X omega_J = omega_K",
        lie_derivative(X, h.omega_J) - h.omega_K, mode=mode, points=points))
    report.add(CheckResult.residual_form(
        "rotates_K_to_minus_J", "L_X omega_K = -omega_J",
        lie_derivative(X, h.omega_K) + h.omega_J, mode=mode, points=points))
    return report


def type_11_check(F: DifferentialForm, A: EndomorphismField) -> bool:
    """F(A., A.) = F, i.e. A^T F_mat A = F_mat exactly."""
    if F.degree != 2:
        raise DegreeError("type (1,1) check expects a 2-form")
    n = F.chart.dim
    fmat = form_to_matrix(F)
    for j in range(n):
        for k in range(j + 1, n):
            acc = CoefficientFunction.const(F.chart.ring, 0)
            for m in range(n):
                for p in range(n):
                    acc = acc + A.rows[m][j] * fmat[m][p] * A.rows[p][k]
            if not (acc - fmat[j][k]).is_zero:
                return False
    return True


def derive_symmetry_data(
    h: HyperKahlerStructure,
    X: VectorField,
    mu_candidate: CoefficientFunction,
    mode="symbolic",
    points=(),
) -> SymmetryData:
    """Build alpha_0..alpha_K, g_alpha, G, and verify the derived identities.

    Raises MomentMapMismatch when d(mu) != alpha_I and NotClosed when
    d(alpha_I) != 0; everything else lands in the attached report.
    """
    report = VerificationReport(f"symmetry_data:{h.chart.name}")
    alpha0 = h.g.lower(X)
    alphas = {}
    for name, A, omega in h.structures():
        via_endo = A.act_on_one_form(alpha0)
        via_contraction = interior_product(X, omega)
        report.add(CheckResult.residual_form(
            f"alpha_{name}_conventions",
            f"{name} alpha_0 = i_X omega_{name}",
            via_endo - via_contraction, mode=mode, points=points))
        alphas[name] = via_endo
    alphaI, alphaJ, alphaK = alphas["I"], alphas["J"], alphas["K"]

    d_alphaI = exterior_derivative(alphaI)
    if not d_alphaI.is_zero:
        raise NotClosed(f"d alpha_I != 0: {d_alphaI}")
    report.add(CheckResult.residual_form(
        "closed_alpha_I", "d alpha_I = 0", d_alphaI, mode=mode, points=points))

    mu_residual = exterior_derivative(DifferentialForm.function(h.chart, mu_candidate)) - alphaI
    if not mu_residual.is_zero:
        raise MomentMapMismatch(f"d mu - alpha_I = {mu_residual}")
    report.add(CheckResult.residual_form(
        "moment_map", "d mu = alpha_I", mu_residual, mode=mode, points=points))

    report.add(CheckResult.residual_form(
        "d_alpha_J", "d alpha_J = omega_K",
        exterior_derivative(alphaJ) - h.omega_K, mode=mode, points=points))
    report.add(CheckResult.residual_form(
        "d_alpha_K", "d alpha_K = -omega_J",
        exterior_derivative(alphaK) + h.omega_J, mode=mode, points=points))

    G = exterior_derivative(alpha0) + h.omega_I
    for name, A, _ in h.structures():
        report.add(CheckResult.boolean(
            f"G_type11_{name}", f"G = d alpha_0 + omega_I is type (1,1) for {name}",
            type_11_check(G, A)))

    g_alpha = MetricTensor.square_of_one_form(alpha0)
    for alpha in (alphaI, alphaJ, alphaK):
        g_alpha = g_alpha + MetricTensor.square_of_one_form(alpha)
    normX2 = X.pair(alpha0)

    # L_X mu = i_X alpha_I = g(X, IX) vanishes by antisymmetry
    report.add(CheckResult.residual_coefficient(
        "mu_invariant", "L_X mu = 0", X.pair(alphaI), mode=mode, points=points))

    return SymmetryData(X, alpha0, alphaI, alphaJ, alphaK, g_alpha, G,
                        mu_candidate, normX2, report)


def fundamental_four_form(h: HyperKahlerStructure, X: Optional[VectorField] = None) -> DifferentialForm:
    """Omega = omega_I^2 + omega_J^2 + omega_K^2; closed, and X-invariant."""
    omega = wedge(h.omega_I, h.omega_I) + wedge(h.omega_J, h.omega_J) + wedge(h.omega_K, h.omega_K)
    d_omega = exterior_derivative(omega)
    if not d_omega.is_zero:
        raise NotClosed(f"d Omega != 0: {d_omega}")
    if X is not None:
        l_omega = lie_derivative(X, omega)
        if not l_omega.is_zero:
            raise NotInvariant(f"L_X Omega != 0: {l_omega}")
    return omega
