"""Elementary deformations and the quaternionic-Kahler verification.

The canonical deformation g^N = g_alpha/(mu-c)^2 - g/(mu-c) with twist data
F = k(d alpha_0 + omega_I), a = k(g(X,X) - mu + c) is, up to homothety, the
only combination whose twist is quaternionic Kahler; the checks here certify
the positive direction (d_W Omega^N = 0, plus the so(3) connection system in
dimension 8) and produce exact nonzero witnesses for perturbed deformations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .chart import Chart, Point
from .errors import (
    DegenerateAtPoint,
    NotInvariant,
    PoleEverywhere,
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
from .hyperkahler import HyperKahlerStructure, SymmetryData
from .jets import Jet
from .linalg import signature, solve_affine
from .numeric import (
    PointEnv,
    form_jets,
    form_values,
    jet_values,
    numeric_add,
    numeric_contract,
    numeric_d,
    numeric_is_zero,
    numeric_scale,
    numeric_wedge,
    vector_jets,
    vector_values,
)
from .report import CheckResult, VerificationReport
from .scalars import CoefficientFunction, fe_is_zero
from .tensors import MetricTensor, two_form_from_endomorphism
from .twist import TwistData, twisted_derivative, validate_twist_data


@dataclass
class DeformationSpec:
    """g^N = f g + h g_alpha."""

    f: CoefficientFunction
    h: CoefficientFunction
    label: str = ""


def elementary_deformation(h: HyperKahlerStructure, sd: SymmetryData, spec: DeformationSpec) -> MetricTensor:
    return h.g.scale(spec.f) + sd.g_alpha.scale(spec.h)


def canonical_deformation(sd: SymmetryData, c) -> DeformationSpec:
    """f = -1/(mu - c), h = 1/(mu - c)^2; h = f^2 = f' as functions of mu."""
    ring = sd.mu.ring
    pole = sd.mu - CoefficientFunction.const(ring, c)
    if pole.is_zero:
        raise PoleEverywhere("mu - c vanishes identically")
    f = CoefficientFunction.const(ring, -1) / pole
    return DeformationSpec(f, f * f, label=f"canonical(c={c})")


def canonical_twist_data(sd: SymmetryData, k, c, mode="symbolic", points=()) -> Tuple[TwistData, VerificationReport]:
    """(X, kG, k(|X|^2 - mu + c)); the twist-data conditions must verify."""
    k = Fraction(k)
    if k == 0:
        raise QKTwistError("k must be nonzero")
    ring = sd.mu.ring
    a = (sd.normX2 - sd.mu + CoefficientFunction.const(ring, c)) * k
    td = TwistData(sd.X, sd.G.scale(k), a)
    report = validate_twist_data(td, mode=mode, points=points)
    if not report.passed:
        raise QKTwistError(f"canonical twist data failed validation: "
                           f"{[c.name for c in report.failures()]}")
    return td, report


class QKVerification:
    """The three deformed Kahler forms and (lazily) their four-form."""

    def __init__(self, hk: HyperKahlerStructure, gN: MetricTensor):
        self.hk = hk
        self.gN = gN
        self.omega_I = two_form_from_endomorphism(gN, hk.I)
        self.omega_J = two_form_from_endomorphism(gN, hk.J)
        self.omega_K = two_form_from_endomorphism(gN, hk.K)

    def omegas(self):
        return (self.omega_I, self.omega_J, self.omega_K)

    @cached_property
    def four_form(self) -> DifferentialForm:
        acc = DifferentialForm.zero(self.hk.chart, 4)
        for omega in self.omegas():
            acc = acc + wedge(omega, omega)
        return acc


def omega_N(hk: HyperKahlerStructure, gN: MetricTensor) -> QKVerification:
    return QKVerification(hk, gN)


def _sampled_four_form_jets(qk: QKVerification, env: PointEnv):
    total: Dict = {}
    for omega in qk.omegas():
        jets = form_jets(omega, env)
        total = numeric_add(total, numeric_wedge(jets, jets))
    return total


def _sampled_closure_residual(td: TwistData, env: PointEnv, omega_jets, d_omega):
    """Value components of d_W Omega^N at a point, via jet arithmetic."""
    omega_vals = jet_values(omega_jets)
    x_vals = vector_values(td.X, env)
    contraction = numeric_contract(x_vals, omega_vals)
    f_vals = form_values(td.F, env)
    correction = numeric_wedge(f_vals, contraction)
    a_val = td.a.eval_at(env.values, where="twist function")
    if fe_is_zero(a_val):
        raise DegenerateAtPoint("twist function vanishes at the sample point")
    inv = Fraction(1) / a_val if isinstance(a_val, Fraction) else 1 / a_val
    return numeric_add(d_omega, numeric_scale(correction, inv), sign=-1)


def _sampled_invariance_residual(td: TwistData, env: PointEnv, omega_jets, d_omega):
    """Value components of L_X Omega^N at a point."""
    x_jets = vector_jets(td.X, env)
    ix_omega = numeric_contract(x_jets, omega_jets)
    d_ix = numeric_d(ix_omega, env)
    ix_d = numeric_contract(vector_values(td.X, env), d_omega)
    return numeric_add(d_ix, ix_d)


def qk_closure_check(td: TwistData, qk: QKVerification, mode="symbolic",
                     points: Sequence[Point] = (), expect_nonzero=False) -> VerificationReport:
    """Residual of d_W Omega^N; a zero residual certifies quaternionic Kahler
    in dimension >= 12 and is recorded as necessary-only in dimension 8."""
    chart = td.X.chart
    dim = chart.dim
    if dim < 8:
        raise QKTwistError(f"dimension {dim} rejected: the correspondence needs dim >= 8")
    report = VerificationReport("qk_closure")
    if mode == "symbolic":
        invariance = lie_derivative(td.X, qk.four_form)
        if not invariance.is_zero:
            raise NotInvariant("Omega^N is not X-invariant")
        report.add(CheckResult.residual_form(
            "omega_invariant", "L_X Omega^N = 0", invariance, mode=mode))
        residual = twisted_derivative(td, qk.four_form, check_invariance=False)
        if expect_nonzero:
            report.add(CheckResult.boolean(
                "closure_nonzero", "d_W Omega^N != 0 (falsification)",
                not residual.is_zero, detail="residual is identically zero"))
        else:
            report.add(CheckResult.residual_form(
                "closure", "d_W Omega^N = 0", residual, mode=mode))
    else:
        witness = None
        invariant_ok = True
        for point in points:
            env = PointEnv(point)
            omega_jets = _sampled_four_form_jets(qk, env)
            d_omega = numeric_d(omega_jets, env)
            inv_res = _sampled_invariance_residual(td, env, omega_jets, d_omega)
            if not numeric_is_zero(inv_res):
                invariant_ok = False
                raise NotInvariant(f"L_X Omega^N != 0 at {point.as_named()}")
            res = _sampled_closure_residual(td, env, omega_jets, d_omega)
            if not numeric_is_zero(res):
                idx, val = next((i, v) for i, v in sorted(res.items()) if not fe_is_zero(v))
                witness = (point, idx, val)
                break
        report.add(CheckResult.boolean(
            "omega_invariant", "L_X Omega^N = 0", invariant_ok, mode="sampled"))
        if expect_nonzero:
            report.add(CheckResult(
                "closure_nonzero", "d_W Omega^N != 0 (falsification)", "sampled",
                witness is not None,
                residual=(f"nonzero witness: component {witness[1]} = {witness[2]}"
                          if witness else "no nonzero value found"),
                witness=witness[0].as_named() if witness else None))
        else:
            report.add(CheckResult(
                "closure", "d_W Omega^N = 0", "sampled",
                witness is None,
                residual=("0 at %d points" % len(tuple(points)) if witness is None
                          else f"component {witness[1]} = {witness[2]}"),
                witness=witness[0].as_named() if witness else None))
    if report.checks and report.checks[-1].passed and not expect_nonzero:
        if dim >= 12:
            report.add(CheckResult.info(
                "certificate", "dim >= 12: d Omega^W = 0 certifies quaternionic Kahler", "QK"))
        else:
            report.add(CheckResult.info(
                "certificate",
                "dim = 8: closure is necessary only; the so(3) connection system decides",
                "necessary-only"))
    return report


def qk_connection_solve_dim8(td: TwistData, qk: QKVerification,
                             points: Sequence[Point]) -> VerificationReport:
    """Solve d_W omega^N_i = sum_j A_ij ^ omega^N_j exactly at sample points.

    Unknowns are the three independent so(3) entries A_12, A_13, A_23, each a
    1-form (24 rational unknowns in dimension 8).  Success means the linear
    system is exactly solvable at every sampled point.
    """
    chart = td.X.chart
    dim = chart.dim
    if dim != 8:
        raise QKTwistError("the connection-form criterion applies in dimension 8")
    report = VerificationReport("qk_connection_dim8")
    omegas = list(qk.omegas())
    d_w = [twisted_derivative(td, omega, check_invariance=False) for omega in omegas]
    pairs = [(0, 1), (0, 2), (1, 2)]  # A_12, A_13, A_23
    triples = [(i, j, k) for i in range(dim) for j in range(i + 1, dim) for k in range(j + 1, dim)]
    tindex = {t: n for n, t in enumerate(triples)}
    solved_all = True
    for point in points:
        env = PointEnv(point)
        omega_vals = [form_values(omega, env) for omega in omegas]
        rhs_vals = [form_values(dw, env) for dw in d_w]
        rows = len(triples) * 3
        cols = 3 * dim
        zero = Fraction(0)
        A = [[zero] * cols for _ in range(rows)]
        b = [zero] * rows
        for i in range(3):
            for t, n in tindex.items():
                b[i * len(triples) + n] = rhs_vals[i].get(t, zero)
        # column for unknown (pair p, basis 1-form m): wedge(theta^m, omega_j)
        # enters equation row i with so(3) sign: A_ij = -A_ji, A_ii = 0.
        for pn, (p1, p2) in enumerate(pairs):
            for m in range(dim):
                col = pn * dim + m
                basis = {(m,): Fraction(1)}
                for (i, j, s) in ((p1, p2, 1), (p2, p1, -1)):
                    w = numeric_wedge(basis, omega_vals[j])
                    for t, v in w.items():
                        A[i * len(triples) + tindex[t]][col] = v if s > 0 else -v
        solution = solve_affine(A, b)
        if solution is None:
            solved_all = False
            from .linalg import rank

            aug = [A[r] + [b[r]] for r in range(rows)]
            report.add(CheckResult(
                "connection_solve", "d_W omega^N = A ^ omega^N solvable (so(3))",
                "sampled", False,
                residual=f"unsolvable: rank A = {rank(A)}, rank [A|b] = {rank(aug)}",
                witness=point.as_named()))
            break
    if solved_all:
        report.add(CheckResult(
            "connection_solve", "d_W omega^N = A ^ omega^N solvable (so(3))",
            "sampled", True, residual=f"solvable at {len(tuple(points))} points"))
    return report


def signature_at_point(gN: MetricTensor, point: Point) -> Tuple[int, int]:
    """Exact signature by congruence diagonalization; degenerate points raise."""
    matrix = gN.eval_at(point)
    plus, minus = signature(matrix)
    if plus + minus != gN.chart.dim:
        raise DegenerateAtPoint(f"metric degenerate at {point.as_named()}")
    return plus, minus


X_NULL = "X_NULL"
TWIST_FUNCTION_ZERO = "TWIST_FUNCTION_ZERO"
MOMENT_POLE = "MOMENT_POLE"
REGULAR = "REGULAR"


def classify_degeneracy(sd: SymmetryData, td: TwistData, c, point: Point) -> set:
    """Labels of the degeneracy loci the point lies on."""
    labels = set()
    normx2 = sd.normX2.eval_at(point.values)
    if fe_is_zero(normx2):
        labels.add(X_NULL)
    if fe_is_zero(td.a.eval_at(point.values)):
        labels.add(TWIST_FUNCTION_ZERO)
    pole = sd.mu - CoefficientFunction.const(sd.mu.ring, c)
    if fe_is_zero(pole.eval_at(point.values)):
        labels.add(MOMENT_POLE)
    if not labels:
        labels.add(REGULAR)
    return labels
