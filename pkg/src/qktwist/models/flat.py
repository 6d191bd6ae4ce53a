"""Flat quaternionic coordinate space H^{p,q} with a rotating circle symmetry.

Per quaternionic block i (coordinates x_i, y_i, u_i, v_i; sign eps_i = +1 for
i <= p, else -1):

    g       = sum eps_i (dx^2 + dy^2 + du^2 + dv^2)
    omega_I = sum eps_i (dx^dy - du^dv)
    omega_J = sum eps_i (du^dx + dv^dy)
    omega_K = sum eps_i (du^dy - dv^dx)
    X       = sum (1/2-l_i)(y d/dx - x d/dy) - (1/2+l_i)(v d/du - u d/dv)
    mu      = 1/2 sum eps_i [(1/2-l_i)(x^2+y^2) + (1/2+l_i)(u^2+v^2)]
    beta    = sum eps_i l_i (-y dx + x dy - v du + u dv),  d(beta) = G
    twist   = (X, F = k G, a = k(|X|^2 - mu + c)),  with beta(X) = |X|^2 - mu

The eps_i factor in mu is required for d(mu) = alpha_I in mixed signature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from ..chart import Chart
from ..correspondence import canonical_twist_data
from ..errors import NullSymmetry, QKTwistError
from ..forms import DifferentialForm, VectorField, exterior_derivative, interior_product
from ..hyperkahler import (
    HyperKahlerStructure,
    SymmetryData,
    derive_symmetry_data,
    verify_hyperkahler,
    verify_rotating,
)
from ..report import CheckResult, VerificationReport
from ..scalars import CoefficientFunction
from ..tensors import EndomorphismField, MetricTensor
from ..twist import TwistData

# block matrices acting on the frame (columns = images), order (x, y, u, v)
_I_BLOCK = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
_J_BLOCK = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
_K_BLOCK = [[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]]


@dataclass
class FlatModelParams:
    p: int
    q: int
    lambdas: Tuple[Fraction, ...]
    c: Fraction = Fraction(0)
    k: Fraction = Fraction(1)

    def __post_init__(self):
        self.lambdas = tuple(Fraction(l) for l in self.lambdas)
        self.c = Fraction(self.c)
        self.k = Fraction(self.k)
        if self.p < 0 or self.q < 0 or self.p + self.q < 1:
            raise QKTwistError("need p, q >= 0 with p + q >= 1")
        if len(self.lambdas) != self.p + self.q:
            raise QKTwistError("need one lambda per quaternionic block")

    @property
    def n(self) -> int:
        return self.p + self.q

    def epsilons(self) -> List[int]:
        return [1 if i < self.p else -1 for i in range(self.n)]


def smoothness_predicate(lambdas, c) -> dict:
    """Integer parameters give an orbifold twist; pairwise coprime, a manifold."""
    values = [Fraction(l) for l in lambdas] + [Fraction(c)]
    integers = all(v.denominator == 1 for v in values)
    coprime = False
    if integers:
        ints = [abs(int(v)) for v in values]
        coprime = all(
            math.gcd(ints[i], ints[j]) == 1
            for i in range(len(ints))
            for j in range(i + 1, len(ints))
        )
    return {"orbifold": integers, "smooth": integers and coprime}


@dataclass
class FlatModel:
    params: FlatModelParams
    chart: Chart
    hk: HyperKahlerStructure
    sd: SymmetryData
    td: TwistData
    beta: DifferentialForm
    report: VerificationReport = field(repr=False, default=None)


def build_flat_model(params: FlatModelParams, mode="symbolic", points=()) -> FlatModel:
    """Construct and fully verify the flat model.

    Raises NullSymmetry when sum eps_i lambda_i^2 = 0 with some lambda_i
    nonzero (the rotating field is then null); the all-zero case is the
    legitimate trivial twist F = 0, a = c.
    """
    n = params.n
    eps = params.epsilons()
    null_sum = sum(e * l * l for e, l in zip(eps, params.lambdas))
    if null_sum == 0 and any(l != 0 for l in params.lambdas):
        raise NullSymmetry(f"sum eps_i lambda_i^2 = 0 for lambdas {params.lambdas}")

    coords = []
    for i in range(1, n + 1):
        coords += [f"x{i}", f"y{i}", f"u{i}", f"v{i}"]
    chart = Chart.coordinate(f"flat_h_{params.p}_{params.q}", coords)
    ring = chart.ring

    g = MetricTensor.diagonal(chart, [eps[i // 4] for i in range(4 * n)])
    I = EndomorphismField.from_blocks(chart, [_I_BLOCK] * n)
    J = EndomorphismField.from_blocks(chart, [_J_BLOCK] * n)
    K = EndomorphismField.from_blocks(chart, [_K_BLOCK] * n)
    hk = HyperKahlerStructure.from_endomorphisms(chart, g, I, J, K)

    half = Fraction(1, 2)
    x_comps = []
    mu = CoefficientFunction.const(ring, 0)
    beta = DifferentialForm.zero(chart, 1)
    for i in range(n):
        lam = params.lambdas[i]
        e = eps[i]
        x = chart.scalar(f"x{i+1}")
        y = chart.scalar(f"y{i+1}")
        u = chart.scalar(f"u{i+1}")
        v = chart.scalar(f"v{i+1}")
        x_comps += [
            y * (half - lam),
            x * (lam - half),
            v * (-(half + lam)),
            u * (half + lam),
        ]
        mu = mu + (
            (x * x + y * y) * (half - lam) + (u * u + v * v) * (half + lam)
        ) * Fraction(e, 2)
        base = 4 * i
        beta = beta + DifferentialForm.from_components(
            chart, 1,
            {
                (base,): y * Fraction(-e) * lam,
                (base + 1,): x * Fraction(e) * lam,
                (base + 2,): v * Fraction(-e) * lam,
                (base + 3,): u * Fraction(e) * lam,
            },
        )
    X = VectorField(chart, x_comps)

    report = VerificationReport(f"flat_model:{params.p},{params.q}")
    report.extend(chart.consistency_check(mode=mode, points=points), prefix="chart")
    report.extend(verify_hyperkahler(hk, mode=mode, points=points), prefix="hk")
    report.extend(verify_rotating(hk, X, mode=mode, points=points), prefix="rotating")
    sd = derive_symmetry_data(hk, X, mu, mode=mode, points=points)
    report.extend(sd.report, prefix="symmetry")

    report.add(CheckResult.residual_form(
        "beta_primitive", "d beta = G", exterior_derivative(beta) - sd.G,
        mode=mode, points=points))
    beta_x = X.pair(beta)
    report.add(CheckResult.residual_coefficient(
        "bridge_identity", "beta(X) = |X|^2 - mu",
        beta_x - (sd.normX2 - sd.mu), mode=mode, points=points))

    td, td_report = canonical_twist_data(sd, params.k, params.c, mode=mode, points=points)
    report.extend(td_report, prefix="twist")
    d_beta_x = exterior_derivative(DifferentialForm.function(chart, beta_x))
    report.add(CheckResult.residual_form(
        "hamiltonian_beta", "d(beta(X)) = -i_X F at k = 1",
        d_beta_x + interior_product(X, exterior_derivative(beta)),
        mode=mode, points=points))

    return FlatModel(params, chart, hk, sd, td, beta, report)
