"""HyperKahler verification on the flat models."""

from fractions import Fraction

import pytest

from qktwist import DifferentialForm, Point, VectorField
from qktwist.errors import MomentMapMismatch, NullSymmetry
from qktwist.forms import lie_derivative
from qktwist.hyperkahler import (
    HyperKahlerStructure,
    derive_symmetry_data,
    fundamental_four_form,
    type_11_check,
    verify_hyperkahler,
    verify_rotating,
)
from qktwist.models.flat import FlatModelParams, build_flat_model, smoothness_predicate

F = Fraction


def flat(p, q, lambdas, c=0, k=1):
    return build_flat_model(FlatModelParams(p, q, lambdas, c=c, k=k))


def test_flat_h20_all_validations_pass():
    model = flat(2, 0, [1, 2], c=1)
    assert model.report.passed, [c.name for c in model.report.failures()]


def test_flat_h11_all_validations_pass():
    model = flat(1, 1, [1, 2])
    assert model.report.passed, [c.name for c in model.report.failures()]


def test_scaled_omega_K_breaks_compatibility():
    model = flat(1, 0, [1])
    h = model.hk
    broken = HyperKahlerStructure(
        h.chart, h.g, h.I, h.J, h.K, h.omega_I, h.omega_J, h.omega_K.scale(2)
    )
    report = verify_hyperkahler(broken)
    assert not report.passed
    assert any(c.name == "compatible_omega_K" for c in report.failures())


def test_translation_field_is_not_rotating():
    model = flat(1, 0, [0], c=1)
    ex = VectorField.frame(model.chart, 0)
    report = verify_rotating(model.hk, ex)
    failures = [c.name for c in report.failures()]
    assert "rotates_J_to_K" in failures


def test_moment_map_mismatch():
    model = flat(1, 0, [0], c=1)
    zero = model.chart.zero_coefficient()
    with pytest.raises(MomentMapMismatch):
        derive_symmetry_data(model.hk, model.sd.X, zero)


def test_null_symmetry_raises_and_trivial_twist_allowed():
    with pytest.raises(NullSymmetry):
        flat(1, 1, [1, 1])
    trivial = flat(2, 0, [0, 0], c=1)
    assert trivial.sd.G.is_zero
    assert trivial.td.F.is_zero
    assert trivial.td.a.constant_value() == 1
    assert trivial.report.passed


def test_type_11():
    model = flat(1, 0, [1])
    h = model.hk
    assert type_11_check(h.omega_I, h.I)
    assert not type_11_check(h.omega_J, h.I)
    for endo in (h.I, h.J, h.K):
        assert type_11_check(model.sd.G, endo)


def test_symmetry_data_flat_h10():
    # lambda = 0: G = 0 and mu = (x^2+y^2+u^2+v^2)/4
    model = flat(1, 0, [0], c=1)
    assert model.sd.G.is_zero
    pt = Point.from_names(model.chart, {"x1": 1, "y1": 0, "u1": 0, "v1": 0})
    assert model.sd.mu.eval_at(pt.values) == F(1, 4)
    assert model.sd.normX2.eval_at(pt.values) == F(1, 4)
    # lambda = 1: G = 2(dx^dy + du^dv)
    model1 = flat(1, 0, [1])
    expected = DifferentialForm.from_components(
        model1.chart, 2, {(0, 1): 2, (2, 3): 2}
    )
    assert model1.sd.G == expected


def test_interior_product_of_G_matches_minus_da():
    # i_X G = -d(beta(X) + c) on the lambda=1 flat model
    from qktwist.forms import exterior_derivative, interior_product

    model = flat(1, 0, [1], c=5)
    chart = model.chart
    a = model.sd.X.pair(model.beta) + chart.coefficient("5")
    da = exterior_derivative(DifferentialForm.function(chart, a))
    assert interior_product(model.sd.X, model.sd.G) == -da


def test_fundamental_four_form_h10():
    model = flat(1, 0, [1])
    omega = fundamental_four_form(model.hk, model.sd.X)
    expected = DifferentialForm.monomial(model.chart, (0, 1, 2, 3), -6)
    assert omega == expected


def test_fundamental_four_form_h20_invariant():
    model = flat(2, 0, [1, 2])
    omega = fundamental_four_form(model.hk, model.sd.X)
    assert lie_derivative(model.sd.X, omega).is_zero


def test_g_alpha_rank_and_proportionality():
    from qktwist.chart import sample_points
    from qktwist.linalg import rank

    model = flat(2, 0, [1, 2])
    pts = sample_points(model.chart, 3, seed=5, avoid=[model.sd.normX2])
    for pt in pts:
        matrix = model.sd.g_alpha.eval_at(pt)
        assert rank(matrix) == 4
        # g_alpha = |X|^2 g on the span (X, IX, JX, KX)
        norm = model.sd.normX2.eval_at(pt.values)
        fields = [model.sd.X] + [e.apply(model.sd.X) for e in (model.hk.I, model.hk.J, model.hk.K)]
        for A in fields:
            for B in fields:
                lhs = model.sd.g_alpha.pair(A, B).eval_at(pt.values)
                rhs = norm * model.hk.g.pair(A, B).eval_at(pt.values)
                assert lhs == rhs


def test_smoothness_predicate():
    assert smoothness_predicate([1, 2], 3) == {"orbifold": True, "smooth": True}
    assert smoothness_predicate([2, 4], 1) == {"orbifold": True, "smooth": False}
    assert smoothness_predicate([F(1, 2)], 1) == {"orbifold": False, "smooth": False}
