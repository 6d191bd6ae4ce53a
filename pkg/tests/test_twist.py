"""Twist data validation, twisted derivative, principal extensions."""

from fractions import Fraction

import pytest

from qktwist import Chart, DifferentialForm, VectorField
from qktwist.errors import NotACoframe, NotBasic, NotExact, NotInvariant
from qktwist.forms import exterior_derivative, interior_product, lie_derivative, wedge
from qktwist.models.flat import FlatModelParams, build_flat_model
from qktwist.twist import (
    TwistData,
    basic_form_check,
    principal_extension,
    structure_constants,
    twisted_derivative,
    twisted_integrability_check,
    validate_twist_data,
)

F = Fraction


def flat(p, q, lambdas, c=0, k=1):
    return build_flat_model(FlatModelParams(p, q, lambdas, c=c, k=k))


def test_validate_canonical_flat_data():
    model = flat(1, 0, [1], c=1)
    report = validate_twist_data(model.td)
    assert report.passed
    # the example twist function: a = beta(X) + c
    a_example = model.sd.X.pair(model.beta) + model.chart.coefficient("1")
    assert (model.td.a - a_example).is_zero


def test_validate_rejects_moment_map_as_twist_function():
    model = flat(1, 0, [1], c=1)
    bad = TwistData(model.sd.X, model.sd.G, model.sd.mu)
    report = validate_twist_data(bad)
    assert not report.passed
    assert any(c.name == "hamiltonian" for c in report.failures())


def test_validate_trivial_twist():
    chart = Chart.coordinate("r2", ["x", "y"])
    td = TwistData(
        VectorField(chart, ["y", "0-x"]),
        DifferentialForm.zero(chart, 2),
        chart.coefficient("1"),
    )
    assert validate_twist_data(td).passed


def test_twisted_derivative_degree0_and_trivial():
    model = flat(1, 0, [1], c=1)
    chart = model.chart
    f = DifferentialForm.function(chart, model.sd.mu)
    # X-invariant function: d_W f = df (no contraction term in degree 0)
    assert twisted_derivative(model.td, f) == exterior_derivative(f)
    # trivial twist data: d_W = d on everything
    trivial = TwistData(model.sd.X, DifferentialForm.zero(chart, 2), chart.coefficient("1"))
    omega = model.hk.omega_I
    assert twisted_derivative(trivial, omega) == exterior_derivative(omega)


def test_twisted_derivative_requires_invariance():
    model = flat(1, 0, [1], c=1)
    with pytest.raises(NotInvariant):
        twisted_derivative(model.td, model.hk.omega_J)


def test_twisted_derivative_squares_to_zero_on_invariant_forms():
    model = flat(1, 0, [1], c=1)
    for alpha in (
        model.hk.omega_I,
        DifferentialForm.function(model.chart, model.sd.mu),
        model.sd.alpha0,
    ):
        once = twisted_derivative(model.td, alpha, check_invariance=False)
        twice = twisted_derivative(model.td, once, check_invariance=False)
        assert twice.is_zero


def test_twisted_derivative_leibniz_for_invariant_functions():
    model = flat(1, 0, [1], c=1)
    td = model.td
    f = model.sd.mu
    alpha = model.hk.omega_I
    lhs = twisted_derivative(td, alpha.scale(f), check_invariance=False)
    df = exterior_derivative(DifferentialForm.function(model.chart, f))
    rhs = wedge(df, alpha) + twisted_derivative(td, alpha, check_invariance=False).scale(f)
    assert lhs == rhs


def test_twisted_integrability():
    model = flat(1, 0, [1], c=1)
    assert twisted_integrability_check(model.td, model.hk.I)
    bad = TwistData(model.sd.X, model.hk.omega_J, model.td.a)
    assert not twisted_integrability_check(bad, model.hk.I)
    trivial = TwistData(model.sd.X, DifferentialForm.zero(model.chart, 2), model.td.a)
    assert twisted_integrability_check(trivial, model.hk.I)


def test_principal_extension_flat_model():
    model = flat(1, 0, [1], c=1)
    ext = principal_extension(model.chart, model.td, model.beta, c=1)
    # theta(X') = a and d tau (X') = c
    theta = ext.theta
    assert (ext.Xprime.pair(theta) - ext.a).is_zero
    dtau = ext.chart.scalar_diffs[ext.tau_index]
    assert ext.Xprime.pair(dtau).constant_value() == 1
    # theta itself is not basic: i_X' theta = a != 0
    assert not basic_form_check(ext, theta)
    # pullback of an invariant form with zero contraction is basic
    pulled = ext.lift_form(model.hk.omega_I)
    corrected = pulled - wedge(theta, ext.lift_form(
        interior_product(model.sd.X, model.hk.omega_I))).scale(ext.a.inverse())
    assert basic_form_check(ext, corrected)


def test_principal_extension_requires_exact_primitive():
    model = flat(1, 0, [1], c=1)
    with pytest.raises(NotExact):
        principal_extension(model.chart, model.td, model.beta.scale(2), c=1)


def test_principal_extension_trivial_product():
    chart = Chart.coordinate("r2", ["x", "y"])
    td = TwistData(
        VectorField(chart, ["y", "0-x"]),
        DifferentialForm.zero(chart, 2),
        chart.coefficient("1"),
    )
    ext = principal_extension(chart, td, DifferentialForm.zero(chart, 1), c=1)
    assert ext.chart.dim == 3
    # X' = X + c e_theta
    assert (ext.Xprime.comps[2] - ext.chart.coefficient("1")).is_zero


def test_horizontalized_d_matches_twisted_derivative():
    # d of the basic representative, expressed without theta, equals d_W
    model = flat(1, 0, [1], c=1)
    ext = principal_extension(model.chart, model.td, model.beta, c=1)
    theta = ext.theta
    for alpha in (model.hk.omega_I, model.sd.alpha0):
        lifted = ext.lift_form(alpha)
        corrected = lifted - wedge(theta, ext.lift_form(
            interior_product(model.sd.X, alpha))).scale(ext.a.inverse())
        d_corrected = exterior_derivative(corrected)
        dw = ext.lift_form(twisted_derivative(model.td, alpha, check_invariance=False))
        residual = d_corrected - dw
        # the residual is annihilated by the horizontal distribution:
        # every component carries a theta index
        for idx in residual.comps:
            assert ext.theta_index in idx


def test_structure_constants_coordinate_abelian():
    chart = Chart.coordinate("r3", ["x", "y", "z"])
    coframe = [DifferentialForm.coframe(chart, i) for i in range(3)]
    sc = structure_constants(coframe)
    assert sc.all_constant and sc.jacobi_zero
    assert not sc.coefficients


def test_structure_constants_rh2():
    chart = Chart("rh2", ["a", "b"], [])
    ab = DifferentialForm.monomial(chart, (0, 1), 1)
    chart.set_structure(0, DifferentialForm.zero(chart, 2))
    chart.set_structure(1, ab.scale(-2))
    coframe = [DifferentialForm.coframe(chart, 0), DifferentialForm.coframe(chart, 1)]
    sc = structure_constants(coframe)
    assert sc.all_constant and sc.jacobi_zero
    # db = -2 a^b means c^2_{12} = 2
    assert sc.values == {(1, 0, 1): F(2)}


def test_structure_constants_rejects_dependent_coframe():
    chart = Chart.coordinate("r2", ["x", "y"])
    dx = DifferentialForm.coframe(chart, 0)
    with pytest.raises(NotACoframe):
        structure_constants([dx, dx.scale(2)])


def test_structure_constants_rejects_nonbasic_on_extension():
    model = flat(1, 0, [1], c=1)
    ext = principal_extension(model.chart, model.td, model.beta, c=1)
    coframe = [ext.lift_form(DifferentialForm.coframe(model.chart, i)) for i in range(4)]
    # dx1 etc. are not basic here: i_X' dx1 = X^x != 0
    with pytest.raises(NotBasic):
        structure_constants(coframe, extension=ext)
