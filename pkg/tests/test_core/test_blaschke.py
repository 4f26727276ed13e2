import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blaschke_cyclicity.core.blaschke import BlaschkeProduct
from blaschke_cyclicity.core.exceptions import DomainError
from blaschke_cyclicity.core.policy import NumericPolicy

zeros_in_disk = st.lists(
    st.tuples(
        st.floats(min_value=0.0, max_value=0.9),
        st.floats(min_value=0.0, max_value=2 * np.pi),
    ).map(lambda polar: polar[0] * np.exp(1j * polar[1])),
    min_size=1,
    max_size=4,
)


def test_monomial_is_z_to_the_d():
    b = BlaschkeProduct.monomial(3)
    assert b.degree == 3
    assert b.is_monomial
    assert b.evaluate(0.5) == pytest.approx(0.125)
    assert b.evaluate(0.5j) == pytest.approx((0.5j) ** 3)


def test_single_zero_at_origin_with_default_phase():
    # (0 - z) / (1 - 0 z) = -z
    b = BlaschkeProduct((0j,))
    assert b.evaluate(0.3) == pytest.approx(-0.3)


def test_close_zeros_are_merged():
    b = BlaschkeProduct((0.5, 0.5 + 1e-14, -0.2))
    assert b.zeros == (0.5 + 0j, -0.2 + 0j)
    assert b.multiplicities == (2, 1)
    assert b.degree == 3


def test_invalid_products():
    # Zero on the circle
    with pytest.raises(DomainError):
        BlaschkeProduct((1.0,))

    # No zeros at all
    with pytest.raises(ValueError):
        BlaschkeProduct(())

    # Phase that is not unimodular
    with pytest.raises(ValueError):
        BlaschkeProduct((0.5,), phase=2.0)

    # Bad multiplicity
    with pytest.raises(ValueError):
        BlaschkeProduct((0.5,), (0,))


def test_evaluate_outside_disk_raises():
    b = BlaschkeProduct((0.5,))
    with pytest.raises(DomainError):
        b.evaluate(1.5)


@given(zeros_in_disk)
@settings(max_examples=25, deadline=None)
def test_unimodular_on_the_circle(zeros):
    b = BlaschkeProduct(tuple(zeros))
    samples = b.boundary_samples(256)
    np.testing.assert_allclose(np.abs(samples), 1.0, atol=1e-12)


@given(zeros_in_disk)
@settings(max_examples=25, deadline=None)
def test_vanishes_at_its_zeros(zeros):
    b = BlaschkeProduct(tuple(zeros))
    for zero in b.zeros:
        assert abs(b.evaluate(zero)) < 1e-12


def test_derivatives_of_monomial():
    b = BlaschkeProduct.monomial(2)
    w = 0.3 + 0.1j
    assert b.evaluate_derivative(w, 0) == pytest.approx(w**2)
    assert b.evaluate_derivative(w, 1) == pytest.approx(2 * w)
    assert b.evaluate_derivative(w, 2) == pytest.approx(2)
    assert abs(b.evaluate_derivative(w, 3)) < 1e-14


def test_derivative_of_single_factor():
    # b(z) = (a - z) / (1 - a z), b'(z) = (a^2 - 1) / (1 - a z)^2
    a, w = 0.5, 0.2
    b = BlaschkeProduct((a,))
    assert b.evaluate_derivative(w, 1) == pytest.approx((a * a - 1) / (1 - a * w) ** 2)


def test_derivative_against_finite_differences():
    b = BlaschkeProduct((0.5, -0.3 + 0.4j), (2, 1))
    w, h = 0.1 + 0.2j, 1e-6
    numeric = (b.evaluate(w + h) - b.evaluate(w - h)) / (2 * h)
    assert b.evaluate_derivative(w, 1) == pytest.approx(numeric, rel=1e-8)


def test_derivative_order_validation():
    b = BlaschkeProduct((0.5,), policy=NumericPolicy(max_derivative_order=4))
    with pytest.raises(ValueError):
        b.evaluate_derivative(0.1, 5)
    with pytest.raises(ValueError):
        b.evaluate_derivative(0.1, -1)
    with pytest.raises(DomainError):
        b.evaluate_derivative(1.0, 1)


def test_boundary_samples_need_a_power_of_two():
    b = BlaschkeProduct((0.5,))
    with pytest.raises(ValueError):
        b.boundary_samples(100)


def test_taylor_coefficients_of_monomial():
    coeffs = BlaschkeProduct.monomial(2).taylor_coefficients(6)
    np.testing.assert_allclose(coeffs, [0, 0, 1, 0, 0, 0], atol=1e-14)


def test_power_and_without_zero():
    b = BlaschkeProduct((0.5, -0.4))
    assert b.power(3).degree == 6
    assert b.power(2).evaluate(0.1) == pytest.approx(b.evaluate(0.1) ** 2)

    rest = b.without_zero(0)
    assert rest.zeros == (-0.4 + 0j,)
    assert BlaschkeProduct((0.5,)).without_zero(0) is None


def test_json_form():
    b = BlaschkeProduct((0j, 0.5), (2, 1))
    assert BlaschkeProduct.from_dict(b.to_dict()) == b

    # Two zeros at the origin with the default phase give (-z)^2 = z^2
    data = {"zeros": [{"re": 0.0, "im": 0.0, "mult": 2}]}
    assert BlaschkeProduct.from_dict(data).evaluate(0.5) == pytest.approx(0.25)

    with pytest.raises(ValueError):
        BlaschkeProduct.from_dict({"zeros": [], "extra": 1})
