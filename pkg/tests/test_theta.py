# /thetaflex/tests/test_theta.py

import math

import numpy as np
import pytest

from modules.errors import InvalidInputError, ToleranceUnachievableError
from modules.theta import (
    DerivativeSpec, PeriodMatrix, lattice_terms, reduce, theta2_eval, theta_eval,
    theta_jet2, theta_magnitude, truncation_radius,
)
from tests.helpers import brute_theta, random_period_matrix, random_point


THETA_AT_ZERO_FOR_I = 1.086434811213308


def test_theta_at_origin_for_square_lattice(omega_i):
    assert theta_eval([0.0], omega_i) == pytest.approx(THETA_AT_ZERO_FOR_I, rel=1e-12)


@pytest.mark.parametrize("g", [1, 2, 3])
def test_theta_matches_full_box_sum(rng, g):
    for _ in range(100):
        P = random_period_matrix(rng, g)
        z = random_point(rng, g, radius=2.0)
        expected = brute_theta(z, P.omega)
        assert abs(theta_eval(z, P) - expected) <= 1e-9 * theta_magnitude(z, P)


@pytest.mark.parametrize("g", [1, 2])
def test_second_order_theta_matches_full_box_sum(rng, g):
    P = random_period_matrix(rng, g)
    z = random_point(rng, g, radius=0.8)
    for eps in np.ndindex(*([2] * g)):
        expected = brute_theta(z, P.omega, eps=np.array(eps))
        assert abs(theta2_eval(np.array(eps), z, P) - expected) <= 1e-9 * max(1.0, abs(expected))


@pytest.mark.parametrize("g", [1, 2, 3])
def test_quasi_periodicity_and_evenness(rng, g):
    for _ in range(100):
        P = random_period_matrix(rng, g)
        z = random_point(rng, g)
        a = rng.integers(-2, 3, size=g)
        b = rng.integers(-2, 3, size=g)
        value = theta_eval(z, P)
        scale = theta_magnitude(z, P)
        assert abs(theta_eval(-z, P) - value) <= 1e-9 * scale
        factor = np.exp(-1j * math.pi * (b @ P.omega @ b) - 2j * math.pi * (b @ z))
        shifted = theta_eval(z + a + P.omega @ b, P)
        assert abs(shifted - factor * value) <= 1e-9 * abs(factor) * scale


@pytest.mark.parametrize("g", [1, 2])
def test_second_order_theta_is_even(rng, g):
    P = random_period_matrix(rng, g)
    for _ in range(10):
        z = random_point(rng, g)
        for eps in np.ndindex(*([2] * g)):
            eps = np.array(eps)
            scale = lattice_terms(z, P, eps).scale
            assert abs(theta2_eval(eps, -z, P) - theta2_eval(eps, z, P)) <= 1e-9 * scale


@pytest.mark.parametrize("g", [1, 2, 3])
def test_gradient_vanishes_at_origin(rng, g):
    P = random_period_matrix(rng, g)
    _, grad, _, scale = theta_jet2(np.zeros(g), P)
    assert np.max(np.abs(grad)) <= 1e-12 * scale
    for k in range(g):
        assert abs(theta_eval(np.zeros(g), P, DerivativeSpec.along(np.eye(g)[k]))) <= 1e-12 * scale


@pytest.mark.parametrize("g", [1, 2, 3])
def test_doubling_truncation_radius_changes_less_than_tolerance(rng, g):
    P = random_period_matrix(rng, g)
    # Im z = 0: punkt już zredukowany, środek sumowania w zerze
    z = rng.uniform(-0.5, 0.5, size=g).astype(complex)
    radius = int(truncation_radius(P, 1e-10, 0).radius)
    doubled = brute_theta(z, P.omega, half_width=2 * radius)
    assert abs(theta_eval(z, P, abs_tol=1e-10) - doubled) <= 1e-10 + 1e-14 * theta_magnitude(z, P)


def test_truncation_radius_is_monotone(genus2):
    radii = [truncation_radius(genus2, tol, 2).radius for tol in (1e-4, 1e-8, 1e-12, 1e-15)]
    assert radii == sorted(radii)
    assert radii[0] < radii[-1]
    thin = genus2.with_omega(0.25 * genus2.omega)
    assert truncation_radius(thin, 1e-12).radius >= truncation_radius(genus2, 1e-12).radius


def test_first_derivative_matches_finite_difference(rng):
    P = random_period_matrix(rng, 2)
    z = random_point(rng, 2, radius=0.5)
    direction = np.array([0.6, -0.3 + 0.2j])
    exact = theta_eval(z, P, DerivativeSpec.along(direction))
    fd = (theta_eval(z + 1e-5 * direction, P) - theta_eval(z - 1e-5 * direction, P)) / 2e-5
    assert abs(exact - fd) <= 1e-7 * theta_magnitude(z, P) * 2 * math.pi


@pytest.mark.parametrize("g, j, k", [(1, 0, 0), (2, 0, 0), (2, 0, 1), (2, 1, 1)])
def test_heat_equation(rng, g, j, k):
    h = 1e-4
    E = np.zeros((g, g))
    E[j, k] = E[k, j] = 1.0
    basis = np.eye(g)
    for _ in range(20):
        P = random_period_matrix(rng, g)
        z = random_point(rng, g, radius=0.5)
        lhs = (theta_eval(z, P.with_omega(P.omega + h * E)) - theta_eval(z, P.with_omega(P.omega - h * E))) / (2 * h)
        second = theta_eval(z, P, DerivativeSpec.along(basis[j], basis[k]))
        rhs = second / (2j * math.pi) if j != k else second / (4j * math.pi)
        assert abs(lhs - rhs) <= 1e-5 * max(1.0, abs(rhs))


def test_theta_jet_agrees_with_directional_derivatives(genus2):
    z = np.array([0.1 + 0.2j, -0.3 + 0.05j])
    value, grad, hess, scale = theta_jet2(z, genus2)
    basis = np.eye(2)
    assert value == pytest.approx(theta_eval(z, genus2), abs=1e-9 * scale)
    for i in range(2):
        assert grad[i] == pytest.approx(theta_eval(z, genus2, DerivativeSpec.along(basis[i])), abs=1e-9 * scale)
        for j in range(2):
            expected = theta_eval(z, genus2, DerivativeSpec.along(basis[i], basis[j]))
            assert hess[i, j] == pytest.approx(expected, abs=1e-9 * scale)
    np.testing.assert_array_equal(hess, hess.T)
    assert scale == pytest.approx(theta_magnitude(z, genus2), rel=1e-9)


def test_reduce_brings_point_into_fundamental_region(rng):
    P = random_period_matrix(rng, 2)
    z = np.array([3.7 + 2.4j, -1.2 - 3.1j])
    red = reduce(z, P)
    c = P.y_inv @ red.z_red.imag
    assert np.all(c >= -0.5 - 1e-12) and np.all(c < 0.5 + 1e-12)
    np.testing.assert_allclose(red.z_red + red.a + P.omega @ red.b, z, atol=1e-12)
    assert abs(np.exp(red.log_factor) * theta_eval(red.z_red, P) - theta_eval(z, P)) <= \
        1e-9 * theta_magnitude(z, P)


def test_reduce_rejects_wrong_dimension(genus2):
    with pytest.raises(InvalidInputError):
        reduce(np.zeros(3), genus2)


def test_truncation_radius_grows_with_derivative_order(genus2):
    r0 = truncation_radius(genus2, 1e-12, 0).radius
    r6 = truncation_radius(genus2, 1e-12, 6).radius
    assert 1 <= r0 <= r6


def test_truncation_radius_beyond_hard_limit():
    P = PeriodMatrix([[0.0015j]])
    with pytest.raises(ToleranceUnachievableError):
        theta_eval([0.0], P)


def test_period_matrix_rejects_asymmetric():
    with pytest.raises(InvalidInputError):
        PeriodMatrix([[1j, 0.2j], [0.3j, 1j]])


def test_period_matrix_rejects_indefinite_imaginary_part():
    with pytest.raises(InvalidInputError, match="lambda_min"):
        PeriodMatrix([[1j, 0], [0, -1j]])


def test_period_matrix_rejects_non_square():
    with pytest.raises(InvalidInputError):
        PeriodMatrix(np.ones((2, 3)) * 1j)


def test_period_matrix_stores_spectrum(genus2):
    assert genus2.lambda_min == pytest.approx(1.0)
    assert genus2.lambda_max == pytest.approx(2.38)
    assert genus2.g == 2


def test_derivative_order_limit():
    with pytest.raises(InvalidInputError):
        DerivativeSpec.along(*([np.ones(2)] * 7))


def test_second_order_theta_rejects_bad_characteristic(genus2):
    with pytest.raises(InvalidInputError):
        theta2_eval([2, 0], np.zeros(2), genus2)
