# /thetaflex/tests/test_kp.py

import logging

import numpy as np
import pytest

from modules.errors import InvalidInputError, RootNotFoundError, SingularDivisorError
from modules.kp import (
    FlexData, GaugeTransform, apply_gauge, bilinear_pairing, compose_gauge, cube_grid,
    divisor_point, flex_fit, hirota_residual, hirota_terms, kp_fd_residual, kp_pde_residual,
    kp_terms, op_residual, operator_terms, specialization_residuals, tangent_flex,
)
from modules.io_cli import generate_example
from modules.kummer import theta2_vector
from tests.helpers import find_divisor_point, random_point


def random_flex(rng, g: int) -> FlexData:
    def vec():
        return rng.standard_normal(g) + 1j * rng.standard_normal(g)
    return FlexData(vec(), vec(), vec(), complex(rng.standard_normal(), rng.standard_normal()))


#############################################################################
# DANE PRZEGIĘCIA I CECHOWANIE
#############################################################################

def test_flex_data_rejects_zero_u():
    with pytest.raises(InvalidInputError):
        FlexData(np.zeros(2), np.ones(2), np.ones(2), 0.0)


def test_flex_data_rejects_mismatched_lengths():
    with pytest.raises(InvalidInputError):
        FlexData(np.ones(2), np.ones(3), np.ones(2), 0.0)


def test_flex_data_vector_layout(rng):
    F = random_flex(rng, 3)
    x = F.to_vector()
    assert x.shape == (10,)
    G = FlexData.from_vector(x, 3)
    np.testing.assert_array_equal(G.W, F.W)
    assert G.d == F.d
    assert set(F.as_dict()) == {'U', 'V', 'W', 'd'}


def test_op_residual_is_affine_in_d(rng, genus2):
    F = random_flex(rng, 2)
    F0 = FlexData(F.U, F.V, F.W, 0.0)
    difference = op_residual(genus2, F) - op_residual(genus2, F0)
    np.testing.assert_allclose(difference, F.d * theta2_vector(np.zeros(2), genus2).values,
                               rtol=1e-9, atol=1e-9)


def random_gauge(rng) -> GaugeTransform:
    lam = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0.0, 2 * np.pi))
    alpha = 0.5 * complex(rng.standard_normal(), rng.standard_normal())
    return GaugeTransform(lam, alpha, int(rng.choice([-1, 1])))


def test_op_residual_is_gauge_covariant(rng, genus2):
    for _ in range(50):
        F = random_flex(rng, 2)
        T = random_gauge(rng)
        expected = T.lam ** 4 * op_residual(genus2, F)
        scale = abs(T.lam) ** 4 * max(float(np.max(np.abs(v))) for v in operator_terms(genus2, F).values())
        assert np.max(np.abs(op_residual(genus2, apply_gauge(F, T)) - expected)) <= 1e-9 * scale


def test_identity_gauge_changes_nothing(rng):
    F = random_flex(rng, 2)
    np.testing.assert_array_equal(apply_gauge(F, GaugeTransform(1.0)).to_vector(), F.to_vector())


def test_pure_scaling_gauge(rng):
    F = random_flex(rng, 2)
    G = apply_gauge(F, GaugeTransform(2.0))
    np.testing.assert_allclose(G.U, 2 * F.U)
    np.testing.assert_allclose(G.V, 4 * F.V)
    np.testing.assert_allclose(G.W, 8 * F.W)
    assert G.d == pytest.approx(16 * F.d)


def test_gauge_composition(rng):
    F = random_flex(rng, 3)
    first = GaugeTransform(0.8 + 0.3j, -0.2 + 0.5j, -1)
    second = GaugeTransform(1.7, 0.3j, -1)
    step_by_step = apply_gauge(apply_gauge(F, first), second)
    composed = apply_gauge(F, compose_gauge(first, second))
    np.testing.assert_allclose(composed.to_vector(), step_by_step.to_vector(), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("lam, sign", [(0.0, 1), (1.0, 0), (1.0, 2)])
def test_gauge_transform_validation(lam, sign):
    with pytest.raises(InvalidInputError):
        GaugeTransform(lam, 0.0, sign)


#############################################################################
# DOPASOWANIE
#############################################################################

def test_flex_fit_elliptic(omega_i, fitted_elliptic):
    assert fitted_elliptic.converged
    assert fitted_elliptic.indecomposable
    assert fitted_elliptic.relative_residual <= 1e-8
    F = fitted_elliptic.flex
    assert np.linalg.norm(F.U) == pytest.approx(1.0)
    assert abs(F.V[0]) < 1e-8


def test_flex_fit_genus_two(genus2, fitted_genus2):
    assert fitted_genus2.converged
    assert fitted_genus2.relative_residual <= 1e-7
    F = fitted_genus2.flex
    norm0 = np.linalg.norm(theta2_vector(np.zeros(2), genus2).values)
    assert np.linalg.norm(op_residual(genus2, F)) <= 1e-6 * norm0
    assert np.linalg.norm(F.U) == pytest.approx(1.0)
    assert abs(np.vdot(F.U, F.V)) < 1e-8


@pytest.mark.parametrize("kind, seed", [("elliptic", 0), ("elliptic", 1), ("genus2-indecomposable", 0),
                                        ("genus2-indecomposable", 1), ("genus2-indecomposable", 2),
                                        ("genus2-indecomposable", 3)])
def test_flex_fit_on_generated_examples(kind, seed):
    P = generate_example(kind, seed=seed).to_period_matrix()
    result = flex_fit(P, starts=8, seed=seed)
    norm0 = np.linalg.norm(theta2_vector(np.zeros(P.g), P).values)
    assert np.linalg.norm(op_residual(P, result.flex)) <= 1e-7 * norm0


def test_flex_fit_is_deterministic(omega_i, fitted_elliptic):
    again = flex_fit(omega_i, starts=4, seed=0)
    np.testing.assert_array_equal(again.flex.to_vector(), fitted_elliptic.flex.to_vector())
    assert again.start_index == fitted_elliptic.start_index


def test_flex_fit_warns_on_decomposable_matrix(genus2_decomposable, caplog):
    with caplog.at_level(logging.WARNING, logger="modules.kp"):
        result = flex_fit(genus2_decomposable, starts=2, seed=1)
    assert not result.indecomposable
    assert "decomposable" in caplog.text


def test_flex_fit_needs_a_start(genus2):
    with pytest.raises(InvalidInputError):
        flex_fit(genus2, starts=0)


#############################################################################
# POSTAĆ DWULINIOWA
#############################################################################

def test_hirota_residual_vanishes_for_fitted_flex(rng, omega_i, fitted_elliptic, genus2, fitted_genus2):
    for P, fitted in ((omega_i, fitted_elliptic), (genus2, fitted_genus2)):
        for _ in range(50):
            z0 = random_point(rng, P.g, radius=0.6)
            H = hirota_terms(P, fitted.flex, z0)
            assert abs(H.residual) <= 1e-6 * H.scale


def test_bilinear_pairing_equals_hirota_residual(rng, genus2):
    for _ in range(3):
        F = random_flex(rng, 2)
        z0 = random_point(rng, 2, radius=0.5)
        hirota = hirota_residual(genus2, F, z0)
        scale = hirota_terms(genus2, F, z0).scale
        assert abs(bilinear_pairing(genus2, F, z0) - hirota) <= 1e-8 * max(1.0, scale)


def test_specialization_chain_on_divisor(genus2, fitted_genus2):
    F = fitted_genus2.flex
    z0 = find_divisor_point(genus2, seed=3)
    res = specialization_residuals(genus2, F, z0)
    assert abs(res['theta']) <= 1e-9
    assert abs(res['bilinear']) <= 1e-6 * res['scale']
    assert abs(res['divisor']) <= 1e-6 * res['scale']
    assert abs(res['factored'] - res['tangential']) <= 1e-8 * max(1.0, res['scale'])


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("branch", [1, -1])
def test_tangential_relation_cancels_at_tangency_points(genus2, seed, branch):
    # U = τ styczne do dywizora (θ = θ_x = 0), V z danych stycznych gałęzi b
    data = tangent_flex(genus2, find_divisor_point(genus2, seed=seed), branch)
    F = FlexData(data.tau, data.V, np.zeros(2), 0.0)
    res = specialization_residuals(genus2, F, data.z0)
    tol = 1e-9 * max(1.0, res['scale'])
    assert abs(res['theta_x']) <= tol
    assert abs(res['tangential']) <= tol
    assert abs(res['divisor']) <= tol
    assert abs(res['factored']) <= tol


#############################################################################
# RÓWNANIE KP
#############################################################################

def test_kp_exact_residual_elliptic(omega_i, fitted_elliptic):
    report = kp_pde_residual(omega_i, fitted_elliptic.flex, [0.05 + 0.1j], cube_grid(0.2, 5))
    assert len(report.table) == 125
    assert report.relative <= 1e-6


def test_kp_exact_residual_genus_two(genus2, fitted_genus2):
    z0 = np.array([0.05 + 0.1j, -0.1 + 0.05j])
    report = kp_pde_residual(genus2, fitted_genus2.flex, z0, cube_grid(0.2, 5))
    assert report.relative <= 1e-6


def test_kp_fd_residual_on_theta_is_second_order(genus2, fitted_genus2):
    z0 = np.array([0.05 + 0.1j, -0.1 + 0.05j])
    grid = cube_grid(0.2, 2)
    coarse = kp_pde_residual(genus2, fitted_genus2.flex, z0, grid, mode="fd", h=4e-3)
    fine = kp_pde_residual(genus2, fitted_genus2.flex, z0, grid, mode="fd", h=2e-3)
    assert 3.0 < coarse.max_residual / fine.max_residual < 5.0


def test_kp_exact_residual_detects_wrong_flex(genus2, fitted_genus2):
    F = fitted_genus2.flex
    wrong = FlexData(F.U, F.V, F.W + F.U, F.d)
    report = kp_pde_residual(genus2, wrong, np.array([0.05 + 0.1j, -0.1 + 0.05j]), cube_grid(0.1, 2))
    assert report.relative > 1e-3


def test_kp_residual_rejects_unknown_mode(omega_i, fitted_elliptic):
    with pytest.raises(InvalidInputError):
        kp_pde_residual(omega_i, fitted_elliptic.flex, [0.0], [(0.0, 0.0, 0.0)], mode='spectral')


def test_kp_fd_residual_of_constant_vanishes():
    terms = kp_fd_residual(lambda x, y, t: 2.0 + 0j, 0.0, 0.0, 0.0, 1e-2)
    assert abs(sum(terms.values())) < 1e-10


def test_kp_fd_residual_is_second_order():
    def u(x, y, t):
        return np.exp(x + 0.5 * y - 0.3 * t)

    value = u(0.1, 0.2, 0.3)
    exact = sum(kp_terms(value, value, value, value, 0.25 * value, -0.3 * value).values())
    e1 = abs(sum(kp_fd_residual(u, 0.1, 0.2, 0.3, 0.02).values()) - exact)
    e2 = abs(sum(kp_fd_residual(u, 0.1, 0.2, 0.3, 0.01).values()) - exact)
    assert 3.0 < e1 / e2 < 5.0


def test_cube_grid_spans_the_box():
    grid = cube_grid(0.2, 3)
    assert len(grid) == 27
    assert grid[0] == (0.0, 0.0, 0.0)
    assert grid[-1] == pytest.approx((0.2, 0.2, 0.2))


#############################################################################
# DYWIZOR I DANE STYCZNE
#############################################################################

def test_divisor_point_in_genus_one(omega_i):
    z0 = divisor_point(omega_i, [0.4 + 0.4j], [1.0])
    assert abs(z0[0] - (0.5 + 0.5j)) < 1e-8


def test_divisor_point_without_iterations_fails(omega_i):
    with pytest.raises(RootNotFoundError):
        divisor_point(omega_i, [0.4 + 0.4j], [1.0], max_iter=0)


def test_divisor_point_rejects_zero_direction(genus2):
    with pytest.raises(InvalidInputError):
        divisor_point(genus2, np.zeros(2), np.zeros(2))


def test_tangent_flex_invariants(genus2):
    z0 = find_divisor_point(genus2, seed=0)
    data = tangent_flex(genus2, z0)
    assert data.tau[data.pivot] == pytest.approx(1.0, abs=1e-15)
    assert abs(data.sigma[data.pivot]) <= 1e-14 * max(1.0, np.max(np.abs(data.sigma)))
    assert data.residual_i <= 1e-10
    assert data.residual_ii <= 1e-10 * max(1.0, np.max(np.abs(data.V)))
    assert data.lambda_t == data.sigma[1 - data.pivot]
    assert data.tau2 == data.tau[1 - data.pivot]


def test_tangent_flex_branches_share_frame(genus2):
    z0 = find_divisor_point(genus2, seed=1)
    plus = tangent_flex(genus2, z0, 1)
    minus = tangent_flex(genus2, z0, -1)
    np.testing.assert_allclose(minus.V, -plus.V, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(minus.sigma, plus.sigma, rtol=1e-12, atol=1e-14)
    assert minus.lambda_t == pytest.approx(plus.lambda_t, rel=1e-12)


def test_tangent_flex_keeps_branch_of_previous_point(genus2):
    z0 = find_divisor_point(genus2, seed=1)
    minus = tangent_flex(genus2, z0, -1)
    assert tangent_flex(genus2, z0, 1, prev=minus).branch == -1


def test_tangent_flex_is_odd_under_reflection(genus2):
    z0 = find_divisor_point(genus2, seed=2)
    here = tangent_flex(genus2, z0)
    there = tangent_flex(genus2, -z0)
    np.testing.assert_allclose(there.tau, here.tau, rtol=1e-10, atol=1e-12)
    assert there.lambda_t == pytest.approx(-here.lambda_t, rel=1e-9)


def test_tangent_flex_at_singular_point(genus2_decomposable):
    omega = genus2_decomposable.omega
    z = np.array([(1 + omega[0, 0]) / 2, (1 + omega[1, 1]) / 2])
    with pytest.raises(SingularDivisorError):
        tangent_flex(genus2_decomposable, z)


def test_tangent_flex_requires_genus_two(omega_i, genus2):
    with pytest.raises(InvalidInputError):
        tangent_flex(omega_i, [0.5 + 0.5j])
    with pytest.raises(InvalidInputError):
        tangent_flex(genus2, np.zeros(2), branch=0)
