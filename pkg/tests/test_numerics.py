# /thetaflex/tests/test_numerics.py

import math

import numpy as np
import pytest

from modules.errors import IntegrationError, InvalidInputError, NearSingularFrameError
from modules.numerics import (
    FitOptions, PathOptions, central_diff, integrate_path, lm_fit, rk4_step, svd_rank,
)


def test_svd_rank_of_zero_matrix_is_zero():
    result = svd_rank(np.zeros((3, 4)))
    assert result.rank == 0
    assert result.rtol_used == 1e-8


def test_svd_rank_of_outer_product():
    u = np.array([1.0, 2.0j, -1.0])
    v = np.array([0.5, 1.0 - 1.0j])
    result = svd_rank(np.outer(u, v))
    assert result.rank == 1
    assert np.all(np.diff(result.singular_values) <= 0)


def test_svd_rank_threshold_is_relative():
    M = np.diag([1.0, 1e-6, 1e-10])
    assert svd_rank(M, 1e-8).rank == 2
    assert svd_rank(M, 1e-4).rank == 1


@pytest.mark.parametrize("rtol", [0.0, 1.0, -1e-3])
def test_svd_rank_rejects_bad_rtol(rtol):
    with pytest.raises(InvalidInputError):
        svd_rank(np.eye(2), rtol)


def test_svd_rank_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        svd_rank(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_lm_fit_solves_complex_linear_least_squares(rng):
    A = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
    x_true = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    b = A @ x_true
    fit = lm_fit(lambda x: A @ x - b, np.zeros(3))
    assert fit.converged
    np.testing.assert_allclose(fit.solution, x_true, atol=1e-8)


def test_lm_fit_finds_complex_square_root():
    fit = lm_fit(lambda x: np.array([x[0] ** 2 - (3 + 4j)]), np.array([1 + 1j]))
    assert abs(fit.solution[0] ** 2 - (3 + 4j)) < 1e-9
    assert fit.residual_norm < 1e-9


def test_lm_fit_reports_iteration_limit():
    fit = lm_fit(lambda x: np.array([x[0] ** 2 + 1.0 + 0j]), np.array([0.3 + 0.0j]),
                 FitOptions(max_iter=2))
    assert fit.iterations <= 2
    assert not fit.converged


def test_rk4_step_is_exact_for_cubic_integrand():
    y = rk4_step(lambda s, y: np.array([3 * s ** 2]), 0.0, np.array([0j]), 0.5)
    assert abs(y[0] - 0.125) < 1e-15


def test_integrate_path_fixed_step_exponential():
    samples = integrate_path(lambda s, y: 1j * y, np.array([1 + 0j]), 0.0, 1.0, PathOptions(step=1e-2))
    assert abs(samples.end[0] - np.exp(1j)) < 1e-8
    assert samples.s[0] == 0.0 and samples.s[-1] == pytest.approx(1.0)
    assert samples.y.shape == (101, 1)


def test_integrate_path_adaptive():
    samples = integrate_path(lambda s, y: y, np.array([1 + 0j]), 0.0, 1.0,
                             PathOptions(step=0.1, adaptive=True, rtol=1e-11))
    assert abs(samples.end[0] - math.e) < 1e-8
    assert samples.s[-1] == pytest.approx(1.0)


def test_integrate_path_non_finite_field_keeps_partial_output():
    def field(s, y):
        return np.array([np.nan]) if s > 0.5 else np.array([1.0 + 0j])

    with pytest.raises(IntegrationError) as info:
        integrate_path(field, np.array([0j]), 0.0, 1.0, PathOptions(step=0.1))
    partial = info.value.partial
    assert partial is not None
    assert len(partial.s) >= 2
    assert partial.s[-1] <= 0.5 + 1e-12


def test_integrate_path_passes_through_frame_errors_with_partial_output():
    def field(s, y):
        if s > 0.3:
            raise NearSingularFrameError("lambda vanished")
        return np.array([1.0 + 0j])

    with pytest.raises(NearSingularFrameError) as info:
        integrate_path(field, np.array([0j]), 0.0, 1.0, PathOptions(step=0.1))
    assert info.value.partial is not None
    assert len(info.value.partial.s) >= 3


def test_central_diff_first_and_second_order():
    assert abs(central_diff(np.sin, 0.3, 1e-4) - math.cos(0.3)) < 1e-8
    assert abs(central_diff(np.sin, 0.3, 1e-3, order=2) + math.sin(0.3)) < 1e-6


def test_central_diff_error_shrinks_fourfold():
    exact = math.exp(0.2)
    e1 = abs(central_diff(np.exp, 0.2, 1e-2) - exact)
    e2 = abs(central_diff(np.exp, 0.2, 5e-3) - exact)
    assert 3.5 < e1 / e2 < 4.5


@pytest.mark.parametrize("h, order", [(0.0, 1), (-1e-3, 1), (1e-3, 3)])
def test_central_diff_rejects_bad_arguments(h, order):
    with pytest.raises(InvalidInputError):
        central_diff(np.sin, 0.0, h, order)


def test_svd_rank_of_dependent_rows_is_permutation_invariant(rng):
    A = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    A[2] = A[0] + A[1]
    assert svd_rank(A).rank == 3
    assert svd_rank(A[[3, 1, 0, 2]][:, [2, 0, 3, 1]]).rank == 3


def test_integrate_path_is_fourth_order():
    def error(step):
        samples = integrate_path(lambda s, y: y, np.array([1 + 0j]), 0.0, 1.0, PathOptions(step=step))
        return abs(samples.end[0] - math.e)

    assert error(0.1) >= 8.0 * error(0.05)


def test_integrate_path_adaptive_step_limit_raises_with_partial_output():
    opts = PathOptions(step=0.5, adaptive=True, rtol=1e-12, max_steps=20)
    with pytest.raises(IntegrationError) as info:
        integrate_path(lambda s, y: 50j * y, np.array([1 + 0j]), 0.0, 2.0, opts)
    partial = info.value.partial
    assert partial is not None
    assert partial.s[0] == 0.0
    assert partial.s[-1] < 2.0
