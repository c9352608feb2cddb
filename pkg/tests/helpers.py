# /thetaflex/tests/helpers.py
# Wyrocznie i generatory wspólne dla testów.

import itertools

import numpy as np

from modules.errors import PartialResultError, RootNotFoundError
from modules.kp import divisor_point, tangent_flex
from modules.theta import PeriodMatrix
from modules.translation import TraceOptions, trace_theta_translation


def random_period_matrix(rng, g: int, c: float = 0.5) -> PeriodMatrix:
    """Ω = S + i(BBᵀ + cI) z λ_min ≥ c."""
    S = rng.uniform(-0.5, 0.5, size=(g, g))
    B = 0.3 * rng.standard_normal((g, g))
    return PeriodMatrix(0.5 * (S + S.T) + 1j * (B @ B.T + c * np.eye(g)))


def random_point(rng, g: int, radius: float = 1.0) -> np.ndarray:
    z = rng.standard_normal(g) + 1j * rng.standard_normal(g)
    return radius * rng.uniform(0.1, 1.0) * z / np.linalg.norm(z)


def brute_theta(z, omega, half_width: int = 12, eps=None) -> complex:
    """Pełna suma po pudełku |n_i| ≤ half_width (θ_A albo θ[ε;0](2z, 2Ω))."""
    omega = np.atleast_2d(np.asarray(omega, dtype=complex))
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    g = omega.shape[0]
    n = np.array(list(itertools.product(range(-half_width, half_width + 1), repeat=g)), dtype=float)
    if eps is None:
        phase = np.einsum('ni,ij,nj->n', n, omega, n) + 2.0 * (n @ z)
    else:
        m = n + 0.5 * np.asarray(eps, dtype=float)
        phase = 2.0 * np.einsum('ni,ij,nj->n', m, omega, m) + 4.0 * (m @ z)
    return complex(np.sum(np.exp(1j * np.pi * phase)))


def find_divisor_point(P: PeriodMatrix, seed: int = 0, min_lambda: float = 0.05) -> np.ndarray:
    """Punkt dywizora z Newtona z losowego startu, z dala od punktów rozgałęzienia."""
    rng = np.random.default_rng(seed)
    for _ in range(40):
        base = rng.uniform(-0.4, 0.4, P.g) + 1j * rng.uniform(-0.4, 0.4, P.g)
        try:
            z0 = divisor_point(P, base, np.array([1.0, 0.5])[:P.g])
        except RootNotFoundError:
            continue
        if P.g != 2 or abs(tangent_flex(P, z0).lambda_t) >= min_lambda:
            return z0
    raise AssertionError("no usable divisor point found")


def healthy_trace(P: PeriodMatrix, span: float, step: float, seed: int = 0, branch: int = 1):
    """
    Pierwszy ślad (po kolejnych ziarnach), który kończy się bez błędu i na którym
    |λ| nie spada poniżej 30% wartości startowej.
    """
    for attempt in range(20):
        z0 = find_divisor_point(P, seed + attempt)
        try:
            result = trace_theta_translation(P, z0, branch, span, TraceOptions(step=step))
        except PartialResultError:
            continue
        lam = np.hypot(result.frames['lambda_re'], result.frames['lambda_im'])
        if lam.min() >= 0.3 * lam.iloc[0]:
            return z0, result
    raise AssertionError("no healthy trace found")
