# /thetaflex/modules/theta.py
# Funkcja theta Riemanna, funkcje theta z charakterystykami drugiego rzędu
# i ich pochodne kierunkowe (do rzędu 6) z kontrolą błędu obcięcia.

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from modules.config import (
    DEFAULT_ABS_TOL, MAX_DERIVATIVE_ORDER, MAX_TRUNCATION_RADIUS,
    MIN_LAMBDA_MIN, SYMMETRY_TOL,
)
from modules.errors import InvalidInputError, ToleranceUnachievableError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PeriodMatrix:
    """
    Symetryczna macierz okresów Ω z dodatnio określoną częścią urojoną.

    λ_min(Im Ω) liczone jest raz przy konstrukcji i przechowywane w obiekcie.
    """
    omega: np.ndarray
    lambda_min: float = field(init=False)
    lambda_max: float = field(init=False)
    y_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        omega = np.atleast_2d(np.asarray(self.omega, dtype=complex))
        if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
            raise InvalidInputError(f"period matrix must be square, got shape {omega.shape}")
        if not np.all(np.isfinite(omega)):
            raise InvalidInputError("period matrix has non-finite entries")
        scale = max(float(np.max(np.abs(omega))), 1e-300)
        if float(np.max(np.abs(omega - omega.T))) > SYMMETRY_TOL * scale:
            raise InvalidInputError("period matrix is not symmetric")
        omega = 0.5 * (omega + omega.T)
        eigenvalues = np.linalg.eigvalsh(omega.imag)
        if eigenvalues[0] < MIN_LAMBDA_MIN:
            raise InvalidInputError(
                f"Im(omega) is not positive definite enough: lambda_min = {eigenvalues[0]:.6g}"
            )
        omega.setflags(write=False)
        y_inv = np.linalg.inv(omega.imag)
        y_inv.setflags(write=False)
        object.__setattr__(self, 'omega', omega)
        object.__setattr__(self, 'lambda_min', float(eigenvalues[0]))
        object.__setattr__(self, 'lambda_max', float(eigenvalues[-1]))
        object.__setattr__(self, 'y_inv', y_inv)

    @property
    def g(self) -> int:
        return self.omega.shape[0]

    def with_omega(self, omega) -> 'PeriodMatrix':
        return PeriodMatrix(omega)


@dataclass(frozen=True, eq=False)
class DerivativeSpec:
    """Uporządkowana lista kierunków ∂_{U1}…∂_{Uk} (k ≤ 6)."""
    directions: Tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        dirs = tuple(np.atleast_1d(np.asarray(d, dtype=complex)) for d in self.directions)
        if len(dirs) > MAX_DERIVATIVE_ORDER:
            raise InvalidInputError(f"derivative order {len(dirs)} exceeds {MAX_DERIVATIVE_ORDER}")
        for d in dirs:
            if not np.all(np.isfinite(d)):
                raise InvalidInputError("derivative direction has non-finite entries")
        object.__setattr__(self, 'directions', dirs)

    @classmethod
    def along(cls, *vectors) -> 'DerivativeSpec':
        return cls(tuple(vectors))

    @property
    def order(self) -> int:
        return len(self.directions)

    def scale(self) -> float:
        return float(np.prod([np.linalg.norm(d) for d in self.directions])) if self.directions else 1.0


@dataclass(frozen=True)
class SummationPlan:
    radius: float
    center: np.ndarray
    abs_tol: float
    term_count: int


@dataclass(frozen=True)
class ReducedPoint:
    z_red: np.ndarray
    b: np.ndarray
    a: np.ndarray
    log_factor: complex


#############################################################################
# OBCIĘCIE SZEREGU
#############################################################################

def _tail_bound(g: int, radius: int, lam_min: float, lam_max: float, order: int,
                z_bound: float, offset: float, weight: int, direction_scale: float) -> float:
    # Oszacowanie ogona gaussowskiego: liczba punktów w powłoce [r, r+1)
    # ograniczona przez (2r+3)^g, wyraz przez exp(-wπλ_min r²)
    prefactor = math.exp(weight * math.pi * lam_max * z_bound ** 2) * direction_scale
    total = 0.0
    j = 0
    while True:
        r = radius + j
        log_term = (g * math.log(2 * r + 3)
                    + order * math.log(2 * math.pi * weight * (r + 1 + z_bound + offset))
                    - weight * math.pi * lam_min * r * r)
        term = math.exp(log_term) if log_term > -700 else 0.0
        total += term
        if j > 0 and term <= 1e-3 * total or term == 0.0:
            break
        j += 1
    return prefactor * total


@lru_cache(maxsize=4096)
def _cached_radius(g, lam_min, lam_max, abs_tol, order, z_bound, offset, weight, direction_scale) -> int:
    for radius in range(1, MAX_TRUNCATION_RADIUS + 1):
        if _tail_bound(g, radius, lam_min, lam_max, order, z_bound, offset,
                       weight, direction_scale) <= abs_tol:
            return radius
    raise ToleranceUnachievableError(
        f"tolerance {abs_tol:g} needs a truncation radius above {MAX_TRUNCATION_RADIUS}"
    )


def _quantize_up(value: float, step: float = 0.25) -> float:
    return math.ceil(value / step) * step


@lru_cache(maxsize=256)
def _integer_box(g: int, half_width: int) -> np.ndarray:
    # Deterministyczny porządek leksykograficzny
    axis = range(-half_width, half_width + 1)
    return np.array(list(itertools.product(axis, repeat=g)), dtype=float).reshape(-1, g)


def truncation_radius(
    P: PeriodMatrix,
    abs_tol: float = DEFAULT_ABS_TOL,
    deriv_order: int = 0,
    z_bound: float = 0.0,
    *,
    weight: int = 1,
    offset: float = 0.0,
    direction_scale: float = 1.0,
) -> SummationPlan:
    """
    Dobiera promień R obcięcia szeregu theta.

    Args:
        P: Macierz okresów.
        abs_tol: Dopuszczalny błąd bezwzględny ogona.
        deriv_order: Rząd pochodnej (0..6), wchodzi przez obwiednię (2π‖n‖)^k.
        z_bound: Ograniczenie przesunięcia środka Y⁻¹ Im z.
        weight: 1 dla θ_A, 2 dla θ[ε;0](2z, 2Ω).
        offset: Dodatkowe przesunięcie indeksu w czynnikach pochodnych.
        direction_scale: Iloczyn norm kierunków różniczkowania.

    Returns:
        SummationPlan z promieniem i liczbą punktów sieci.
    """
    if abs_tol <= 0:
        raise InvalidInputError(f"abs_tol must be positive, got {abs_tol}")
    if not 0 <= deriv_order <= MAX_DERIVATIVE_ORDER:
        raise InvalidInputError(f"derivative order must lie in 0..{MAX_DERIVATIVE_ORDER}")
    radius = _cached_radius(
        P.g, P.lambda_min, P.lambda_max, float(abs_tol), int(deriv_order),
        _quantize_up(z_bound), _quantize_up(offset), int(weight),
        _quantize_up(max(direction_scale, 1e-12), 0.125),
    )
    box = _integer_box(P.g, radius + 1)
    term_count = int(np.count_nonzero(np.linalg.norm(box, axis=1) <= radius))
    logger.debug("truncation radius %d (g=%d, tol=%g, order=%d)", radius, P.g, abs_tol, deriv_order)
    return SummationPlan(float(radius), np.zeros(P.g, dtype=int), float(abs_tol), term_count)


#############################################################################
# REDUKCJA I SUMOWANIE
#############################################################################

def reduce(z, P: PeriodMatrix) -> ReducedPoint:
    """
    Sprowadza z = z_red + a + Ωb do obszaru, w którym Y⁻¹ Im z_red ∈ [−½, ½)^g.

    θ(z) = exp(log_factor)·θ(z_red), log_factor = −πi bᵀΩb − 2πi bᵀz_red.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (P.g,):
        raise InvalidInputError(f"point must have {P.g} coordinates, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("point has non-finite coordinates")
    b = np.floor(P.y_inv @ z.imag + 0.5)
    shifted = z - P.omega @ b
    a = np.floor(shifted.real + 0.5)
    z_red = shifted - a
    log_factor = complex(-1j * math.pi * (b @ P.omega @ b) - 2j * math.pi * (b @ z_red))
    if not b.any():
        log_factor = 0j
    return ReducedPoint(z_red, b.astype(int), a.astype(int), log_factor)


@dataclass(frozen=True)
class LatticeTerms:
    """
    Obcięty szereg w punkcie: indeksy n (przed redukcją) i wyrazy z czynnikiem
    exp(w·log_factor). Pochodne kierunkowe mnożą wyraz przez freq·⟨n, U⟩.
    """
    points: np.ndarray
    terms: np.ndarray
    freq: complex
    plan: SummationPlan

    @property
    def scale(self) -> float:
        return float(np.sum(np.abs(self.terms)))

    def derivative(self, directions: Sequence[np.ndarray] = ()) -> complex:
        weights = self.terms
        for d in directions:
            weights = weights * (self.freq * (self.points @ np.asarray(d, dtype=complex)))
        return complex(np.sum(weights))

    def taylor(self, directions: Sequence[np.ndarray], multi_indices: Iterable[Tuple[int, ...]]
               ) -> Dict[Tuple[int, ...], complex]:
        """Pochodne mieszane ∂^α dla listy multiindeksów α po podanych kierunkach."""
        factors = [self.freq * (self.points @ np.asarray(d, dtype=complex)) for d in directions]
        powers: Dict[Tuple[int, int], np.ndarray] = {}

        def power(j: int, k: int) -> np.ndarray:
            if (j, k) not in powers:
                powers[(j, k)] = factors[j] ** k
            return powers[(j, k)]

        out = {}
        for alpha in multi_indices:
            weights = self.terms
            for j, k in enumerate(alpha):
                if k:
                    weights = weights * power(j, k)
            out[tuple(alpha)] = complex(np.sum(weights))
        return out


def lattice_terms(
    z,
    P: PeriodMatrix,
    eps=None,
    deriv_order: int = 0,
    direction_scale: float = 1.0,
    abs_tol: float = DEFAULT_ABS_TOL,
) -> LatticeTerms:
    """
    Buduje obcięty szereg θ_A (eps=None) lub θ[ε;0](2z, 2Ω) w punkcie z.

    Args:
        z: Punkt w C^g.
        P: Macierz okresów.
        eps: Wektor 0/1 charakterystyki albo None.
        deriv_order: Najwyższy rząd pochodnych, które będą liczone.
        direction_scale: Ograniczenie iloczynu norm kierunków.
        abs_tol: Tolerancja obcięcia.
    """
    weight = 1
    shift = np.zeros(P.g)
    if eps is not None:
        shift = 0.5 * _check_eps(eps, P.g)
        weight = 2
    red = reduce(z, P)
    c = P.y_inv @ red.z_red.imag
    plan = truncation_radius(
        P, abs_tol, deriv_order, float(np.linalg.norm(c)), weight=weight,
        offset=float(np.linalg.norm(red.b)), direction_scale=direction_scale,
    )
    radius = int(plan.radius)
    center = np.round(-c - shift)
    m = center + shift + _integer_box(P.g, radius + 1)
    m = m[np.linalg.norm(m + c, axis=1) <= radius]
    quad = np.einsum('ni,ij,nj->n', m, P.omega, m)
    phases = 1j * math.pi * weight * (quad + 2.0 * (m @ red.z_red))
    terms = np.exp(phases + weight * red.log_factor)
    points = m - red.b
    freq = 2j * math.pi * weight
    return LatticeTerms(points, terms, freq, plan)


def _check_eps(eps, g: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(eps))
    if arr.shape != (g,) or not np.all((arr == 0) | (arr == 1)):
        raise InvalidInputError(f"characteristic must be a 0/1 vector of length {g}, got {eps!r}")
    return arr.astype(float)


def _as_spec(spec: Optional[DerivativeSpec]) -> DerivativeSpec:
    return spec if spec is not None else DerivativeSpec()


def theta_eval(z, P: PeriodMatrix, spec: Optional[DerivativeSpec] = None,
               abs_tol: float = DEFAULT_ABS_TOL) -> complex:
    """
    Zwraca ∂_{U1}…∂_{Uk} θ_A(z, Ω) przez różniczkowanie szeregu wyraz po wyrazie.
    """
    spec = _as_spec(spec)
    lt = lattice_terms(z, P, None, spec.order, spec.scale(), abs_tol)
    return lt.derivative(spec.directions)


def theta2_eval(eps, z, P: PeriodMatrix, spec: Optional[DerivativeSpec] = None,
                abs_tol: float = DEFAULT_ABS_TOL) -> complex:
    """
    Zwraca pochodną względem z funkcji θ[ε;0](2z, 2Ω)
    (każdy wyraz mnożony przez Π 4πi⟨n+ε/2, U_k⟩).
    """
    spec = _as_spec(spec)
    lt = lattice_terms(z, P, eps, spec.order, spec.scale(), abs_tol)
    return lt.derivative(spec.directions)


def theta_magnitude(z, P: PeriodMatrix, abs_tol: float = DEFAULT_ABS_TOL) -> float:
    """Suma modułów wyrazów szeregu - naturalna skala błędu zaokrągleń."""
    return lattice_terms(z, P, None, 0, 1.0, abs_tol).scale


def theta_jet2(z, P: PeriodMatrix, abs_tol: float = DEFAULT_ABS_TOL
               ) -> Tuple[complex, np.ndarray, np.ndarray, float]:
    """
    Wartość, gradient i hesjan θ_A w punkcie z (jeden przebieg po sieci).

    Returns:
        (θ, (θ_i), (θ_ij), skala).
    """
    g = P.g
    basis = list(np.eye(g))
    lt = lattice_terms(z, P, None, 2, 1.0, abs_tol)
    indices = [tuple(int(i == k) + int(j == k) for k in range(g))
               for i in range(g) for j in range(g)]
    singles = [tuple(int(i == k) for k in range(g)) for i in range(g)]
    values = lt.taylor(basis, [tuple([0] * g)] + singles + indices)
    grad = np.array([values[s] for s in singles])
    hess = np.array([values[indices[i * g + j]] for i in range(g) for j in range(g)]).reshape(g, g)
    return values[tuple([0] * g)], grad, hess, lt.scale
