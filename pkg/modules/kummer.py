# /thetaflex/modules/kummer.py
# Wektor θ⃗₂, odwzorowanie Kummera ψ_A, macierz rzędu nierozkładalności
# i test rzędu Gunninga-Weltersa.

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from modules.config import DEFAULT_ABS_TOL, DEFAULT_RTOL
from modules.errors import DegeneratePointError, InvalidInputError
from modules.numerics import svd_rank
from modules.theta import (
    DerivativeSpec, LatticeTerms, PeriodMatrix, lattice_terms, theta_eval,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Theta2Vector:
    g: int
    values: np.ndarray

    @property
    def basis_order(self) -> List[np.ndarray]:
        return eps_vectors(self.g)


@dataclass(frozen=True, eq=False)
class KummerPoint:
    coords: np.ndarray
    normalization: int

    def distance(self, other: 'KummerPoint') -> float:
        """Odległość punktów rzutowych (sinus kąta między prostymi)."""
        a = self.coords / np.linalg.norm(self.coords)
        b = other.coords / np.linalg.norm(other.coords)
        return float(np.sqrt(max(0.0, 1.0 - abs(np.vdot(a, b)) ** 2)))


@dataclass(frozen=True, eq=False)
class JetOperators:
    D1: np.ndarray
    D2: np.ndarray

    def __post_init__(self):
        d1 = np.atleast_1d(np.asarray(self.D1, dtype=complex))
        d2 = np.atleast_1d(np.asarray(self.D2, dtype=complex))
        if not np.any(d1):
            raise InvalidInputError("D1 must be a nonzero vector field")
        object.__setattr__(self, 'D1', d1)
        object.__setattr__(self, 'D2', d2)


def eps_vectors(g: int) -> List[np.ndarray]:
    """Charakterystyki ε w kolejności indeksu Σ ε_i 2^{i−1}."""
    return [np.array([(index >> i) & 1 for i in range(g)]) for index in range(2 ** g)]


def theta2_terms(z, P: PeriodMatrix, deriv_order: int = 0, direction_scale: float = 1.0,
                 abs_tol: float = DEFAULT_ABS_TOL) -> List[LatticeTerms]:
    """Obcięte szeregi wszystkich składowych θ⃗₂ w punkcie z."""
    return [lattice_terms(z, P, eps, deriv_order, direction_scale, abs_tol)
            for eps in eps_vectors(P.g)]


def theta2_vector(z, P: PeriodMatrix, spec: Optional[DerivativeSpec] = None,
                  abs_tol: float = DEFAULT_ABS_TOL) -> Theta2Vector:
    """
    Zwraca wektor (…, ∂θ[ε;0](2z, 2Ω), …) o długości 2^g.

    Args:
        z: Punkt w C^g.
        P: Macierz okresów.
        spec: Pochodna kierunkowa (domyślnie brak).
        abs_tol: Tolerancja obcięcia wspólna dla wszystkich składowych.
    """
    spec = spec if spec is not None else DerivativeSpec()
    values = np.array([lt.derivative(spec.directions)
                       for lt in theta2_terms(z, P, spec.order, spec.scale(), abs_tol)])
    return Theta2Vector(P.g, values)


def kummer_map(z, P: PeriodMatrix) -> KummerPoint:
    """Rzutowanie θ⃗₂(z); współrzędna o największym module jest równa 1."""
    values = theta2_vector(z, P).values
    index = int(np.argmax(np.abs(values)))
    if abs(values[index]) < 1e-12:
        raise DegeneratePointError(f"all second-order theta values vanish at z = {z!r}")
    coords = values / values[index]
    coords[index] = 1.0
    return KummerPoint(coords, index)


def second_derivative_pairs(g: int) -> List[tuple]:
    return [(i, j) for i in range(g) for j in range(i, g)]


def prop1_matrix(P: PeriodMatrix) -> np.ndarray:
    """
    Macierz 2^g × (g(g+1)/2 + 1): θ⃗₂(0) i drugie pochodne ∂²θ⃗₂/∂z_i∂z_j(0), i ≤ j.
    """
    g = P.g
    basis = np.eye(g)
    zero = np.zeros(g)
    columns = [theta2_vector(zero, P).values]
    for i, j in second_derivative_pairs(g):
        columns.append(theta2_vector(zero, P, DerivativeSpec.along(basis[i], basis[j])).values)
    return np.column_stack(columns)


def is_indecomposable(P: PeriodMatrix, rtol: float = DEFAULT_RTOL) -> bool:
    """Nierozkładalność: rząd macierzy prop1_matrix równy g(g+1)/2 + 1."""
    result = svd_rank(prop1_matrix(P), rtol)
    expected = P.g * (P.g + 1) // 2 + 1
    logger.debug("prop1 rank %d of %d, singular values %s", result.rank, expected, result.singular_values)
    return result.rank == expected


def gw_matrix(z, P: PeriodMatrix, J: JetOperators) -> np.ndarray:
    """Kolumny θ⃗₂(z), D₁θ⃗₂(z), (D₂ + ½D₁²)θ⃗₂(z)."""
    base = theta2_vector(z, P).values
    first = theta2_vector(z, P, DerivativeSpec.along(J.D1)).values
    second = (theta2_vector(z, P, DerivativeSpec.along(J.D2)).values
              + 0.5 * theta2_vector(z, P, DerivativeSpec.along(J.D1, J.D1)).values)
    return np.column_stack([base, first, second])


def gw_rank(z, P: PeriodMatrix, J: JetOperators, rtol: float = DEFAULT_RTOL) -> int:
    """Rząd macierzy (θ⃗₂, Δ₁θ⃗₂, Δ₂θ⃗₂) z Δ₂ = D₂ + ½D₁²."""
    return svd_rank(gw_matrix(z, P, J), rtol).rank


def riemann_ratio(z, w, P: PeriodMatrix) -> complex:
    """
    R(z, w) = θ(z+w)θ(z−w) / Σ_ε θ[ε;0](2z,2Ω)·θ[ε;0](2w,2Ω).

    Stała normalizacji jest mierzona, nie zakładana.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    numerator = theta_eval(z + w, P) * theta_eval(z - w, P)
    denominator = complex(np.sum(theta2_vector(z, P).values * theta2_vector(w, P).values))
    if abs(denominator) < 1e-8:
        raise DegeneratePointError("denominator of the quadratic identity is too small")
    return numerator / denominator
