# /thetaflex/modules/kp.py
# Relacje typu KP: postać operatorowa, dwuliniowa (Hirota) i równanie KP,
# grupa cechowania, dopasowanie danych przegięcia i specjalizacja styczna.

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from modules.config import (
    DEFAULT_STARTS, DIVISOR_TOL, NEWTON_MAX_ITER,
    TANGENT_DEGENERACY,
)
from modules.errors import (
    DegenerateTangentError, InvalidInputError, PoleError, RootNotFoundError,
    SingularDivisorError,
)
from modules.kummer import is_indecomposable, theta2_terms, theta2_vector
from modules.numerics import FitOptions, central_diff, lm_fit
from modules.theta import DerivativeSpec, PeriodMatrix, lattice_terms, theta_jet2

logger = logging.getLogger(__name__)


def _vector(value) -> np.ndarray:
    return np.atleast_1d(np.asarray(value, dtype=complex))


@dataclass(frozen=True, eq=False)
class FlexData:
    """Czwórka (U, V, W, d) relacji operatorowej."""
    U: np.ndarray
    V: np.ndarray
    W: np.ndarray
    d: complex = 0j

    def __post_init__(self):
        U, V, W = _vector(self.U), _vector(self.V), _vector(self.W)
        if not (U.shape == V.shape == W.shape):
            raise InvalidInputError("U, V and W must have the same length")
        if not np.any(U):
            raise InvalidInputError("U must be nonzero")
        object.__setattr__(self, 'U', U)
        object.__setattr__(self, 'V', V)
        object.__setattr__(self, 'W', W)
        object.__setattr__(self, 'd', complex(self.d))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.U, self.V, self.W, [self.d]])

    @classmethod
    def from_vector(cls, x: np.ndarray, g: int) -> 'FlexData':
        return cls(x[:g], x[g:2 * g], x[2 * g:3 * g], x[3 * g])

    def as_dict(self) -> Dict[str, list]:
        return {name: [[float(v.real), float(v.imag)] for v in np.atleast_1d(getattr(self, name))]
                for name in ('U', 'V', 'W', 'd')}


@dataclass(frozen=True)
class GaugeTransform:
    lam: complex
    alpha: complex = 0j
    sign: int = 1

    def __post_init__(self):
        if self.lam == 0:
            raise InvalidInputError("gauge parameter lambda must be nonzero")
        if self.sign not in (1, -1):
            raise InvalidInputError(f"gauge sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True, eq=False)
class TangencyData:
    z0: np.ndarray
    tau: np.ndarray
    sigma: np.ndarray
    lambda_t: complex
    branch: int
    V: np.ndarray
    pivot: int = 0
    residual_i: float = 0.0
    residual_ii: float = 0.0

    @property
    def tau2(self) -> complex:
        return complex(self.tau[1 - self.pivot])


#############################################################################
# POSTAĆ OPERATOROWA
#############################################################################

def _operator_directions(F: FlexData) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Pola wektorowe różniczkują θ[ε;0](u, 2Ω) po własnym argumencie u = 2z
    return 0.5 * F.U, 0.5 * F.V, 0.5 * F.W


def operator_terms(P: PeriodMatrix, F: FlexData) -> Dict[str, np.ndarray]:
    """Składniki D₁⁴θ⃗₂(0), −D₁D₃θ⃗₂(0), ¾D₂²θ⃗₂(0), dθ⃗₂(0)."""
    u, v, w = _operator_directions(F)
    zero = np.zeros(P.g)
    return {
        'D1^4': theta2_vector(zero, P, DerivativeSpec.along(u, u, u, u)).values,
        '-D1D3': -theta2_vector(zero, P, DerivativeSpec.along(u, w)).values,
        '3/4 D2^2': 0.75 * theta2_vector(zero, P, DerivativeSpec.along(v, v)).values,
        'd': F.d * theta2_vector(zero, P).values,
    }


def op_residual(P: PeriodMatrix, F: FlexData) -> np.ndarray:
    """Wektor [D₁⁴ − D₁D₃ + ¾D₂² + d]θ⃗₂(0) długości 2^g."""
    return sum(operator_terms(P, F).values())


class _OperatorModel:
    """Szybka wersja op_residual na zamrożonych szeregach θ⃗₂(0) (do dopasowania)."""

    def __init__(self, P: PeriodMatrix):
        self.g = P.g
        self.series = theta2_terms(np.zeros(P.g), P, deriv_order=4, direction_scale=1e3)

    def __call__(self, F: FlexData) -> np.ndarray:
        return self.evaluate(*_operator_directions(F), F.d)

    def evaluate(self, u, v, w, d) -> np.ndarray:
        out = np.empty(len(self.series), dtype=complex)
        for k, lt in enumerate(self.series):
            pu = lt.freq * (lt.points @ u)
            pv = lt.freq * (lt.points @ v)
            pw = lt.freq * (lt.points @ w)
            out[k] = np.sum(lt.terms * (pu ** 4 - pu * pw + 0.75 * pv * pv + d))
        return out


#############################################################################
# GRUPA CECHOWANIA
#############################################################################

def apply_gauge(F: FlexData, T: GaugeTransform) -> FlexData:
    """
    U → λU, V → ±(λ²V + 2αλU), W → λ³W + 3λ²αV + 3λα²U, d → λ⁴d.
    """
    lam, alpha = T.lam, T.alpha
    return FlexData(
        U=lam * F.U,
        V=T.sign * (lam ** 2 * F.V + 2 * alpha * lam * F.U),
        W=lam ** 3 * F.W + 3 * lam ** 2 * alpha * F.V + 3 * lam * alpha ** 2 * F.U,
        d=lam ** 4 * F.d,
    )


def compose_gauge(first: GaugeTransform, second: GaugeTransform) -> GaugeTransform:
    """Złożenie: najpierw `first`, potem `second`."""
    return GaugeTransform(
        lam=first.lam * second.lam,
        alpha=second.lam * first.alpha + first.sign * second.alpha,
        sign=first.sign * second.sign,
    )


def _fix_gauge(F: FlexData) -> FlexData:
    # ‖U‖ = 1, pierwsza współrzędna o maksymalnym module dodatnia rzeczywista
    k = int(np.argmax(np.abs(F.U)))
    phase = F.U[k] / abs(F.U[k])
    F = apply_gauge(F, GaugeTransform(np.conj(phase) / np.linalg.norm(F.U)))
    # ⟨V, conj(U)⟩ = 0
    alpha = -np.vdot(F.U, F.V) / 2.0
    F = apply_gauge(F, GaugeTransform(1.0, alpha))
    nonzero = np.flatnonzero(np.abs(F.V) > 1e-14 * max(np.linalg.norm(F.V), 1e-300))
    if nonzero.size and F.V[nonzero[0]].real < 0:
        F = apply_gauge(F, GaugeTransform(1.0, 0.0, -1))
    return F


#############################################################################
# DOPASOWANIE DANYCH PRZEGIĘCIA
#############################################################################

@dataclass(frozen=True, eq=False)
class FlexFitResult:
    flex: FlexData
    residual_norm: float
    relative_residual: float
    converged: bool
    indecomposable: bool
    start_index: int
    iterations: int


def flex_fit(
    P: PeriodMatrix,
    starts: int = DEFAULT_STARTS,
    seed: int = 0,
    opts: Optional[FitOptions] = None,
    max_relative_residual: float = 1e-7,
) -> FlexFitResult:
    """
    Dopasowuje (U, V, W, d) minimalizując ‖op_residual‖ przy ustalonym cechowaniu.

    Args:
        P: Macierz okresów (powinna być nierozkładalna).
        starts: Liczba startów wielokrotnych.
        seed: Ziarno generatora startów.
        opts: Ustawienia metody Levenberga-Marquardta.
        max_relative_residual: Próg ‖op_residual‖ / ‖θ⃗₂(0)‖ uznania zbieżności.

    Returns:
        FlexFitResult z najlepszym startem (remis: niższy indeks startu).
    """
    if starts < 1:
        raise InvalidInputError("at least one start is required")
    g = P.g
    indecomposable = is_indecomposable(P)
    if not indecomposable:
        logger.warning("flex fit on a decomposable period matrix; expect a degenerate solution")

    model = _OperatorModel(P)
    norm0 = float(np.linalg.norm(theta2_vector(np.zeros(g), P).values))

    def residual(x: np.ndarray) -> np.ndarray:
        U, V, W, d = x[:g], x[g:2 * g], x[2 * g:3 * g], x[3 * g]
        r = model.evaluate(0.5 * U, 0.5 * V, 0.5 * W, d) / norm0
        constraints = [np.vdot(U, U) - 1.0, np.vdot(U, V)]
        return np.concatenate([r, constraints])

    rng = np.random.default_rng(seed)
    best: Optional[FlexFitResult] = None
    for index in range(starts):
        U0 = rng.standard_normal(g) + 1j * rng.standard_normal(g)
        U0 /= np.linalg.norm(U0)
        V0 = rng.standard_normal(g) + 1j * rng.standard_normal(g)
        V0 -= np.vdot(U0, V0) * U0
        W0 = rng.standard_normal(g) + 1j * rng.standard_normal(g)
        d0 = rng.standard_normal() + 1j * rng.standard_normal()
        fit = lm_fit(residual, np.concatenate([U0, V0, W0, [d0]]), opts)
        try:
            flex = _fix_gauge(FlexData.from_vector(fit.solution, g))
        except InvalidInputError:
            logger.info("start %d collapsed to U = 0", index)
            continue
        norm = float(np.linalg.norm(model(flex)))
        relative = norm / norm0
        logger.info("start %d: relative residual %.3e after %d iterations", index, relative, fit.iterations)
        candidate = FlexFitResult(
            flex=flex,
            residual_norm=norm,
            relative_residual=relative,
            converged=bool(relative <= max_relative_residual),
            indecomposable=indecomposable,
            start_index=index,
            iterations=fit.iterations,
        )
        if best is None or candidate.residual_norm < best.residual_norm:
            best = candidate
    if best is None:
        raise RootNotFoundError("every start of the flex fit collapsed")
    return best


#############################################################################
# POSTAĆ DWULINIOWA
#############################################################################

_HIROTA_INDICES = [(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0), (4, 0, 0),
                   (0, 1, 0), (0, 2, 0), (0, 0, 1), (1, 0, 1)]


@dataclass(frozen=True)
class HirotaTerms:
    terms: Dict[str, complex]
    derivatives: Dict[Tuple[int, int, int], complex]

    @property
    def residual(self) -> complex:
        return complex(sum(self.terms.values()))

    @property
    def scale(self) -> float:
        return max(abs(v) for v in self.terms.values())


def _directional_scale(F: FlexData, order: int) -> float:
    return max(1.0, float(np.linalg.norm(F.U)), float(np.linalg.norm(F.V)),
               float(np.linalg.norm(F.W))) ** order


def hirota_terms(P: PeriodMatrix, F: FlexData, z0) -> HirotaTerms:
    """Poszczególne składniki relacji dwuliniowej w (x, y, t) = (0, 0, 0)."""
    lt = lattice_terms(z0, P, None, 4, _directional_scale(F, 4))
    D = lt.taylor([F.U, F.V, F.W], _HIROTA_INDICES)
    th = D[(0, 0, 0)]
    terms = {
        'theta_xxxx*theta': D[(4, 0, 0)] * th,
        '-4*theta_xxx*theta_x': -4 * D[(3, 0, 0)] * D[(1, 0, 0)],
        '3*theta_xx^2': 3 * D[(2, 0, 0)] ** 2,
        '4*theta_x*theta_t': 4 * D[(1, 0, 0)] * D[(0, 0, 1)],
        '-4*theta_xt*theta': -4 * D[(1, 0, 1)] * th,
        '3*theta_yy*theta': 3 * D[(0, 2, 0)] * th,
        '-3*theta_y^2': -3 * D[(0, 1, 0)] ** 2,
        '8d*theta^2': 8 * F.d * th * th,
    }
    return HirotaTerms(terms, D)


def hirota_residual(P: PeriodMatrix, F: FlexData, z0) -> complex:
    """Wartość relacji dwuliniowej dla θ(x,y,t) = θ_A(xU + yV + tW + z0) w zerze."""
    return hirota_terms(P, F, z0).residual


def bilinear_pairing(P: PeriodMatrix, F: FlexData, z0) -> complex:
    """8·Σ_ε θ⃗₂,ε(z0)·op_residual(F)_ε - ta sama wielkość co hirota_residual."""
    return 8 * complex(np.sum(theta2_vector(z0, P).values * op_residual(P, F)))


def specialization_residuals(P: PeriodMatrix, F: FlexData, z0) -> Dict[str, complex]:
    """
    Łańcuch specjalizacji w punkcie z0: pełna relacja, jej obcięcie na dywizorze,
    obcięcie styczne θ_xx² − θ_y² i postać rozłożona F₊·F₋.
    """
    H = hirota_terms(P, F, z0)
    D = H.derivatives
    _, grad, hess, _ = theta_jet2(z0, P)
    quad = complex(F.U @ hess @ F.U)
    linear = complex(grad @ F.V)
    return {
        'bilinear': H.residual,
        'divisor': (-4 * D[(3, 0, 0)] * D[(1, 0, 0)] + 3 * D[(2, 0, 0)] ** 2
                    + 4 * D[(1, 0, 0)] * D[(0, 0, 1)] - 3 * D[(0, 1, 0)] ** 2),
        'tangential': D[(2, 0, 0)] ** 2 - D[(0, 1, 0)] ** 2,
        'factored': (quad + linear) * (quad - linear),
        'theta': D[(0, 0, 0)],
        'theta_x': D[(1, 0, 0)],
        'scale': H.scale,
    }


#############################################################################
# RÓWNANIE KP
#############################################################################

# Potrzebne pochodne log θ: xx, xxx, xxxx, x⁶, xxyy, xxxt
_LOG_SHAPE = (7, 3, 2)
_LOG_TERMS = 9      # g^k znika w pudełku dla k > 6 + 2 + 1
_LOG_INDICES = sorted(
    {(a, 0, 0) for a in range(7)}
    | {(a, b, 0) for a in range(3) for b in range(3)}
    | {(a, 0, 1) for a in range(4)}
)


def _product_tables():
    cells = list(itertools.product(*(range(n) for n in _LOG_SHAPE)))
    flat = {c: k for k, c in enumerate(cells)}
    left, right, target = [], [], []
    for c1 in cells:
        for c2 in cells:
            s = tuple(x + y for x, y in zip(c1, c2))
            if all(x < n for x, n in zip(s, _LOG_SHAPE)):
                left.append(flat[c1])
                right.append(flat[c2])
                target.append(flat[s])
    return np.array(left), np.array(right), np.array(target)


_PRODUCT_LEFT, _PRODUCT_RIGHT, _PRODUCT_TARGET = _product_tables()


def _series_product(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.zeros(p.size, dtype=complex)
    np.add.at(out, _PRODUCT_TARGET, p.ravel()[_PRODUCT_LEFT] * q.ravel()[_PRODUCT_RIGHT])
    return out.reshape(_LOG_SHAPE)


def _log_derivatives(derivatives: Dict[Tuple[int, int, int], complex]) -> Dict[Tuple[int, int, int], complex]:
    # log f = log f0 + Σ (−1)^{k+1} g^k / k, g = f/f0 − 1 (szereg obcięty do pudełka)
    coeffs = np.zeros(_LOG_SHAPE, dtype=complex)
    for alpha, value in derivatives.items():
        coeffs[alpha] = value / math.prod(math.factorial(k) for k in alpha)
    g = coeffs / coeffs[0, 0, 0]
    g[0, 0, 0] = 0.0
    log_series = np.zeros(_LOG_SHAPE, dtype=complex)
    power = g.copy()
    for k in range(1, _LOG_TERMS + 1):
        log_series += (-1) ** (k + 1) * power / k
        power = _series_product(power, g)
    return {alpha: log_series[alpha] * math.prod(math.factorial(k) for k in alpha)
            for alpha in _LOG_INDICES}


def kp_terms(u: complex, u_x: complex, u_xx: complex, u_xxxx: complex,
             u_yy: complex, u_xt: complex) -> Dict[str, complex]:
    """Składniki ¾u_yy − (u_t − ¼(6uu_x + u_xxx))_x."""
    return {
        '3/4*u_yy': 0.75 * u_yy,
        '-u_xt': -u_xt,
        '3/2*u_x^2': 1.5 * u_x * u_x,
        '3/2*u*u_xx': 1.5 * u * u_xx,
        '1/4*u_xxxx': 0.25 * u_xxxx,
    }


def kp_fd_residual(u: Callable[[float, float, float], complex], x: float, y: float, t: float,
                   h: float) -> Dict[str, complex]:
    """
    Składniki równania KP z pochodnych u liczonych różnicami centralnymi.

    Args:
        u: Funkcja (x, y, t) -> u.
        x, y, t: Punkt.
        h: Krok różnicowy.
    """
    def ux(xx, yy, tt):
        return central_diff(lambda s: u(s, yy, tt), xx, h, 1)

    def uxx(xx, yy, tt):
        return central_diff(lambda s: u(s, yy, tt), xx, h, 2)

    return kp_terms(
        u(x, y, t),
        ux(x, y, t),
        uxx(x, y, t),
        central_diff(lambda s: uxx(s, y, t), x, h, 2),
        central_diff(lambda s: u(x, s, t), y, h, 2),
        central_diff(lambda s: ux(x, y, s), t, h, 1),
    )


@dataclass(frozen=True)
class PDEResidualReport:
    max_residual: float
    max_term: float
    table: pd.DataFrame

    @property
    def relative(self) -> float:
        return self.max_residual / self.max_term if self.max_term > 0 else 0.0


def _check_pole(value: complex, scale: float, point) -> None:
    if abs(value) <= 1e-10 * scale:
        raise PoleError(f"theta vanishes on the grid at (x, y, t) = {point}", point=point)


def kp_pde_residual(
    P: PeriodMatrix,
    F: FlexData,
    z0,
    grid: Sequence[Tuple[float, float, float]],
    mode: str = 'exact',
    h: float = 1e-3,
) -> PDEResidualReport:
    """
    Residuum równania KP dla u = 2∂²_x log θ_A(xU + yV + tW + z0) na siatce.

    Args:
        P: Macierz okresów.
        F: Dane (U, V, W, d).
        z0: Punkt bazowy.
        grid: Lista punktów (x, y, t).
        mode: 'exact' (dokładne pochodne log θ do rzędu 6) lub 'fd'.
        h: Krok różnic centralnych w trybie 'fd'.

    Returns:
        PDEResidualReport z maksimum residuum i największym składnikiem.
    """
    if mode not in ('exact', 'fd'):
        raise InvalidInputError(f"mode must be 'exact' or 'fd', got {mode!r}")
    z0 = _vector(z0)
    scale6 = _directional_scale(F, 6)

    def point_of(x, y, t):
        return z0 + x * F.U + y * F.V + t * F.W

    def u_exact(x, y, t):
        lt = lattice_terms(point_of(x, y, t), P, None, 2, _directional_scale(F, 2))
        D = lt.taylor([F.U], [(0,), (1,), (2,)])
        _check_pole(D[(0,)], lt.scale, (x, y, t))
        return 2 * (D[(0,)] * D[(2,)] - D[(1,)] ** 2) / D[(0,)] ** 2

    rows = []
    for x, y, t in grid:
        if mode == 'exact':
            lt = lattice_terms(point_of(x, y, t), P, None, 6, scale6)
            D = lt.taylor([F.U, F.V, F.W], _LOG_INDICES)
            _check_pole(D[(0, 0, 0)], lt.scale, (x, y, t))
            L = _log_derivatives(D)
            terms = kp_terms(2 * L[(2, 0, 0)], 2 * L[(3, 0, 0)], 2 * L[(4, 0, 0)],
                             2 * L[(6, 0, 0)], 2 * L[(2, 2, 0)], 2 * L[(3, 0, 1)])
        else:
            terms = kp_fd_residual(u_exact, x, y, t, h)
        residual = complex(sum(terms.values()))
        rows.append({'x': x, 'y': y, 't': t, 'residual_abs': abs(residual),
                     'max_term': max(abs(v) for v in terms.values())})
    table = pd.DataFrame(rows)
    return PDEResidualReport(float(table['residual_abs'].max()), float(table['max_term'].max()), table)


def cube_grid(span: float = 0.2, points: int = 5) -> List[Tuple[float, float, float]]:
    """Siatka points³ punktów w kostce [0, span]³."""
    axis = np.linspace(0.0, span, points)
    return [(float(x), float(y), float(t)) for x in axis for y in axis for t in axis]


#############################################################################
# PUNKTY DYWIZORA I SPECJALIZACJA STYCZNA
#############################################################################

def divisor_point(P: PeriodMatrix, base, direction, tol: float = DIVISOR_TOL,
                  max_iter: int = NEWTON_MAX_ITER) -> np.ndarray:
    """
    Szuka zera θ(base + s·dir) metodą Newtona w zmiennej s, start s = 0.

    Returns:
        z0 z |θ(z0)| ≤ tol × suma modułów wyrazów szeregu.
    """
    base, direction = _vector(base), _vector(direction)
    if not np.any(direction):
        raise InvalidInputError("search direction must be nonzero")
    dir_norm = float(np.linalg.norm(direction))
    s = 0j
    lt = lattice_terms(base, P, None, 1, dir_norm)
    value = lt.derivative()
    for iteration in range(max_iter):
        if abs(value) <= tol * lt.scale:
            logger.debug("divisor point after %d Newton steps", iteration)
            return base + s * direction
        slope = lt.derivative([direction])
        if slope == 0:
            break
        step = -value / slope
        # Tłumienie: połowienie kroku, dopóki |θ| nie maleje
        for _ in range(8):
            trial = lattice_terms(base + (s + step) * direction, P, None, 1, dir_norm)
            if abs(trial.derivative()) < abs(value):
                break
            step *= 0.5
        s += step
        lt = trial
        value = lt.derivative()
    if abs(value) <= tol * lt.scale:
        return base + s * direction
    raise RootNotFoundError(f"Newton search did not reach the theta divisor in {max_iter} iterations")


def _choose_pivot(U: np.ndarray, prev: Optional[TangencyData]) -> int:
    norm = float(np.linalg.norm(U))
    if prev is not None and abs(U[prev.pivot]) >= TANGENT_DEGENERACY * norm:
        return prev.pivot
    if abs(U[0]) >= TANGENT_DEGENERACY * norm:
        return 0
    return int(np.argmax(np.abs(U)))


def tangent_flex(P: PeriodMatrix, z0, branch: int = 1,
                 prev: Optional[TangencyData] = None) -> TangencyData:
    """
    Dane styczne (τ, σ, λ) w punkcie dywizora dla g = 2.

    Gałąź b wybiera znikający czynnik F_b = Σθ_ijU_iU_j + b·Σθ_iV_i; V jest
    rozwiązaniem o minimalnej normie, σ = b·V + μU z σ_pivot = 0.

    Args:
        P: Macierz okresów, g = 2.
        z0: Punkt z θ(z0) ≈ 0.
        branch: ±1.
        prev: Poprzednie dane (ciągłość gałęzi i numeracji).
    """
    if P.g != 2:
        raise InvalidInputError("tangent_flex is implemented for g = 2 only")
    if branch not in (1, -1):
        raise InvalidInputError(f"branch must be +1 or -1, got {branch}")
    z0 = _vector(z0)
    _, grad, hess, scale = theta_jet2(z0, P)
    grad_norm = float(np.linalg.norm(grad))
    if grad_norm <= 1e-8 * scale:
        raise SingularDivisorError(f"gradient of theta vanishes at {z0!r}")
    U = np.array([grad[1], -grad[0]])
    if max(abs(U[0]), abs(U[1])) < TANGENT_DEGENERACY:
        raise DegenerateTangentError("both tangent coordinates vanish")
    pivot = _choose_pivot(U, prev)
    tau = U / U[pivot]
    quad = complex(tau @ hess @ tau)
    minimal = quad * np.conj(grad) / grad_norm ** 2

    def v_of(b: int) -> np.ndarray:
        return -b * minimal

    if prev is not None and np.any(prev.V):
        branch = max((1, -1), key=lambda b: (np.vdot(prev.V, v_of(b)).real, b == prev.branch))
    V = v_of(branch)
    sigma = branch * V
    sigma = sigma - sigma[pivot] * tau
    return TangencyData(
        z0=z0,
        tau=tau,
        sigma=sigma,
        lambda_t=complex(sigma[1 - pivot]),
        branch=branch,
        V=V,
        pivot=pivot,
        residual_i=float(abs(grad @ tau)),
        residual_ii=float(abs(quad + grad @ sigma)),
    )
