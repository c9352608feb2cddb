# /thetaflex/modules/numerics.py
# Wspólne jądra numeryczne: rząd przez SVD, tłumione najmniejsze kwadraty,
# całkowanie RK4 wzdłuż ścieżki i różnice centralne.

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from modules.config import (
    DEFAULT_RTOL, DEFAULT_STEP, FIT_ABS_TOL, FIT_GTOL, FIT_JACOBIAN_STEP,
    FIT_MAX_ITER, FIT_XTOL,
)
from modules.errors import IntegrationError, InvalidInputError, PartialResultError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RankResult:
    rank: int
    singular_values: np.ndarray
    rtol_used: float


@dataclass(frozen=True)
class FitResult:
    solution: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class FitOptions:
    """Ustawienia tłumienia i tolerancji dla lm_fit."""
    abs_tol: float = FIT_ABS_TOL
    xtol: float = FIT_XTOL
    gtol: float = FIT_GTOL
    max_iter: int = FIT_MAX_ITER
    damping: float = 1e-3
    jacobian_step: float = FIT_JACOBIAN_STEP


@dataclass(frozen=True)
class PathOptions:
    step: float = DEFAULT_STEP
    adaptive: bool = False
    rtol: float = 1e-10           # tylko dla trybu adaptacyjnego
    max_steps: int = 1_000_000


@dataclass(frozen=True)
class PathSamples:
    s: np.ndarray
    y: np.ndarray                 # kształt (liczba próbek, wymiar)

    @property
    def end(self) -> np.ndarray:
        return self.y[-1]


def as_complex_matrix(M) -> np.ndarray:
    """Zamienia dane na skończoną, dwuwymiarową macierz zespoloną."""
    arr = np.atleast_2d(np.asarray(M, dtype=complex))
    if arr.ndim != 2:
        raise InvalidInputError(f"expected a matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix has non-finite entries")
    return arr


def svd_rank(M, rtol: float = DEFAULT_RTOL) -> RankResult:
    """
    Wyznacza rząd numeryczny macierzy.

    Args:
        M: Macierz zespolona (dowolny kształt 2D).
        rtol: Względny próg, liczony od największej wartości osobliwej.

    Returns:
        RankResult z rzędem i malejącymi wartościami osobliwymi.
    """
    if not 0.0 < rtol < 1.0:
        raise InvalidInputError(f"rtol must lie in (0, 1), got {rtol}")
    arr = as_complex_matrix(M)
    if arr.size == 0:
        return RankResult(0, np.zeros(0), rtol)
    s = np.linalg.svd(arr, compute_uv=False)
    # Macierz zerowa ma rząd 0
    if s[0] == 0.0:
        return RankResult(0, s, rtol)
    rank = int(np.count_nonzero(s >= rtol * s[0]))
    return RankResult(rank, s, rtol)


def _to_real(x: np.ndarray) -> np.ndarray:
    return np.concatenate([x.real, x.imag])


def _to_complex(x: np.ndarray) -> np.ndarray:
    n = x.size // 2
    return x[:n] + 1j * x[n:]


def _real_jacobian(func: Callable, x: np.ndarray, r0: np.ndarray, step: float) -> np.ndarray:
    # Różnice centralne po parach (Re, Im) niewiadomych
    J = np.empty((r0.size, x.size))
    for k in range(x.size):
        h = step * max(1.0, abs(x[k]))
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        J[:, k] = (func(xp) - func(xm)) / (2 * h)
    return J


def lm_fit(
    residual: Callable[[np.ndarray], np.ndarray],
    x0,
    opts: Optional[FitOptions] = None,
) -> FitResult:
    """
    Minimalizuje ‖residual(x)‖² metodą Levenberga-Marquardta.

    Niewiadome zespolone są wewnętrznie traktowane jako pary rzeczywiste,
    jakobian liczony różnicami centralnymi.

    Args:
        residual: Funkcja wektora zespolonego zwracająca wektor zespolony.
        x0: Punkt startowy.
        opts: Ustawienia tłumienia i tolerancji.

    Returns:
        FitResult; przekroczenie limitu iteracji daje converged=False.
    """
    opts = opts or FitOptions()
    x0 = np.atleast_1d(np.asarray(x0, dtype=complex))

    def real_residual(xr: np.ndarray) -> np.ndarray:
        return _to_real(np.atleast_1d(np.asarray(residual(_to_complex(xr)), dtype=complex)))

    x = _to_real(x0)
    r = real_residual(x)
    cost = float(r @ r)
    J = _real_jacobian(real_residual, x, r, opts.jacobian_step)
    A = J.T @ J
    grad = J.T @ r
    mu = opts.damping * max(float(np.max(np.diag(A))), 1e-300)
    nu = 2.0
    converged = math.sqrt(cost) <= opts.abs_tol or float(np.max(np.abs(grad), initial=0.0)) <= opts.gtol

    iteration = 0
    while not converged and iteration < opts.max_iter:
        iteration += 1
        try:
            step = np.linalg.solve(A + mu * np.eye(A.shape[0]), -grad)
        except np.linalg.LinAlgError:
            mu *= nu
            nu *= 2.0
            continue
        if np.linalg.norm(step) <= opts.xtol * (np.linalg.norm(x) + opts.xtol):
            converged = True
            break
        x_new = x + step
        r_new = real_residual(x_new)
        cost_new = float(r_new @ r_new)
        predicted = float(step @ (mu * step - grad))
        rho = (cost - cost_new) / predicted if predicted > 0 else -1.0
        if rho > 0 and np.isfinite(cost_new):
            # Krok przyjęty - koszt maleje monotonicznie
            x, r, cost = x_new, r_new, cost_new
            J = _real_jacobian(real_residual, x, r, opts.jacobian_step)
            A = J.T @ J
            grad = J.T @ r
            mu *= max(1.0 / 3.0, 1.0 - (2.0 * rho - 1.0) ** 3)
            nu = 2.0
            logger.debug("lm iteration %d: |r| = %.3e, mu = %.3e", iteration, math.sqrt(cost), mu)
            if math.sqrt(cost) <= opts.abs_tol or float(np.max(np.abs(grad))) <= opts.gtol:
                converged = True
        else:
            mu *= nu
            nu *= 2.0

    return FitResult(
        solution=_to_complex(x),
        residual_norm=math.sqrt(cost),
        iterations=iteration,
        converged=bool(converged),
    )


def rk4_step(field: Callable, s: float, y: np.ndarray, h: float) -> np.ndarray:
    """Jeden krok klasycznej metody Rungego-Kutty rzędu 4."""
    k1 = field(s, y)
    k2 = field(s + 0.5 * h, y + 0.5 * h * k1)
    k3 = field(s + 0.5 * h, y + 0.5 * h * k2)
    k4 = field(s + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_path(
    field: Callable[[float, np.ndarray], np.ndarray],
    y0,
    s0: float,
    s1: float,
    opts: Optional[PathOptions] = None,
) -> PathSamples:
    """
    Całkuje dy/ds = field(s, y) od s0 do s1 metodą RK4.

    Args:
        field: Pole (s, y) -> wektor zespolony.
        y0: Warunek początkowy.
        s0: Początek parametru.
        s1: Koniec parametru.
        opts: Krok stały lub adaptacyjny.

    Returns:
        Próbki (s, y(s)) z obydwoma końcami.
    """
    opts = opts or PathOptions()
    y = np.atleast_1d(np.asarray(y0, dtype=complex)).copy()
    field_checked = _checked_field(field)
    s_values = [float(s0)]
    y_values = [y.copy()]

    def partial() -> PathSamples:
        return PathSamples(np.asarray(s_values), np.asarray(y_values))

    try:
        if not opts.adaptive:
            n = max(1, int(math.ceil(abs(s1 - s0) / opts.step - 1e-9)))
            h = (s1 - s0) / n
            for k in range(n):
                s = s0 + k * h
                y = rk4_step(field_checked, s, y, h)
                s_values.append(s0 + (k + 1) * h)
                y_values.append(y.copy())
        else:
            _integrate_adaptive(field_checked, y, s0, s1, opts, s_values, y_values)
    except PartialResultError as exc:
        # Ten sam typ błędu, uzupełniony o próbki policzone do tej chwili
        raise type(exc)(str(exc), partial=partial()) from exc
    return partial()


def _checked_field(field: Callable) -> Callable:
    def wrapped(s, y):
        value = np.atleast_1d(np.asarray(field(s, y), dtype=complex))
        if not np.all(np.isfinite(value)):
            raise IntegrationError(f"non-finite field value at s = {s}")
        return value
    return wrapped


def _integrate_adaptive(field, y, s0, s1, opts, s_values, y_values) -> None:
    # Podwajanie kroku: porównanie jednego kroku h z dwoma krokami h/2
    s = float(s0)
    direction = 1.0 if s1 >= s0 else -1.0
    h = direction * min(opts.step, abs(s1 - s0))
    steps = 0
    while direction * (s1 - s) > 1e-15 and steps < opts.max_steps:
        steps += 1
        if direction * (s + h - s1) > 0:
            h = s1 - s
        full = rk4_step(field, s, y, h)
        half = rk4_step(field, s + 0.5 * h, rk4_step(field, s, y, 0.5 * h), 0.5 * h)
        err = np.linalg.norm(half - full) / 15.0
        scale = opts.rtol * max(1.0, np.linalg.norm(half))
        if err <= scale:
            s += h
            y = half + (half - full) / 15.0
            s_values.append(s)
            y_values.append(y.copy())
        factor = 0.9 * (scale / err) ** 0.2 if err > 0 else 4.0
        h *= min(4.0, max(0.2, factor))
    if direction * (s1 - s) > 1e-15:
        raise IntegrationError(f"step limit {opts.max_steps} reached at s = {s}, before s1 = {s1}")


def central_diff(f: Callable[[complex], complex], x: complex, h: float, order: int = 1) -> complex:
    """
    Centralny iloraz różnicowy drugiego rzędu dokładności.

    Args:
        f: Funkcja skalarna.
        x: Punkt.
        h: Krok (> 0) wzdłuż kierunku rzeczywistego.
        order: 1 lub 2 (rząd pochodnej).
    """
    if h <= 0:
        raise InvalidInputError(f"step must be positive, got {h}")
    if order == 1:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if order == 2:
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    raise InvalidInputError(f"order must be 1 or 2, got {order}")
