# /thetaflex/modules/translation.py
# Rozmaitości translacyjne: weryfikacja ramek na hiperpowierzchni, ramki z map
# jawnych, rekonstrukcja map całkowaniem, test rozwijalności i śledzenie
# struktury translacyjnej na dywizorze theta (g = 2).

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from modules.config import (
    CORRECTION_CAP, DEFAULT_RTOL, DEFAULT_STEP, MIN_LAMBDA_RATIO,
    RECONSTRUCT_MIN_LAMBDA,
)
from modules.errors import (
    DegenerateChartError, DevelopableSurfaceError, InvalidInputError,
    NearSingularFrameError, OffSurfaceError, SingularDivisorError,
    TraceDivergenceError,
)
from modules.kp import TangencyData, tangent_flex
from modules.kummer import is_indecomposable
from modules.numerics import PathOptions, central_diff, integrate_path, rk4_step, svd_rank
from modules.theta import PeriodMatrix, lattice_terms, theta_eval, theta_jet2, theta_magnitude

logger = logging.getLogger(__name__)


#############################################################################
# HIPERPOWIERZCHNIE
#############################################################################

@dataclass(frozen=True)
class HypersurfaceOracle:
    """
    Hiperpowierzchnia f(z) = 0 w C^g z analitycznym gradientem i hesjanem.

    `magnitude` (opcjonalnie) zwraca naturalną skalę |f| w punkcie; bez niej
    skala wynosi 1.
    """
    dimension: int
    value: Callable[[np.ndarray], complex]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    name: str = ''
    magnitude: Optional[Callable[[np.ndarray], float]] = None

    def scale(self, z) -> float:
        return float(self.magnitude(z)) if self.magnitude is not None else 1.0

    def point(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if z.shape != (self.dimension,):
            raise InvalidInputError(f"{self.name or 'hypersurface'} lives in C^{self.dimension}, got shape {z.shape}")
        return z


def hyperplane(c) -> HypersurfaceOracle:
    """Σ c_i z_i = 0."""
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    g = c.size
    return HypersurfaceOracle(
        g,
        value=lambda z: complex(c @ z),
        gradient=lambda z: c.copy(),
        hessian=lambda z: np.zeros((g, g), dtype=complex),
        name='hyperplane',
    )


def quadric(g: int) -> HypersurfaceOracle:
    """Σ z_i² = 1."""
    return HypersurfaceOracle(
        g,
        value=lambda z: complex(z @ z - 1.0),
        gradient=lambda z: 2.0 * z,
        hessian=lambda z: 2.0 * np.eye(g, dtype=complex),
        name='quadric',
    )


def cylinder(g: int = 3) -> HypersurfaceOracle:
    """z₁² + z₂² = 1 w C^g (kierunki z₃, … są rozwijalne)."""
    if g < 3:
        raise InvalidInputError("a cylinder needs at least three coordinates")
    hess = np.zeros((g, g), dtype=complex)
    hess[0, 0] = hess[1, 1] = 2.0

    def gradient(z):
        out = np.zeros(g, dtype=complex)
        out[:2] = 2.0 * z[:2]
        return out

    return HypersurfaceOracle(
        g,
        value=lambda z: complex(z[0] ** 2 + z[1] ** 2 - 1.0),
        gradient=gradient,
        hessian=lambda z: hess.copy(),
        name='cylinder',
    )


def cubic_surface() -> HypersurfaceOracle:
    """f = z₃ − z₁³ − (z₂ − z₁²)², obraz mapy α(t₁) + A(t₂) z krzywą skręconą."""
    def value(z):
        w = z[1] - z[0] ** 2
        return complex(z[2] - z[0] ** 3 - w * w)

    def gradient(z):
        w = z[1] - z[0] ** 2
        return np.array([-3 * z[0] ** 2 + 4 * z[0] * w, -2 * w, 1.0], dtype=complex)

    def hessian(z):
        w = z[1] - z[0] ** 2
        f11 = -6 * z[0] + 4 * w - 8 * z[0] ** 2
        f12 = 4 * z[0]
        return np.array([[f11, f12, 0], [f12, -2, 0], [0, 0, 0]], dtype=complex)

    return HypersurfaceOracle(3, value, gradient, hessian, name='cubic')


def theta_divisor_oracle(P: PeriodMatrix) -> HypersurfaceOracle:
    """Dywizor theta: dokładne pochodne szeregu, skala = suma modułów wyrazów."""
    return HypersurfaceOracle(
        P.g,
        value=lambda z: theta_eval(z, P),
        gradient=lambda z: theta_jet2(z, P)[1],
        hessian=lambda z: theta_jet2(z, P)[2],
        name='theta-divisor',
        magnitude=lambda z: theta_magnitude(z, P),
    )


def surface_by_name(name: str, g: int = 3, c=None) -> HypersurfaceOracle:
    if name == 'hyperplane':
        return hyperplane(c if c is not None else np.arange(1, g + 1))
    if name == 'quadric':
        return quadric(g)
    if name == 'cylinder':
        return cylinder(g)
    if name == 'cubic':
        return cubic_surface()
    raise InvalidInputError(f"unknown surface {name!r}; expected hyperplane, quadric, cylinder or cubic")


def check_oracle(H: HypersurfaceOracle, z, h: float = 1e-5, rtol: float = 1e-5) -> dict:
    """
    Porównuje analityczny gradient i hesjan z różnicami centralnymi.

    Returns:
        Słownik z błędami względnymi i flagą `passed`.
    """
    z = H.point(z)
    g = H.dimension
    basis = np.eye(g)
    grad = np.asarray(H.gradient(z), dtype=complex)
    hess = np.asarray(H.hessian(z), dtype=complex)
    fd_grad = np.array([central_diff(lambda s: H.value(z + s * basis[k]), 0.0, h) for k in range(g)])
    fd_hess = np.array([[central_diff(lambda s: H.gradient(z + s * basis[k])[j], 0.0, h) for j in range(g)]
                        for k in range(g)])
    grad_error = float(np.linalg.norm(fd_grad - grad) / max(1.0, np.linalg.norm(grad)))
    hess_error = float(np.linalg.norm(fd_hess - hess) / max(1.0, np.linalg.norm(hess)))
    return {
        'gradient_error': grad_error,
        'hessian_error': hess_error,
        'passed': grad_error <= rtol and hess_error <= rtol,
    }


#############################################################################
# RAMKI TRANSLACYJNE
#############################################################################

@dataclass(frozen=True, eq=False)
class TranslationFrame:
    tau: np.ndarray
    sigma: np.ndarray
    lambda_t: complex
    tau2: complex
    pivot: int = 0

    @classmethod
    def from_tangency(cls, data: TangencyData) -> 'TranslationFrame':
        return cls(data.tau, data.sigma, data.lambda_t, data.tau2, data.pivot)


@dataclass(frozen=True)
class FrameReport:
    res_i: float
    res_ii: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.res_i <= self.tol and self.res_ii <= self.tol


def _on_surface(H: HypersurfaceOracle, z: np.ndarray, tol: float) -> None:
    value = abs(H.value(z))
    if value > tol * H.scale(z):
        raise OffSurfaceError(f"point is not on the {H.name or 'hypersurface'}: |f| = {value:.3e}")


def verify_frame(H: HypersurfaceOracle, z, fr: TranslationFrame, tol: float = 1e-9) -> FrameReport:
    """
    Warunki Σf_iτ_i = 0 oraz Σf_ijτ_iτ_j + Σf_iσ_i = 0 w punkcie z.

    Args:
        H: Hiperpowierzchnia.
        z: Punkt na H.
        fr: Ramka (τ, σ, λ).
        tol: Tolerancja obu residuów.
    """
    z = H.point(z)
    _on_surface(H, z, tol)
    grad = np.asarray(H.gradient(z), dtype=complex)
    hess = np.asarray(H.hessian(z), dtype=complex)
    res_i = float(abs(grad @ fr.tau))
    res_ii = float(abs(fr.tau @ hess @ fr.tau + grad @ fr.sigma))
    return FrameReport(res_i, res_ii, tol)


@dataclass(frozen=True)
class CurveChart:
    """Krzywa α(t₁) z dokładnymi pochodnymi (brak pochodnej = różnice centralne)."""
    alpha: Callable[[complex], np.ndarray]
    d_alpha: Optional[Callable[[complex], np.ndarray]] = None
    dd_alpha: Optional[Callable[[complex], np.ndarray]] = None

    def derivatives(self, t1: complex, h: float) -> Tuple[np.ndarray, np.ndarray]:
        first = (np.asarray(self.d_alpha(t1), dtype=complex) if self.d_alpha is not None
                 else central_diff(lambda s: np.asarray(self.alpha(s), dtype=complex), t1, h, 1))
        second = (np.asarray(self.dd_alpha(t1), dtype=complex) if self.dd_alpha is not None
                  else central_diff(lambda s: np.asarray(self.alpha(s), dtype=complex), t1, h, 2))
        return first, second


def twisted_cubic_chart() -> CurveChart:
    """α(t₁) = (t₁, t₁², t₁³)."""
    return CurveChart(
        alpha=lambda t: np.array([t, t ** 2, t ** 3], dtype=complex),
        d_alpha=lambda t: np.array([1, 2 * t, 3 * t ** 2], dtype=complex),
        dd_alpha=lambda t: np.array([0, 2, 6 * t], dtype=complex),
    )


def frame_from_chart(alpha, t1: complex, h: float = 1e-4, pivot: Optional[int] = None) -> TranslationFrame:
    """
    Ramka translacyjna z krzywej α w punkcie t₁.

    τ_i = α_i′/α_p′, σ_i = (α_p′α_i″ − α_i′α_p″)/(α_p′)³, λ = σ_q, gdzie p jest
    współrzędną normującą, a q pierwszą pozostałą (τ_q pełni rolę τ₂).

    Args:
        alpha: CurveChart albo funkcja t₁ -> C^g (pochodne różnicami centralnymi).
        t1: Parametr.
        h: Krok różnic centralnych.
        pivot: Wymuszona współrzędna normująca; domyślnie pierwsza niezerowa,
            a przy zbyt małej - największa co do modułu.
    """
    chart = alpha if isinstance(alpha, CurveChart) else CurveChart(alpha)
    first, second = chart.derivatives(t1, h)
    norm = float(np.linalg.norm(first))
    if norm <= 1e-12:
        raise DegenerateChartError(f"curve derivative vanishes at t1 = {t1}")
    if pivot is None:
        pivot = 0 if abs(first[0]) > 1e-8 * norm else int(np.argmax(np.abs(first)))
    if abs(first[pivot]) <= 1e-12 * norm:
        raise DegenerateChartError(f"coordinate {pivot} cannot normalize the tangent at t1 = {t1}")
    a_p, b_p = first[pivot], second[pivot]
    tau = first / a_p
    sigma = (a_p * second - first * b_p) / a_p ** 3
    q = 1 if pivot == 0 else 0
    return TranslationFrame(tau, sigma, complex(sigma[q]), complex(tau[q]), pivot)


#############################################################################
# MAPY I REKONSTRUKCJA
#############################################################################

@dataclass(frozen=True, eq=False)
class Chart:
    """
    Próbkowane krzywe z(τ₂) z kolejnych punktów bazowych.

    f_rel to |f(z)| / skala hiperpowierzchni, correction - długość korekty
    Newtona w danym kroku (zero dla czystego całkowania).
    """
    tau2: np.ndarray                 # (n,)
    curves: np.ndarray               # (k, n, g)
    f_rel: np.ndarray                # (k, n)
    correction: np.ndarray           # (k, n)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.f_rel))

    @property
    def max_correction(self) -> float:
        return float(np.max(self.correction))

    @property
    def parallel_deviation(self) -> float:
        """max ‖(z^a(τ₂) − z^a(t₀)) − (z^b(τ₂) − z^b(t₀))‖ po parach punktów bazowych."""
        offsets = self.curves - self.curves[:, :1, :]
        worst = 0.0
        for a in range(len(offsets)):
            for b in range(a + 1, len(offsets)):
                worst = max(worst, float(np.max(np.linalg.norm(offsets[a] - offsets[b], axis=1))))
        return worst

    @classmethod
    def stack(cls, charts: Sequence['Chart']) -> 'Chart':
        if len({c.curves.shape[1:] for c in charts}) != 1:
            raise InvalidInputError("charts must share the sampling of tau2")
        return cls(
            charts[0].tau2,
            np.concatenate([c.curves for c in charts]),
            np.concatenate([c.f_rel for c in charts]),
            np.concatenate([c.correction for c in charts]),
        )

    def to_frame(self, base: int = 0) -> pd.DataFrame:
        """Tabela: tau2, z_1_re, z_1_im, …, theta_abs, correction."""
        data = {'tau2_re': self.tau2.real, 'tau2_im': self.tau2.imag}
        for i in range(self.curves.shape[2]):
            data[f'z_{i + 1}_re'] = self.curves[base, :, i].real
            data[f'z_{i + 1}_im'] = self.curves[base, :, i].imag
        data['theta_abs'] = self.f_rel[base]
        data['correction'] = self.correction[base]
        return pd.DataFrame(data)


@dataclass(frozen=True)
class ReconstructOptions:
    step: float = DEFAULT_STEP
    min_lambda: float = RECONSTRUCT_MIN_LAMBDA
    on_surface_tol: float = 1e-9


def reconstruct(
    H: HypersurfaceOracle,
    frame_field: Callable[[complex], Tuple[np.ndarray, complex]],
    base_points: Sequence,
    tau2_span: Tuple[complex, complex],
    opts: Optional[ReconstructOptions] = None,
) -> Chart:
    """
    Całkuje dz/dτ₂ = τ(τ₂)/λ(τ₂) po odcinku [t₀, t₁] z każdego punktu bazowego.

    Args:
        H: Hiperpowierzchnia (do kontroli |f| wzdłuż krzywych).
        frame_field: τ₂ -> (τ, λ).
        base_points: Punkty startowe na H.
        tau2_span: (t₀, t₁); odcinek prosty, parametr rzeczywisty.
        opts: Krok i próg |λ|.

    Returns:
        Chart z krzywymi i residuami.
    """
    opts = opts or ReconstructOptions()
    t0, t1 = complex(tau2_span[0]), complex(tau2_span[1])
    length = abs(t1 - t0)
    if length == 0:
        raise InvalidInputError("tau2 span has zero length")
    direction = (t1 - t0) / length
    if not base_points:
        raise InvalidInputError("at least one base point is required")

    def field(s, z):
        tau, lam = frame_field(t0 + s * direction)
        if abs(lam) < opts.min_lambda:
            raise NearSingularFrameError(f"|lambda| = {abs(lam):.3e} at tau2 = {t0 + s * direction}")
        return direction * np.asarray(tau, dtype=complex) / lam

    curves, residuals = [], []
    samples = None
    for base in base_points:
        z0 = H.point(base)
        _on_surface(H, z0, opts.on_surface_tol)
        samples = integrate_path(field, z0, 0.0, length, PathOptions(step=opts.step))
        curves.append(samples.y)
        residuals.append([abs(H.value(z)) / H.scale(z) for z in samples.y])
    curves = np.asarray(curves)
    logger.debug("reconstructed %d curves with %d samples each", curves.shape[0], curves.shape[1])
    return Chart(
        tau2=t0 + samples.s * direction,
        curves=curves,
        f_rel=np.asarray(residuals),
        correction=np.zeros(curves.shape[:2]),
    )


#############################################################################
# ROZWIJALNOŚĆ
#############################################################################

def gauss_rank(H: HypersurfaceOracle, z, rtol: float = DEFAULT_RTOL) -> int:
    """
    Rząd drugiej formy podstawowej: hesjan f ograniczony do hiperpłaszczyzny
    stycznej {v : Σ f_i v_i = 0}.
    """
    z = H.point(z)
    grad = np.asarray(H.gradient(z), dtype=complex)
    hess = np.asarray(H.hessian(z), dtype=complex)
    grad_norm = float(np.linalg.norm(grad))
    if grad_norm <= 1e-12 * max(1.0, H.scale(z)):
        raise SingularDivisorError(f"gradient of the {H.name or 'hypersurface'} vanishes")
    # Jądro odwzorowania v -> grad·v: sprzężone wiersze Vh poza pierwszym
    _, _, vh = np.linalg.svd(grad[np.newaxis, :])
    basis = vh[1:].conj().T
    form = basis.T @ hess @ basis
    if np.max(np.abs(form), initial=0.0) <= 1e-12 * max(1.0, float(np.max(np.abs(hess), initial=0.0))):
        return 0
    return svd_rank(form, rtol).rank


#############################################################################
# ŚLEDZENIE NA DYWIZORZE THETA
#############################################################################

@dataclass(frozen=True)
class TraceOptions:
    step: float = DEFAULT_STEP
    correction_cap: float = CORRECTION_CAP
    min_lambda_ratio: float = MIN_LAMBDA_RATIO
    newton_iter: int = 3
    on_divisor_tol: float = 1e-9


@dataclass(frozen=True, eq=False)
class TraceResult:
    chart: Chart
    frames: pd.DataFrame
    branch: int

    @property
    def end(self) -> np.ndarray:
        return self.chart.curves[0, -1]


def _frame_row(s: float, tau2_path: complex, data: TangencyData) -> dict:
    row = {'s': s, 'tau2_re': tau2_path.real, 'tau2_im': tau2_path.imag,
           'tau2_measured_re': data.tau2.real, 'tau2_measured_im': data.tau2.imag,
           'lambda_re': data.lambda_t.real, 'lambda_im': data.lambda_t.imag,
           'pivot': data.pivot, 'branch': data.branch}
    for i, (t, sg) in enumerate(zip(data.tau, data.sigma)):
        row[f'tau_{i + 1}_re'], row[f'tau_{i + 1}_im'] = t.real, t.imag
        row[f'sigma_{i + 1}_re'], row[f'sigma_{i + 1}_im'] = sg.real, sg.imag
    return row


def _project_to_divisor(P: PeriodMatrix, z: np.ndarray, iterations: int) -> np.ndarray:
    # Newton wzdłuż ∇θ: z ← z − θ·conj(∇θ)/|∇θ|²
    for _ in range(iterations):
        lt = lattice_terms(z, P, None, 1)
        value = lt.derivative()
        if abs(value) <= 1e-14 * lt.scale:
            break
        grad = np.array([lt.derivative([e]) for e in np.eye(P.g)])
        z = z - value * np.conj(grad) / float(np.vdot(grad, grad).real)
    return z


def trace_theta_translation(
    P: PeriodMatrix,
    z_start,
    branch: int = 1,
    tau2_span: complex = 0.5,
    opts: Optional[TraceOptions] = None,
) -> TraceResult:
    """
    Śledzi krzywą na dywizorze theta (g = 2) parametryzowaną przez τ₂.

    Predyktor RK4 z polem τ/λ z tangent_flex, korektor Newtona wzdłuż ∇θ.
    Parametr τ₂ biegnie po odcinku od wartości zmierzonej w z_start do
    tej wartości powiększonej o tau2_span.

    Args:
        P: Macierz okresów, g = 2, nierozkładalna.
        z_start: Punkt dywizora (np. z divisor_point).
        branch: ±1.
        tau2_span: Przyrost τ₂ (może być zespolony).
        opts: Krok, limit korekty i próg |λ|.

    Returns:
        TraceResult z mapą (jedna krzywa) i tabelą próbek ramki.
    """
    opts = opts or TraceOptions()
    if P.g != 2:
        raise InvalidInputError("theta-divisor tracing is implemented for g = 2 only")
    if not is_indecomposable(P):
        logger.warning("tracing on a decomposable period matrix; the divisor is reducible")
    H = theta_divisor_oracle(P)
    z = H.point(z_start)
    _on_surface(H, z, opts.on_divisor_tol)
    if gauss_rank(H, z) == 0:
        raise DevelopableSurfaceError("theta divisor is developable at the starting point")

    span = complex(tau2_span)
    length = abs(span)
    if length == 0:
        raise InvalidInputError("tau2 span has zero length")
    direction = span / length
    n = max(1, int(math.ceil(length / opts.step - 1e-9)))
    h = length / n

    data = tangent_flex(P, z, branch)
    t0 = data.tau2
    lambdas: List[float] = [abs(data.lambda_t)]
    points, f_rel, corrections = [z.copy()], [abs(H.value(z)) / H.scale(z)], [0.0]
    rows = [_frame_row(0.0, t0, data)]

    def partial() -> Chart:
        count = len(points)
        return Chart(t0 + h * direction * np.arange(count), np.asarray([points]),
                     np.asarray([f_rel]), np.asarray([corrections]))

    for k in range(n):
        current = data

        def field(s, y):
            d = tangent_flex(P, y, current.branch, prev=current)
            return direction * d.tau / d.lambda_t

        predicted = rk4_step(field, k * h, z, h)
        lt = lattice_terms(predicted, P, None, 0)
        before = abs(lt.derivative()) / lt.scale
        corrected = _project_to_divisor(P, predicted, opts.newton_iter)
        correction = float(np.linalg.norm(corrected - predicted))
        if correction > opts.correction_cap:
            raise TraceDivergenceError(
                f"Newton correction {correction:.3e} exceeds cap at step {k + 1}", partial=partial())
        z = corrected
        data = tangent_flex(P, z, current.branch, prev=current)
        median = float(np.median(lambdas))
        if abs(data.lambda_t) < opts.min_lambda_ratio * median:
            raise NearSingularFrameError(
                f"|lambda| = {abs(data.lambda_t):.3e} fell below the threshold at step {k + 1}",
                partial=partial())
        lambdas.append(abs(data.lambda_t))
        points.append(z.copy())
        f_rel.append(before)
        corrections.append(correction)
        rows.append(_frame_row((k + 1) * h, t0 + (k + 1) * h * direction, data))

    logger.info("traced %d steps, max correction %.3e", n, max(corrections))
    return TraceResult(partial(), pd.DataFrame(rows), branch)
