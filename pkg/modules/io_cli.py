# /thetaflex/modules/io_cli.py
# Dokumenty macierzy okresów, generatory przykładów, raporty zadań
# i interfejs wiersza poleceń.

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from modules.config import (
    CORRECTION_CAP, DEFAULT_RTOL, DEFAULT_STARTS, DEFAULT_STEP,
    DOCUMENT_SYMMETRY_TOL, EXAMPLE_KINDS, EXIT_CHECK_FAILED, EXIT_INVALID_INPUT,
    EXIT_OK, FIT_MAX_ITER, MIN_LAMBDA_MIN, RIEMANN_RATIO_TOL,
)
from modules.errors import DocumentParseError, InvalidInputError, ThetaFlexError
from modules.kp import (
    FlexData, bilinear_pairing, cube_grid, divisor_point, flex_fit, hirota_terms,
    kp_pde_residual,
)
from modules.kummer import JetOperators, gw_rank, prop1_matrix, riemann_ratio
from modules.numerics import FitOptions, svd_rank
from modules.theta import PeriodMatrix, theta_eval, theta_magnitude
from modules.translation import (
    Chart, ReconstructOptions, TraceOptions, cubic_surface, cylinder,
    frame_from_chart, gauss_rank, hyperplane, quadric, reconstruct,
    theta_divisor_oracle, trace_theta_translation, twisted_cubic_chart,
    verify_frame,
)

logger = logging.getLogger(__name__)

COMMANDS = ['theta-eval', 'kummer-rank', 'gw-test', 'kp-fit', 'kp-check',
            'translate-trace', 'surface-verify', 'gen-example']

GAUGE_CONVENTION = ("|U| = 1; first max-modulus U coordinate real positive; "
                    "<V, conj U> = 0; Re of first nonzero V coordinate >= 0")


#############################################################################
# DOKUMENTY MACIERZY OKRESÓW
#############################################################################

@dataclass(frozen=True, eq=False)
class PeriodMatrixDocument:
    g: int
    omega: np.ndarray
    label: Optional[str] = None
    provenance: Optional[str] = None

    def to_period_matrix(self) -> PeriodMatrix:
        return PeriodMatrix(self.omega)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            'g': self.g,
            'omega': [[[float(v.real), float(v.imag)] for v in row] for row in self.omega],
        }
        if self.label is not None:
            out['label'] = self.label
        if self.provenance is not None:
            out['provenance'] = self.provenance
        return out

    def to_json(self) -> str:
        # repr liczb zmiennoprzecinkowych w json odtwarza wartości bit w bit
        return json.dumps(self.to_dict(), indent=2)


def _complex_entry(value, where: str) -> complex:
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise InvalidInputError(f"{where} must be a [re, im] pair of numbers, got {value!r}")
    return complex(value[0], value[1])


def parse_document(text: str) -> PeriodMatrixDocument:
    """
    Wczytuje dokument JSON {"g": …, "omega": [[[re, im], …], …]}.

    Asymetria do 1e-9 (względnie) jest symetryzowana, większa odrzucana.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentParseError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(data, dict) or 'g' not in data or 'omega' not in data:
        raise InvalidInputError("document must be an object with 'g' and 'omega'")
    g = data['g']
    rows = data['omega']
    if not isinstance(g, int) or isinstance(g, bool) or g < 1:
        raise InvalidInputError(f"g must be a positive integer, got {g!r}")
    if not isinstance(rows, list) or len(rows) != g or any(not isinstance(r, list) or len(r) != g for r in rows):
        raise InvalidInputError(f"omega must be a {g}x{g} array of [re, im] pairs")
    omega = np.array([[_complex_entry(v, f"omega[{i}][{j}]") for j, v in enumerate(row)]
                      for i, row in enumerate(rows)])
    if not np.all(np.isfinite(omega)):
        raise InvalidInputError("omega has non-finite entries")
    asymmetry = float(np.max(np.abs(omega - omega.T))) / max(float(np.max(np.abs(omega))), 1e-300)
    if asymmetry > DOCUMENT_SYMMETRY_TOL:
        raise InvalidInputError(f"omega is not symmetric: relative asymmetry {asymmetry:.3e}")
    omega = 0.5 * (omega + omega.T)
    lam_min = float(np.linalg.eigvalsh(omega.imag)[0])
    if lam_min <= MIN_LAMBDA_MIN:
        raise InvalidInputError(f"Im(omega) is not positive definite: lambda_min = {lam_min:.6g}")
    return PeriodMatrixDocument(g, omega, data.get('label'), data.get('provenance'))


def parse_period_matrix(text: str) -> PeriodMatrix:
    return parse_document(text).to_period_matrix()


def serialize_period_matrix(P: PeriodMatrix, label: Optional[str] = None,
                            provenance: Optional[str] = None) -> str:
    return PeriodMatrixDocument(P.g, np.array(P.omega), label, provenance).to_json()


def generate_example(kind: str, seed: int = 0, g: int = 3, c: float = 0.3) -> PeriodMatrixDocument:
    """
    Generuje przykładową macierz okresów.

    Args:
        kind: elliptic, genus2-indecomposable, genus2-decomposable lub random-siegel.
        seed: Ziarno generatora.
        g: Wymiar (tylko random-siegel).
        c: Dolne ograniczenie λ_min (tylko random-siegel).

    Returns:
        Dokument z etykietą i opisem pochodzenia.
    """
    rng = np.random.default_rng(seed)
    if kind == 'elliptic':
        omega = np.array([[rng.uniform(-0.5, 0.5) + 1j * rng.uniform(0.8, 1.5)]])
    elif kind == 'genus2-indecomposable':
        a, d = rng.uniform(1.2, 1.8, size=2)
        b = rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 0.6)
        real = rng.uniform(-0.1, 0.1, size=(2, 2))
        omega = 0.5 * (real + real.T) + 1j * np.array([[a, b], [b, d]])
    elif kind == 'genus2-decomposable':
        diag = rng.uniform(-0.5, 0.5, size=2) + 1j * rng.uniform(0.8, 1.5, size=2)
        omega = np.diag(diag)
    elif kind == 'random-siegel':
        if g < 1 or c <= MIN_LAMBDA_MIN:
            raise InvalidInputError(f"random-siegel needs g >= 1 and c > {MIN_LAMBDA_MIN}")
        S = rng.uniform(-0.5, 0.5, size=(g, g))
        B = 0.5 * rng.standard_normal((g, g))
        omega = 0.5 * (S + S.T) + 1j * (B @ B.T + c * np.eye(g))
    else:
        raise InvalidInputError(f"unknown example kind {kind!r}; expected one of {EXAMPLE_KINDS}")
    return PeriodMatrixDocument(omega.shape[0], omega, label=kind, provenance=f"generate_example(seed={seed})")


#############################################################################
# RAPORTY ZADAŃ
#############################################################################

@dataclass
class JobReport:
    kind: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    checks: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    seed: int = 0
    wall_time: float = 0.0
    error: Optional[Dict[str, str]] = None
    data: Optional[pd.DataFrame] = None

    def add_check(self, name: str, value: float, tol: float, passed: Optional[bool] = None) -> bool:
        passed = bool(value <= tol) if passed is None else bool(passed)
        self.checks[name] = {'value': float(value), 'tol': float(tol), 'passed': passed}
        return passed

    @property
    def passed(self) -> bool:
        return self.error is None and all(c['passed'] for c in self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'inputs': self.inputs,
            'checks': self.checks,
            'results': self.results,
            'passed': self.passed,
            'tolerances': self.tolerances,
            'seed': self.seed,
            'wall_time': self.wall_time,
            'error': self.error,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default)

    def checks_frame(self) -> pd.DataFrame:
        rows = [{'check': name, **values} for name, values in self.checks.items()]
        return pd.DataFrame(rows, columns=['check', 'value', 'tol', 'passed'])


def _json_default(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return _json_default_array(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _json_default_array(arr: np.ndarray):
    if np.iscomplexobj(arr):
        return [[float(v.real), float(v.imag)] for v in arr.ravel()]
    return arr.tolist()


def _pair(value: complex) -> List[float]:
    return [float(value.real), float(value.imag)]


def parse_point(text: Optional[str], g: int) -> np.ndarray:
    """Punkt jako lista liczb zespolonych oddzielonych przecinkami, np. '0.1+0.2j,0'."""
    if text is None:
        return np.zeros(g, dtype=complex)
    try:
        z = np.array([complex(part.strip().replace(' ', '')) for part in text.split(',')])
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse point {text!r}") from exc
    if z.shape != (g,):
        raise InvalidInputError(f"point must have {g} coordinates, got {z.size}")
    return z


#############################################################################
# ZADANIA
#############################################################################

def _load_matrix(options: Dict[str, Any], report: JobReport) -> PeriodMatrix:
    if options.get('omega'):
        path = Path(options['omega'])
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as exc:
            raise InvalidInputError(f"cannot read {path}: {exc}") from exc
        document = parse_document(text)
        report.inputs['omega_file'] = str(path)
    else:
        document = generate_example(options['example'], options['seed'], options['g'])
        report.inputs['example'] = options['example']
    report.inputs['document'] = document.to_dict()
    return document.to_period_matrix()


def _fit(P: PeriodMatrix, options: Dict[str, Any], report: JobReport):
    opts = FitOptions(max_iter=options['max_iter'])
    result = flex_fit(P, starts=options['starts'], seed=options['seed'], opts=opts)
    report.results['flex'] = result.flex.as_dict()
    report.results['indecomposable'] = result.indecomposable
    report.results['start_index'] = result.start_index
    report.results['relative_residual'] = result.relative_residual
    report.inputs['gauge'] = GAUGE_CONVENTION
    return result


def _job_theta_eval(options, report):
    P = _load_matrix(options, report)
    z = parse_point(options['z'], P.g)
    value = theta_eval(z, P)
    scale = theta_magnitude(z, P)
    report.results['theta'] = _pair(value)
    report.results['abs'] = abs(value)
    report.results['scale'] = scale
    report.add_check('evenness', abs(value - theta_eval(-z, P)) / scale, options['tol'])


def _job_kummer_rank(options, report):
    P = _load_matrix(options, report)
    rank = svd_rank(prop1_matrix(P), options['rtol'])
    expected = P.g * (P.g + 1) // 2 + 1
    report.results['rank'] = rank.rank
    report.results['expected_rank'] = expected
    report.results['indecomposable'] = rank.rank == expected
    report.results['singular_values'] = rank.singular_values.tolist()
    report.tolerances['rtol'] = options['rtol']
    rng = np.random.default_rng(options['seed'])
    ratios = []
    for _ in range(options['samples']):
        z = 0.3 * (rng.standard_normal(P.g) + 1j * rng.standard_normal(P.g))
        w = 0.3 * (rng.standard_normal(P.g) + 1j * rng.standard_normal(P.g))
        ratios.append(riemann_ratio(z, w, P))
    ratios = np.asarray(ratios)
    variation = float(np.max(np.abs(ratios - ratios[0])) / abs(ratios[0]))
    report.results['riemann_ratio'] = _pair(complex(ratios[0]))
    report.tolerances['ratio_tol'] = options['ratio_tol']
    report.add_check('riemann_ratio_variation', variation, options['ratio_tol'])


def _job_gw_test(options, report):
    P = _load_matrix(options, report)
    z = parse_point(options['z'], P.g)
    result = _fit(P, options, report)
    F = result.flex
    J = JetOperators(0.5 * F.U, 0.5 * F.V)
    rank = gw_rank(z, P, J, options['rtol'])
    report.results['gw_rank'] = rank
    report.results['z'] = [_pair(v) for v in z]
    report.tolerances['rtol'] = options['rtol']
    report.add_check('gw_rank_at_most_2', rank, 2)
    # Punkt kontrolny poza krzywą flex: oczekiwany pełny rząd min(3, 2^g)
    rng = np.random.default_rng(options['seed'])
    generic = 0.2 * (rng.standard_normal(P.g) + 1j * rng.standard_normal(P.g))
    full = min(3, 2 ** P.g)
    generic_rank = gw_rank(generic, P, J, options['rtol'])
    report.results['gw_rank_generic'] = generic_rank
    report.results['generic_point'] = [_pair(v) for v in generic]
    report.add_check('gw_rank_generic_full', generic_rank, full, passed=generic_rank == full)


def _job_kp_fit(options, report):
    P = _load_matrix(options, report)
    result = _fit(P, options, report)
    report.tolerances['max_residual'] = options['max_residual']
    report.add_check('relative_op_residual', result.relative_residual, options['max_residual'])


def _job_kp_check(options, report):
    P = _load_matrix(options, report)
    result = _fit(P, options, report)
    F: FlexData = result.flex
    rng = np.random.default_rng(options['seed'])
    worst, worst_pairing = 0.0, 0.0
    for _ in range(options['samples']):
        z0 = rng.uniform(-0.5, 0.5, P.g) + 1j * rng.uniform(-0.5, 0.5, P.g)
        terms = hirota_terms(P, F, z0)
        worst = max(worst, abs(terms.residual) / terms.scale)
        worst_pairing = max(worst_pairing, abs(terms.residual - bilinear_pairing(P, F, z0)) / terms.scale)
    report.add_check('relative_op_residual', result.relative_residual, options['max_residual'])
    report.add_check('hirota_relative', worst, options['pde_tol'])
    report.add_check('bilinear_pairing_mismatch', worst_pairing, options['pde_tol'])
    z0 = parse_point(options['z'], P.g) if options['z'] else np.full(P.g, 0.1 + 0.05j)
    pde = kp_pde_residual(P, F, z0, cube_grid(options['span'] if options['span'] else 0.2, 5))
    report.add_check('kp_pde_relative', pde.relative, options['pde_tol'])
    report.tolerances['pde_tol'] = options['pde_tol']
    report.data = pde.table


def _job_translate_trace(options, report):
    P = _load_matrix(options, report)
    if P.g != 2:
        raise InvalidInputError("translate-trace needs a genus-2 period matrix")
    rng = np.random.default_rng(options['seed'])
    base = (parse_point(options['z'], 2) if options['z']
            else rng.uniform(-0.3, 0.3, 2) + 1j * rng.uniform(-0.3, 0.3, 2))
    z_start = divisor_point(P, base, np.array([1.0, 0.5]))
    span = options['span'] if options['span'] else 0.5
    opts = TraceOptions(step=options['step'], correction_cap=options['correction_cap'])
    first = trace_theta_translation(P, z_start, options['branch'], span, opts)
    shifted = z_start + np.array([1.0, 0.0]) + P.omega @ np.array([0.0, 1.0])
    second = trace_theta_translation(P, shifted, options['branch'], span, opts)
    chart = Chart.stack([first.chart, second.chart])
    report.inputs['z_start'] = [_pair(v) for v in z_start]
    report.results['end'] = [_pair(v) for v in first.end]
    report.tolerances.update({'trace_tol': options['trace_tol'], 'correction_cap': opts.correction_cap})
    report.add_check('theta_before_correction', chart.max_residual, options['trace_tol'])
    report.add_check('max_correction', chart.max_correction, opts.correction_cap)
    report.add_check('parallel_deviation', chart.parallel_deviation, options['trace_tol'])
    report.add_check('gauss_rank', 0, 0, passed=gauss_rank(theta_divisor_oracle(P), z_start) == 1)
    report.data = first.chart.to_frame()


def _job_surface_verify(options, report):
    tol = options['tol']
    chart = twisted_cubic_chart()
    H = cubic_surface()
    worst = 0.0
    for t1 in (-0.4, 0.1, 0.35):
        frame = frame_from_chart(chart, t1)
        for t2 in (0.0, 0.3):
            z = chart.alpha(t1) + np.array([0.0, t2, t2 * t2])
            fr = verify_frame(H, z, frame, tol)
            worst = max(worst, fr.res_i, fr.res_ii)
    report.add_check('cubic_frame_residual', worst, tol)

    def frame_field(tau2):
        return np.array([1.0, tau2, 0.75 * tau2 ** 2]), 2.0

    t0, t1 = -0.2, 0.3
    bases = [chart.alpha(t0 / 2) + np.array([0.0, t2, t2 * t2]) for t2 in (0.0, 0.25, -0.15)]
    rebuilt = reconstruct(H, frame_field, bases, (t0, t1), ReconstructOptions(step=options['step']))
    report.add_check('cubic_reconstruct_residual', rebuilt.max_residual, 1e-8)
    report.add_check('cubic_parallel_deviation', rebuilt.parallel_deviation, 1e-7)

    rng = np.random.default_rng(options['seed'])
    rows = []
    cases = [('hyperplane', hyperplane([1.0, 2.0, -1.0]), 0), ('quadric', quadric(3), 2),
             ('cylinder', cylinder(3), 1)]
    for name, surface, expected in cases:
        z = _random_surface_point(name, rng)
        rank = gauss_rank(surface, z, options['rtol'])
        rows.append({'surface': name, 'gauss_rank': rank, 'expected': expected})
        report.add_check(f'gauss_rank_{name}', abs(rank - expected), 0)
    report.data = pd.DataFrame(rows)


def _random_surface_point(name: str, rng) -> np.ndarray:
    z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    if name == 'hyperplane':
        z[2] = z[0] + 2.0 * z[1]
    elif name == 'quadric':
        z[2] = np.sqrt(1.0 - z[0] ** 2 - z[1] ** 2)
    else:
        z[1] = np.sqrt(1.0 - z[0] ** 2)
    return z


def _job_gen_example(options, report):
    document = generate_example(options['kind'], options['seed'], options['g'], options['c'])
    report.inputs['kind'] = options['kind']
    report.results['document'] = document.to_dict()
    report.results['lambda_min'] = float(np.linalg.eigvalsh(document.omega.imag)[0])


_JOBS = {
    'theta-eval': _job_theta_eval,
    'kummer-rank': _job_kummer_rank,
    'gw-test': _job_gw_test,
    'kp-fit': _job_kp_fit,
    'kp-check': _job_kp_check,
    'translate-trace': _job_translate_trace,
    'surface-verify': _job_surface_verify,
    'gen-example': _job_gen_example,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='thetaflex',
        description='Numerical checks for theta functions, Kummer flexes, KP residuals and translation manifolds.',
    )
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('--omega', help='period matrix document (JSON)')
    parser.add_argument('--example', default='genus2-indecomposable', choices=EXAMPLE_KINDS)
    parser.add_argument('--kind', default='genus2-indecomposable', choices=EXAMPLE_KINDS,
                        help='example kind for gen-example')
    parser.add_argument('--g', type=int, default=3, help='dimension for random-siegel')
    parser.add_argument('--c', type=float, default=0.3, help='lambda_min bound for random-siegel')
    parser.add_argument('--z', help="point, e.g. '0.1+0.2j,0'")
    parser.add_argument('--tol', type=float, default=1e-9)
    parser.add_argument('--rtol', type=float, default=DEFAULT_RTOL)
    parser.add_argument('--ratio-tol', dest='ratio_tol', type=float, default=RIEMANN_RATIO_TOL)
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--samples', type=int, default=10)
    parser.add_argument('--starts', type=int, default=DEFAULT_STARTS)
    parser.add_argument('--max-residual', dest='max_residual', type=float, default=1e-7)
    parser.add_argument('--max-iter', dest='max_iter', type=int, default=FIT_MAX_ITER)
    parser.add_argument('--pde-tol', dest='pde_tol', type=float, default=1e-6)
    parser.add_argument('--trace-tol', dest='trace_tol', type=float, default=1e-6)
    parser.add_argument('--span', type=float, default=None)
    parser.add_argument('--step', type=float, default=DEFAULT_STEP)
    parser.add_argument('--branch', type=int, default=1, choices=[1, -1])
    parser.add_argument('--correction-cap', dest='correction_cap', type=float, default=CORRECTION_CAP)
    parser.add_argument('--out', help='output file (report, CSV data or generated document)')
    parser.add_argument('--format', default='json', choices=['json', 'csv'])
    parser.add_argument('--verbose', action='store_true')
    return parser


def run_job(command: str, flags: Optional[Dict[str, Any]] = None) -> Tuple[JobReport, int]:
    """
    Uruchamia zadanie i zwraca raport z kodem wyjścia.

    Args:
        command: Nazwa zadania (COMMANDS).
        flags: Wartości opcji nadpisujące domyślne (klucze jak w argparse).

    Returns:
        (JobReport, kod): 0 - wszystkie testy przeszły, 1 - test nie przeszedł
        lub błąd numeryczny, 2 - niepoprawne dane.
    """
    if command not in _JOBS:
        report = JobReport(kind=str(command), error={'type': 'InvalidInputError',
                                                     'message': f"unknown command {command!r}"})
        return report, EXIT_INVALID_INPUT
    options = vars(build_parser().parse_args([command]))
    options.update(flags or {})
    report = JobReport(kind=command, seed=options['seed'])
    report.tolerances['tol'] = options['tol']
    started = time.perf_counter()
    code = EXIT_OK
    try:
        _JOBS[command](options, report)
    except InvalidInputError as exc:
        logger.error("%s: invalid input: %s", command, exc)
        report.error = {'type': type(exc).__name__, 'message': str(exc)}
        code = EXIT_INVALID_INPUT
    except ThetaFlexError as exc:
        logger.error("%s failed: %s", command, exc)
        report.error = {'type': type(exc).__name__, 'message': str(exc)}
        partial = getattr(exc, 'partial', None)
        if isinstance(partial, Chart):
            report.data = partial.to_frame()
        code = EXIT_CHECK_FAILED
    report.wall_time = time.perf_counter() - started
    if code == EXIT_OK and not report.passed:
        failed = [name for name, c in report.checks.items() if not c['passed']]
        logger.warning("%s: failed checks %s", command, ', '.join(failed))
        code = EXIT_CHECK_FAILED
    return report, code


def _write(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding='utf-8')
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )
    report, code = run_job(args.command, vars(args))
    if args.command == 'gen-example' and report.error is None:
        document = report.results['document']
        _write(json.dumps(document, indent=2) + '\n', args.out)
    elif args.format == 'csv':
        table = report.data if report.data is not None else report.checks_frame()
        _write(table.to_csv(index=False), args.out)
    else:
        _write(report.to_json() + '\n', args.out)
    logger.info("%s finished with exit code %d in %.2f s", args.command, code, report.wall_time)
    return code


if __name__ == '__main__':
    raise SystemExit(main())
