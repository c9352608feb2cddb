# /thetaflex/modules/config.py

# Konfiguracja podstawowa laboratorium Thetaflex

DEFAULT_LANGUAGE = 'pl'   # Domyślny język interfejsu: polski
AVAILABLE_LANGUAGES = ['pl', 'en', 'de']

# Etykiety językowe
LANGUAGE_LABELS = {
    "pl": "Polski",
    "en": "English",
    "de": "Deutsch"
}

# Rząd numeryczny (SVD)
DEFAULT_RTOL = 1e-8       # względny próg wartości osobliwych

# Sumowanie szeregów theta
DEFAULT_ABS_TOL = 1e-12          # tolerancja bezwzględna przed różniczkowaniem
MAX_TRUNCATION_RADIUS = 60       # twardy limit promienia R
MAX_DERIVATIVE_ORDER = 6
MIN_LAMBDA_MIN = 1e-3            # minimalna wartość własna Im Ω
SYMMETRY_TOL = 1e-12             # symetria Ω przy konstrukcji
DOCUMENT_SYMMETRY_TOL = 1e-9     # symetria Ω przy wczytywaniu dokumentu

# Stałość ilorazu Riemanna (zmienność względna)
RIEMANN_RATIO_TOL = 1e-8

# Dopasowanie (Levenberg-Marquardt)
DEFAULT_STARTS = 8
FIT_MAX_ITER = 200
FIT_ABS_TOL = 1e-13
FIT_XTOL = 1e-15
FIT_GTOL = 1e-15
FIT_JACOBIAN_STEP = 1e-7

# Całkowanie i kontynuacja
DEFAULT_STEP = 1e-3
CORRECTION_CAP = 1e-5            # maksymalna korekta Newtona na krok
MIN_LAMBDA_RATIO = 1e-6          # próg |λ| względem mediany wzdłuż śladu
RECONSTRUCT_MIN_LAMBDA = 1e-9
NEWTON_MAX_ITER = 50
DIVISOR_TOL = 1e-11              # |θ(z0)| / skala w punkcie dywizora
TANGENT_DEGENERACY = 1e-10

# Kody wyjścia CLI
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2

# Rodzaje przykładowych macierzy okresów
EXAMPLE_KINDS = ['elliptic', 'genus2-indecomposable', 'genus2-decomposable', 'random-siegel']
