# /thetaflex/modules/errors.py
# Hierarchia wyjątków laboratorium


class ThetaFlexError(Exception):
    """Bazowy wyjątek wszystkich operacji laboratorium."""


class InvalidInputError(ThetaFlexError, ValueError):
    """Niepoprawne dane wejściowe (kod wyjścia 2)."""


class DocumentParseError(InvalidInputError):
    """Błąd składni dokumentu z położeniem (linia, kolumna)."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ToleranceUnachievableError(ThetaFlexError):
    """Promień obcięcia przekracza twardy limit."""


class DegeneratePointError(ThetaFlexError):
    """Wszystkie współrzędne θ⃗₂ praktycznie zerowe."""


class SingularDivisorError(ThetaFlexError):
    """Gradient θ znika w punkcie dywizora."""


class DegenerateTangentError(ThetaFlexError):
    """Nie da się znormalizować wektora stycznego."""


class RootNotFoundError(ThetaFlexError):
    """Metoda Newtona nie znalazła zera."""


class PoleError(ThetaFlexError):
    """θ znika w punkcie siatki, u = 2∂²log θ ma biegun."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class OffSurfaceError(ThetaFlexError):
    """Punkt nie leży na hiperpowierzchni."""


class DegenerateChartError(ThetaFlexError):
    """Wszystkie pochodne krzywej α znikają."""


class DevelopableSurfaceError(ThetaFlexError):
    """Hiperpowierzchnia jest rozwijalna w punkcie startowym."""


class PartialResultError(ThetaFlexError):
    """Błąd przerywający obliczenia z zachowaniem częściowego wyniku."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class IntegrationError(PartialResultError):
    """Niefinitywna wartość pola lub wyczerpany limit kroków w trakcie całkowania."""


class NearSingularFrameError(PartialResultError):
    """|λ| spadło poniżej progu w trakcie całkowania."""


class TraceDivergenceError(PartialResultError):
    """Korekta Newtona przekroczyła limit."""
