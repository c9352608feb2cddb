# /thetaflex/modules/i18n.py

from modules.config import DEFAULT_LANGUAGE

TRANSLATIONS = {
    "choose_language": {
        "pl": "Wybierz język",
        "en": "Choose language",
        "de": "Sprache wählen"
    },
    "app_subtitle": {
        "pl": "Laboratorium funkcji theta, przegięć Kummera i równania KP",
        "en": "Laboratory for theta functions, Kummer flexes and the KP equation",
        "de": "Labor für Thetafunktionen, Kummer-Wendepunkte und die KP-Gleichung"
    },
    "general_settings": {
        "pl": "Ustawienia ogólne",
        "en": "General settings",
        "de": "Allgemeine Einstellungen"
    },
    "period_matrix": {
        "pl": "Macierz okresów",
        "en": "Period matrix",
        "de": "Periodenmatrix"
    },
    "source": {
        "pl": "Źródło macierzy",
        "en": "Matrix source",
        "de": "Matrixquelle"
    },
    "source_example": {
        "pl": "Przykład generowany",
        "en": "Generated example",
        "de": "Generiertes Beispiel"
    },
    "source_upload": {
        "pl": "Plik JSON",
        "en": "JSON file",
        "de": "JSON-Datei"
    },
    "example_kind": {
        "pl": "Rodzaj przykładu",
        "en": "Example kind",
        "de": "Beispielart"
    },
    "seed": {
        "pl": "Ziarno generatora",
        "en": "Random seed",
        "de": "Zufallsstartwert"
    },
    "tolerance": {
        "pl": "Tolerancja",
        "en": "Tolerance",
        "de": "Toleranz"
    },
    "job": {
        "pl": "Zadanie",
        "en": "Job",
        "de": "Aufgabe"
    },
    "run_job": {
        "pl": "Uruchom zadanie",
        "en": "Run job",
        "de": "Aufgabe starten"
    },
    "results": {
        "pl": "Wyniki",
        "en": "Results",
        "de": "Ergebnisse"
    },
    "checks": {
        "pl": "Testy",
        "en": "Checks",
        "de": "Prüfungen"
    },
    "data": {
        "pl": "Dane",
        "en": "Data",
        "de": "Daten"
    },
    "report": {
        "pl": "Raport",
        "en": "Report",
        "de": "Bericht"
    },
    "passed": {
        "pl": "Wszystkie testy zaliczone",
        "en": "All checks passed",
        "de": "Alle Prüfungen bestanden"
    },
    "failed": {
        "pl": "Co najmniej jeden test nie przeszedł",
        "en": "At least one check failed",
        "de": "Mindestens eine Prüfung ist fehlgeschlagen"
    },
    "invalid_input": {
        "pl": "Niepoprawne dane wejściowe",
        "en": "Invalid input",
        "de": "Ungültige Eingabe"
    },
    "wall_time": {
        "pl": "Czas obliczeń (s)",
        "en": "Wall time (s)",
        "de": "Rechenzeit (s)"
    },
    "download_csv": {
        "pl": "Pobierz plik CSV",
        "en": "Download CSV file",
        "de": "CSV-Datei herunterladen"
    },
    "download_excel": {
        "pl": "Pobierz plik Excel",
        "en": "Download Excel file",
        "de": "Excel-Datei herunterladen"
    },
    "no_data": {
        "pl": "Brak danych do wyświetlenia. Uruchom zadanie w panelu bocznym.",
        "en": "No data to display. Run a job from the sidebar.",
        "de": "Keine Daten. Starten Sie eine Aufgabe in der Seitenleiste."
    },
    "starts": {
        "pl": "Liczba startów dopasowania",
        "en": "Number of fit starts",
        "de": "Anzahl der Startpunkte"
    },
    "span": {
        "pl": "Przyrost τ₂",
        "en": "τ₂ span",
        "de": "τ₂-Spanne"
    },
    "step": {
        "pl": "Krok całkowania",
        "en": "Integration step",
        "de": "Integrationsschritt"
    },
    "point": {
        "pl": "Punkt z (np. 0.1+0.2j,0)",
        "en": "Point z (e.g. 0.1+0.2j,0)",
        "de": "Punkt z (z. B. 0.1+0.2j,0)"
    },
    "footer": {
        "pl": "Thetaflex - laboratorium numeryczne. Wyniki są przybliżone i opatrzone tolerancjami.",
        "en": "Thetaflex - numerical laboratory. Results are approximate and reported with tolerances.",
        "de": "Thetaflex - numerisches Labor. Ergebnisse sind Näherungen mit angegebenen Toleranzen."
    }
}


def translate(key: str, language: str = DEFAULT_LANGUAGE) -> str:
    """Zwraca tłumaczenie danego klucza w wybranym języku."""
    if key in TRANSLATIONS:
        if language in TRANSLATIONS[key]:
            return TRANSLATIONS[key][language]
        elif 'en' in TRANSLATIONS[key]:
            return TRANSLATIONS[key]['en']
    return key
