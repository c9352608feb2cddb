# /thetaflex/tests/test_i18n.py

from modules.config import AVAILABLE_LANGUAGES, LANGUAGE_LABELS
from modules.i18n import TRANSLATIONS, translate


def test_every_key_has_all_languages():
    for key, labels in TRANSLATIONS.items():
        assert set(AVAILABLE_LANGUAGES) <= set(labels), key


def test_translate_falls_back():
    assert translate("period_matrix", "de") == "Periodenmatrix"
    assert translate("period_matrix", "fr") == TRANSLATIONS["period_matrix"]["en"]
    assert translate("no_such_key", "pl") == "no_such_key"


def test_language_labels_cover_available_languages():
    assert set(LANGUAGE_LABELS) == set(AVAILABLE_LANGUAGES)
