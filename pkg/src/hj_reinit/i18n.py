"""i18n - Einfache Internationalisierung ueber JSON-Sprachdateien.

Uebersetzt werden nur Meldungen fuer den Menschen (CLI-Ausgaben,
Fehlermeldungen). Reports und Feld-Dateien bleiben sprachneutral, damit ein
Lauf unabhaengig von ``--lang`` byte-identische Ergebnisse liefert.
"""

from __future__ import annotations

import json
import logging
from importlib import resources

logger = logging.getLogger(__name__)

_strings: dict[str, str] = {}
_current_lang: str = "en"
_loaded = False

SUPPORTED_LANGUAGES = ("de", "en")
DEFAULT_LANGUAGE = "en"


def load_locale(lang: str) -> None:
    """Laedt eine Sprachdatei (z.B. 'de', 'en')."""
    global _strings, _current_lang, _loaded

    if lang not in SUPPORTED_LANGUAGES:
        logger.warning("Sprache '%s' nicht unterstuetzt, verwende '%s'", lang, DEFAULT_LANGUAGE)
        lang = DEFAULT_LANGUAGE

    _loaded = True
    try:
        locale_file = resources.files("hj_reinit") / "locale" / f"{lang}.json"
        raw = locale_file.read_text(encoding="utf-8")
        _strings = json.loads(raw)
        _current_lang = lang
    except Exception:
        logger.exception("Fehler beim Laden der Sprachdatei '%s'", lang)
        _strings = {}
        _current_lang = lang


def locale_keys(lang: str) -> set[str]:
    """Alle Schluessel einer Sprachdatei, ohne die aktive Sprache zu wechseln."""
    locale_file = resources.files("hj_reinit") / "locale" / f"{lang}.json"
    return set(json.loads(locale_file.read_text(encoding="utf-8")))


def current_language() -> str:
    """Gibt die aktuell geladene Sprache zurueck."""
    return _current_lang


def t(msg_key: str, /, **kwargs: object) -> str:
    """Uebersetzt einen Schluessel. Platzhalter via {name} und kwargs.

    ``msg_key`` ist positional-only; ``key`` bleibt als Platzhaltername frei
    (Konfigurationspfad bei ``unknown_key``, ``config_type``, ``check_name``).
    """
    if not _loaded:
        load_locale(DEFAULT_LANGUAGE)
    template = _strings.get(msg_key, msg_key)
    if kwargs:
        try:
            return template.format(**kwargs)
        except (KeyError, IndexError, ValueError):
            return template
    return template
