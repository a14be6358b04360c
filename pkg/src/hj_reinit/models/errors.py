"""Fehlerklassen fuer hj-reinit.

Jeder Fehler traegt einen stabilen Code (maschinenlesbar, landet im
JSON-Fehlerobjekt der CLI) und die Parameter, aus denen die lokalisierte
Meldung gebaut wird. Der Text selbst kommt aus den Sprachdateien
(Schluessel ``error.<code>``).
"""

from __future__ import annotations

from ..i18n import t


class ReinitError(Exception):
    """Basisklasse aller fachlichen Fehler."""

    exit_code = 1

    def __init__(self, code: str, **params: object) -> None:
        self.code = code
        self.params = params
        super().__init__(self.message)

    @property
    def message(self) -> str:
        """Lokalisierte Meldung (faellt ohne geladene Sprache auf den Schluessel zurueck)."""
        return t(f"error.{self.code}", **self.params)

    def __str__(self) -> str:
        return self.message

    def to_dict(self) -> dict:
        """JSON-Fehlerobjekt fuer den Diagnose-Stream der CLI."""
        return {
            "error": {
                "code": self.code,
                "message": self.message,
                "params": {key: _plain(value) for key, value in self.params.items()},
            }
        }


class ConfigError(ReinitError, ValueError):
    """Ungueltige Konfiguration oder verletzte Vorbedingung der Eingabedaten."""

    exit_code = 2


class NoInterfaceError(ConfigError):
    """u0 wechselt im Gebiet nicht das Vorzeichen - es gibt kein Gamma."""

    def __init__(self, **params: object) -> None:
        super().__init__("no_interface", **params)


class NumericalError(ReinitError, ArithmeticError):
    """NaN/Inf im Zustand, Nicht-Konvergenz oder sonstiges numerisches Versagen."""

    exit_code = 3


class AcceptanceError(ReinitError):
    """Ein mit ``--check`` angefordertes Abnahmekriterium ist verletzt."""

    exit_code = 4


def _plain(value: object) -> object:
    """Macht Parameter JSON-tauglich (Tupel, numpy-Skalare)."""
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):
        return value.item()  # type: ignore[union-attr]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)
