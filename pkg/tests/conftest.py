"""Gemeinsame Test-Vorbereitung.

**Kein Test darf in das Arbeitsverzeichnis schreiben.** Die mitgelieferten
Konfigurationen zeigen auf ``results/<name>``; jeder Test, der die CLI oder die
Pipeline aufruft, bekommt deshalb ein eigenes Ausgabeverzeichnis unter
``tmp_path``.

Alle Tests laufen mit englischen Meldungen, damit Fehlertexte ("no interface
in domain") stabil verglichen werden koennen.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from hj_reinit.i18n import load_locale
from hj_reinit.models.grid import GridSpec
from hj_reinit.models.norms import NormSpec
from hj_reinit.models.problem import Hamiltonian, ProblemSpec
from hj_reinit.services.audit import build_problem


@pytest.fixture(autouse=True)
def _english_locale() -> None:
    load_locale("en")


@pytest.fixture
def output_dir(tmp_path: Path) -> Path:
    """Wegwerf-Ausgabeverzeichnis eines Tests."""
    target = tmp_path / "results"
    target.mkdir()
    return target


def circle_problem(points: int = 81, lower: float = -2.0, upper: float = 2.0, delta: float = 0.1) -> ProblemSpec:
    """x^2 + y^2 - 1 auf einem quadratischen Gitter, euklidisch, H(p) = p - 1."""
    grid = GridSpec.uniform(lower, upper, points)
    return build_problem(
        grid,
        lambda x, y: x * x + y * y - 1.0,
        delta,
        Hamiltonian.shifted_linear(),
        NormSpec.euclidean(),
    )


@pytest.fixture
def small_circle() -> ProblemSpec:
    return circle_problem()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
