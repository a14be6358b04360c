"""Datenmodelle einer Probleminstanz u_t + f(x) H(||grad u||) = 0."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, NoInterfaceError
from .grid import ScalarField
from .norms import NormSpec


class HamiltonianKind(Enum):
    """Variante des Hamiltonians."""

    SHIFTED_LINEAR = "shifted_linear"
    SHIFTED_POWER = "shifted_power"


class Verdict(Enum):
    """Ergebnis der Pruefung einer einzelnen Hypothese."""

    PASS = "pass"
    WARN = "warn"
    FAIL = "fail"


@dataclass(frozen=True)
class Hamiltonian:
    """H(p) = p - 1 bzw. H(p) = p^m - 1.

    Beide Varianten haben H(1) = 0, sind auf [0, inf) streng monoton wachsend
    und nehmen ihr Infimum -1 bei p = 0 an.
    """

    kind: HamiltonianKind = HamiltonianKind.SHIFTED_LINEAR
    m: float = 1.0

    def __post_init__(self) -> None:
        if self.kind is HamiltonianKind.SHIFTED_POWER and not self.m >= 1.0:
            raise ConfigError("hamiltonian_exponent", m=self.m)
        if self.kind is HamiltonianKind.SHIFTED_LINEAR and self.m != 1.0:
            object.__setattr__(self, "m", 1.0)

    @classmethod
    def shifted_linear(cls) -> Hamiltonian:
        return cls(HamiltonianKind.SHIFTED_LINEAR)

    @classmethod
    def shifted_power(cls, m: float) -> Hamiltonian:
        return cls(HamiltonianKind.SHIFTED_POWER, float(m))

    @classmethod
    def from_dict(cls, data: dict) -> Hamiltonian:
        if not isinstance(data, dict):
            raise ConfigError("hamiltonian_type", value=repr(data))
        kind = data.get("type")
        if kind == HamiltonianKind.SHIFTED_LINEAR.value:
            if set(data) - {"type"}:
                raise ConfigError("unknown_key", key=f"hamiltonian.{sorted(set(data) - {'type'})[0]}")
            return cls.shifted_linear()
        if kind == HamiltonianKind.SHIFTED_POWER.value:
            if set(data) - {"type", "m"}:
                raise ConfigError("unknown_key", key=f"hamiltonian.{sorted(set(data) - {'type', 'm'})[0]}")
            m = data.get("m", 2.0)
            if not isinstance(m, (int, float)) or isinstance(m, bool):
                raise ConfigError("hamiltonian_exponent", m=repr(m))
            return cls.shifted_power(m)
        raise ConfigError("hamiltonian_type", value=repr(kind))

    def to_dict(self) -> dict:
        if self.kind is HamiltonianKind.SHIFTED_LINEAR:
            return {"type": self.kind.value}
        return {"type": self.kind.value, "m": self.m}

    @property
    def label(self) -> str:
        return "p - 1" if self.kind is HamiltonianKind.SHIFTED_LINEAR else f"p^{self.m:g} - 1"

    def __call__(self, p: np.ndarray | float) -> np.ndarray:
        arr = np.asarray(p, dtype=np.float64)
        if np.any(arr < 0.0):
            raise ConfigError("hamiltonian_negative_argument", value=float(np.min(arr)))
        if self.kind is HamiltonianKind.SHIFTED_LINEAR:
            return arr - 1.0
        return np.power(arr, self.m) - 1.0

    def max_slope(self, cap: float) -> float:
        """Lipschitz-Konstante von H auf [0, cap]."""
        if self.kind is HamiltonianKind.SHIFTED_LINEAR or self.m == 1.0:
            return 1.0
        return float(self.m * cap ** (self.m - 1.0))

    def infimum(self, cap: float) -> float:
        """min H auf [0, cap] - fuer beide Varianten H(0) = -1."""
        return float(self(0.0))

    def max_abs(self, cap: float) -> float:
        """max |H(p)| fuer p in [0, cap] (H monoton: Randwerte genuegen)."""
        return float(max(abs(self(0.0)), abs(self(cap))))

    @property
    def has_linear_growth(self) -> bool:
        """Erfuellt H die Wachstumsbedingung |H(p)| <= C3 (1 + p) global?"""
        return self.kind is HamiltonianKind.SHIFTED_LINEAR or self.m == 1.0


def hamiltonian_eval(hamiltonian: Hamiltonian, p: float) -> float:
    """H(p) fuer ein einzelnes p >= 0.

    Raises:
        ConfigError: Fuer p < 0 (Normen sind nichtnegativ).
    """
    return float(hamiltonian(p))


@dataclass(frozen=True)
class SpeedField:
    """Geschwindigkeitsfeld f mit abgetasteter Lipschitz-Konstante und Schranke.

    Attributes:
        values:
            f an den Gitterknoten.
        delta:
            Regularisierungsparameter des geglaetteten Vorzeichens.
        lipschitz_estimate:
            Abgetastete untere Schranke L der Lipschitz-Konstante.
        sup_bound:
            Abgetastetes max |f| (C1).
    """

    values: ScalarField
    delta: float
    lipschitz_estimate: float
    sup_bound: float


@dataclass(frozen=True)
class ProblemSpec:
    """Vollstaendige Daten einer Instanz: u0, f, H, Norm.

    ``generator`` ist die erzeugende Funktion von u0 (z.B. ein
    :class:`~hj_reinit.services.expression.Expression`), damit Studien u0 auf
    feineren Gittern neu abtasten koennen.
    """

    u0: ScalarField
    speed: SpeedField
    hamiltonian: Hamiltonian
    norm: NormSpec
    generator: Callable[..., np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.norm.dim != self.u0.grid.dim:
            raise ConfigError("dimension_mismatch", field=self.u0.grid.dim, norm=self.norm.dim)
        if self.speed.values.grid != self.u0.grid:
            raise ConfigError("speed_grid")
        values = self.u0.values
        if not (np.any(values > 0.0) and np.any(values < 0.0)):
            raise NoInterfaceError()

    @property
    def grid(self):  # noqa: ANN201 - GridSpec, Rueckimport vermeiden
        return self.u0.grid

    @property
    def f(self) -> ScalarField:
        return self.speed.values


@dataclass
class HypothesisCheck:
    """Eine gepruefte Hypothese: Schaetzwert(e), Urteil, Hinweis."""

    verdict: Verdict
    values: dict[str, float | int | str] = field(default_factory=dict)
    note: str = ""

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "values": dict(self.values), "note": self.note}


@dataclass
class AuditReport:
    """Ergebnis der numerischen Hypothesenpruefung.

    Attributes:
        lipschitz_estimate: Lipschitz-Konstante L von f.
        sup_bound: C1 = max |f|.
        sign_violations: Knoten mit sign(f) != sign(u0).
        gradient_floor: M = inf ||grad u0|| auf dem Gamma-Band.
        gradient_sup: C2 = max ||grad u0||.
        growth_constant: C3 in |H(p)| <= C3 (1 + p).
        root: Nullstelle von H (soll 1 sein).
        witness_scale: c fuer u~ = c*u0.
        witness_alpha: alpha = max H(||grad u~||).
        band_width: Breite des Gamma-Bandes |u0| <= band_width.
        checks: Urteil pro Voraussetzung ("speed_lipschitz" ... "unit_root").
    """

    lipschitz_estimate: float
    sup_bound: float
    sign_violations: int
    gradient_floor: float
    gradient_sup: float
    growth_constant: float
    root: float
    witness_scale: float
    witness_alpha: float
    band_width: float
    checks: dict[str, HypothesisCheck] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """Bestanden nur mit M > 0, exakter Vorzeichengleichheit und alpha < 0."""
        return self.gradient_floor > 0.0 and self.sign_violations == 0 and self.witness_alpha < 0.0

    @property
    def warnings(self) -> list[str]:
        return [name for name, check in self.checks.items() if check.verdict is Verdict.WARN]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "band_width": self.band_width,
            "hypotheses": {name: check.to_dict() for name, check in sorted(self.checks.items())},
        }
