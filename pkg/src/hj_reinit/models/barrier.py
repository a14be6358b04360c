"""Parameter und Pruefberichte der Barrieren v_lower <= u <= v_upper."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError


@dataclass(frozen=True)
class BarrierSpec:
    """(sigma, k1, k2, c, M) der Barrierenkonstruktion.

    Attributes:
        sigma: Halbbreite des Bandes, auf dem die Barrieren zeitunabhaengig sind.
        k1: Steigungsfaktor nahe Gamma, H(k1*M) >= 0.
        k2: Wachstumsrate des Exponentialfaktors ausserhalb des Bandes.
        c: Skalierung von u~ = c*u0 auf der jeweils anderen Seite.
        M: Halbe Gradientenuntergrenze aus dem Audit.
    """

    sigma: float
    k1: float
    k2: float
    c: float
    M: float

    def __post_init__(self) -> None:
        for name in ("sigma", "k1", "k2", "c", "M"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ConfigError("barrier_parameter", name=name, value=value)

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "k1": self.k1, "k2": self.k2, "c": self.c, "M": self.M}


@dataclass
class SandwichReport:
    """Verletzungen von lower - tol <= u <= upper + tol ueber alle Schnappschuesse."""

    violations: int
    worst_gap: float
    worst_location: tuple[float, ...] | None
    worst_time: float | None
    tolerance: float
    per_snapshot: list[tuple[float, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "violations": self.violations,
            "worst_gap": self.worst_gap,
            "worst_location": list(self.worst_location) if self.worst_location is not None else None,
            "worst_time": self.worst_time,
            "tolerance": self.tolerance,
        }


@dataclass
class BandBoundReport:
    """max |u| am Rand des sigma-Bandes gegen die Schranke k1*sigma."""

    bound: float
    observed: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.observed <= self.bound + self.tolerance

    def to_dict(self) -> dict:
        return {"passed": self.passed, "bound": self.bound, "observed": self.observed, "tolerance": self.tolerance}
