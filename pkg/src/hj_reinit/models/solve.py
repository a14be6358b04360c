"""Datenmodelle des Zeitschritt-Loesers."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import ConfigError
from .grid import TimeSeries
from .norms import NormSpec


class SchemeKind(Enum):
    """Numerischer Hamiltonian."""

    GODUNOV = "godunov"
    LAX_FRIEDRICHS = "lax_friedrichs"


class Integrator(Enum):
    """Zeitintegration."""

    EULER = "euler"
    TVD_RK2 = "tvd_rk2"


@dataclass(frozen=True)
class SchemeSpec:
    """Ortsdiskretisierung.

    Attributes:
        kind:
            Godunov (nur achsweise separierbare Normen) oder Lax-Friedrichs.
        cfl:
            CFL-Zahl in (0, 1].
        lf_dissipation:
            Feste Dissipation sigma_a pro Achse; ``None`` = automatisch aus
            C1, der Steigung von H und ||e_a||.
        preserve_interface:
            Skaliert die LF-Dissipation knotenweise mit min(1, |f|/f_ref).
    """

    kind: SchemeKind = SchemeKind.GODUNOV
    cfl: float = 0.5
    lf_dissipation: tuple[float, ...] | None = None
    preserve_interface: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigError("cfl_range", cfl=self.cfl)
        if self.lf_dissipation is not None:
            sigma = tuple(float(s) for s in self.lf_dissipation)
            if any(not s >= 0.0 for s in sigma):
                raise ConfigError("dissipation_range", dissipation=list(sigma))
            object.__setattr__(self, "lf_dissipation", sigma)

    @classmethod
    def godunov(cls, cfl: float = 0.5) -> SchemeSpec:
        return cls(SchemeKind.GODUNOV, cfl)

    @classmethod
    def lax_friedrichs(cls, cfl: float = 0.5, preserve_interface: bool = True) -> SchemeSpec:
        return cls(SchemeKind.LAX_FRIEDRICHS, cfl, preserve_interface=preserve_interface)

    def validate_for(self, norm: NormSpec) -> None:
        """Godunov nur mit p in {1, 2, inf} oder diagonaler Matrix.

        Raises:
            ConfigError: Code ``godunov_norm`` mit Verweis auf lax_friedrichs.
        """
        if self.kind is SchemeKind.GODUNOV and not norm.is_axis_separable():
            raise ConfigError("godunov_norm", norm=norm.label)
        if self.lf_dissipation is not None and len(self.lf_dissipation) != norm.dim:
            raise ConfigError("dissipation_range", dissipation=list(self.lf_dissipation))


@dataclass(frozen=True)
class SolveConfig:
    """Laufparameter.

    ``slope_cap`` ist die erwartete Obergrenze fuer ||grad u||; ``None`` heisst
    3 * C2 aus den Anfangsdaten.
    """

    t_final: float
    residual_tol: float = 1e-6
    snapshot_stride: int = 10
    integrator: Integrator = Integrator.TVD_RK2
    slope_cap: float | None = None

    def __post_init__(self) -> None:
        if not self.t_final > 0.0:
            raise ConfigError("t_final_range", t_final=self.t_final)
        if not self.residual_tol > 0.0:
            raise ConfigError("residual_tol_range", residual_tol=self.residual_tol)
        if self.snapshot_stride < 1:
            raise ConfigError("snapshot_stride_range", snapshot_stride=self.snapshot_stride)
        if self.slope_cap is not None and not self.slope_cap > 0.0:
            raise ConfigError("slope_cap_range", slope_cap=self.slope_cap)


@dataclass
class SolveResult:
    """Trajektorie und Laufstatistik.

    Attributes:
        series: Schnappschuesse ab t = 0.
        residual_history: (t, max|u^{n+1} - u^n| / dt) pro Schritt.
        steady_reached: Abbruch durch Residuum statt durch t_final.
        dt_used: Zuletzt verwendeter (regulaerer) Zeitschritt.
        steps: Anzahl ausgefuehrter Schritte.
        slope_cap: Steigungsgrenze am Ende (nach eventuellen Verdopplungen).
        restarts: Anzahl Schrittwiederholungen wegen ueberschrittener Steigungsgrenze.
    """

    series: TimeSeries
    residual_history: list[tuple[float, float]] = field(default_factory=list)
    steady_reached: bool = False
    dt_used: float = 0.0
    steps: int = 0
    slope_cap: float = 0.0
    restarts: int = 0

    @property
    def final_time(self) -> float:
        return self.series.times[-1]

    @property
    def max_rate(self) -> float:
        """max ueber alle Schritte von max|du|/dt."""
        return max((r for _, r in self.residual_history), default=0.0)

    def retimed(self, factor: float) -> SolveResult:
        """Alle Zeiten (Schnappschuesse, Residuen, dt) mit ``factor`` skaliert."""
        return SolveResult(
            series=self.series.retimed(factor),
            residual_history=[(time * factor, rate / factor) for time, rate in self.residual_history],
            steady_reached=self.steady_reached,
            dt_used=self.dt_used * factor,
            steps=self.steps,
            slope_cap=self.slope_cap,
            restarts=self.restarts,
        )

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "final_time": self.final_time,
            "dt": self.dt_used,
            "steady_reached": self.steady_reached,
            "slope_cap": self.slope_cap,
            "restarts": self.restarts,
            "snapshots": len(self.series),
            "final_residual": self.residual_history[-1][1] if self.residual_history else 0.0,
        }
