"""Experiment-Konfiguration fuer hj-reinit.

Eine Konfiguration ist eine JSON-Datei mit den Abschnitten ``problem``,
``grid``, ``scheme``, ``run``, ``analysis``, ``outputs`` und ``seed``. Anders
als lose Benutzereinstellungen wird sie streng gelesen: unbekannte
Schluessel, falsche Typen und unzulaessige Werte fuehren zu einem
:class:`ConfigError` mit dem gepunkteten Schluesselpfad.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Callable
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any

from ..services.expression import Expression, StarShaped
from .analysis import MIN_MARGIN_CELLS
from .errors import ConfigError
from .grid import GridSpec
from .norms import NormSpec
from .problem import Hamiltonian
from .solve import Integrator, SchemeKind, SchemeSpec, SolveConfig

logger = logging.getLogger(__name__)

BUNDLED_CONFIGS = ("circle", "circle_anisotropic", "line", "no_interface", "interval", "star")

_NUMBER = (int, float)
DEFAULT_POINTS = 251

# Abnahmepruefungen, die --check erzwingt; pro Unterbefehl gilt die Schnittmenge.
KNOWN_CHECKS = (
    "audit", "oracle", "certificate", "sup_error", "drift", "sandwich",
    "band_bound", "apriori", "envelope", "order", "rescale",
)
DEFAULT_CHECKS = ("audit", "oracle", "certificate", "sup_error", "drift", "sandwich", "apriori", "order", "rescale")


def _expect(value: Any, types: tuple[type, ...] | type, path: str) -> Any:
    """Prueft den Typ eines Wertes; bool zaehlt nicht als Zahl."""
    allowed = types if isinstance(types, tuple) else (types,)
    if isinstance(value, bool) and bool not in allowed:
        raise ConfigError("config_type", key=path, value=repr(value))
    if not isinstance(value, allowed):
        raise ConfigError("config_type", key=path, value=repr(value))
    return value


def _section(data: Any, path: str, known: set[str]) -> dict:
    if not isinstance(data, dict):
        raise ConfigError("config_type", key=path, value=repr(data))
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError("unknown_key", key=f"{path}.{unknown[0]}" if path else unknown[0])
    return data


def _names(cls: type) -> set[str]:
    return {f.name for f in fields(cls)}


def _float_list(value: Any, path: str) -> list[float]:
    _expect(value, list, path)
    return [float(_expect(v, _NUMBER, f"{path}[{i}]")) for i, v in enumerate(value)]


@dataclass
class ProblemConfig:
    """u0 als Ausdruck (oder zufaelliges Sterngebiet), delta, Norm und Hamiltonian.

    Ist ``star`` gesetzt (Schluessel ``modes``, ``radius``, ``amplitude``), wird
    u0 aus :class:`StarShaped` mit dem Experiment-Seed erzeugt und ``u0`` ignoriert.
    """

    u0: str = "x^2 + y^2 - 1"
    delta: float = 0.1
    norm: dict = field(default_factory=lambda: {"type": "p", "p": 2.0})
    hamiltonian: dict = field(default_factory=lambda: {"type": "shifted_linear"})
    star: dict | None = None

    @classmethod
    def from_dict(cls, data: Any, dim: int, path: str = "problem") -> ProblemConfig:
        data = _section(data, path, _names(cls))
        cfg = cls()
        if "u0" in data:
            cfg.u0 = _expect(data["u0"], str, f"{path}.u0")
        if "delta" in data:
            cfg.delta = float(_expect(data["delta"], _NUMBER, f"{path}.delta"))
            if not cfg.delta > 0.0:
                raise ConfigError("delta_range", delta=cfg.delta)
        if "norm" in data:
            cfg.norm = NormSpec.from_dict(data["norm"], dim).to_dict()
        if "hamiltonian" in data:
            cfg.hamiltonian = Hamiltonian.from_dict(data["hamiltonian"]).to_dict()
        if data.get("star") is not None:
            star = _section(data["star"], f"{path}.star", {"modes", "radius", "amplitude"})
            for key, value in star.items():
                _expect(value, int if key == "modes" else _NUMBER, f"{path}.star.{key}")
            if dim != 2:
                raise ConfigError("star_dimension", dim=dim)
            StarShaped(**star)
            cfg.star = dict(star)
        return cfg

    def to_dict(self) -> dict:
        return {
            "u0": self.u0,
            "delta": self.delta,
            "norm": dict(self.norm),
            "hamiltonian": dict(self.hamiltonian),
            "star": dict(self.star) if self.star is not None else None,
        }


@dataclass
class GridConfig:
    """Rechteck und Knotenzahl pro Achse."""

    bounds: list[list[float]] = field(default_factory=lambda: [[-2.5, 2.5], [-2.5, 2.5]])
    points: list[int] = field(default_factory=lambda: [251, 251])

    @classmethod
    def from_dict(cls, data: Any, path: str = "grid") -> GridConfig:
        data = _section(data, path, _names(cls))
        cfg = cls()
        if "bounds" in data:
            raw = _expect(data["bounds"], list, f"{path}.bounds")
            cfg.bounds = [_float_list(pair, f"{path}.bounds[{i}]") for i, pair in enumerate(raw)]
        points = data.get("points", DEFAULT_POINTS)
        if isinstance(points, int) and not isinstance(points, bool):
            cfg.points = [points] * len(cfg.bounds)
        else:
            _expect(points, list, f"{path}.points")
            cfg.points = [int(_expect(n, int, f"{path}.points[{i}]")) for i, n in enumerate(points)]
        cfg.spec()
        return cfg

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def spec(self) -> GridSpec:
        if any(len(pair) != 2 for pair in self.bounds):
            raise ConfigError("grid_bounds", axis=0, lower=None, upper=None)
        return GridSpec(bounds=tuple(tuple(pair) for pair in self.bounds), points_per_axis=tuple(self.points))

    def to_dict(self) -> dict:
        return {"bounds": [list(pair) for pair in self.bounds], "points": list(self.points)}


@dataclass
class SchemeConfig:
    """Schema-Variante und Parameter."""

    variant: str = SchemeKind.GODUNOV.value
    cfl: float = 0.5
    preserve_interface: bool = True
    lf_dissipation: list[float] | None = None

    @classmethod
    def from_dict(cls, data: Any, path: str = "scheme") -> SchemeConfig:
        data = _section(data, path, _names(cls))
        cfg = cls()
        if "variant" in data:
            cfg.variant = _expect(data["variant"], str, f"{path}.variant")
        if "cfl" in data:
            cfg.cfl = float(_expect(data["cfl"], _NUMBER, f"{path}.cfl"))
        if "preserve_interface" in data:
            cfg.preserve_interface = _expect(data["preserve_interface"], bool, f"{path}.preserve_interface")
        if data.get("lf_dissipation") is not None:
            cfg.lf_dissipation = _float_list(data["lf_dissipation"], f"{path}.lf_dissipation")
        cfg.spec()
        return cfg

    def spec(self) -> SchemeSpec:
        try:
            kind = SchemeKind(self.variant)
        except ValueError as exc:
            raise ConfigError("scheme_variant", value=repr(self.variant)) from exc
        sigma = tuple(self.lf_dissipation) if self.lf_dissipation is not None else None
        return SchemeSpec(kind, self.cfl, sigma, self.preserve_interface)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "cfl": self.cfl,
            "preserve_interface": self.preserve_interface,
            "lf_dissipation": list(self.lf_dissipation) if self.lf_dissipation is not None else None,
        }


@dataclass
class RunConfig:
    """Laufzeitparameter des Loesers."""

    t_final: float = 4.0
    residual_tol: float = 1e-6
    snapshot_stride: int = 10
    integrator: str = Integrator.TVD_RK2.value
    slope_cap: float | None = None

    @classmethod
    def from_dict(cls, data: Any, path: str = "run") -> RunConfig:
        data = _section(data, path, _names(cls))
        cfg = cls()
        if "t_final" in data:
            cfg.t_final = float(_expect(data["t_final"], _NUMBER, f"{path}.t_final"))
        if "residual_tol" in data:
            cfg.residual_tol = float(_expect(data["residual_tol"], _NUMBER, f"{path}.residual_tol"))
        if "snapshot_stride" in data:
            cfg.snapshot_stride = _expect(data["snapshot_stride"], int, f"{path}.snapshot_stride")
        if "integrator" in data:
            cfg.integrator = _expect(data["integrator"], str, f"{path}.integrator")
        if data.get("slope_cap") is not None:
            cfg.slope_cap = float(_expect(data["slope_cap"], _NUMBER, f"{path}.slope_cap"))
        cfg.spec()
        return cfg

    def spec(self, t_final: float | None = None) -> SolveConfig:
        try:
            integrator = Integrator(self.integrator)
        except ValueError as exc:
            raise ConfigError("integrator_variant", value=repr(self.integrator)) from exc
        return SolveConfig(
            t_final=self.t_final if t_final is None else t_final,
            residual_tol=self.residual_tol,
            snapshot_stride=self.snapshot_stride,
            integrator=integrator,
            slope_cap=self.slope_cap,
        )

    def to_dict(self) -> dict:
        return {
            "t_final": self.t_final,
            "residual_tol": self.residual_tol,
            "snapshot_stride": self.snapshot_stride,
            "integrator": self.integrator,
            "slope_cap": self.slope_cap,
        }


@dataclass
class AnalysisConfig:
    """Masken, Studienparameter und Schwellen der Abnahmepruefungen.

    Alle ``*_cells``-Werte sind Vielfache der Maschenweite h.
    """

    band_width: float = 0.2
    c_grid: list[float] = field(default_factory=lambda: [0.05, 0.1, 0.2, 0.3, 0.5])
    mask: dict = field(
        default_factory=lambda: {"type": "annulus", "center": [0.0, 0.0], "r_inner": 0.3, "r_outer": 1.7}
    )
    epsilons: list[float] = field(default_factory=lambda: [1.0, 0.5, 0.25, 0.125])
    resolutions: list[int] = field(default_factory=lambda: [63, 126, 251])
    certificate_pairs: int = 10_000
    sup_error_cells: float = 5.0
    drift_cells: float = 2.0
    oracle_cells: float = 2.0
    certificate_cells: float = 10.0
    barrier_cells: float = 5.0
    apriori_cells: float = 10.0
    order_range: list[float] = field(default_factory=lambda: [0.7, 1.3])
    checks: list[str] = field(default_factory=lambda: list(DEFAULT_CHECKS))

    @classmethod
    def from_dict(cls, data: Any, path: str = "analysis") -> AnalysisConfig:
        data = _section(data, path, _names(cls))
        cfg = cls()
        for name in (
            "band_width", "sup_error_cells", "drift_cells", "oracle_cells",
            "certificate_cells", "barrier_cells", "apriori_cells",
        ):
            if name in data:
                value = float(_expect(data[name], _NUMBER, f"{path}.{name}"))
                if not value > 0.0:
                    raise ConfigError("config_positive", key=f"{path}.{name}", value=value)
                setattr(cfg, name, value)
        for name in ("c_grid", "epsilons", "order_range"):
            if name in data:
                setattr(cfg, name, _float_list(data[name], f"{path}.{name}"))
        if len(cfg.order_range) != 2:
            raise ConfigError("config_type", key=f"{path}.order_range", value=repr(cfg.order_range))
        if "resolutions" in data:
            raw = _expect(data["resolutions"], list, f"{path}.resolutions")
            cfg.resolutions = [int(_expect(n, int, f"{path}.resolutions[{i}]")) for i, n in enumerate(raw)]
        if "certificate_pairs" in data:
            cfg.certificate_pairs = _expect(data["certificate_pairs"], int, f"{path}.certificate_pairs")
        if "checks" in data:
            raw = _expect(data["checks"], list, f"{path}.checks")
            names = [_expect(n, str, f"{path}.checks[{i}]") for i, n in enumerate(raw)]
            for name in names:
                if name not in KNOWN_CHECKS:
                    raise ConfigError("check_name", key=f"{path}.checks", value=name)
            cfg.checks = names
        if "mask" in data:
            mask = _expect(data["mask"], dict, f"{path}.mask")
            margin = mask.get("margin_cells", MIN_MARGIN_CELLS)
            if isinstance(margin, _NUMBER) and margin < MIN_MARGIN_CELLS:
                raise ConfigError("mask_margin", margin_cells=margin, minimum=MIN_MARGIN_CELLS)
            cfg.mask = dict(mask)
        return cfg

    def to_dict(self) -> dict:
        return {
            "band_width": self.band_width,
            "c_grid": list(self.c_grid),
            "mask": dict(self.mask),
            "epsilons": list(self.epsilons),
            "resolutions": list(self.resolutions),
            "certificate_pairs": self.certificate_pairs,
            "sup_error_cells": self.sup_error_cells,
            "drift_cells": self.drift_cells,
            "oracle_cells": self.oracle_cells,
            "certificate_cells": self.certificate_cells,
            "barrier_cells": self.barrier_cells,
            "apriori_cells": self.apriori_cells,
            "order_range": list(self.order_range),
            "checks": list(self.checks),
        }


@dataclass
class OutputConfig:
    """Ausgabeverzeichnis und welche Dateien geschrieben werden."""

    directory: str = "results"
    fields: bool = True
    mesh: bool = True
    curves: bool = True

    @classmethod
    def from_dict(cls, data: Any, path: str = "outputs") -> OutputConfig:
        data = _section(data, path, _names(cls))
        cfg = cls()
        if "directory" in data:
            cfg.directory = _expect(data["directory"], str, f"{path}.directory")
        for name in ("fields", "mesh", "curves"):
            if name in data:
                setattr(cfg, name, _expect(data[name], bool, f"{path}.{name}"))
        return cfg

    def to_dict(self) -> dict:
        return {"directory": self.directory, "fields": self.fields, "mesh": self.mesh, "curves": self.curves}


@dataclass
class ExperimentConfig:
    """Gesamte Konfiguration eines Experiments.

    Attributes:
        name: Bezeichnung fuer Berichte und Dateinamen.
        problem: u0, delta, Norm, Hamiltonian.
        grid: Rechengebiet und Aufloesung.
        scheme: Ortsdiskretisierung.
        run: Zeitintegration.
        analysis: Masken, Studien, Schwellen.
        outputs: Ausgabeverzeichnis und Dateiauswahl.
        seed: Startwert fuer Zufallsziehungen (Lipschitz-Zertifikat, Sterngebiete).
    """

    name: str = "experiment"
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    run: RunConfig = field(default_factory=RunConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0

    @classmethod
    def from_dict(cls, data: Any) -> ExperimentConfig:
        data = _section(data, "", _names(cls))
        grid = GridConfig.from_dict(data.get("grid", {}))
        cfg = cls(
            name=_expect(data.get("name", "experiment"), str, "name"),
            problem=ProblemConfig.from_dict(data.get("problem", {}), grid.dim),
            grid=grid,
            scheme=SchemeConfig.from_dict(data.get("scheme", {})),
            run=RunConfig.from_dict(data.get("run", {})),
            analysis=AnalysisConfig.from_dict(data.get("analysis", {})),
            outputs=OutputConfig.from_dict(data.get("outputs", {})),
            seed=_expect(data.get("seed", 0), int, "seed"),
        )
        # Norm-Dimension gegen das Gitter pruefen, auch fuer die Vorgabe.
        cfg.norm_spec()
        return cfg

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "problem": self.problem.to_dict(),
            "grid": self.grid.to_dict(),
            "scheme": self.scheme.to_dict(),
            "run": self.run.to_dict(),
            "analysis": self.analysis.to_dict(),
            "outputs": self.outputs.to_dict(),
            "seed": self.seed,
        }

    @staticmethod
    def load(path: str | Path) -> ExperimentConfig:
        """Liest eine Konfiguration; ein Name ohne Datei waehlt eine mitgelieferte.

        Raises:
            ConfigError: Datei fehlt, ist kein JSON oder verletzt das Schema.
        """
        file = Path(path)
        if not file.is_file():
            if str(path) in BUNDLED_CONFIGS:
                return ExperimentConfig.bundled(str(path))
            raise ConfigError("config_missing", path=str(path))
        return ExperimentConfig.parse(file.read_text(encoding="utf-8"), str(file))

    @staticmethod
    def bundled(name: str) -> ExperimentConfig:
        """Eine der mitgelieferten Konfigurationen (``BUNDLED_CONFIGS``)."""
        if name not in BUNDLED_CONFIGS:
            raise ConfigError("config_missing", path=name)
        text = (resources.files("hj_reinit") / "configs" / f"{name}.json").read_text(encoding="utf-8")
        return ExperimentConfig.parse(text, f"{name}.json")

    @staticmethod
    def parse(text: str, source: str = "<config>") -> ExperimentConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("config_json", path=source, line=exc.lineno, column=exc.colno) from exc
        cfg = ExperimentConfig.from_dict(data)
        logger.debug("Konfiguration %s geladen (%s)", cfg.name, source)
        return cfg

    def save(self, path: str | Path) -> Path:
        """Schreibt die Konfiguration kanonisch (sortierte Schluessel)."""
        file = Path(path)
        file.parent.mkdir(parents=True, exist_ok=True)
        file.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return file

    # -- Fachobjekte ---------------------------------------------------------

    def grid_spec(self, points: int | None = None) -> GridSpec:
        grid = self.grid.spec()
        return grid if points is None else grid.refined(points)

    def norm_spec(self) -> NormSpec:
        return NormSpec.from_dict(self.problem.norm, self.grid.dim)

    def hamiltonian(self) -> Hamiltonian:
        return Hamiltonian.from_dict(self.problem.hamiltonian)

    def scheme_spec(self) -> SchemeSpec:
        return self.scheme.spec()

    def solve_config(self, t_final: float | None = None) -> SolveConfig:
        return self.run.spec(t_final)

    def generator(self) -> Callable[..., Any]:
        if self.problem.star is not None:
            return StarShaped(seed=self.seed, **self.problem.star)
        return Expression(self.problem.u0, self.grid.dim)
