"""Masken fuer kompakte Mengen und die Berichte der Auswertung."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .grid import GridSpec, ScalarField

MIN_MARGIN_CELLS = 5

_RECIPE_KEYS = {
    "annulus": {"type", "center", "r_inner", "r_outer", "margin_cells", "exclude_band"},
    "box": {"type", "bounds", "margin_cells", "exclude_band"},
    "off_band": {"type", "band_width", "margin_cells", "exclude_band"},
}


@dataclass(frozen=True, eq=False)
class CompactMask:
    """Knotenmaske als Stellvertreter einer kompakten Menge K.

    Jeder Knoten der Maske liegt mindestens ``margin_cells`` Maschenweiten
    vom Gitterrand entfernt.
    """

    grid: GridSpec
    mask: np.ndarray
    recipe: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        arr = np.asarray(self.mask, dtype=bool).ravel()
        if arr.size != self.grid.size:
            raise ConfigError("field_size", expected=self.grid.size, actual=arr.size)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "mask", arr)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.mask))

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    @classmethod
    def from_recipe(cls, grid: GridSpec, recipe: dict, u0: ScalarField | None = None) -> CompactMask:
        """Baut die Maske aus einem Rezept (annulus, box, off_band).

        Raises:
            ConfigError: Unbekannter Typ oder Schluessel, margin_cells < 5,
                off_band/exclude_band ohne u0.
        """
        if not isinstance(recipe, dict):
            raise ConfigError("mask_type", value=repr(recipe))
        kind = recipe.get("type")
        if kind not in _RECIPE_KEYS:
            raise ConfigError("mask_type", value=repr(kind))
        unknown = set(recipe) - _RECIPE_KEYS[kind]
        if unknown:
            raise ConfigError("unknown_key", key=f"mask.{sorted(unknown)[0]}")
        margin_cells = recipe.get("margin_cells", MIN_MARGIN_CELLS)
        if not isinstance(margin_cells, (int, float)) or margin_cells < MIN_MARGIN_CELLS:
            raise ConfigError("mask_margin", margin_cells=margin_cells, minimum=MIN_MARGIN_CELLS)

        coords = grid.mesh()
        if kind == "annulus":
            center = _vector(recipe.get("center", [0.0] * grid.dim), grid.dim, "center")
            radius = np.sqrt(sum((c - x0) ** 2 for c, x0 in zip(coords, center, strict=True)))
            r_inner = float(recipe.get("r_inner", 0.0))
            r_outer = float(recipe.get("r_outer", math.inf))
            if r_outer < r_inner:
                raise ConfigError("mask_radii", r_inner=r_inner, r_outer=r_outer)
            selected = (radius >= r_inner) & (radius <= r_outer)
        elif kind == "box":
            bounds = recipe.get("bounds")
            if not isinstance(bounds, list) or len(bounds) != grid.dim:
                raise ConfigError("mask_bounds", value=repr(bounds))
            selected = np.ones(grid.shape, dtype=bool)
            for axis, pair in enumerate(bounds):
                lo, hi = _vector(pair, 2, "bounds")
                selected &= (coords[axis] >= lo) & (coords[axis] <= hi)
        else:
            band = float(recipe.get("band_width", 0.0))
            selected = np.abs(_require_u0(u0, grid).array) >= band

        selected &= grid.boundary_distance() >= margin_cells * grid.h * (1.0 - 1e-12)
        if "exclude_band" in recipe:
            width = float(recipe["exclude_band"])
            selected &= np.abs(_require_u0(u0, grid).array) > width
        return cls(grid, selected.ravel(), dict(recipe))

    @classmethod
    def interior(cls, grid: GridSpec, margin_cells: int = MIN_MARGIN_CELLS) -> CompactMask:
        """Alle Knoten mit Randabstand >= margin_cells * h."""
        return cls.from_recipe(
            grid, {"type": "box", "bounds": [list(b) for b in grid.bounds], "margin_cells": margin_cells}
        )


def _vector(value: object, size: int, name: str) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)) or len(value) != size:
        raise ConfigError("mask_vector", name=name, size=size)
    return tuple(float(v) for v in value)


def _require_u0(u0: ScalarField | None, grid: GridSpec) -> ScalarField:
    if u0 is None or u0.grid != grid:
        raise ConfigError("mask_needs_u0")
    return u0


@dataclass
class ErrorReport:
    """sup und Mittelwert von |u - d| auf einer Maske."""

    sup_error: float
    l1_error: float
    node_of_max: tuple[float, ...]
    time: float

    def to_dict(self) -> dict:
        return {
            "sup_error": self.sup_error,
            "l1_error": self.l1_error,
            "node_of_max": list(self.node_of_max),
            "time": self.time,
        }


@dataclass
class GradientStats:
    """Verteilung von | ||grad u|| - 1 | auf einer Maske."""

    median: float
    p95: float
    nodes: int

    def to_dict(self) -> dict:
        return {"median": self.median, "p95": self.p95, "nodes": self.nodes}


@dataclass
class AprioriReport:
    """Abgetastete Zeit- und Gradientenschranken.

    Attributes:
        rate: C_t = max ueber aufeinanderfolgende Schnappschuesse von max|du|/dt.
        rate_bound: C1 * max |H| auf [0, slope_cap] plus Toleranz.
        gradient_constant: Konstante C in ||grad u|| * |f| <= C.
        gradient_violations: Knoten/Zeiten mit ||grad u|| * |f| > C + tol.
        boundedness: (t, max |u| auf der Maske) pro Schnappschuss.
    """

    rate: float
    rate_bound: float
    gradient_constant: float
    gradient_violations: int
    tolerance: float
    boundedness: list[tuple[float, float]] = field(default_factory=list)

    @property
    def rate_ok(self) -> bool:
        return self.rate <= self.rate_bound

    @property
    def passed(self) -> bool:
        return self.rate_ok and self.gradient_violations == 0

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "rate": self.rate,
            "rate_bound": self.rate_bound,
            "gradient_constant": self.gradient_constant,
            "gradient_violations": self.gradient_violations,
            "tolerance": self.tolerance,
            "boundedness_max": max((v for _, v in self.boundedness), default=0.0),
        }


@dataclass
class EnvelopeReport:
    """Pruefung u0 - C t <= u <= u0 + C t."""

    constant: float
    violations: int
    worst_gap: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "constant": self.constant,
            "violations": self.violations,
            "worst_gap": self.worst_gap,
            "tolerance": self.tolerance,
        }


@dataclass
class RefinementRow:
    """Eine Zeile der Verfeinerungsstudie; ``note`` traegt Fehlercodes."""

    points: int
    h: float
    sup_error: float | None
    observed_order: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "points": self.points,
            "h": self.h,
            "sup_error": self.sup_error,
            "observed_order": self.observed_order,
            "note": self.note,
        }


@dataclass
class RescaleRow:
    """sup_K |u^eps(., 1) - d| mit dem tatsaechlich verwendeten Schnappschuss."""

    epsilon: float
    requested_time: float
    used_time: float
    sup_error: float

    @property
    def offset(self) -> float:
        return abs(self.used_time - self.requested_time)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "requested_time": self.requested_time,
            "used_time": self.used_time,
            "offset": self.offset,
            "sup_error": self.sup_error,
        }
