"""Polygonale Darstellung von Gamma = {u0 = 0} und Abstandsfelder dazu."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .grid import GridSpec, ScalarField
from .norms import NormSpec


@dataclass(frozen=True, eq=False)
class InterfaceMesh:
    """Gamma als Liste von Elementen.

    In 2D ist ``elements`` ein (k, 2, 2)-Array aus Strecken (Anfangs- und
    Endpunkt), in 1D ein (k, 1, 1)-Array aus Nullstellen. Ein einzelner Punkt
    in 2D ist eine entartete Strecke mit gleichen Endpunkten.
    """

    dim: int
    elements: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.elements, dtype=np.float64)
        if self.dim == 1:
            arr = arr.reshape(-1, 1, 1)
        elif self.dim == 2:
            arr = arr.reshape(-1, 2, 2)
        else:
            raise ConfigError("grid_dimension", dim=self.dim)
        if not np.all(np.isfinite(arr)):
            raise ConfigError("mesh_non_finite")
        arr.setflags(write=False)
        object.__setattr__(self, "elements", arr)

    @classmethod
    def from_points(cls, points: list[tuple[float, ...]] | np.ndarray, dim: int = 2) -> InterfaceMesh:
        """Mesh aus Einzelpunkten (entartete Strecken)."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, dim)
        if dim == 1:
            return cls(1, pts.reshape(-1, 1, 1))
        return cls(2, np.stack([pts, pts], axis=1))

    def __len__(self) -> int:
        return int(self.elements.shape[0])

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    @property
    def starts(self) -> np.ndarray:
        return self.elements[:, 0, :]

    @property
    def ends(self) -> np.ndarray:
        return self.elements[:, -1, :]

    @property
    def total_length(self) -> float:
        """Gesamtlaenge (euklidisch) der Strecken; in 1D 0."""
        if self.dim == 1:
            return 0.0
        return float(np.sum(np.linalg.norm(self.ends - self.starts, axis=1)))

    def within(self, grid: GridSpec, slack: float = 1e-12) -> bool:
        """Liegen alle Endpunkte im Gitterrechteck?"""
        pts = self.elements.reshape(-1, self.dim)
        for axis, (lo, hi) in enumerate(grid.bounds):
            if np.any(pts[:, axis] < lo - slack) or np.any(pts[:, axis] > hi + slack):
                return False
        return True


@dataclass(frozen=True)
class DistanceField:
    """(Vorzeichenbehaftetes) Abstandsfeld zu einem Mesh in der Dualnorm."""

    values: ScalarField
    dual_norm: NormSpec
    source: InterfaceMesh
    signed: bool = True

    @property
    def grid(self) -> GridSpec:
        return self.values.grid

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values.values)
