"""Kartesische Gitter in 1D/2D, Skalarfelder darauf und Differenzenoperatoren.

Speicherlayout: zeilenweise, x laeuft am schnellsten. Ein 2D-Feld hat die
numpy-Form (ny, nx) (``indexing="xy"``), eine Zeile ist eine Gitterlinie
konstanter y-Koordinate. Achse a der Mathematik (0 = x, 1 = y) ist damit
numpy-Achse ``dim - 1 - a`` - siehe :meth:`GridSpec.array_axis`. Felder sind
nach dem Erzeugen unveraenderlich.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import ConfigError

if TYPE_CHECKING:
    from .norms import NormSpec


@dataclass(frozen=True)
class GridSpec:
    """Rechteckiges Gitter mit gleichmaessigem Abstand pro Achse.

    Attributes:
        bounds:
            Pro Achse das geschlossene Intervall (min, max).
        points_per_axis:
            Knotenzahl pro Achse (mindestens 3).
    """

    bounds: tuple[tuple[float, float], ...]
    points_per_axis: tuple[int, ...]

    def __post_init__(self) -> None:
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        points = tuple(int(n) for n in self.points_per_axis)
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "points_per_axis", points)
        if len(bounds) not in (1, 2) or len(points) != len(bounds):
            raise ConfigError("grid_dimension", dim=len(bounds))
        for axis, ((lo, hi), n) in enumerate(zip(bounds, points, strict=True)):
            if n < 3:
                raise ConfigError("grid_points", axis=axis, points=n)
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
                raise ConfigError("grid_bounds", axis=axis, lower=lo, upper=hi)

    @classmethod
    def uniform(cls, lower: float, upper: float, points: int, dim: int = 2) -> GridSpec:
        """Quadratisches (bzw. 1D-) Gitter mit gleichen Grenzen auf allen Achsen."""
        return cls(bounds=((lower, upper),) * dim, points_per_axis=(points,) * dim)

    @property
    def dim(self) -> int:
        return len(self.points_per_axis)

    @property
    def shape(self) -> tuple[int, ...]:
        """numpy-Form der Felder: (nx,) bzw. (ny, nx)."""
        return tuple(reversed(self.points_per_axis))

    def array_axis(self, axis: int) -> int:
        """numpy-Achse zur mathematischen Achse ``axis``."""
        if not 0 <= axis < self.dim:
            raise ConfigError("axis_out_of_range", axis=axis, dim=self.dim)
        return self.dim - 1 - axis

    @property
    def size(self) -> int:
        return math.prod(self.points_per_axis)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / (n - 1) for (lo, hi), n in zip(self.bounds, self.points_per_axis, strict=True))

    @property
    def h(self) -> float:
        """Groesste Maschenweite - die Laenge, in der alle Toleranzen gemessen werden."""
        return max(self.spacing)

    def axis_coords(self, axis: int) -> np.ndarray:
        """Koordinaten entlang einer Achse, exakt min + i*h."""
        lo = self.bounds[axis][0]
        return lo + np.arange(self.points_per_axis[axis], dtype=np.float64) * self.spacing[axis]

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Koordinatenarrays (x bzw. x, y) in Feldform."""
        return tuple(np.meshgrid(*(self.axis_coords(a) for a in range(self.dim)), indexing="xy"))

    def coords(self) -> np.ndarray:
        """Alle Knotenkoordinaten als (size, dim)-Array in Speicherreihenfolge."""
        return np.stack([m.ravel() for m in self.mesh()], axis=1)

    def coord_of(self, flat_index: int) -> tuple[float, ...]:
        """Koordinaten eines Knotens aus seinem flachen Index."""
        multi = np.unravel_index(flat_index, self.shape)[::-1]
        return tuple(float(self.bounds[a][0] + int(i) * self.spacing[a]) for a, i in enumerate(multi))

    def flat_index(self, *indices: int) -> int:
        """Flacher Index aus Achsindizes (i fuer x, j fuer y)."""
        return int(np.ravel_multi_index(tuple(reversed(indices)), self.shape))

    def boundary_distance(self) -> np.ndarray:
        """Abstand jedes Knotens zum Gitterrand (in Laengeneinheiten, Gitterform)."""
        result = np.full(self.shape, np.inf)
        for axis, coord in enumerate(self.mesh()):
            lo, hi = self.bounds[axis]
            result = np.minimum(result, np.minimum(coord - lo, hi - coord))
        return result

    def refined(self, points: int) -> GridSpec:
        """Gleiches Gebiet mit ``points`` Knoten pro Achse."""
        return GridSpec(bounds=self.bounds, points_per_axis=(points,) * self.dim)

    def to_dict(self) -> dict:
        return {
            "bounds": [list(b) for b in self.bounds],
            "points_per_axis": list(self.points_per_axis),
            "spacing": list(self.spacing),
        }


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Auf dem Gitter abgetastete Skalarfunktion (u, u0, f, Abstandsfelder).

    Die Werte liegen flach und schreibgeschuetzt vor; ``array`` liefert eine
    Sicht in Gitterform.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64).ravel()
        if values.size != self.grid.size:
            raise ConfigError("field_size", expected=self.grid.size, actual=values.size)
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ConfigError("non_finite_value", node=self.grid.coord_of(bad))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_array(cls, grid: GridSpec, array: np.ndarray) -> ScalarField:
        return cls(grid=grid, values=np.asarray(array, dtype=np.float64).reshape(-1))

    @property
    def array(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> ScalarField:
        """Neues Feld aus einer elementweisen Abbildung der Werte."""
        return ScalarField(self.grid, fn(self.values))

    def __add__(self, other: ScalarField | float) -> ScalarField:
        rhs = other.values if isinstance(other, ScalarField) else other
        return ScalarField(self.grid, self.values + rhs)

    def __sub__(self, other: ScalarField | float) -> ScalarField:
        rhs = other.values if isinstance(other, ScalarField) else other
        return ScalarField(self.grid, self.values - rhs)

    def __mul__(self, factor: float) -> ScalarField:
        return ScalarField(self.grid, self.values * factor)

    __rmul__ = __mul__

    def __neg__(self) -> ScalarField:
        return ScalarField(self.grid, -self.values)

    def equals(self, other: ScalarField) -> bool:
        """Bitgenauer Vergleich (gleiches Gitter, gleiche Werte)."""
        return self.grid == other.grid and np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class TimeSeries:
    """Trajektorie t -> u(., t) als geordnete Liste von Schnappschuessen."""

    snapshots: tuple[tuple[float, ScalarField], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        snaps = tuple((float(time), fld) for time, fld in self.snapshots)
        object.__setattr__(self, "snapshots", snaps)
        if not snaps:
            return
        if snaps[0][0] != 0.0:
            raise ConfigError("series_start", time=snaps[0][0])
        grid = snaps[0][1].grid
        for (t_prev, _), (t_next, fld) in zip(snaps, snaps[1:], strict=False):
            if not t_next > t_prev:
                raise ConfigError("series_order", previous=t_prev, following=t_next)
            if fld.grid != grid:
                raise ConfigError("series_grid")

    @property
    def times(self) -> list[float]:
        return [time for time, _ in self.snapshots]

    @property
    def grid(self) -> GridSpec:
        return self.snapshots[0][1].grid

    @property
    def initial(self) -> ScalarField:
        return self.snapshots[0][1]

    @property
    def final(self) -> ScalarField:
        return self.snapshots[-1][1]

    def __len__(self) -> int:
        return len(self.snapshots)

    def __iter__(self) -> Iterator[tuple[float, ScalarField]]:
        return iter(self.snapshots)

    def nearest(self, time: float) -> tuple[float, ScalarField]:
        """Schnappschuss mit der naechstgelegenen gespeicherten Zeit."""
        times = np.asarray(self.times)
        idx = int(np.argmin(np.abs(times - time)))
        return self.snapshots[idx]

    def retimed(self, factor: float) -> TimeSeries:
        """Gleiche Felder, alle Zeiten mit ``factor`` multipliziert."""
        return TimeSeries(tuple((time * factor, fld) for time, fld in self.snapshots))


def sample_function(grid: GridSpec, fn: Callable[..., np.ndarray | float]) -> ScalarField:
    """Tastet ``fn`` an allen Gitterknoten ab.

    ``fn`` bekommt die Koordinatenarrays (``x`` bzw. ``x, y``) in Gitterform
    und darf vektorisiert rechnen; skalare Rueckgaben werden aufgeweitet.

    Raises:
        ConfigError: Wenn ein abgetasteter Wert nicht endlich ist (mit Koordinate).
    """
    mesh = grid.mesh()
    with np.errstate(all="ignore"):
        raw = np.broadcast_to(np.asarray(fn(*mesh), dtype=np.float64), grid.shape)
    bad = np.flatnonzero(~np.isfinite(raw.ravel()))
    if bad.size:
        raise ConfigError("non_finite_sample", node=grid.coord_of(int(bad[0])))
    return ScalarField(grid, raw.ravel())


def one_sided_differences(fld: ScalarField, axis: int) -> tuple[ScalarField, ScalarField]:
    """Rueckwaerts- und Vorwaertsdifferenz entlang ``axis``.

    An den Gitterraendern wird die fehlende Seite kopiert: am unteren Rand
    gilt D- = D+, am oberen D+ = D-.
    """
    dminus, dplus = one_sided_arrays(fld.array, fld.grid.array_axis(axis), fld.grid.spacing[axis])
    return ScalarField.from_array(fld.grid, dminus), ScalarField.from_array(fld.grid, dplus)


def one_sided_arrays(values: np.ndarray, array_axis: int, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Array-Variante von :func:`one_sided_differences` (numpy-Achse) fuer den Zeitschritt-Kern."""
    diff = np.diff(values, axis=array_axis) / h
    first = np.take(diff, [0], axis=array_axis)
    last = np.take(diff, [-1], axis=array_axis)
    dminus = np.concatenate([first, diff], axis=array_axis)
    dplus = np.concatenate([diff, last], axis=array_axis)
    return dminus, dplus


def central_gradient(fld: ScalarField) -> list[np.ndarray]:
    """Zentrale Differenzen pro mathematischer Achse (einseitig am Rand), in Feldform."""
    arr = fld.array
    grid = fld.grid
    return [np.gradient(arr, grid.spacing[a], axis=grid.array_axis(a)) for a in range(grid.dim)]


def central_gradient_norm(fld: ScalarField, norm: NormSpec) -> ScalarField:
    """||grad u|| pro Knoten unter ``norm`` aus zentralen Differenzen.

    Raises:
        ConfigError: Wenn Feld- und Norm-Dimension nicht zusammenpassen.
    """
    if norm.dim != fld.grid.dim:
        raise ConfigError("dimension_mismatch", field=fld.grid.dim, norm=norm.dim)
    grads = central_gradient(fld)
    stacked = np.stack([g.ravel() for g in grads], axis=1)
    return ScalarField(fld.grid, norm.evaluate(stacked))

