"""Abstandsorakel - extrahiert Gamma und berechnet d(., Gamma) in der Dualnorm.

Zwei unabhaengige Konstruktionen: die Brute-Force-Minimierung ueber alle
Strecken des Meshes (Grundwahrheit) und ein Fast-Sweeping-Loeser der
Eikonalgleichung ||grad phi|| = 1 (Kreuzvergleich). 1D-Daten werden intern mit
y = 0 auf 2D aufgefuellt, damit beide Konstruktionen dieselben Kerne nutzen.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from ..models.errors import ConfigError, NoInterfaceError, NumericalError
from ..models.grid import GridSpec, ScalarField
from ..models.interface import DistanceField, InterfaceMesh
from ..models.norms import NormKind, NormSpec
from . import kernels

logger = logging.getLogger(__name__)

DEFAULT_MAX_SWEEPS = 100
SWEEP_TOL = 1e-12


def norm_params(spec: NormSpec) -> tuple[int, float, np.ndarray]:
    """(kind, p, a) fuer die numba-Kerne, 1D-Normen auf 2D aufgefuellt."""
    if spec.kind is NormKind.P:
        return kernels.NORM_P, float(spec.p), np.eye(2)
    matrix = np.eye(2)
    matrix[: spec.dim, : spec.dim] = spec.matrix_array
    return kernels.NORM_ELLIPSOIDAL, 2.0, matrix


def padded_coords(grid: GridSpec) -> np.ndarray:
    coords = grid.coords()
    if grid.dim == 1:
        coords = np.column_stack([coords[:, 0], np.zeros(grid.size)])
    return np.ascontiguousarray(coords)


def padded_elements(mesh: InterfaceMesh) -> tuple[np.ndarray, np.ndarray]:
    if mesh.dim == 1:
        points = np.column_stack([mesh.starts[:, 0], np.zeros(len(mesh))])
        return np.ascontiguousarray(points), np.ascontiguousarray(points)
    return np.ascontiguousarray(mesh.starts), np.ascontiguousarray(mesh.ends)


def _require_both_signs(fld: ScalarField, level: float) -> None:
    values = fld.values - level
    if not (np.any(values > 0.0) and np.any(values < 0.0)):
        raise NoInterfaceError()


# -- Gamma ------------------------------------------------------------------


def extract_interface(u0: ScalarField, level: float = 0.0) -> InterfaceMesh:
    """Naeherung von {u0 = level} durch Strecken (2D) bzw. Nullstellen (1D).

    Ein Knoten zaehlt als positiv, wenn ``value >= level``. Mehrdeutige
    Sattelzellen entscheidet der Zellmittelwert: ist er positiv, werden die
    negativen Ecken einzeln abgeschnitten, sonst die positiven.

    Raises:
        NoInterfaceError: Wenn das Feld das Vorzeichen nicht wechselt.
    """
    _require_both_signs(u0, level)
    if u0.grid.dim == 1:
        return _crossings_1d(u0, level)
    return _marching_squares(u0, level)


def _crossings_1d(u0: ScalarField, level: float) -> InterfaceMesh:
    values = u0.values
    x = u0.grid.axis_coords(0)
    positive = values >= level
    idx = np.flatnonzero(positive[:-1] != positive[1:])
    t = (level - values[idx]) / (values[idx + 1] - values[idx])
    roots = x[idx] + t * (x[idx + 1] - x[idx])
    return InterfaceMesh(1, roots.reshape(-1, 1, 1))


# Kanten einer Zelle: 0 unten, 1 rechts, 2 oben, 3 links.
# Fallindex: Bit 0 = Ecke (i, j), Bit 1 = (i+1, j), Bit 2 = (i+1, j+1), Bit 3 = (i, j+1).
_SADDLE_PAIRS = {
    # (Fall, Mittelwert positiv) -> Kantenpaare
    (5, True): ((0, 1), (2, 3)),
    (5, False): ((0, 3), (1, 2)),
    (10, True): ((0, 3), (1, 2)),
    (10, False): ((0, 1), (2, 3)),
}


def _marching_squares(u0: ScalarField, level: float) -> InterfaceMesh:
    grid = u0.grid
    arr = u0.array
    hx, hy = grid.spacing
    x = grid.axis_coords(0)[None, :-1]
    y = grid.axis_coords(1)[:-1, None]
    v00, v10 = arr[:-1, :-1], arr[:-1, 1:]
    v01, v11 = arr[1:, :-1], arr[1:, 1:]
    b00, b10, b11, b01 = (v >= level for v in (v00, v10, v11, v01))
    case = b00 * 1 + b10 * 2 + b11 * 4 + b01 * 8

    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = (level - v00) / (v10 - v00)
        t1 = (level - v10) / (v11 - v10)
        t2 = (level - v01) / (v11 - v01)
        t3 = (level - v00) / (v01 - v00)
    zeros = np.zeros_like(v00)
    # (ny-1, nx-1, 4 Kanten, 2 Koordinaten)
    points = np.stack(
        [
            np.stack([x + t0 * hx, y + zeros], axis=-1),
            np.stack([x + hx + zeros, y + t1 * hy], axis=-1),
            np.stack([x + t2 * hx, y + hy + zeros], axis=-1),
            np.stack([x + zeros, y + t3 * hy], axis=-1),
        ],
        axis=2,
    )
    crossed = np.stack([b00 != b10, b10 != b11, b01 != b11, b00 != b01], axis=-1)

    flat_case = case.ravel()
    flat_points = points.reshape(-1, 4, 2)
    flat_crossed = crossed.reshape(-1, 4)
    saddle = (flat_case == 5) | (flat_case == 10)
    regular = np.flatnonzero(~saddle & (flat_crossed.sum(axis=1) == 2))

    # stabile Sortierung: die zwei gekreuzten Kanten stehen in aufsteigender Reihenfolge vorn
    order = np.argsort(~flat_crossed[regular], axis=1, kind="stable")[:, :2]
    first = flat_points[regular, order[:, 0]]
    second = flat_points[regular, order[:, 1]]
    segments = [(int(c), np.stack([first[k], second[k]])) for k, c in enumerate(regular)]

    average = 0.25 * (v00 + v10 + v11 + v01).ravel()
    for cell in np.flatnonzero(saddle):
        for e0, e1 in _SADDLE_PAIRS[(int(flat_case[cell]), bool(average[cell] >= level))]:
            segments.append((int(cell), np.stack([flat_points[cell, e0], flat_points[cell, e1]])))

    segments.sort(key=lambda item: item[0])
    elements = np.array([seg for _, seg in segments], dtype=np.float64).reshape(-1, 2, 2)
    logger.debug("Marching Squares: %d Strecken, %d Sattelzellen", len(elements), int(saddle.sum()))
    return InterfaceMesh(2, elements)


# -- Abstaende --------------------------------------------------------------


def brute_force_signed_distance(
    mesh: InterfaceMesh,
    grid: GridSpec,
    dual: NormSpec,
    sign_source: ScalarField,
) -> DistanceField:
    """Vorzeichenbehafteter Abstand jedes Knotens zum Mesh in der Norm ``dual``.

    Pro Knoten das Minimum ueber alle Strecken von min_t ||x - (a + t(b - a))||,
    innere Minimierung per Goldenem Schnitt. Das Vorzeichen stammt aus
    ``sign_source`` (also aus u0), nicht aus der Orientierung des Meshes.

    Raises:
        ConfigError: Bei leerem Mesh oder nicht passenden Dimensionen.
    """
    _check_inputs(mesh, grid, dual)
    if sign_source.grid != grid:
        raise ConfigError("sign_source_grid")
    magnitude = _norm_distance(mesh, padded_coords(grid), dual)
    values = np.sign(sign_source.values) * magnitude
    return DistanceField(ScalarField(grid, values), dual, mesh, signed=True)


def _check_inputs(mesh: InterfaceMesh, grid: GridSpec, dual: NormSpec) -> None:
    if mesh.is_empty:
        raise ConfigError("empty_mesh")
    if mesh.dim != grid.dim or dual.dim != grid.dim:
        raise ConfigError("dimension_mismatch", field=grid.dim, norm=dual.dim)


def _norm_distance(mesh: InterfaceMesh, points: np.ndarray, dual: NormSpec) -> np.ndarray:
    kind, p, matrix = norm_params(dual)
    lower, upper = dual.equivalence_to_euclidean()
    if dual.dim == 1:
        # ||(v, 0)|| = ||e_1|| * |v| - im 1D gilt die Aequivalenz exakt.
        lower = upper = float(dual.axis_norms()[0])
    starts, ends = padded_elements(mesh)
    return kernels.brute_force_kernel(
        points, starts, ends, kind, p, matrix, lower, upper,
        kernels.GOLDEN_TOL, kernels.GOLDEN_MAX_ITER,
    )


def fast_sweeping_distance(
    mesh: InterfaceMesh,
    grid: GridSpec,
    dual: NormSpec,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> DistanceField:
    """Unvorzeichenbehafteter Abstand als Loesung von ||grad phi|| = 1 (Fast Sweeping).

    Knoten im Abstand <= sqrt(dim) * h vom Mesh werden mit dem exakten
    Brute-Force-Wert belegt und festgehalten, alle anderen starten bei +inf.

    Raises:
        NumericalError: Wenn nach ``max_sweeps`` Durchlaeufen die maximale
            Aenderung noch >= 1e-12 ist.
    """
    _check_inputs(mesh, grid, dual)
    points = padded_coords(grid)
    starts, ends = padded_elements(mesh)
    euclid = kernels.euclid_mesh_kernel(points, starts, ends)
    seed_radius = math.sqrt(grid.dim) * grid.h * (1.0 + 1e-9)
    seeds = euclid <= seed_radius
    if not np.any(seeds):
        raise ConfigError("mesh_outside_grid")

    phi = np.full(grid.size, np.inf)
    phi[seeds] = _norm_distance(mesh, np.ascontiguousarray(points[seeds]), dual)
    kind, p, matrix = norm_params(dual)
    shape2d = grid.shape if grid.dim == 2 else (1, grid.size)
    hx = grid.spacing[0]
    hy = grid.spacing[1] if grid.dim == 2 else 1.0
    phi2d = phi.reshape(shape2d)
    sweeps, change = kernels.fast_sweep_kernel(
        phi2d, seeds.reshape(shape2d), hx, hy, kind, p, matrix,
        SWEEP_TOL, max_sweeps, kernels.GOLDEN_TOL, kernels.GOLDEN_MAX_ITER,
    )
    if sweeps < 0:
        raise NumericalError("sweep_divergence", sweeps=max_sweeps, residual=float(change))
    logger.info("Fast Sweeping: %d Durchlaeufe, %d Saatknoten", sweeps, int(seeds.sum()))
    return DistanceField(ScalarField(grid, phi2d.ravel()), dual, mesh, signed=False)


def oracle_disagreement(brute: DistanceField, sweep: DistanceField) -> float:
    """max | |brute| - sweep | ueber alle Knoten."""
    return float(np.max(np.abs(brute.magnitude - sweep.magnitude)))


def lipschitz_certificate(fld: ScalarField, dual: NormSpec, sample_pairs: int, seed: int = 0) -> float:
    """max |phi(x) - phi(y)| / ||x - y|| ueber zufaellige Knotenpaare.

    Deterministisch fuer festes ``seed``; Paare mit x = y werden verworfen.

    Raises:
        ConfigError: Fuer sample_pairs < 1.
    """
    if sample_pairs < 1:
        raise ConfigError("sample_pairs_range", sample_pairs=sample_pairs)
    rng = np.random.default_rng(seed)
    first, second = rng.integers(0, fld.grid.size, size=(2, sample_pairs))
    keep = first != second
    first, second = first[keep], second[keep]
    if first.size == 0:
        return 0.0
    coords = fld.grid.coords()
    gaps = dual.evaluate(coords[first] - coords[second])
    ratios = np.abs(fld.values[first] - fld.values[second]) / gaps
    return float(np.max(ratios))
