"""Auswertung - Fehler zur Abstandsfunktion, Interface-Drift, a-priori-Schranken, Studien."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np

from ..models.analysis import (
    AprioriReport,
    CompactMask,
    EnvelopeReport,
    ErrorReport,
    GradientStats,
    RefinementRow,
    RescaleRow,
)
from ..models.errors import ConfigError, NoInterfaceError, ReinitError
from ..models.grid import GridSpec, ScalarField, TimeSeries, central_gradient_norm
from ..models.interface import DistanceField, InterfaceMesh
from ..models.norms import NormSpec, dual_of
from ..models.problem import Hamiltonian, ProblemSpec, SpeedField
from ..models.solve import SchemeSpec, SolveConfig, SolveResult
from . import kernels
from .oracle import brute_force_signed_distance, extract_interface, padded_elements
from .solver import solve

logger = logging.getLogger(__name__)

_ROUNDOFF_ULPS = 64.0


def _require_mask(mask: CompactMask, grid: GridSpec) -> np.ndarray:
    if mask.grid != grid:
        raise ConfigError("mask_grid")
    if mask.is_empty:
        raise ConfigError("empty_mask")
    return mask.mask


def sup_error_on_compact(
    u: ScalarField, d: DistanceField, mask: CompactMask, time: float = 0.0
) -> ErrorReport:
    """max und Mittelwert von |u - d| auf der Maske, mit Ort des Maximums.

    Raises:
        ConfigError: Bei leerer Maske oder verschiedenen Gittern.
    """
    if u.grid != d.grid:
        raise ConfigError("grid_mismatch")
    selected = _require_mask(mask, u.grid)
    error = np.abs(u.values - d.values.values)
    nodes = np.flatnonzero(selected)
    local = error[nodes]
    worst = int(nodes[int(np.argmax(local))])
    return ErrorReport(
        sup_error=float(np.max(local)),
        l1_error=float(np.mean(local)),
        node_of_max=u.grid.coord_of(worst),
        time=float(time),
    )


def error_curve(series: TimeSeries, d: DistanceField, mask: CompactMask) -> list[tuple[float, float]]:
    """(t, sup_K |u(t) - d|) fuer jeden Schnappschuss."""
    return [(time, sup_error_on_compact(fld, d, mask, time).sup_error) for time, fld in series]


def hausdorff_distance(first: InterfaceMesh, second: InterfaceMesh) -> float:
    """Symmetrischer euklidischer Hausdorff-Abstand zweier Meshes.

    Messpunkte sind Endpunkte und Mittelpunkte der Strecken, gemessen wird
    jeweils der Punkt-Strecken-Abstand zum anderen Mesh.
    """
    return max(_directed(first, second), _directed(second, first))


def _directed(source: InterfaceMesh, target: InterfaceMesh) -> float:
    starts, ends = padded_elements(source)
    samples = np.ascontiguousarray(np.concatenate([starts, ends, 0.5 * (starts + ends)]))
    t_starts, t_ends = padded_elements(target)
    distances = kernels.euclid_mesh_kernel(samples, t_starts, t_ends)
    # Projektion auf die eigene Strecke liefert nur Rundungsreste.
    scale = max(1.0, float(np.max(np.abs(samples))))
    distances[distances <= _ROUNDOFF_ULPS * np.finfo(float).eps * scale] = 0.0
    return float(np.max(distances))


def interface_drift(series: TimeSeries, reference: InterfaceMesh) -> list[tuple[float, float]]:
    """(t, Hausdorff(Gamma(t), reference)); ohne Vorzeichenwechsel +inf."""
    drift = []
    for time, fld in series:
        try:
            mesh = extract_interface(fld)
        except NoInterfaceError:
            logger.warning("t=%.4g: kein Vorzeichenwechsel mehr", time)
            drift.append((time, math.inf))
            continue
        drift.append((time, hausdorff_distance(mesh, reference)))
    return drift


def gradient_unit_deviation(u: ScalarField, norm: NormSpec, mask: CompactMask) -> GradientStats:
    """Median und 95%-Quantil von | ||grad u|| - 1 | (zentrale Differenzen) auf der Maske."""
    selected = _require_mask(mask, u.grid)
    deviation = np.abs(central_gradient_norm(u, norm).values[selected] - 1.0)
    return GradientStats(
        median=float(np.median(deviation)),
        p95=float(np.percentile(deviation, 95)),
        nodes=int(deviation.size),
    )


def snapshot_rate(series: TimeSeries) -> float:
    """max ueber aufeinanderfolgende Schnappschuesse von max|du|/dt."""
    rate = 0.0
    for (t0, f0), (t1, f1) in zip(series.snapshots, series.snapshots[1:], strict=False):
        rate = max(rate, float(np.max(np.abs(f1.values - f0.values))) / (t1 - t0))
    return rate


def apriori_checks(
    result: SolveResult,
    speed: SpeedField,
    slope_cap: float,
    *,
    norm: NormSpec,
    hamiltonian: Hamiltonian,
    mask: CompactMask | None = None,
    tol: float | None = None,
) -> AprioriReport:
    """Zeitliche Lipschitz-Schranke, Gradientenschranke abseits von Gamma, Beschraenktheit.

    (a) C_t aus den Schnappschuessen gegen C1 * max|H| auf [0, slope_cap].
    (b) ||grad u|| * |f| <= C + tol mit C = C_t + C1 * |inf H|; denn aus
        |f| * |H(||grad u||)| = |u_t| <= C_t und H(p) >= p - 1 folgt genau diese
        Konstante. Ohne Maske: Knoten mit |u0| > delta und 5 Zellen Randabstand.
    (c) max |u| auf der Maske pro Schnappschuss.

    Raises:
        ConfigError: Bei weniger als zwei Schnappschuessen.
    """
    series = result.series
    if len(series) < 2:
        raise ConfigError("snapshots_too_few", snapshots=len(series))
    grid = series.grid
    tolerance = 10.0 * grid.h if tol is None else tol
    if mask is None:
        off_band = np.abs(series.initial.values) > speed.delta
        selected = off_band & CompactMask.interior(grid).mask
    else:
        selected = _require_mask(mask, grid)

    rate = snapshot_rate(series)
    rate_bound = speed.sup_bound * hamiltonian.max_abs(slope_cap) + tolerance
    constant = rate + speed.sup_bound * abs(hamiltonian.infimum(slope_cap))
    abs_f = np.abs(speed.values.values)[selected]
    violations = 0
    boundedness = []
    for time, fld in series:
        product = central_gradient_norm(fld, norm).values[selected] * abs_f
        violations += int(np.count_nonzero(product > constant + tolerance))
        boundedness.append((time, float(np.max(np.abs(fld.values[selected]))) if abs_f.size else 0.0))
    if violations:
        logger.warning("A-priori-Gradientenschranke: %d Verletzungen", violations)
    return AprioriReport(
        rate=rate,
        rate_bound=rate_bound,
        gradient_constant=constant,
        gradient_violations=violations,
        tolerance=tolerance,
        boundedness=boundedness,
    )


def linear_envelope_check(
    result: SolveResult,
    speed: SpeedField,
    hamiltonian: Hamiltonian,
    slope_cap: float,
    tol: float,
) -> EnvelopeReport:
    """Zaehlt Verletzungen von u0 - C t - tol <= u <= u0 + C t + tol, C = C1 * max|H|."""
    constant = speed.sup_bound * hamiltonian.max_abs(slope_cap)
    u0 = result.series.initial.values
    violations = 0
    worst = -math.inf
    for time, fld in result.series:
        gap = np.abs(fld.values - u0) - constant * time
        violations += int(np.count_nonzero(gap > tol))
        worst = max(worst, float(np.max(gap)))
    return EnvelopeReport(constant=constant, violations=violations, worst_gap=worst, tolerance=tol)


def refinement_study(
    make_problem: Callable[[int], ProblemSpec],
    resolutions: Sequence[int],
    scheme: SchemeSpec,
    config: SolveConfig,
    mask_recipe: dict,
) -> list[RefinementRow]:
    """Gesamter Ablauf (Gamma, Orakel, Loeser, Fehler) pro Aufloesung.

    observed_order = log(e(h_1)/e(h_2)) / log(h_1/h_2), bei exakter Halbierung
    also log2 des Fehlerverhaeltnisses. Ein fehlgeschlagener Lauf ergibt eine
    Zeile mit Fehlercode statt eines Abbruchs.

    Raises:
        ConfigError: Weniger als drei Aufloesungen oder h nicht (ungefaehr) halbiert.
    """
    if len(resolutions) < 3:
        raise ConfigError("refinement_resolutions", count=len(resolutions))
    rows: list[RefinementRow] = []
    for points in resolutions:
        try:
            problem = make_problem(points)
            grid = problem.grid
            mesh = extract_interface(problem.u0)
            distance = brute_force_signed_distance(mesh, grid, dual_of(problem.norm), problem.u0)
            result = solve(problem, grid, scheme, config)
            mask = CompactMask.from_recipe(grid, mask_recipe, problem.u0)
            error = sup_error_on_compact(result.series.final, distance, mask, result.final_time)
            rows.append(RefinementRow(points=points, h=grid.h, sup_error=error.sup_error))
            logger.info("Verfeinerung n=%d: h=%.4g sup=%.4g", points, grid.h, error.sup_error)
        except ReinitError as exc:
            logger.warning("Verfeinerung n=%d fehlgeschlagen: %s", points, exc.code)
            rows.append(RefinementRow(points=points, h=math.nan, sup_error=None, note=exc.code))

    for coarse, fine in zip(rows, rows[1:], strict=False):
        if coarse.sup_error is None or fine.sup_error is None:
            continue
        ratio = coarse.h / fine.h
        if not 1.8 <= ratio <= 2.2:
            raise ConfigError("refinement_ratio", coarse=coarse.points, fine=fine.points)
        if coarse.sup_error > 0.0 and fine.sup_error > 0.0:
            fine.observed_order = math.log(coarse.sup_error / fine.sup_error) / math.log(ratio)
    return rows


def rescale_convergence(
    result: SolveResult,
    d: DistanceField,
    mask: CompactMask,
    epsilons: Sequence[float],
) -> list[RescaleRow]:
    """sup_K |u^eps(., 1) - d| mit u^eps(., 1) = u(., 1/eps) per Schnappschuss-Suche.

    Nach erreichter Stationaritaet gilt der letzte Schnappschuss fuer alle
    spaeteren Zeiten.

    Raises:
        ConfigError: Wenn 1/eps hinter t_final liegt (mit benoetigtem t_final).
    """
    rows = []
    series = result.series
    for eps in epsilons:
        if not eps > 0.0:
            raise ConfigError("epsilon_range", epsilon=eps)
        wanted = 1.0 / eps
        if wanted > result.final_time * (1.0 + 1e-12) and not result.steady_reached:
            raise ConfigError("rescale_horizon", needed=wanted, t_final=result.final_time)
        used, fld = series.nearest(wanted)
        error = sup_error_on_compact(fld, d, mask, used)
        rows.append(RescaleRow(epsilon=float(eps), requested_time=wanted, used_time=used, sup_error=error.sup_error))
    return rows
