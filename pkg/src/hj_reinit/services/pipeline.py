"""Experiment-Ablaeufe der CLI-Unterbefehle.

Jede ``run_*``-Funktion baut aus einer :class:`ExperimentConfig` das Problem,
ruft die Fach-Services auf, schreibt die angeforderten Dateien ins
Ausgabeverzeichnis und liefert einen sprachneutralen Bericht (dict). Der
Abschnitt ``acceptance`` des Berichts enthaelt pro Pruefung ``true``/``false``;
:func:`enforce` macht daraus unter ``--check`` einen :class:`AcceptanceError`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..models.analysis import CompactMask
from ..models.errors import AcceptanceError
from ..models.interface import DistanceField, InterfaceMesh
from ..models.norms import dual_of
from ..models.problem import AuditReport, ProblemSpec
from ..models.settings import ExperimentConfig
from .analysis import (
    apriori_checks,
    error_curve,
    gradient_unit_deviation,
    interface_drift,
    linear_envelope_check,
    refinement_study,
    rescale_convergence,
    sup_error_on_compact,
)
from .audit import audit_hypotheses, build_problem
from .barriers import BarrierPair, band_bound_check, choose_barrier_params, sandwich_check
from .oracle import (
    brute_force_signed_distance,
    extract_interface,
    fast_sweeping_distance,
    lipschitz_certificate,
    oracle_disagreement,
)
from .reporter import Reporter, write_field_csv
from .solver import solve

logger = logging.getLogger(__name__)


@dataclass
class Prepared:
    """Problem, Gamma und Grundwahrheit einer Konfiguration auf ihrem Gitter."""

    problem: ProblemSpec
    mesh: InterfaceMesh
    distance: DistanceField
    mask: CompactMask


def build(config: ExperimentConfig, points: int | None = None) -> ProblemSpec:
    """Tastet u0 aus der Konfiguration ab (optional mit anderer Aufloesung)."""
    return build_problem(
        config.grid_spec(points),
        config.generator(),
        config.problem.delta,
        config.hamiltonian(),
        config.norm_spec(),
    )


def prepare(config: ExperimentConfig) -> Prepared:
    """Problem, Mesh, Brute-Force-Abstand in der Dualnorm und Auswertemaske."""
    problem = build(config)
    mesh = extract_interface(problem.u0)
    distance = brute_force_signed_distance(mesh, problem.grid, dual_of(config.norm_spec()), problem.u0)
    mask = CompactMask.from_recipe(problem.grid, config.analysis.mask, problem.u0)
    return Prepared(problem, mesh, distance, mask)


def _header(config: ExperimentConfig, command: str) -> dict:
    return {"command": command, "name": config.name, "config": config.to_dict()}


def _acceptance(config: ExperimentConfig, results: dict[str, bool]) -> dict[str, bool]:
    """Nur die konfigurierten Pruefungen gehen in die Abnahme ein."""
    return {name: bool(passed) for name, passed in results.items() if name in config.analysis.checks}


def _output_dir(config: ExperimentConfig, output_dir: str | Path | None) -> Path:
    return Path(output_dir if output_dir is not None else config.outputs.directory)


def enforce(report: dict) -> None:
    """Wirft AcceptanceError, wenn eine Pruefung im Bericht nicht bestanden ist."""
    failed = sorted(name for name, passed in report.get("acceptance", {}).items() if not passed)
    if failed:
        raise AcceptanceError("acceptance_failed", checks=", ".join(failed))


# -- audit ------------------------------------------------------------------


def run_audit(config: ExperimentConfig) -> tuple[dict, AuditReport]:
    """Hypothesenpruefung auf dem konfigurierten Gitter."""
    problem = build(config)
    audit = audit_hypotheses(problem, config.analysis.band_width, config.analysis.c_grid)
    report = _header(config, "audit")
    report["audit"] = audit.to_dict()
    report["acceptance"] = _acceptance(config, {"audit": audit.passed})
    return report, audit


# -- oracle -----------------------------------------------------------------


def run_oracle(config: ExperimentConfig, output_dir: str | Path | None = None) -> dict:
    """Gamma, beide Abstandsfelder, Kreuzvergleich und Lipschitz-Zertifikate."""
    prepared = prepare(config)
    grid = prepared.problem.grid
    dual = prepared.distance.dual_norm
    sweep = fast_sweeping_distance(prepared.mesh, grid, dual)
    disagreement = oracle_disagreement(prepared.distance, sweep)
    pairs = config.analysis.certificate_pairs
    certificates = {
        "brute_force": lipschitz_certificate(prepared.distance.values, dual, pairs, config.seed),
        "fast_sweeping": lipschitz_certificate(sweep.values, dual, pairs, config.seed),
    }
    h = grid.h
    oracle_tol = config.analysis.oracle_cells * h
    certificate_bound = 1.0 + config.analysis.certificate_cells * h
    logger.info("Orakel: Abweichung %.4g (Toleranz %.4g)", disagreement, oracle_tol)

    files = []
    directory = _output_dir(config, output_dir)
    if config.outputs.mesh:
        Reporter.save_mesh(prepared.mesh, directory / "interface.csv")
        files.append("interface.csv")
    if config.outputs.fields:
        write_field_csv(prepared.distance.values, directory / "distance_brute_force.csv")
        write_field_csv(sweep.values, directory / "distance_fast_sweeping.csv")
        files += ["distance_brute_force.csv", "distance_fast_sweeping.csv"]

    report = _header(config, "oracle")
    report["grid"] = grid.to_dict()
    report["dual_norm"] = dual.to_dict()
    report["interface"] = {"elements": len(prepared.mesh), "length": prepared.mesh.total_length}
    report["oracle"] = {
        "max_disagreement": disagreement,
        "tolerance": oracle_tol,
        "certificates": certificates,
        "certificate_bound": certificate_bound,
    }
    report["files"] = files
    report["acceptance"] = _acceptance(
        config,
        {
            "oracle": disagreement <= oracle_tol,
            "certificate": max(certificates.values()) <= certificate_bound,
        },
    )
    return report


# -- run --------------------------------------------------------------------


def run_experiment(config: ExperimentConfig, output_dir: str | Path | None = None, force: bool = False) -> dict:
    """Audit, Loesung, Barrieren und Auswertung eines Experiments."""
    prepared = prepare(config)
    problem = prepared.problem
    grid = problem.grid
    h = grid.h
    analysis = config.analysis
    audit = audit_hypotheses(problem, analysis.band_width, analysis.c_grid)
    result = solve(problem, grid, config.scheme_spec(), config.solve_config(), audit=audit, force=force)

    errors = error_curve(result.series, prepared.distance, prepared.mask)
    final = sup_error_on_compact(result.series.final, prepared.distance, prepared.mask, result.final_time)
    drift = interface_drift(result.series, prepared.mesh)
    gradient = gradient_unit_deviation(result.series.final, problem.norm, prepared.mask)
    apriori = apriori_checks(
        result, problem.speed, result.slope_cap,
        norm=problem.norm, hamiltonian=problem.hamiltonian, tol=analysis.apriori_cells * h,
    )
    envelope = linear_envelope_check(
        result, problem.speed, problem.hamiltonian, result.slope_cap, analysis.apriori_cells * h
    )

    barrier_report: dict = {}
    sandwich_ok = band_ok = False
    if audit.passed:
        spec = choose_barrier_params(audit, problem.hamiltonian, result.slope_cap, problem)
        pair = BarrierPair(spec, problem.u0)
        sandwich = sandwich_check(result, pair, analysis.barrier_cells * h)
        band = band_bound_check(result, pair, analysis.barrier_cells * h)
        sandwich_ok, band_ok = sandwich.passed, band.passed
        barrier_report = {"parameters": spec.to_dict(), "sandwich": sandwich.to_dict(), "band_bound": band.to_dict()}
    else:
        logger.warning("Audit nicht bestanden - Barrieren werden nicht konstruiert")

    max_drift = max(value for _, value in drift)
    files = []
    directory = _output_dir(config, output_dir)
    if config.outputs.fields:
        write_field_csv(problem.u0, directory / "u0.csv")
        write_field_csv(result.series.final, directory / "u_final.csv")
        write_field_csv(prepared.distance.values, directory / "distance.csv")
        files += ["u0.csv", "u_final.csv", "distance.csv"]
    if config.outputs.mesh:
        Reporter.save_mesh(prepared.mesh, directory / "interface.csv")
        files.append("interface.csv")
    if config.outputs.curves:
        Reporter.save_curve(errors, directory / "error_curve.csv", ("t", "sup_error"))
        Reporter.save_curve(drift, directory / "drift.csv", ("t", "hausdorff"))
        Reporter.save_curve(result.residual_history, directory / "residual.csv", ("t", "residual"))
        files += ["error_curve.csv", "drift.csv", "residual.csv"]

    report = _header(config, "run")
    report["grid"] = grid.to_dict()
    report["audit"] = audit.to_dict()
    report["solve"] = result.to_dict()
    report["error"] = {
        **final.to_dict(),
        "tolerance": analysis.sup_error_cells * h,
        "curve": [[t, e] for t, e in errors],
    }
    report["drift"] = {"max": max_drift, "tolerance": analysis.drift_cells * h}
    report["gradient"] = gradient.to_dict()
    report["apriori"] = apriori.to_dict()
    report["envelope"] = envelope.to_dict()
    report["barriers"] = barrier_report
    report["files"] = files
    report["acceptance"] = _acceptance(
        config,
        {
            "audit": audit.passed,
            "sup_error": final.sup_error <= analysis.sup_error_cells * h,
            "drift": bool(np.isfinite(max_drift)) and max_drift <= analysis.drift_cells * h,
            "sandwich": sandwich_ok,
            "band_bound": band_ok,
            "apriori": apriori.passed,
            "envelope": envelope.passed,
        },
    )
    return report


# -- Studien ----------------------------------------------------------------


def run_refinement_study(config: ExperimentConfig, output_dir: str | Path | None = None) -> dict:
    """Vollstaendiger Ablauf auf allen konfigurierten Aufloesungen."""
    analysis = config.analysis
    rows = refinement_study(
        lambda points: build(config, points),
        analysis.resolutions,
        config.scheme_spec(),
        config.solve_config(),
        analysis.mask,
    )
    lo, hi = analysis.order_range
    orders = [row.observed_order for row in rows[1:]]
    order_ok = all(order is not None and lo <= order <= hi for order in orders)

    files = []
    if config.outputs.curves:
        curve = [(row.h, row.sup_error) for row in rows if row.sup_error is not None]
        Reporter.save_curve(curve, _output_dir(config, output_dir) / "refinement.csv", ("h", "sup_error"))
        files.append("refinement.csv")

    report = _header(config, "study-refine")
    report["rows"] = [row.to_dict() for row in rows]
    report["order_range"] = [lo, hi]
    report["files"] = files
    report["acceptance"] = _acceptance(config, {"order": order_ok})
    return report


def run_rescale_study(config: ExperimentConfig, output_dir: str | Path | None = None) -> dict:
    """epsilon-Tabelle sup_K |u^eps(., 1) - d| aus einem einzigen Lauf.

    Der Lauf geht bis max(t_final, 1/min(eps)), damit jede Zeile einen
    Schnappschuss hat.
    """
    prepared = prepare(config)
    problem = prepared.problem
    h = problem.grid.h
    analysis = config.analysis
    horizon = max(config.run.t_final, 1.0 / min(analysis.epsilons)) if analysis.epsilons else config.run.t_final
    result = solve(problem, problem.grid, config.scheme_spec(), config.solve_config(horizon))
    rows = rescale_convergence(result, prepared.distance, prepared.mask, analysis.epsilons)

    ordered = sorted(rows, key=lambda row: -row.epsilon)
    slack = analysis.apriori_cells * h
    monotone = all(b.sup_error <= a.sup_error + slack for a, b in zip(ordered, ordered[1:], strict=False))
    smallest_ok = bool(ordered) and ordered[-1].sup_error <= analysis.sup_error_cells * h

    files = []
    if config.outputs.curves:
        curve = [(row.epsilon, row.sup_error) for row in ordered]
        Reporter.save_curve(curve, _output_dir(config, output_dir) / "rescale.csv", ("epsilon", "sup_error"))
        files.append("rescale.csv")

    report = _header(config, "study-rescale")
    report["solve"] = result.to_dict()
    report["rows"] = [row.to_dict() for row in ordered]
    report["monotone_slack"] = slack
    report["files"] = files
    report["acceptance"] = _acceptance(config, {"rescale": monotone and smallest_ok})
    return report
