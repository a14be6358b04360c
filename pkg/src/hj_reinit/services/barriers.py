"""Barrieren-Service - Sub- und Superloesung, die u fuer alle Zeiten einschliessen.

Obere Barriere (Superloesung)::

    k1*u0 * exp(k2*t*(u0 - sigma)^2)   fuer u0 > sigma
    k1*u0                              fuer 0 <= u0 <= sigma
    c*u0                               fuer u0 < 0

Die untere Barriere ist das Spiegelbild mit -sigma. Auf {|u0| <= sigma}
haengen beide nicht von t ab; dadurch bleibt die Nullniveaumenge fest.
"""

from __future__ import annotations

import logging

import numpy as np

from ..models.barrier import BandBoundReport, BarrierSpec, SandwichReport
from ..models.errors import ConfigError
from ..models.grid import ScalarField
from ..models.problem import AuditReport, Hamiltonian, ProblemSpec
from ..models.solve import SolveResult
from .audit import band_gradient_floor, hamiltonian_root

logger = logging.getLogger(__name__)

K1_LIMIT = 1e6
K2_SAFETY = 2.0
_BISECTION_STEPS = 60


def barrier_arrays(spec: BarrierSpec, u0: np.ndarray, t: float, c: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(lower, upper) an allen Knoten zur Zeit t."""
    if t < 0.0:
        raise ConfigError("time_negative", t=t)
    scale = spec.c if c is None else c
    sigma = spec.sigma
    with np.errstate(over="ignore"):
        grow_up = np.exp(spec.k2 * t * (u0 - sigma) ** 2)
        grow_down = np.exp(spec.k2 * t * (u0 + sigma) ** 2)
    upper = np.where(u0 > sigma, spec.k1 * u0 * grow_up, np.where(u0 >= 0.0, spec.k1 * u0, scale * u0))
    lower = np.where(u0 < -sigma, spec.k1 * u0 * grow_down, np.where(u0 <= 0.0, spec.k1 * u0, scale * u0))
    return lower, upper


def eval_barriers(spec: BarrierSpec, u0: ScalarField, utilde_scale: float, node: int, t: float) -> tuple[float, float]:
    """(lower, upper) an einem Knoten (flacher Index)."""
    value = u0.values[node : node + 1]
    lower, upper = barrier_arrays(spec, value, t, utilde_scale)
    return float(lower[0]), float(upper[0])


class BarrierPair:
    """Beide Barrieren zu festen Anfangsdaten u0."""

    def __init__(self, spec: BarrierSpec, u0: ScalarField) -> None:
        self.spec = spec
        self.u0 = u0

    def lower(self, t: float) -> np.ndarray:
        return barrier_arrays(self.spec, self.u0.values, t)[0]

    def upper(self, t: float) -> np.ndarray:
        return barrier_arrays(self.spec, self.u0.values, t)[1]

    def at(self, node: int, t: float) -> tuple[float, float]:
        return eval_barriers(self.spec, self.u0, self.spec.c, node, t)


def choose_barrier_params(
    audit: AuditReport,
    hamiltonian: Hamiltonian,
    slope_cap: float,
    problem: ProblemSpec,
) -> BarrierSpec:
    """Waehlt (sigma, k1, k2, c, M) aus dem Audit.

    M = M^/2; sigma per Bisektion als groesste Halbbreite mit
    ||grad u0|| >= M auf {|u0| <= 2 sigma}; k1 = max(2*k1_min, 1) mit
    H(k1_min*M) = 0; k2 = 2*C1*|inf H| / (k1*sigma^3); c aus dem Zeugen u~ = c*u0 des Audits.

    Raises:
        ConfigError: Audit nicht bestanden oder k1_min > 1e6.
    """
    if not audit.passed:
        raise ConfigError("audit_failed")
    m = 0.5 * audit.gradient_floor
    sigma = _widest_band(problem, m, audit.band_width)
    k1_min = hamiltonian_root(hamiltonian) / m
    if k1_min > K1_LIMIT:
        raise ConfigError("barrier_k1", k1=k1_min, slope_cap=slope_cap)
    k1 = max(2.0 * k1_min, 1.0)
    k2 = K2_SAFETY * audit.sup_bound * abs(hamiltonian.infimum(slope_cap)) / (k1 * sigma**3)
    spec = BarrierSpec(sigma=sigma, k1=k1, k2=k2, c=audit.witness_scale, M=m)
    logger.info("Barrieren: %s", spec.to_dict())
    return spec


def _widest_band(problem: ProblemSpec, m: float, start_width: float) -> float:
    u0 = problem.u0
    norm = problem.norm

    def holds(sigma: float) -> bool:
        return band_gradient_floor(u0, norm, 2.0 * sigma) >= m

    lo = 0.5 * start_width
    hi = 0.5 * float(np.max(np.abs(u0.values)))
    if hi <= lo or holds(hi):
        return max(hi, lo)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo


def sandwich_check(result: SolveResult, pair: BarrierPair, tol: float) -> SandwichReport:
    """Zaehlt Knoten/Zeiten mit u < lower - tol oder u > upper + tol."""
    if tol < 0.0:
        raise ConfigError("tolerance_range", tol=tol)
    grid = pair.u0.grid
    violations = 0
    worst_gap = -np.inf
    worst_location: tuple[float, ...] | None = None
    worst_time: float | None = None
    per_snapshot: list[tuple[float, int]] = []
    for time, fld in result.series:
        lower, upper = barrier_arrays(pair.spec, pair.u0.values, time)
        u = fld.values
        with np.errstate(invalid="ignore"):
            gap = np.maximum(lower - u, u - upper)
        count = int(np.count_nonzero(gap > tol))
        per_snapshot.append((time, count))
        violations += count
        idx = int(np.argmax(gap))
        if gap[idx] > worst_gap:
            worst_gap = float(gap[idx])
            worst_location = grid.coord_of(idx)
            worst_time = time
    if violations:
        logger.warning("Sandwich verletzt: %d Knoten/Zeiten, groesste Luecke %.4g", violations, worst_gap)
    return SandwichReport(
        violations=violations,
        worst_gap=float(worst_gap),
        worst_location=worst_location,
        worst_time=worst_time,
        tolerance=tol,
        per_snapshot=per_snapshot,
    )


def band_bound_check(result: SolveResult, pair: BarrierPair, tol: float) -> BandBoundReport:
    """max |u| auf {sigma/2 <= |u0| <= sigma} gegen k1*sigma."""
    spec = pair.spec
    magnitude = np.abs(pair.u0.values)
    ring = (magnitude >= 0.5 * spec.sigma) & (magnitude <= spec.sigma)
    observed = 0.0
    if np.any(ring):
        observed = max(float(np.max(np.abs(fld.values[ring]))) for _, fld in result.series)
    return BandBoundReport(bound=spec.k1 * spec.sigma, observed=observed, tolerance=tol)
