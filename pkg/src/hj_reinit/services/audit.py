"""Audit-Service - prueft die Voraussetzungen an u0, f und H auf dem Gitter.

Alle Konstanten (L, C1, M, C2, C3, alpha) sind abgetastete Schaetzwerte, also
untere Schranken der wahren Konstanten. Die Barrieren rechnen deshalb mit
Sicherheitsfaktoren.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence

import numpy as np

from ..models.errors import ConfigError, NoInterfaceError
from ..models.grid import GridSpec, ScalarField, central_gradient_norm, sample_function
from ..models.norms import NormSpec
from ..models.problem import (
    AuditReport,
    Hamiltonian,
    HypothesisCheck,
    ProblemSpec,
    SpeedField,
    Verdict,
)

logger = logging.getLogger(__name__)

DEFAULT_C_GRID = (0.05, 0.1, 0.2, 0.3, 0.5)

# Stuetzstellen fuer die Abtastung von |H(p)|/(1+p).
_GROWTH_SAMPLES = 2001


def build_speed_field(u0: ScalarField, delta: float) -> SpeedField:
    """Geglaettetes Vorzeichen f = u0 / sqrt(u0^2 + delta^2).

    Raises:
        ConfigError: Fuer delta <= 0.
    """
    if not delta > 0.0:
        raise ConfigError("delta_range", delta=delta)
    values = u0.values / np.sqrt(u0.values * u0.values + delta * delta)
    fld = ScalarField(u0.grid, values)
    return SpeedField(
        values=fld,
        delta=float(delta),
        lipschitz_estimate=edge_lipschitz(fld),
        sup_bound=float(np.max(np.abs(values))),
    )


def edge_lipschitz(fld: ScalarField) -> float:
    """max |f(a) - f(b)| / |a - b|_2 ueber alle Gitterkanten."""
    grid = fld.grid
    arr = fld.array
    slopes = [
        float(np.max(np.abs(np.diff(arr, axis=grid.array_axis(a))))) / grid.spacing[a]
        for a in range(grid.dim)
    ]
    return max(slopes)


def build_problem(
    grid: GridSpec,
    generator: Callable[..., np.ndarray],
    delta: float,
    hamiltonian: Hamiltonian,
    norm: NormSpec,
) -> ProblemSpec:
    """Tastet u0 ab und baut das zugehoerige Problem mit f aus dem geglaetteten Vorzeichen."""
    u0 = sample_function(grid, generator)
    return ProblemSpec(
        u0=u0,
        speed=build_speed_field(u0, delta),
        hamiltonian=hamiltonian,
        norm=norm,
        generator=generator,
    )


def band_gradient_floor(u0: ScalarField, norm: NormSpec, width: float) -> float:
    """min ||grad u0|| auf {|u0| <= width}; +inf, wenn dort kein Knoten liegt."""
    grad = central_gradient_norm(u0, norm).values
    band = np.abs(u0.values) <= width
    if not np.any(band):
        return float("inf")
    return float(np.min(grad[band]))


def hamiltonian_root(hamiltonian: Hamiltonian, tol: float = 1e-14) -> float:
    """Nullstelle von H per Bisektion (H streng monoton, H(0) < 0)."""
    lo, hi = 0.0, 1.0
    while float(hamiltonian(hi)) < 0.0:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(hamiltonian(mid)) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return hi


def growth_constant(hamiltonian: Hamiltonian, cap: float) -> float:
    """max |H(p)| / (1 + p) auf [0, cap]."""
    if hamiltonian.has_linear_growth:
        return 1.0
    p = np.linspace(0.0, cap, _GROWTH_SAMPLES)
    return float(np.max(np.abs(hamiltonian(p)) / (1.0 + p)))


def derived_witness_scale(hamiltonian: Hamiltonian, slope_max: float) -> float | None:
    """c = min(1, root/(2*max ||grad u0||)); damit ist max H(c*||grad u0||) <= H(root/2) < 0."""
    if not slope_max > 0.0:
        return None
    return min(1.0, 0.5 * hamiltonian_root(hamiltonian) / slope_max)


def witness_search(
    problem: ProblemSpec,
    gradient: np.ndarray,
    c_grid: Sequence[float],
    derive: bool = True,
) -> tuple[float, float]:
    """Sucht (c, alpha) mit max H(c*||grad u0||) = alpha ueber D+ und D-.

    Zu den Kandidaten aus ``c_grid`` kommt mit ``derive`` zuletzt
    :func:`derived_witness_scale`, das fuer monotones H immer alpha < 0 liefert.
    Bei gleichem alpha gewinnt das zuerst genannte c.
    """
    if not c_grid:
        raise ConfigError("witness_grid_empty")
    off_gamma = problem.u0.values != 0.0
    slopes = gradient[off_gamma]
    for c in c_grid:
        if not 0.0 < c <= 1.0:
            raise ConfigError("witness_scale_range", c=c)
    candidates = [float(c) for c in c_grid]
    derived = derived_witness_scale(problem.hamiltonian, float(np.max(slopes))) if derive and slopes.size else None
    if derived is not None:
        candidates.append(derived)
    best_c, best_alpha = 0.0, float("inf")
    for c in candidates:
        alpha = float(np.max(problem.hamiltonian(c * slopes)))
        logger.debug("Zeuge c=%g: alpha=%.6g", c, alpha)
        if alpha < best_alpha:
            best_c, best_alpha = float(c), alpha
    return best_c, best_alpha


def audit_hypotheses(
    problem: ProblemSpec,
    band_width: float,
    c_grid: Sequence[float] = DEFAULT_C_GRID,
    derive_witness: bool = True,
) -> AuditReport:
    """Prueft die Voraussetzungen an f, u0 und H durch Abtastung.

    Args:
        problem: Die zu pruefende Instanz.
        band_width: Breite des Gamma-Bandes {|u0| <= band_width} fuer M.
        c_grid: Kandidaten fuer c in u~ = c*u0, jeweils in (0, 1].
        derive_witness: Zusaetzlich den aus max ||grad u0|| abgeleiteten
            Kandidaten pruefen (siehe :func:`derived_witness_scale`).

    Raises:
        NoInterfaceError: Wenn das Gamma-Band leer ist.
        ConfigError: Fuer band_width <= 0 oder ungueltige c-Werte.
    """
    if not band_width > 0.0:
        raise ConfigError("band_width_range", band_width=band_width)
    u0 = problem.u0
    gradient = central_gradient_norm(u0, problem.norm).values
    band = np.abs(u0.values) <= band_width
    if not np.any(band):
        raise NoInterfaceError(band_width=band_width)

    speed = problem.speed
    sign_violations = int(np.count_nonzero(np.sign(speed.values.values) != np.sign(u0.values)))
    m_hat = float(np.min(gradient[band]))
    c2_hat = float(np.max(gradient))
    cap = max(3.0 * c2_hat, 1.0)
    hamiltonian = problem.hamiltonian
    c3_hat = growth_constant(hamiltonian, cap)
    root = hamiltonian_root(hamiltonian)
    witness_c, witness_alpha = witness_search(problem, gradient, c_grid, derive_witness)

    checks = {
        "speed_lipschitz": HypothesisCheck(Verdict.PASS, {"L": speed.lipschitz_estimate}, "estimate"),
        "speed_bounded": HypothesisCheck(Verdict.PASS, {"C1": speed.sup_bound}, "estimate"),
        "sign_agreement": HypothesisCheck(
            Verdict.PASS if sign_violations == 0 else Verdict.FAIL,
            {"violations": sign_violations},
        ),
        "band_gradient": HypothesisCheck(
            Verdict.PASS if m_hat > 0.0 else Verdict.FAIL,
            {"M": m_hat, "band_width": band_width},
            "estimate",
        ),
        "gradient_bounded": HypothesisCheck(Verdict.PASS, {"C2": c2_hat}, "estimate"),
        "hamiltonian_continuous": HypothesisCheck(Verdict.PASS, {}, "by construction"),
        "hamiltonian_coercive": HypothesisCheck(Verdict.PASS, {}, "by construction"),
        "linear_growth": HypothesisCheck(
            Verdict.PASS if hamiltonian.has_linear_growth else Verdict.WARN,
            {"C3": c3_hat, "cap": cap},
            "" if hamiltonian.has_linear_growth else "no global linear growth",
        ),
        "subsolution_witness": HypothesisCheck(
            Verdict.PASS if witness_alpha < 0.0 else Verdict.WARN,
            {"c": witness_c, "alpha": witness_alpha},
        ),
        "unit_root": HypothesisCheck(
            Verdict.PASS if abs(root - 1.0) <= 1e-12 else Verdict.FAIL,
            {"root": root},
        ),
    }
    report = AuditReport(
        lipschitz_estimate=speed.lipschitz_estimate,
        sup_bound=speed.sup_bound,
        sign_violations=sign_violations,
        gradient_floor=m_hat,
        gradient_sup=c2_hat,
        growth_constant=c3_hat,
        root=root,
        witness_scale=witness_c,
        witness_alpha=witness_alpha,
        band_width=float(band_width),
        checks=checks,
    )
    for name in report.warnings:
        logger.warning("Hypothese %s nur mit Warnung: %s", name, checks[name].to_dict())
    logger.info(
        "Audit: M=%.4g C1=%.4g C2=%.4g alpha=%.4g (c=%g) -> %s",
        m_hat, speed.sup_bound, c2_hat, witness_alpha, witness_c,
        "ok" if report.passed else "nicht bestanden",
    )
    return report
