"""Zeitschritt-Loeser fuer u_t + f(x) H(||grad u||) = 0.

Zwei monotone numerische Hamiltonians: Godunov/Rouy-Tourin (achsweise
Aufwindung, nur fuer separierbare Normen) und Lax-Friedrichs (beliebige Norm,
optional interface-erhaltend). Zeitintegration explizit mit Euler oder TVD-RK2
unter CFL-Bedingung.

Steigungsgrenze: Die Lipschitz-Konstante von H haengt fuer p^m - 1 von der
erwarteten Gradientennorm ab. Ueberschreitet die laufende Steigung die
Grenze, wird sie verdoppelt, der Operator samt dt neu aufgebaut und der
Schritt wiederholt.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from ..models.errors import ConfigError, NumericalError
from ..models.grid import (
    GridSpec,
    ScalarField,
    TimeSeries,
    central_gradient_norm,
    one_sided_arrays,
)
from ..models.norms import NormSpec
from ..models.problem import AuditReport, Hamiltonian, ProblemSpec
from ..models.solve import Integrator, SchemeKind, SchemeSpec, SolveConfig, SolveResult

logger = logging.getLogger(__name__)

MAX_RESTARTS = 60


# -- Operatoren auf Feldebene ----------------------------------------------


def godunov_gradient(
    dminus: Sequence[np.ndarray], dplus: Sequence[np.ndarray], sign: np.ndarray
) -> list[np.ndarray]:
    """Aufgewindete Betraege g_a pro Achse (Rouy-Tourin)."""
    result = []
    for dm, dp in zip(dminus, dplus, strict=True):
        forward = np.maximum(np.maximum(dm, 0.0), -np.minimum(dp, 0.0))
        backward = np.maximum(-np.minimum(dm, 0.0), np.maximum(dp, 0.0))
        result.append(np.where(sign > 0.0, forward, np.where(sign < 0.0, backward, 0.0)))
    return result


def upwind_grad_norm(
    dminus: Sequence[ScalarField],
    dplus: Sequence[ScalarField],
    speed_sign: ScalarField,
    norm: NormSpec,
) -> ScalarField:
    """||(g_x, g_y)|| mit der Godunov-Auswahl der einseitigen Differenzen.

    Raises:
        ConfigError: Fuer nicht separierbare Normen (dann lax_friedrichs verwenden).
    """
    if not norm.is_axis_separable():
        raise ConfigError("godunov_norm", norm=norm.label)
    g = godunov_gradient([d.values for d in dminus], [d.values for d in dplus], speed_sign.values)
    return ScalarField(speed_sign.grid, norm.evaluate(np.stack(g, axis=-1)))


def lf_numerical_hamiltonian(
    dminus: Sequence[ScalarField],
    dplus: Sequence[ScalarField],
    f: ScalarField,
    hamiltonian: Hamiltonian,
    norm: NormSpec,
    dissipation: Sequence[float],
    preserve_interface: bool = True,
    f_ref: float | None = None,
) -> ScalarField:
    """Lax-Friedrichs-Fluss f*H(||avg||) - sum_a sigma_a (D+_a - D-_a) / 2.

    Mit ``preserve_interface`` wird sigma_a knotenweise mit min(1, |f|/f_ref)
    multipliziert; ohne ``f_ref`` gilt f_ref = max|f|.
    """
    ref = float(np.max(np.abs(f.values))) if f_ref is None else f_ref
    scale = _interface_scale(f.values, ref) if preserve_interface else None
    flux = _lf_flux(
        [d.values for d in dminus], [d.values for d in dplus], f.values,
        hamiltonian, norm, np.asarray(dissipation, dtype=np.float64), scale,
    )[0]
    return ScalarField(f.grid, flux)


def _interface_scale(f: np.ndarray, f_ref: float) -> np.ndarray:
    if f_ref <= 0.0:
        return np.ones_like(f)
    return np.minimum(1.0, np.abs(f) / f_ref)


def _lf_flux(
    dminus: Sequence[np.ndarray],
    dplus: Sequence[np.ndarray],
    f: np.ndarray,
    hamiltonian: Hamiltonian,
    norm: NormSpec,
    sigma: np.ndarray,
    scale: np.ndarray | None,
) -> tuple[np.ndarray, float]:
    avg = np.stack([0.5 * (dm + dp) for dm, dp in zip(dminus, dplus, strict=True)], axis=-1)
    slope = norm.evaluate(avg)
    flux = f * hamiltonian(slope)
    for a, (dm, dp) in enumerate(zip(dminus, dplus, strict=True)):
        diffusion = sigma[a] * 0.5 * (dp - dm)
        flux = flux - (diffusion if scale is None else scale * diffusion)
    return flux, float(np.max(slope))


def lf_dissipation_estimate(problem: ProblemSpec, slope_cap: float) -> np.ndarray:
    """sigma_a = C1 * Lambda * ||e_a||."""
    bound = problem.speed.sup_bound * problem.hamiltonian.max_slope(slope_cap)
    return bound * problem.norm.axis_norms()


def interface_reference(problem: ProblemSpec) -> float:
    """f_ref = Median von |f| auf {|u0| > delta}; ohne solche Knoten max|f|."""
    f = np.abs(problem.f.values)
    off_band = np.abs(problem.u0.values) > problem.speed.delta
    if not np.any(off_band):
        return float(np.max(f))
    return float(np.median(f[off_band]))


def default_slope_cap(problem: ProblemSpec) -> float:
    """3 * C2 (mindestens 1)."""
    return max(3.0 * float(np.max(central_gradient_norm(problem.u0, problem.norm).values)), 1.0)


def cfl_timestep(problem: ProblemSpec, scheme: SchemeSpec, grid: GridSpec, slope_cap: float) -> float:
    """dt = cfl * h / (C1 * Lambda * sum_a ||e_a||); fuer LF zusaetzlich <= cfl * h / sum sigma_a.

    Fuer p-Normen ist sum_a ||e_a|| = n.
    """
    if not slope_cap > 0.0:
        raise ConfigError("slope_cap_range", slope_cap=slope_cap)
    h = min(grid.spacing)
    rate = problem.speed.sup_bound * problem.hamiltonian.max_slope(slope_cap)
    rate *= float(np.sum(problem.norm.axis_norms()))
    dt = scheme.cfl * h / rate if rate > 0.0 else np.inf
    if scheme.kind is SchemeKind.LAX_FRIEDRICHS:
        sigma = (
            np.asarray(scheme.lf_dissipation)
            if scheme.lf_dissipation is not None
            else lf_dissipation_estimate(problem, slope_cap)
        )
        total = float(np.sum(sigma))
        if total > 0.0:
            dt = min(dt, scheme.cfl * h / total)
    if not np.isfinite(dt):
        raise ConfigError("cfl_degenerate")
    return float(dt)


class NumericalHamiltonian:
    """Der raeumliche Operator L(u) eines Schemas, inklusive zugehoerigem dt.

    Attributes:
        dt: CFL-Zeitschritt fuer diese Steigungsgrenze.
        slope_cap: Steigungsgrenze, fuer die Lambda und sigma gelten.
        last_slope: Groesste Gradientennorm, die beim letzten Aufruf in H einging.
    """

    def __init__(self, problem: ProblemSpec, scheme: SchemeSpec, slope_cap: float) -> None:
        scheme.validate_for(problem.norm)
        self.problem = problem
        self.scheme = scheme
        self.slope_cap = float(slope_cap)
        grid = problem.grid
        self._axes = [(grid.array_axis(a), grid.spacing[a]) for a in range(grid.dim)]
        self.f = problem.f.array
        self.sign = np.sign(self.f)
        self.lipschitz = problem.hamiltonian.max_slope(slope_cap)
        self.sigma: np.ndarray | None = None
        self.scale: np.ndarray | None = None
        if scheme.kind is SchemeKind.LAX_FRIEDRICHS:
            self.sigma = (
                np.asarray(scheme.lf_dissipation)
                if scheme.lf_dissipation is not None
                else lf_dissipation_estimate(problem, slope_cap)
            )
            if scheme.preserve_interface:
                self.scale = _interface_scale(self.f, interface_reference(problem))
        self.dt = cfl_timestep(problem, scheme, grid, slope_cap)
        self.last_slope = 0.0

    def differences(self, u: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
        pairs = [one_sided_arrays(u, axis, h) for axis, h in self._axes]
        return [dm for dm, _ in pairs], [dp for _, dp in pairs]

    def __call__(self, u: np.ndarray) -> np.ndarray:
        dminus, dplus = self.differences(u)
        if self.sigma is None:
            g = np.stack(godunov_gradient(dminus, dplus, self.sign), axis=-1)
            slope = self.problem.norm.evaluate(g)
            self.last_slope = float(np.max(slope))
            return self.f * self.problem.hamiltonian(slope)
        flux, self.last_slope = _lf_flux(
            dminus, dplus, self.f, self.problem.hamiltonian, self.problem.norm, self.sigma, self.scale
        )
        return flux

    def euler_step(self, u: np.ndarray, dt: float | None = None) -> np.ndarray:
        """u - dt * L(u)."""
        return u - (self.dt if dt is None else dt) * self(u)

    def slope_exceeded(self) -> bool:
        """Liegt die Steigung von H an der laufenden Gradientennorm ueber Lambda?"""
        return self.problem.hamiltonian.max_slope(self.last_slope) > self.lipschitz


# -- Zeitschleife -----------------------------------------------------------


def _advance(op: NumericalHamiltonian, u: np.ndarray, dt: float, integrator: Integrator) -> tuple[np.ndarray, float]:
    with np.errstate(over="ignore", invalid="ignore"):
        stage = op.euler_step(u, dt)
        slope = op.last_slope
        if integrator is Integrator.EULER:
            return stage, slope
        second = op.euler_step(stage, dt)
        slope = max(slope, op.last_slope)
        return 0.5 * u + 0.5 * second, slope


def solve(
    problem: ProblemSpec,
    grid: GridSpec,
    scheme: SchemeSpec,
    config: SolveConfig,
    *,
    audit: AuditReport | None = None,
    force: bool = False,
    initial: ScalarField | None = None,
) -> SolveResult:
    """Zeitschritte von u0 (bzw. ``initial``) bis t_final oder Stationaritaet.

    Args:
        problem: Instanz; f, H und Norm bestimmen den Operator.
        grid: Muss das Gitter des Problems sein.
        scheme: Godunov oder Lax-Friedrichs.
        config: t_final, Residuum-Toleranz, Schnappschussabstand, Integrator.
        audit: Optionaler Audit-Bericht; nicht bestanden -> Abbruch.
        force: Laeuft trotz nicht bestandenem Audit (mit Warnung).
        initial: Abweichende Anfangsdaten bei gleichem Operator.

    Raises:
        ConfigError: Gitter passt nicht, Audit nicht bestanden, ungueltiges Schema.
        NumericalError: NaN/Inf im Zustand (mit Schrittnummer und Knoten).
    """
    if grid != problem.grid:
        raise ConfigError("grid_mismatch")
    if audit is not None and not audit.passed:
        if not force:
            raise ConfigError("audit_failed")
        logger.warning("Audit nicht bestanden - Lauf wird trotzdem gestartet")
    start = problem.u0 if initial is None else initial
    if start.grid != grid:
        raise ConfigError("grid_mismatch")

    slope_cap = config.slope_cap if config.slope_cap is not None else default_slope_cap(problem)
    op = NumericalHamiltonian(problem, scheme, slope_cap)
    logger.info(
        "Loeser: %s/%s, dt=%.4g, Steigungsgrenze=%.4g, t_final=%g",
        scheme.kind.value, config.integrator.value, op.dt, slope_cap, config.t_final,
    )

    u = start.array.copy()
    snapshots: list[tuple[float, ScalarField]] = [(0.0, start)]
    history: list[tuple[float, float]] = []
    time = 0.0
    step = 0
    restarts = 0
    steady = False
    last_saved = 0

    while time < config.t_final:
        remaining = config.t_final - time
        dt = min(op.dt, remaining)
        new, _ = _advance(op, u, dt, config.integrator)
        bad = ~np.isfinite(new)
        if np.any(bad):
            node = grid.coord_of(int(np.flatnonzero(bad.ravel())[0]))
            raise NumericalError("non_finite_state", step=step + 1, node=node)
        if op.slope_exceeded():
            restarts += 1
            if restarts > MAX_RESTARTS:
                raise NumericalError("slope_cap_runaway", step=step + 1, slope=op.last_slope)
            while problem.hamiltonian.max_slope(op.last_slope) > problem.hamiltonian.max_slope(slope_cap):
                slope_cap *= 2.0
            logger.info("Schritt %d: Steigung %.4g > Grenze, neue Grenze %.4g", step + 1, op.last_slope, slope_cap)
            op = NumericalHamiltonian(problem, scheme, slope_cap)
            continue

        rate = float(np.max(np.abs(new - u))) / dt
        time = config.t_final if dt == remaining else time + dt
        step += 1
        u = new
        history.append((time, rate))
        if step % config.snapshot_stride == 0:
            snapshots.append((time, ScalarField.from_array(grid, u)))
            last_saved = step
        if rate < config.residual_tol:
            steady = True
            logger.info("Stationaer nach %d Schritten (t=%.4g, Residuum %.3g)", step, time, rate)
            break
        if step % 100 == 0:
            logger.debug("Schritt %d: t=%.4g Residuum=%.4g", step, time, rate)

    if last_saved != step:
        snapshots.append((time, ScalarField.from_array(grid, u)))

    return SolveResult(
        series=TimeSeries(tuple(snapshots)),
        residual_history=history,
        steady_reached=steady,
        dt_used=op.dt,
        steps=step,
        slope_cap=slope_cap,
        restarts=restarts,
    )


def rescaled_solve(
    problem: ProblemSpec,
    grid: GridSpec,
    scheme: SchemeSpec,
    config: SolveConfig,
    epsilon: float,
    **kwargs: object,
) -> SolveResult:
    """u^eps(x, t) = u(x, t/eps) auf [0, t_final].

    Geloest wird einmal bis t_final/eps, danach werden alle Zeiten mit eps
    multipliziert.

    Raises:
        ConfigError: Fuer epsilon <= 0.
    """
    if not epsilon > 0.0:
        raise ConfigError("epsilon_range", epsilon=epsilon)
    if epsilon == 1.0:
        return solve(problem, grid, scheme, config, **kwargs)  # type: ignore[arg-type]
    stretched = SolveConfig(
        t_final=config.t_final / epsilon,
        residual_tol=config.residual_tol,
        snapshot_stride=config.snapshot_stride,
        integrator=config.integrator,
        slope_cap=config.slope_cap,
    )
    return solve(problem, grid, scheme, stretched, **kwargs).retimed(epsilon)  # type: ignore[arg-type]
