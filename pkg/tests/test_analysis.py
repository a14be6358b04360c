"""Tests fuer Fehlermasse, Drift, Gradientenstatistik, a-priori-Schranken und Studien."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hj_reinit.models.analysis import CompactMask
from hj_reinit.models.errors import ConfigError
from hj_reinit.models.grid import GridSpec, ScalarField, TimeSeries, sample_function
from hj_reinit.models.interface import DistanceField, InterfaceMesh
from hj_reinit.models.norms import NormSpec
from hj_reinit.models.problem import Hamiltonian, ProblemSpec
from hj_reinit.models.solve import SchemeSpec, SolveConfig, SolveResult
from hj_reinit.services.analysis import (
    apriori_checks,
    error_curve,
    gradient_unit_deviation,
    hausdorff_distance,
    interface_drift,
    linear_envelope_check,
    refinement_study,
    rescale_convergence,
    sup_error_on_compact,
)
from hj_reinit.services.audit import build_problem
from hj_reinit.services.oracle import extract_interface

ANNULUS = {"type": "annulus", "r_inner": 0.5, "r_outer": 1.5}


def _distance_problem(points: int = 41) -> ProblemSpec:
    return build_problem(
        GridSpec.uniform(-2.0, 2.0, points),
        lambda x, y: np.hypot(x, y) - 1.0,
        0.1,
        Hamiltonian.shifted_linear(),
        NormSpec.euclidean(),
    )


def _exact(problem: ProblemSpec) -> DistanceField:
    return DistanceField(problem.u0, NormSpec.euclidean(), extract_interface(problem.u0))


def _series(*snapshots: tuple[float, ScalarField]) -> SolveResult:
    return SolveResult(series=TimeSeries(tuple(snapshots)))


class TestSupError:
    def test_exact_field(self) -> None:
        problem = _distance_problem()
        mask = CompactMask.from_recipe(problem.grid, ANNULUS)
        report = sup_error_on_compact(problem.u0, _exact(problem), mask)
        assert report.sup_error == 0.0
        assert report.l1_error == 0.0

    def test_constant_offset(self) -> None:
        problem = _distance_problem()
        mask = CompactMask.from_recipe(problem.grid, ANNULUS)
        report = sup_error_on_compact(problem.u0 + 0.3, _exact(problem), mask, time=2.0)
        assert report.sup_error == pytest.approx(0.3, abs=1e-15)
        assert report.l1_error <= report.sup_error
        assert report.time == 2.0

    def test_location_of_maximum(self) -> None:
        problem = _distance_problem()
        grid = problem.grid
        mask = CompactMask.from_recipe(grid, ANNULUS)
        bumped = problem.u0.values.copy()
        node = grid.flat_index(30, 20)
        bumped[node] += 1.0
        report = sup_error_on_compact(ScalarField(grid, bumped), _exact(problem), mask)
        assert report.node_of_max == grid.coord_of(node)

    def test_empty_mask_rejected(self) -> None:
        problem = _distance_problem(21)
        empty = CompactMask(problem.grid, np.zeros(problem.grid.size, dtype=bool))
        with pytest.raises(ConfigError) as info:
            sup_error_on_compact(problem.u0, _exact(problem), empty)
        assert info.value.code == "empty_mask"

    def test_error_curve_per_snapshot(self) -> None:
        problem = _distance_problem()
        mask = CompactMask.from_recipe(problem.grid, ANNULUS)
        series = TimeSeries(((0.0, problem.u0 + 0.2), (1.0, problem.u0)))
        curve = error_curve(series, _exact(problem), mask)
        assert [t for t, _ in curve] == [0.0, 1.0]
        assert curve[0][1] == pytest.approx(0.2, abs=1e-15)
        assert curve[1][1] == 0.0


class TestCompactMask:
    def test_margin_below_five_cells_rejected(self) -> None:
        with pytest.raises(ConfigError) as info:
            CompactMask.from_recipe(GridSpec.uniform(-1.0, 1.0, 21), {"type": "box", "bounds": [[-1, 1], [-1, 1]], "margin_cells": 2})
        assert info.value.code == "mask_margin"

    def test_box_keeps_distance_to_boundary(self) -> None:
        grid = GridSpec.uniform(-1.0, 1.0, 21)
        mask = CompactMask.interior(grid)
        assert np.all(grid.boundary_distance().ravel()[mask.mask] >= 5 * grid.h - 1e-12)
        assert mask.count == 11 * 11

    def test_off_band_needs_u0(self) -> None:
        with pytest.raises(ConfigError) as info:
            CompactMask.from_recipe(GridSpec.uniform(-1.0, 1.0, 21), {"type": "off_band", "band_width": 0.1})
        assert info.value.code == "mask_needs_u0"

    def test_exclude_band(self) -> None:
        problem = _distance_problem()
        mask = CompactMask.from_recipe(problem.grid, {**ANNULUS, "exclude_band": 0.2}, problem.u0)
        assert np.all(np.abs(problem.u0.values[mask.mask]) > 0.2)

    def test_unknown_recipe_key(self) -> None:
        with pytest.raises(ConfigError) as info:
            CompactMask.from_recipe(GridSpec.uniform(-1.0, 1.0, 21), {"type": "annulus", "radius": 1.0})
        assert info.value.code == "unknown_key"


class TestInterfaceDrift:
    def test_reference_against_itself(self) -> None:
        mesh = extract_interface(_distance_problem().u0)
        assert hausdorff_distance(mesh, mesh) == 0.0

    def test_skewed_segment_against_itself_is_exact(self) -> None:
        mesh = InterfaceMesh(2, np.array([[[0.1, 0.3], [0.7, 1.9]], [[0.7, 1.9], [-1.3, 2.2]]]))
        assert hausdorff_distance(mesh, mesh) == 0.0

    def test_constant_series(self) -> None:
        problem = _distance_problem()
        reference = extract_interface(problem.u0)
        drift = interface_drift(TimeSeries(((0.0, problem.u0), (1.0, problem.u0))), reference)
        assert drift[0][1] == drift[1][1] <= problem.grid.h

    def test_translation_by_one_cell(self) -> None:
        grid = GridSpec.uniform(-1.0, 1.0, 41)
        u0 = sample_function(grid, lambda x, y: y)
        shifted = sample_function(grid, lambda x, y: y - grid.h)
        drift = interface_drift(TimeSeries(((0.0, u0), (1.0, shifted))), extract_interface(u0))
        assert drift[1][1] == pytest.approx(grid.h, abs=1e-12)

    def test_lost_sign_change_is_infinite(self) -> None:
        problem = _distance_problem(21)
        positive = ScalarField(problem.grid, np.abs(problem.u0.values) + 1.0)
        drift = interface_drift(TimeSeries(((0.0, problem.u0), (1.0, positive))), extract_interface(problem.u0))
        assert math.isinf(drift[1][1])


class TestGradientDeviation:
    def test_exact_distance(self) -> None:
        problem = _distance_problem(81)
        mask = CompactMask.from_recipe(problem.grid, ANNULUS)
        stats = gradient_unit_deviation(problem.u0, problem.norm, mask)
        assert stats.median <= 2.0 * problem.grid.h
        assert stats.nodes == mask.count

    def test_doubled_distance(self) -> None:
        problem = _distance_problem(81)
        mask = CompactMask.from_recipe(problem.grid, ANNULUS)
        stats = gradient_unit_deviation(2.0 * problem.u0, problem.norm, mask)
        assert stats.median == pytest.approx(1.0, abs=0.05)


class TestApriori:
    def test_stationary_series(self) -> None:
        problem = _distance_problem()
        result = _series((0.0, problem.u0), (1.0, problem.u0), (2.0, problem.u0))
        report = apriori_checks(
            result, problem.speed, 5.0, norm=problem.norm, hamiltonian=problem.hamiltonian
        )
        assert report.rate == 0.0
        assert report.gradient_violations == 0
        assert report.passed

    def test_constructed_rate(self) -> None:
        problem = _distance_problem()
        g = sample_function(problem.grid, lambda x, y: 0.3 * np.sin(x) * np.cos(y))
        result = _series(*((t, problem.u0 - t * g) for t in (0.0, 0.5, 1.0)))
        report = apriori_checks(
            result, problem.speed, 5.0, norm=problem.norm, hamiltonian=problem.hamiltonian
        )
        assert report.rate == pytest.approx(float(np.max(np.abs(g.values))), rel=1e-12)

    def test_boundedness_trace(self) -> None:
        problem = _distance_problem()
        mask = CompactMask.from_recipe(problem.grid, ANNULUS)
        result = _series((0.0, problem.u0), (1.0, 0.5 * problem.u0))
        report = apriori_checks(
            result, problem.speed, 5.0, norm=problem.norm, hamiltonian=problem.hamiltonian, mask=mask
        )
        first, second = (value for _, value in report.boundedness)
        assert second == pytest.approx(0.5 * first)

    def test_single_snapshot_rejected(self) -> None:
        problem = _distance_problem(21)
        with pytest.raises(ConfigError) as info:
            apriori_checks(
                _series((0.0, problem.u0)), problem.speed, 5.0, norm=problem.norm, hamiltonian=problem.hamiltonian
            )
        assert info.value.code == "snapshots_too_few"

    def test_linear_envelope(self) -> None:
        problem = _distance_problem()
        inside = _series((0.0, problem.u0), (1.0, problem.u0 + 0.5))
        report = linear_envelope_check(inside, problem.speed, problem.hamiltonian, 5.0, 0.0)
        assert report.passed
        outside = _series((0.0, problem.u0), (0.01, problem.u0 + 5.0))
        assert linear_envelope_check(outside, problem.speed, problem.hamiltonian, 5.0, 0.0).violations > 0


class TestRefinementStudy:
    def test_exact_distance_stays_accurate(self) -> None:
        rows = refinement_study(
            _distance_problem, [21, 41, 81], SchemeSpec.godunov(), SolveConfig(t_final=0.5), ANNULUS
        )
        assert [row.points for row in rows] == [21, 41, 81]
        for row in rows:
            assert row.sup_error is not None
            assert row.sup_error <= 5.0 * row.h
        assert rows[0].observed_order is None
        assert rows[1].observed_order is not None

    def test_requires_three_resolutions(self) -> None:
        with pytest.raises(ConfigError) as info:
            refinement_study(_distance_problem, [21, 41], SchemeSpec.godunov(), SolveConfig(t_final=0.1), ANNULUS)
        assert info.value.code == "refinement_resolutions"

    def test_resolutions_must_halve_h(self) -> None:
        with pytest.raises(ConfigError) as info:
            refinement_study(_distance_problem, [21, 31, 41], SchemeSpec.godunov(), SolveConfig(t_final=0.1), ANNULUS)
        assert info.value.code == "refinement_ratio"

    def test_failed_runs_become_notes(self) -> None:
        def no_interface(points: int) -> ProblemSpec:
            return build_problem(
                GridSpec.uniform(-1.0, 1.0, points),
                lambda x, y: x * x + 1.0,
                0.1,
                Hamiltonian.shifted_linear(),
                NormSpec.euclidean(),
            )

        rows = refinement_study(no_interface, [11, 21, 41], SchemeSpec.godunov(), SolveConfig(t_final=0.1), ANNULUS)
        assert all(row.note == "no_interface" for row in rows)
        assert all(row.sup_error is None for row in rows)


class TestRescaleConvergence:
    def _result(self, problem: ProblemSpec, steady: bool = False) -> SolveResult:
        snapshots = ((0.0, problem.u0 + 0.8), (1.0, problem.u0 + 0.4), (2.0, problem.u0 + 0.2), (4.0, problem.u0 + 0.1))
        return SolveResult(series=TimeSeries(snapshots), steady_reached=steady)

    def test_rows_follow_snapshots(self) -> None:
        problem = _distance_problem()
        mask = CompactMask.from_recipe(problem.grid, ANNULUS)
        rows = rescale_convergence(self._result(problem), _exact(problem), mask, [1.0, 0.5, 0.25])
        assert [row.used_time for row in rows] == [1.0, 2.0, 4.0]
        errors = [row.sup_error for row in rows]
        assert errors == pytest.approx([0.4, 0.2, 0.1], abs=1e-14)
        assert all(row.offset == 0.0 for row in rows)

    def test_beyond_horizon_names_needed_t_final(self) -> None:
        problem = _distance_problem()
        mask = CompactMask.from_recipe(problem.grid, ANNULUS)
        with pytest.raises(ConfigError) as info:
            rescale_convergence(self._result(problem), _exact(problem), mask, [0.125])
        assert info.value.code == "rescale_horizon"
        assert info.value.params["needed"] == 8.0

    def test_steady_state_covers_later_times(self) -> None:
        problem = _distance_problem()
        mask = CompactMask.from_recipe(problem.grid, ANNULUS)
        rows = rescale_convergence(self._result(problem, steady=True), _exact(problem), mask, [0.125])
        assert rows[0].used_time == 4.0
        assert rows[0].offset == 4.0
