"""Tests fuer Hamiltonian, Geschwindigkeitsfeld und die Hypothesenpruefung."""

from __future__ import annotations

import numpy as np
import pytest
from conftest import circle_problem

from hj_reinit.models.errors import ConfigError, NoInterfaceError
from hj_reinit.models.grid import GridSpec, ScalarField, central_gradient_norm, sample_function
from hj_reinit.models.norms import NormSpec
from hj_reinit.models.problem import Hamiltonian, Verdict, hamiltonian_eval
from hj_reinit.models.settings import ExperimentConfig
from hj_reinit.services.audit import (
    audit_hypotheses,
    build_problem,
    build_speed_field,
    derived_witness_scale,
    hamiltonian_root,
)
from hj_reinit.services.pipeline import run_audit


class TestHamiltonian:
    def test_root_is_one(self) -> None:
        assert hamiltonian_eval(Hamiltonian.shifted_linear(), 1.0) == 0.0
        assert hamiltonian_eval(Hamiltonian.shifted_power(3.0), 1.0) == 0.0

    def test_values(self) -> None:
        assert hamiltonian_eval(Hamiltonian.shifted_linear(), 0.0) == -1.0
        assert hamiltonian_eval(Hamiltonian.shifted_power(2.0), 3.0) == 8.0

    def test_negative_argument_rejected(self) -> None:
        with pytest.raises(ConfigError) as info:
            hamiltonian_eval(Hamiltonian.shifted_linear(), -0.1)
        assert info.value.code == "hamiltonian_negative_argument"

    def test_strictly_increasing(self) -> None:
        p = np.linspace(0.0, 10.0, 1001)
        for hamiltonian in (Hamiltonian.shifted_linear(), Hamiltonian.shifted_power(2.5)):
            assert np.all(np.diff(hamiltonian(p)) > 0.0)

    def test_exponent_below_one_rejected(self) -> None:
        with pytest.raises(ConfigError):
            Hamiltonian.shifted_power(0.5)

    def test_max_slope(self) -> None:
        assert Hamiltonian.shifted_linear().max_slope(100.0) == 1.0
        assert Hamiltonian.shifted_power(2.0).max_slope(3.0) == 6.0

    def test_from_dict_round_trip(self) -> None:
        data = {"type": "shifted_power", "m": 2.0}
        assert Hamiltonian.from_dict(data).to_dict() == data

    def test_root_by_bisection(self) -> None:
        assert hamiltonian_root(Hamiltonian.shifted_power(2.0)) == pytest.approx(1.0, abs=1e-12)


class TestSpeedField:
    def _field(self, values: list[float]) -> ScalarField:
        return ScalarField(GridSpec.uniform(0.0, 1.0, len(values), dim=1), np.array(values))

    def test_zero_preserved(self) -> None:
        speed = build_speed_field(self._field([-1.0, 0.0, 1.0]), 0.1)
        assert speed.values.values[1] == 0.0

    def test_regularized_sign_formula(self) -> None:
        speed = build_speed_field(self._field([3.0, -3.0, 0.0]), 4.0)
        assert speed.values.values[0] == pytest.approx(0.6, abs=1e-15)
        assert speed.values.values[1] == pytest.approx(-0.6, abs=1e-15)

    def test_limit_is_sign(self) -> None:
        speed = build_speed_field(self._field([-2.0, -0.5, 0.5, 2.0]), 1e-9)
        assert np.allclose(speed.values.values, [-1.0, -1.0, 1.0, 1.0], atol=1e-8)

    def test_delta_must_be_positive(self) -> None:
        with pytest.raises(ConfigError) as info:
            build_speed_field(self._field([0.0, 1.0, 2.0]), 0.0)
        assert info.value.code == "delta_range"

    def test_strictly_below_one(self, small_circle) -> None:
        f = small_circle.f.values
        assert np.all(np.abs(f) < 1.0)
        assert small_circle.speed.sup_bound < 1.0

    def test_lipschitz_chain_rule_bound(self, small_circle) -> None:
        c2 = float(np.max(central_gradient_norm(small_circle.u0, small_circle.norm).values))
        assert small_circle.speed.lipschitz_estimate <= 1.01 * c2 / small_circle.speed.delta

    def test_sign_agreement(self, small_circle) -> None:
        assert np.array_equal(np.sign(small_circle.f.values), np.sign(small_circle.u0.values))


class TestProblemSpec:
    def test_single_signed_u0_has_no_interface(self) -> None:
        with pytest.raises(NoInterfaceError) as info:
            build_problem(
                GridSpec.uniform(-1.0, 1.0, 11),
                lambda x, y: x * x + y * y + 1.0,
                0.1,
                Hamiltonian.shifted_linear(),
                NormSpec.euclidean(),
            )
        assert info.value.message == "no interface in domain"
        assert info.value.exit_code == 2

    def test_norm_dimension_must_match(self) -> None:
        with pytest.raises(ConfigError) as info:
            build_problem(
                GridSpec.uniform(-1.0, 1.0, 11, dim=1),
                lambda x: x,
                0.1,
                Hamiltonian.shifted_linear(),
                NormSpec.euclidean(),
            )
        assert info.value.code == "dimension_mismatch"


class TestAudit:
    def test_circle_gradient_floor(self) -> None:
        problem = circle_problem(points=201)
        report = audit_hypotheses(problem, 0.2, [0.05, 0.1, 0.2])
        assert report.gradient_floor >= 1.6
        assert report.sign_violations == 0
        assert report.passed

    def test_witness_search_picks_smallest_alpha(self) -> None:
        problem = circle_problem(points=201)
        report = audit_hypotheses(problem, 0.2, [0.05, 0.1, 0.2])
        assert report.witness_scale == 0.05
        assert report.witness_alpha == pytest.approx(0.05 * report.gradient_sup - 1.0, abs=1e-12)
        assert report.checks["subsolution_witness"].verdict is Verdict.PASS

    def test_steep_corners_fall_back_to_derived_scale(self) -> None:
        """Mit max ||grad u0|| > 20 reicht c = 0.05 nicht mehr."""
        grid = GridSpec.uniform(-2.5, 2.5, 101)
        problem = build_problem(
            grid, lambda x, y: 4.0 * (x * x + y * y - 1.0), 0.1, Hamiltonian.shifted_linear(), NormSpec.euclidean()
        )
        report = audit_hypotheses(problem, 0.2, [0.05, 0.1])
        assert 0.05 * report.gradient_sup > 1.0
        assert report.witness_scale == pytest.approx(0.5 / report.gradient_sup)
        assert report.witness_alpha == pytest.approx(-0.5, abs=1e-12)
        assert report.passed

    def test_derived_scale_is_capped_at_one(self) -> None:
        assert derived_witness_scale(Hamiltonian.shifted_linear(), 0.25) == 1.0
        assert derived_witness_scale(Hamiltonian.shifted_linear(), 0.0) is None

    def test_bundled_circle_audit_passes(self) -> None:
        report, audit = run_audit(ExperimentConfig.bundled("circle"))
        assert audit.passed
        assert report["acceptance"]["audit"] is True
        assert all(check["verdict"] == "pass" for check in report["audit"]["hypotheses"].values())

    def test_witness_scale_out_of_range(self, small_circle) -> None:
        with pytest.raises(ConfigError) as info:
            audit_hypotheses(small_circle, 0.2, [1.5])
        assert info.value.code == "witness_scale_range"

    def test_no_negative_alpha_is_a_warning(self, small_circle) -> None:
        report = audit_hypotheses(small_circle, 0.2, [1.0], derive_witness=False)
        assert report.witness_alpha >= 0.0
        assert report.checks["subsolution_witness"].verdict is Verdict.WARN
        assert not report.passed

    def test_linear_growth_passes(self, small_circle) -> None:
        report = audit_hypotheses(small_circle, 0.2)
        assert report.checks["linear_growth"].verdict is Verdict.PASS
        assert report.growth_constant == 1.0
        assert report.checks["hamiltonian_continuous"].note == "by construction"

    def test_power_hamiltonian_warns_on_growth(self) -> None:
        base = circle_problem()
        problem = build_problem(base.grid, base.generator, 0.1, Hamiltonian.shifted_power(2.0), base.norm)
        report = audit_hypotheses(problem, 0.2)
        assert report.checks["linear_growth"].verdict is Verdict.WARN
        assert "linear_growth" in report.warnings

    def test_empty_band_rejected(self) -> None:
        grid = GridSpec.uniform(-1.0, 1.0, 5)
        problem = build_problem(grid, lambda x, y: x + 0.05, 0.1, Hamiltonian.shifted_linear(), NormSpec.euclidean())
        with pytest.raises(NoInterfaceError) as info:
            audit_hypotheses(problem, 0.01)
        assert info.value.code == "no_interface"

    def test_deterministic(self, small_circle) -> None:
        first = audit_hypotheses(small_circle, 0.2).to_dict()
        second = audit_hypotheses(small_circle, 0.2).to_dict()
        assert first == second

    def test_sampled_field_from_expression(self) -> None:
        grid = GridSpec.uniform(-2.0, 2.0, 41)
        u0 = sample_function(grid, lambda x, y: x * x + y * y - 1.0)
        problem = circle_problem(points=41)
        assert problem.u0.equals(u0)
