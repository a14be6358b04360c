"""Pipeline-Tests auf groben Gittern: kompletter Ablauf inkl. Barrieren und Abnahme."""

from __future__ import annotations

from pathlib import Path

import pytest

from hj_reinit.models.errors import AcceptanceError
from hj_reinit.models.settings import ExperimentConfig
from hj_reinit.services import pipeline


def _coarse_circle(**analysis: object) -> ExperimentConfig:
    """x^2 + y^2 - 1 auf [-2, 2]^2 mit 41^2 Knoten (h = 0.1)."""
    return ExperimentConfig.from_dict(
        {
            "name": "coarse_circle",
            "problem": {"u0": "x^2 + y^2 - 1", "delta": 0.1},
            "grid": {"bounds": [[-2.0, 2.0], [-2.0, 2.0]], "points": 41},
            "run": {"t_final": 2.0, "snapshot_stride": 5},
            "analysis": {
                "mask": {"type": "annulus", "r_inner": 0.5, "r_outer": 1.4},
                "certificate_pairs": 500,
                **analysis,
            },
        }
    )


@pytest.fixture(scope="module")
def coarse_report(tmp_path_factory: pytest.TempPathFactory) -> dict:
    return pipeline.run_experiment(_coarse_circle(), tmp_path_factory.mktemp("coarse"))


class TestRunExperiment:
    def test_every_computed_check_passes(self, coarse_report: dict) -> None:
        acceptance = coarse_report["acceptance"]
        assert set(acceptance) == {"audit", "sup_error", "drift", "sandwich", "apriori"}
        assert all(acceptance.values()), acceptance
        pipeline.enforce(coarse_report)

    def test_barriers_come_from_the_audit(self, coarse_report: dict) -> None:
        barriers = coarse_report["barriers"]
        parameters = barriers["parameters"]
        assert parameters["c"] == pytest.approx(coarse_report["audit"]["hypotheses"]["subsolution_witness"]["values"]["c"])
        assert parameters["k1"] >= 1.0
        assert barriers["sandwich"]["violations"] == 0
        assert barriers["sandwich"]["tolerance"] == pytest.approx(0.5)

    def test_solve_reaches_t_final(self, coarse_report: dict) -> None:
        solve = coarse_report["solve"]
        assert solve["steady_reached"] or solve["final_time"] == pytest.approx(2.0)
        assert solve["final_time"] <= 2.0 + 1e-12
        assert coarse_report["error"]["sup_error"] <= 5.0 * 0.1

    def test_enforce_reports_failed_checks(self, tmp_path: Path) -> None:
        report = pipeline.run_experiment(_coarse_circle(sup_error_cells=1e-9, checks=["sup_error"]), tmp_path)
        with pytest.raises(AcceptanceError) as info:
            pipeline.enforce(report)
        assert info.value.params["checks"] == "sup_error"
        assert info.value.exit_code == 4
