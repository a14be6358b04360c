"""CLI-Tests: Unterbefehle, Exit-Codes, Fehlerobjekt auf stderr, Berichtsdateien."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from hj_reinit.__main__ import main
from hj_reinit.services import pipeline


def _small_config(tmp_path: Path, **analysis: object) -> Path:
    """Kleiner Kreis (41^2), damit der komplette Lauf in Sekunden bleibt."""
    data = {
        "name": "small_circle",
        "problem": {"u0": "x^2 + y^2 - 1", "delta": 0.1},
        "grid": {"bounds": [[-2.0, 2.0], [-2.0, 2.0]], "points": 41},
        "run": {"t_final": 1.0, "snapshot_stride": 5},
        "analysis": {"mask": {"type": "annulus", "r_inner": 0.5, "r_outer": 1.4}, "certificate_pairs": 500, **analysis},
    }
    path = tmp_path / "small.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def _stderr_error(err: str) -> dict:
    line = next(line for line in err.splitlines() if line.startswith('{"error"'))
    return json.loads(line)["error"]


class TestAudit:
    def test_bundled_circle(self, output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["audit", "--config", "circle", "--output-dir", str(output_dir)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["command"] == "audit"
        assert report["acceptance"] == {"audit": True}
        assert (output_dir / "report_audit.json").is_file()

    def test_report_file_matches_stdout(self, output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        main(["audit", "--config", "line", "--output-dir", str(output_dir)])
        out = capsys.readouterr().out
        assert (output_dir / "report_audit.json").read_text(encoding="utf-8") == out


class TestErrors:
    def test_no_interface_exits_2(self, output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        code = main(["run", "--config", "no_interface", "--check", "--output-dir", str(output_dir)])
        assert code == 2
        err = capsys.readouterr().err
        assert "no interface in domain" in err
        assert _stderr_error(err)["code"] == "no_interface"

    def test_german_message(self, output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["--lang", "de", "audit", "--config", "no_interface", "--output-dir", str(output_dir)]) == 2
        assert "kein Interface im Gebiet" in capsys.readouterr().err

    def test_missing_config(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["audit", "--config", str(tmp_path / "absent.json")]) == 2
        assert _stderr_error(capsys.readouterr().err)["code"] == "config_missing"

    def test_unknown_key(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / "typo.json"
        path.write_text('{"run": {"tfinal": 1}}', encoding="utf-8")
        assert main(["audit", "--config", str(path)]) == 2
        error = _stderr_error(capsys.readouterr().err)
        assert error["code"] == "unknown_key"
        assert error["params"]["key"] == "run.tfinal"

    def test_failed_acceptance_exits_4(self, tmp_path: Path, output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        config = _small_config(tmp_path, sup_error_cells=1e-9, checks=["sup_error"])
        assert main(["run", "--config", str(config), "--check", "--output-dir", str(output_dir)]) == 4
        error = _stderr_error(capsys.readouterr().err)
        assert error["code"] == "acceptance_failed"
        assert "sup_error" in error["params"]["checks"]

    def test_unwritable_output_dir(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        assert main(["audit", "--config", "line", "--output-dir", str(blocker)]) == 2
        error = _stderr_error(capsys.readouterr().err)
        assert error["code"] == "io_error"

    def test_unexpected_exception_becomes_json(
        self, output_dir: Path, capsys: pytest.CaptureFixture[str], monkeypatch: pytest.MonkeyPatch
    ) -> None:
        def broken(config: object) -> None:
            raise RuntimeError("kaputt")

        monkeypatch.setattr(pipeline, "run_audit", broken)
        assert main(["audit", "--config", "line", "--output-dir", str(output_dir)]) == 1
        error = _stderr_error(capsys.readouterr().err)
        assert error["code"] == "internal"
        assert error["params"] == {"detail": "kaputt", "kind": "RuntimeError"}

    def test_version(self, capsys: pytest.CaptureFixture[str]) -> None:
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        assert "hj-reinit" in capsys.readouterr().out


class TestOracle:
    def test_line_disagreement(self, output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["oracle", "--config", "line", "--output-dir", str(output_dir)]) == 0
        report = json.loads(capsys.readouterr().out)
        h = report["grid"]["spacing"][0]
        assert report["oracle"]["max_disagreement"] <= 2.0 * h
        for name in report["files"]:
            assert (output_dir / name).is_file()


class TestRun:
    def test_small_run_writes_files(self, tmp_path: Path, output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        config = _small_config(tmp_path)
        assert main(["run", "--config", str(config), "--output-dir", str(output_dir)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["command"] == "run"
        assert {"u_final.csv", "error_curve.csv", "interface.csv"} <= set(report["files"])
        assert report["solve"]["final_time"] == pytest.approx(1.0)
        assert (output_dir / "report_run.json").is_file()

    def test_seed_override_is_reported(self, tmp_path: Path, output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        config = _small_config(tmp_path)
        assert main(["oracle", "--config", str(config), "--seed", "7", "--output-dir", str(output_dir)]) == 0
        assert json.loads(capsys.readouterr().out)["config"]["seed"] == 7

    def test_reports_are_reproducible(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        config = _small_config(tmp_path)
        first_dir, second_dir = tmp_path / "a", tmp_path / "b"
        main(["oracle", "--config", str(config), "--output-dir", str(first_dir)])
        main(["oracle", "--config", str(config), "--output-dir", str(second_dir)])
        capsys.readouterr()
        first = json.loads((first_dir / "report_oracle.json").read_text(encoding="utf-8"))
        second = json.loads((second_dir / "report_oracle.json").read_text(encoding="utf-8"))
        first["config"]["outputs"] = second["config"]["outputs"] = None
        assert first == second
