"""Tests fuer Feld-CSV, Mesh-/Kurven-Export und kanonische JSON-Berichte."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from hj_reinit.models.errors import ConfigError
from hj_reinit.models.grid import GridSpec, ScalarField, sample_function
from hj_reinit.models.interface import InterfaceMesh
from hj_reinit.services.reporter import Reporter, format_value, read_field_csv, write_field_csv


class TestFieldCsv:
    def test_round_trip_is_bitwise(self, tmp_path: Path, rng: np.random.Generator) -> None:
        grid = GridSpec(bounds=((-1.0, 2.0), (0.0, 0.3)), points_per_axis=(7, 5))
        fld = ScalarField(grid, rng.normal(size=grid.size) * 10.0 ** rng.integers(-12, 12, grid.size))
        back = read_field_csv(write_field_csv(fld, tmp_path / "u.csv"))
        assert back.equals(fld)

    def test_one_dimensional_layout(self, tmp_path: Path) -> None:
        fld = sample_function(GridSpec.uniform(0.0, 1.0, 3, dim=1), lambda x: x)
        lines = Path(write_field_csv(fld, tmp_path / "u.csv")).read_text(encoding="utf-8").splitlines()
        assert lines == ["# 1,3,0,1", "0,0.5,1"]

    def test_rows_are_y_lines(self, tmp_path: Path) -> None:
        grid = GridSpec(bounds=((0.0, 1.0), (0.0, 2.0)), points_per_axis=(3, 3))
        fld = sample_function(grid, lambda x, y: x + 10.0 * y)
        lines = Path(write_field_csv(fld, tmp_path / "u.csv")).read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# 2,3,3,0,1,0,2"
        assert lines[1:] == ["0,0.5,1", "10,10.5,11", "20,20.5,21"]

    def test_missing_value_names_the_line(self, tmp_path: Path) -> None:
        path = tmp_path / "u.csv"
        path.write_text("# 2,3,3,0,1,0,1\n0,1,2\n3,4\n6,7,8\n", encoding="utf-8")
        with pytest.raises(ConfigError) as info:
            read_field_csv(path)
        assert info.value.code == "csv_row_length"
        assert info.value.params["line"] == 3

    def test_bad_number(self, tmp_path: Path) -> None:
        path = tmp_path / "u.csv"
        path.write_text("# 1,3,0,1\n0,abc,1\n", encoding="utf-8")
        with pytest.raises(ConfigError) as info:
            read_field_csv(path)
        assert info.value.code == "csv_value"
        assert info.value.params["value"] == "abc"

    def test_missing_header(self, tmp_path: Path) -> None:
        path = tmp_path / "u.csv"
        path.write_text("0,1\n", encoding="utf-8")
        with pytest.raises(ConfigError) as info:
            read_field_csv(path)
        assert info.value.code == "csv_header"

    def test_header_grid_is_validated(self, tmp_path: Path) -> None:
        path = tmp_path / "u.csv"
        path.write_text("# 1,2,0,1\n0,1\n", encoding="utf-8")
        with pytest.raises(ConfigError) as info:
            read_field_csv(path)
        assert info.value.code == "csv_header"
        assert info.value.params["line"] == 1

    def test_wrong_row_count(self, tmp_path: Path) -> None:
        path = tmp_path / "u.csv"
        path.write_text("# 2,3,3,0,1,0,1\n0,1,2\n3,4,5\n", encoding="utf-8")
        with pytest.raises(ConfigError) as info:
            read_field_csv(path)
        assert info.value.code == "csv_rows"


class TestFormatValue:
    @pytest.mark.parametrize(
        ("value", "text"), [(1.0, "1"), (0.5, "0.5"), (-0.0, "-0"), (0.1, "0.1"), (1e-300, "1e-300")]
    )
    def test_shortest_repr(self, value: float, text: str) -> None:
        assert format_value(value) == text


class TestReporter:
    def test_json_is_canonical(self) -> None:
        first = Reporter.build_json({"b": 1.0, "a": {"y": [1, 2], "x": np.float64(0.25)}})
        second = Reporter.build_json({"a": {"x": 0.25, "y": (1, 2)}, "b": 1.0})
        assert first == second
        assert list(json.loads(first)) == ["a", "b"]

    def test_non_finite_as_strings(self) -> None:
        data = json.loads(Reporter.build_json({"drift": float("inf"), "low": -np.inf, "gap": float("nan")}))
        assert data == {"drift": "inf", "gap": "nan", "low": "-inf"}

    def test_save_json(self, output_dir: Path) -> None:
        path = Reporter.save_json({"steps": np.int64(3), "ok": np.bool_(True)}, output_dir / "sub" / "r.json")
        assert json.loads(Path(path).read_text(encoding="utf-8")) == {"ok": True, "steps": 3}

    def test_curve(self, output_dir: Path) -> None:
        path = Reporter.save_curve([(0.0, 1.5), (0.5, 0.25)], output_dir / "curve.csv", ("t", "sup_error"))
        assert Path(path).read_text(encoding="utf-8") == "t,sup_error\n0,1.5\n0.5,0.25\n"

    def test_mesh_2d(self, output_dir: Path) -> None:
        mesh = InterfaceMesh(2, np.array([[[0.0, 0.0], [1.0, 0.5]]]))
        text = Path(Reporter.save_mesh(mesh, output_dir / "mesh.csv")).read_text(encoding="utf-8")
        assert text == "x0,y0,x1,y1\n0,0,1,0.5\n"

    def test_mesh_1d(self, output_dir: Path) -> None:
        mesh = InterfaceMesh.from_points([0.25, -0.75], dim=1)
        text = Path(Reporter.save_mesh(mesh, output_dir / "mesh.csv")).read_text(encoding="utf-8")
        assert text == "x\n0.25\n-0.75\n"

    def test_table_rows(self) -> None:
        table = Reporter.build_table("Acceptance", [{"name": "audit", "passed": True}, {"name": "drift", "passed": False}], ("name", "passed"))
        assert table.row_count == 2
        assert [column.header for column in table.columns] == ["Check", "Result"]
