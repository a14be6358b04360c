"""Report-Service - JSON-Berichte, CSV-Felder/-Meshes/-Kurven und Terminal-Tabellen.

Berichte sind kanonisch (sortierte Schluessel, keine Zeitstempel), damit
gleiche Konfiguration und gleicher Seed byte-identische Dateien liefern.
Nicht-endliche Zahlen (z.B. die Drift nach Verlust des Vorzeichenwechsels)
werden als Zeichenketten ``"inf"``, ``"-inf"``, ``"nan"`` geschrieben.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np
from rich.table import Table

from ..i18n import t
from ..models.errors import ConfigError
from ..models.grid import GridSpec, ScalarField
from ..models.interface import InterfaceMesh


def format_value(value: float) -> str:
    """Kuerzeste Dezimaldarstellung, die beim Einlesen bitgenau dasselbe float ergibt.

    ``repr`` liefert diese Darstellung bereits; nur das ueberfluessige ``.0``
    ganzer Zahlen wird entfernt (``1.0`` -> ``1``, ``-0.0`` -> ``-0``).
    """
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _jsonable(value: object) -> object:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        number = float(value)
        if math.isnan(number):
            return "nan"
        if math.isinf(number):
            return "inf" if number > 0 else "-inf"
        return number
    return value


class Reporter:
    """Schreibt Berichte und Felder eines Experiments."""

    @staticmethod
    def build_json(report: dict) -> str:
        """Kanonischer JSON-String eines Berichts (fuer Datei ODER stdout)."""
        return json.dumps(_jsonable(report), indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"

    @staticmethod
    def save_json(report: dict, output_path: str | Path) -> str:
        """Speichert einen Bericht als JSON.

        Returns:
            Absoluter Pfad der gespeicherten Datei.
        """
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(Reporter.build_json(report), encoding="utf-8")
        return str(path.resolve())

    @staticmethod
    def save_curve(rows: Iterable[tuple[float, float]], output_path: str | Path, header: Sequence[str]) -> str:
        """Zweispaltige CSV-Kurve (z.B. t, sup-Fehler) fuer externe Plotter."""
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [",".join(header)]
        lines.extend(f"{format_value(a)},{format_value(b)}" for a, b in rows)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return str(path.resolve())

    @staticmethod
    def save_mesh(mesh: InterfaceMesh, output_path: str | Path) -> str:
        """Interface-Mesh als CSV: ``x0,y0,x1,y1`` pro Strecke bzw. ``x`` pro Nullstelle."""
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if mesh.dim == 1:
            lines = ["x"] + [format_value(x) for x in mesh.starts[:, 0]]
        else:
            lines = ["x0,y0,x1,y1"]
            for (x0, y0), (x1, y1) in zip(mesh.starts, mesh.ends, strict=True):
                lines.append(",".join(format_value(v) for v in (x0, y0, x1, y1)))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return str(path.resolve())

    @staticmethod
    def build_table(title: str, rows: Sequence[dict], columns: Sequence[str]) -> Table:
        """Rich-Tabelle fuer die Terminalausgabe; Zahlen mit 4 signifikanten Stellen."""
        table = Table(title=title, show_lines=False)
        for column in columns:
            table.add_column(t(f"column.{column}"), justify="right" if column != "name" else "left")
        for row in rows:
            table.add_row(*(_cell(row.get(column)) for column in columns))
        return table


def _cell(value: object) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return t("verdict.pass") if value else t("verdict.fail")
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


# -- Feld-CSV ---------------------------------------------------------------


def write_field_csv(fld: ScalarField, path: str | Path) -> str:
    """Schreibt ein Feld: Kopfzeile ``# dim,nx[,ny],xmin,xmax[,ymin,ymax]``, dann eine Zeile pro y-Linie."""
    grid = fld.grid
    header = [str(grid.dim), *(str(n) for n in grid.points_per_axis)]
    for lo, hi in grid.bounds:
        header += [format_value(lo), format_value(hi)]
    rows = fld.array.reshape(-1, grid.points_per_axis[0])
    lines = ["# " + ",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(target.resolve())


def read_field_csv(path: str | Path) -> ScalarField:
    """Liest eine mit :func:`write_field_csv` geschriebene Datei bitgenau zurueck.

    Raises:
        ConfigError: Fehlerhafte Kopfzeile, falsche Zeilen- oder Wertezahl,
            nicht lesbare Zahl - jeweils mit Zeilennummer.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    grid = _parse_header(lines[0] if lines else "")
    nx = grid.points_per_axis[0]
    expected_rows = grid.size // nx
    data = list(lines[1:])
    while data and not data[-1].strip():
        data.pop()
    if len(data) != expected_rows:
        raise ConfigError("csv_rows", line=len(data) + 1, expected=expected_rows, actual=len(data))
    values = np.empty((expected_rows, nx))
    for row, line in enumerate(data):
        line_no = row + 2
        cells = line.split(",")
        if len(cells) != nx:
            raise ConfigError("csv_row_length", line=line_no, expected=nx, actual=len(cells))
        for col, cell in enumerate(cells):
            try:
                values[row, col] = float(cell)
            except ValueError as exc:
                raise ConfigError("csv_value", line=line_no, value=cell) from exc
    return ScalarField.from_array(grid, values)


def _parse_header(line: str) -> GridSpec:
    if not line.startswith("#"):
        raise ConfigError("csv_header", line=1)
    parts = [p.strip() for p in line[1:].split(",")]
    try:
        dim = int(parts[0])
        if dim not in (1, 2) or len(parts) != 1 + dim + 2 * dim:
            raise ConfigError("csv_header", line=1)
        points = tuple(int(p) for p in parts[1 : 1 + dim])
        flat = [float(p) for p in parts[1 + dim :]]
    except (ValueError, IndexError) as exc:
        raise ConfigError("csv_header", line=1) from exc
    bounds = tuple((flat[2 * a], flat[2 * a + 1]) for a in range(dim))
    try:
        return GridSpec(bounds=bounds, points_per_axis=points)
    except ConfigError as exc:
        raise ConfigError("csv_header", line=1) from exc
