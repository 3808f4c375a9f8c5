"""Tests for field, table and report persistence."""

import json
import math

import numpy as np
import pytest

from csqs_lab.core.exceptions import UsageError
from csqs_lab.core.measures import MeasureReport
from csqs_lab.core.phase_space import PhaseGrid, wigner_field
from csqs_lab.core.results import (
    REPORT_COLUMNS,
    format_value,
    read_field,
    read_table,
    write_field,
    write_reports,
    write_table,
)


@pytest.fixture
def small_field(make_state):
    return wigner_field(make_state(0.5, 0.0), PhaseGrid.square(4.0, 21), workers=1)


class TestFormatValue:
    def test_floats_keep_full_precision(self):
        assert format_value(0.1) == "0.10000000000000001"
        assert float(format_value(1 / 3)) == 1 / 3

    def test_special_values(self):
        assert format_value(None) == ""
        assert format_value(True) == "true"
        assert format_value(float("nan")) == "nan"
        assert format_value("a,b") == "a;b"


class TestFields:
    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_round_trip(self, small_field, output_dir, fmt):
        path = write_field(small_field, output_dir / f"w.{fmt}", fmt, {"alpha_re": 0.5, "t": 0.0})
        meta, field = read_field(path)
        np.testing.assert_array_equal(field.values, small_field.values)
        assert field.grid == small_field.grid
        assert meta["kind"] == "wigner_field"
        assert meta["alpha_re"] == 0.5
        assert meta["total_integral"] == small_field.total_integral

    def test_csv_header(self, small_field, output_dir):
        path = write_field(small_field, output_dir / "w.csv", "csv", {"alpha_re": 0.5})
        lines = path.read_text().splitlines()
        assert lines[0] == '# kind: "wigner_field"'
        assert lines[1] == "# alpha_re: 0.5"
        assert "x,y,W" in lines
        assert len(lines) == lines.index("x,y,W") + 1 + 21 * 21

    def test_bytes_are_reproducible(self, small_field, output_dir):
        first = write_field(small_field, output_dir / "a.csv").read_bytes()
        second = write_field(small_field, output_dir / "b.csv").read_bytes()
        assert first == second

    def test_not_a_field(self, output_dir):
        path = write_table([[1.0, 2.0]], ("a", "b"), output_dir / "t.csv")
        with pytest.raises(UsageError):
            read_field(path)

    def test_unknown_format(self, small_field, output_dir):
        with pytest.raises(UsageError):
            write_field(small_field, output_dir / "w.txt", "txt")


class TestTables:
    def test_csv(self, output_dir):
        path = write_table([[0.5, float("nan")], [1.0, 2.0]], ("alpha", "WLN_printed"), output_dir / "t.csv", meta={"figure": "fig5"})
        meta, columns, rows = read_table(path)
        assert meta["figure"] == "fig5"
        assert meta["columns"] == ["alpha", "WLN_printed"]
        assert columns == ["alpha", "WLN_printed"]
        assert rows[0] == ["0.5", "nan"]

    def test_json_nan_becomes_null(self, output_dir):
        path = write_table([[0.5, float("nan")]], ("alpha", "WLN_printed"), output_dir / "t.json", "json")
        envelope = json.loads(path.read_text())
        assert envelope["data"] == [{"alpha": 0.5, "WLN_printed": None}]
        _, columns, rows = read_table(path)
        assert rows == [[0.5, None]]

    def test_row_length_checked(self, output_dir):
        with pytest.raises(UsageError):
            write_table([[1.0]], ("a", "b"), output_dir / "t.csv")


class TestReports:
    @pytest.fixture
    def reports(self):
        return [
            MeasureReport(name="LE", closed_value=0.25, oracle_value=0.25),
            MeasureReport(
                name="WLN",
                closed_value=None,
                oracle_value=0.3,
                variant="printed",
                method_notes="undefined, argument < 0",
            ),
        ]

    def test_csv_columns(self, reports, output_dir):
        meta, columns, rows = read_table(write_reports(reports, output_dir / "m.csv"))
        assert meta["kind"] == "measure_reports"
        assert tuple(columns) == REPORT_COLUMNS
        assert rows[0][:5] == ["LE", "primary", "0.25", "0.25", "0"]
        assert rows[1][2] == ""
        assert rows[1][-1] == "undefined; argument < 0"

    def test_json(self, reports, output_dir):
        envelope = json.loads(write_reports(reports, output_dir / "m.json", "json").read_text())
        assert envelope["data"][0]["delta"] == 0.0
        assert envelope["data"][1]["closed_value"] is None
        assert math.isclose(envelope["data"][1]["oracle_value"], 0.3)
