"""
Tests for number formatting, data parsing and atomic writes
"""

import io

import numpy as np
import pytest

from lilbands.exceptions import DataInputError
from lilbands.utils.io_utils import format_number, parse_data_lines, read_data_file, write_csv, write_text_atomic


class TestFormatNumber:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (3, "3"),
            (0.1, "0.1"),
            (-0.0, "0"),
            (float("inf"), "inf"),
            (float("-inf"), "-inf"),
            (float("nan"), "nan"),
            (None, ""),
            (True, "true"),
            ("new-sup", "new-sup"),
            (1.0 / 3.0, "0.333333333333"),
            (np.int64(7), "7"),
        ],
    )
    def test_values(self, value, expected):
        assert format_number(value, 12) == expected

    def test_exponent_form(self):
        assert format_number(1.5e-20, 12) == "1.5e-20"


class TestWriteCsv:
    def test_rows(self):
        buffer = io.StringIO()
        write_csv(("a", "b"), [(1, 0.5), (2, None)], buffer, 12)
        assert buffer.getvalue() == "a,b\n1,0.5\n2,\n"


class TestParseDataLines:
    """One value per line, or one CSV column"""

    def test_plain_lines_with_comments(self):
        values = parse_data_lines(["# header comment\n", "1.5\n", "\n", "  -2 # inline\n", "3e2\n"])
        np.testing.assert_array_equal(values, [1.5, -2.0, 300.0])

    def test_column_by_name(self):
        values = parse_data_lines(["id,value\n", "1,0.25\n", "2,0.75\n"], column="value")
        np.testing.assert_array_equal(values, [0.25, 0.75])

    def test_column_by_index(self):
        values = parse_data_lines(["1,0.25\n", "2,0.75\n"], column="0")
        np.testing.assert_array_equal(values, [1.0, 2.0])

    def test_bad_value_reports_line(self):
        with pytest.raises(DataInputError) as exc_info:
            parse_data_lines(["1.0\n", "abc\n"])
        assert exc_info.value.line_number == 2

    def test_non_finite_rejected(self):
        with pytest.raises(DataInputError):
            parse_data_lines(["1.0\n", "inf\n"])

    def test_missing_column(self):
        with pytest.raises(DataInputError):
            parse_data_lines(["a,b\n", "1,2\n"], column="c")
        with pytest.raises(DataInputError):
            parse_data_lines(["1,2\n"], column="5")

    def test_empty_input(self):
        with pytest.raises(DataInputError):
            parse_data_lines(["# nothing\n", "\n"])

    def test_read_file(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("0.1\n0.2\n", encoding="utf-8")
        np.testing.assert_array_equal(read_data_file(path), [0.1, 0.2])


class TestWriteTextAtomic:
    def test_creates_parents_and_replaces(self, tmp_path):
        target = tmp_path / "nested" / "out.csv"
        write_text_atomic(target, "first\n")
        write_text_atomic(target, "second\n")
        assert target.read_text(encoding="utf-8") == "second\n"
        assert [p.name for p in target.parent.iterdir()] == ["out.csv"]
