"""Tests for arrangement text, polynomial input and JSON reports.

Requires Python 3.10+
"""

import json

import pytest

from arr_utils.constants import REPORT_SCHEMA_VERSION
from arr_utils.derivations import rank2_exponents
from arr_utils.exceptions import FieldError, ParseError, ValidationError
from arr_utils.families import x3
from arr_utils.io_operations import (
    arrangement_to_dict,
    format_arrangement,
    format_json,
    parse_arrangement_text,
    parse_polynomial_arrangement,
    read_arrangement,
    read_json_file,
    write_arrangement,
    write_json_file,
)
from arr_utils.linalg import Field


class TestArrangementText:
    """Tests for parse_arrangement_text and read_arrangement."""

    def test_parse_with_comments(self):
        text = """
        # three lines
        field Q
        vars 2   # x and y
        1 0 ^3
        0 1 ^ 2
        1 -1/2
        """
        arrangement = parse_arrangement_text(text)
        assert arrangement.num_vars == 2
        assert arrangement.variables == ("x", "y")
        assert arrangement.multiplicities == (3, 2, 1)
        assert arrangement.field.format(arrangement.forms[2][1]) == "-1/2"

    def test_custom_variable_names(self):
        arrangement = parse_arrangement_text("field Q\nvars 3 a b c\n1 0 0\n0 1 0\n0 0 1\n")
        assert arrangement.variables == ("a", "b", "c")

    def test_finite_field(self):
        arrangement = parse_arrangement_text("field GF(5)\nvars 2\n1 0\n1 4\n0 1\n")
        assert arrangement.field == Field(5)
        assert arrangement.field.format(arrangement.forms[1][1]) == "4"

    def test_read_files(self, data_dir, x3_simple, cycle_arrangement):
        assert read_arrangement(data_dir / "x3.arr") == x3_simple
        loaded = read_arrangement(data_dir / "cycle.arr")
        assert loaded == cycle_arrangement
        assert loaded.name == "cycle"

    def test_missing_file(self, temp_dir):
        with pytest.raises(ParseError):
            read_arrangement(temp_dir / "missing.arr")

    def test_malformed_coefficient_position(self, data_dir):
        with pytest.raises(ParseError) as excinfo:
            read_arrangement(data_dir / "malformed.arr")
        assert (excinfo.value.line, excinfo.value.column) == (4, 3)

    def test_malformed_multiplicity(self):
        with pytest.raises(ParseError) as excinfo:
            parse_arrangement_text("field Q\nvars 2\n1 0 ^x\n")
        assert (excinfo.value.line, excinfo.value.column) == (3, 5)

    def test_text_after_multiplicity(self):
        with pytest.raises(ParseError) as excinfo:
            parse_arrangement_text("field Q\nvars 2\n1 0 ^2 7\n")
        assert excinfo.value.column == 8

    def test_wrong_coefficient_count(self):
        with pytest.raises(ParseError) as excinfo:
            parse_arrangement_text("field Q\nvars 3\n1 0 0\n1 0\n")
        assert excinfo.value.line == 4

    @pytest.mark.parametrize(
        "text",
        [
            "vars 2\n1 0\n",
            "field Q\n1 0\n",
            "field Q\nvars 2\n",
            "field Q\nfield Q\nvars 2\n1 0\n",
            "field Q\nvars 2 x\n1 0\n",
            "field Q\nvars 0\n",
        ],
    )
    def test_malformed_headers(self, text):
        with pytest.raises(ParseError):
            parse_arrangement_text(text)

    def test_non_prime_field(self):
        with pytest.raises(FieldError) as excinfo:
            parse_arrangement_text("field GF(4)\nvars 2\n1 0\n")
        assert excinfo.value.context["line"] == 1

    def test_proportional_forms(self):
        with pytest.raises(ValidationError):
            parse_arrangement_text("field Q\nvars 2\n1 1\n2 2\n")


class TestFormatArrangement:
    """Tests for the canonical text form."""

    def test_format(self, cycle_arrangement):
        lines = format_arrangement(cycle_arrangement).splitlines()
        assert lines[:3] == ["field Q", "vars 3", "1 0 0 ^3"]
        assert lines[-1] == "1 0 -1"

    def test_reparse(self, cycle_arrangement):
        assert parse_arrangement_text(format_arrangement(cycle_arrangement)) == cycle_arrangement

    def test_reparse_finite_field_and_names(self):
        arrangement = parse_arrangement_text("field GF(7)\nvars 2 u v\n1 3 ^2\n0 1\n")
        text = format_arrangement(arrangement)
        assert "vars 2 u v" in text
        assert parse_arrangement_text(text) == arrangement

    def test_write_and_read(self, temp_dir, x3_simple):
        path = temp_dir / "nested" / "x3.arr"
        write_arrangement(x3(2, 2), path)
        assert read_arrangement(path) == x3(2, 2)
        assert read_arrangement(path) != x3_simple


class TestPolynomialInput:
    """Tests for parse_polynomial_arrangement."""

    def test_rank_two_polynomial(self):
        arrangement = parse_polynomial_arrangement("x^3 y^3 (x-y)^3")
        assert arrangement.variables == ("x", "y")
        assert sorted(arrangement.multiplicities) == [3, 3, 3]
        assert rank2_exponents(arrangement) == (5, 4)

    def test_explicit_products(self):
        arrangement = parse_polynomial_arrangement("x*y*z*(x - 2*y)*(x + 2*y)")
        assert arrangement.size == 5
        assert arrangement.num_vars == 3

    def test_variable_order(self):
        arrangement = parse_polynomial_arrangement("z*y*(y - z)")
        assert arrangement.variables == ("y", "z")

    def test_finite_field(self):
        arrangement = parse_polynomial_arrangement("x^3 y^3 (x-y)^3", Field(3))
        assert rank2_exponents(arrangement) == (6, 3)

    def test_factors_that_split_mod_p(self):
        """x^3 - y^3 is (x - y)^3 in characteristic 3."""
        arrangement = parse_polynomial_arrangement("x^3 - y^3", Field(3))
        assert arrangement.multiplicities == (3,)
        assert [arrangement.field.format(c) for c in arrangement.forms[0]] == ["1", "2"]

    @pytest.mark.parametrize("text", ["x^3 - y^3", "x*y + 1", "x + 1"])
    def test_non_linear_factors(self, text):
        with pytest.raises(ValidationError):
            parse_polynomial_arrangement(text)

    def test_undeclared_variables(self):
        with pytest.raises(ValidationError):
            parse_polynomial_arrangement("x y w", variables=["x", "y"])


class TestJsonReports:
    """Tests for JSON report helpers."""

    def test_schema_version_added(self):
        data = json.loads(format_json({"status": "Free"}))
        assert data["schema_version"] == REPORT_SCHEMA_VERSION
        assert list(data)[0] == "schema_version"

    def test_existing_version_kept(self):
        assert json.loads(format_json({"schema_version": 99}))["schema_version"] == 99

    def test_arrangement_to_dict(self, cycle_arrangement):
        data = arrangement_to_dict(cycle_arrangement)
        assert data["field"] == "Q"
        assert data["hyperplanes"][3] == {"label": 4, "form": ["1", "-2", "0"], "multiplicity": 1}

    def test_write_and_read(self, temp_dir, x3_simple):
        path = temp_dir / "reports" / "x3.json"
        write_json_file({"arrangement": arrangement_to_dict(x3_simple)}, path)
        data = read_json_file(path)
        assert data["arrangement"]["hyperplanes"][0]["form"] == ["1", "0", "0"]

    def test_read_missing(self, temp_dir):
        with pytest.raises(FileNotFoundError):
            read_json_file(temp_dir / "missing.json")
