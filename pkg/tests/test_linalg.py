"""Tests for exact linear algebra and graded polynomial helpers.

Requires Python 3.10+
"""

from fractions import Fraction

import pytest
import sympy

from arr_utils.exceptions import FieldError, ValidationError
from arr_utils.linalg import (
    Field,
    PolyVector,
    compose_linear,
    determinant,
    independent_extension,
    kernel_basis,
    left_kernel,
    linear_form,
    monomial_basis,
    monomial_count,
    poly_to_vector,
    polynomial_ring,
    rank_kernel_solve,
    rank_of_rows,
    rows_to_matrix,
    vector_to_poly,
)


class TestField:
    """Tests for field parsing and element conversion."""

    def test_parse_rationals(self):
        assert Field.parse("Q") == Field(0)
        assert Field.parse("QQ").characteristic == 0

    def test_parse_prime_field(self):
        field_ = Field.parse("GF(7)")
        assert field_.characteristic == 7
        assert field_.name == "GF(7)"

    def test_non_prime_rejected(self):
        with pytest.raises(FieldError):
            Field.parse("GF(6)")

    def test_unknown_field_rejected(self):
        with pytest.raises(FieldError):
            Field.parse("R")

    def test_convert_fraction_strings(self):
        q = Field(0)
        assert q.convert("1/2") == q.convert(Fraction(1, 2))
        assert q.format(q.convert("-6/4")) == "-3/2"

    def test_convert_in_prime_field(self):
        gf7 = Field(7)
        assert gf7.format(gf7.convert("1/2")) == "4"
        assert gf7.format(gf7.convert(-1)) == "6"

    def test_denominator_vanishing_mod_p(self):
        with pytest.raises(FieldError):
            Field(3).convert("1/3")

    def test_sympy_rational(self):
        q = Field(0)
        assert q.format(q.convert(sympy.Rational(-2, 3))) == "-2/3"

    def test_elements_only_for_prime_fields(self):
        assert len(Field(5).elements()) == 5
        with pytest.raises(FieldError):
            Field(0).elements()


class TestMatrices:
    """Tests for rank, kernels and solving."""

    def test_rank_of_coefficient_matrix(self):
        """Forms of X3 with t=2 span the whole dual space."""
        q = Field(0)
        rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, -2, 0], [1, 0, 1], [0, 1, 1]]
        rows = [[q.convert(v) for v in row] for row in rows]
        assert rank_of_rows(rows, 3, q.domain) == 3

    def test_kernel_basis_is_annihilated(self):
        q = Field(0)
        matrix = rows_to_matrix([[q.convert(v) for v in (1, 1, -2)]], 3, q.domain)
        kernel = kernel_basis(matrix)
        assert len(kernel) == 2
        for vector in kernel:
            assert sum(a * b for a, b in zip((1, 1, -2), vector)) == 0

    def test_left_kernel(self):
        q = Field(0)
        rows = [[q.convert(v) for v in row] for row in ([1, 0], [0, 1], [1, 1])]
        kernel = left_kernel(rows_to_matrix(rows, 2, q.domain))
        assert len(kernel) == 1
        y = kernel[0]
        assert y[0] + y[2] == 0 and y[1] + y[2] == 0

    def test_solve_consistent_system(self):
        q = Field(0)
        matrix = rows_to_matrix([[q.one, q.one], [q.one, -q.one]], 2, q.domain)
        result = rank_kernel_solve(matrix, [2, 0])
        assert result.rank == 2
        assert result.nullity == 0
        assert result.solution == (q.one, q.one)

    def test_solve_inconsistent_system(self):
        q = Field(0)
        matrix = rows_to_matrix([[q.one, q.one], [q.one, q.one]], 2, q.domain)
        assert rank_kernel_solve(matrix, [1, 2]).solution is None

    def test_solve_wrong_rhs_length(self):
        q = Field(0)
        matrix = rows_to_matrix([[q.one]], 1, q.domain)
        with pytest.raises(ValidationError):
            rank_kernel_solve(matrix, [1, 2])

    def test_rank_depends_on_characteristic(self):
        """The rows (1,1) and (1,-1) are dependent only in characteristic 2."""
        for p, expected in ((0, 2), (2, 1), (3, 2)):
            field_ = Field(p)
            rows = [[field_.convert(1), field_.convert(1)], [field_.convert(1), field_.convert(-1)]]
            assert rank_of_rows(rows, 2, field_.domain) == expected

    def test_determinant(self):
        q = Field(0)
        matrix = rows_to_matrix([[q.convert(2), q.one], [q.one, q.one]], 2, q.domain)
        assert determinant(matrix) == q.one

    def test_independent_extension(self):
        q = Field(0)
        base = [{0: q.one}]
        candidates = [{0: q.convert(2)}, {1: q.one}, {0: q.one, 1: q.one}]
        assert independent_extension(base, candidates, 2, q.domain) == [1]


class TestGradedPolynomials:
    """Tests for monomial bases and polynomial vectors."""

    def test_monomial_basis_order(self):
        assert monomial_basis(2, 2) == ((2, 0), (1, 1), (0, 2))

    def test_monomial_count(self):
        assert monomial_count(3, 2) == 6
        assert monomial_count(3, -1) == 0
        assert monomial_count(3, 0) == 1

    def test_vector_round_trip(self):
        R = polynomial_ring(("x", "y"), Field(0))
        x, y = R.gens
        poly = 3 * x**2 - x * y
        assert vector_to_poly(R, poly_to_vector(poly, 2, 2), 2) == poly

    def test_non_homogeneous_rejected(self):
        R = polynomial_ring(("x", "y"), Field(0))
        x, y = R.gens
        with pytest.raises(ValidationError):
            poly_to_vector(x**2 + y, 2, 2)

    def test_linear_form(self):
        R = polynomial_ring(("x", "y", "z"), Field(0))
        x, y, z = R.gens
        assert linear_form(R, [1, -2, 0]) == x - 2 * y

    def test_compose_linear(self):
        R = polynomial_ring(("x", "y"), Field(0))
        x, y = R.gens
        assert compose_linear(x * y, [x + y, x - y], R) == x**2 - y**2

    def test_poly_vector_checks_degrees(self):
        R = polynomial_ring(("x", "y"), Field(0))
        x, y = R.gens
        vector = PolyVector((x**2, y), (0, 1), 2)
        assert vector.ambient_rank == 2
        with pytest.raises(ValidationError):
            PolyVector((x**2, y), (0, 0), 2)
