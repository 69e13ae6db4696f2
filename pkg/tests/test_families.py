"""Tests for named arrangement families and the family registry.

Requires Python 3.10+
"""

import pytest

from arr_utils.complexes import build_S_complex
from arr_utils.constants import FAMILY_NAMES
from arr_utils.exceptions import FieldError, ValidationError
from arr_utils.families import (
    FAMILIES,
    art,
    build_family,
    cycle3,
    generic,
    on_common_conic,
    pencils,
    triangle_path,
    triple_points,
    wheel,
    x3,
    xrt,
    ziegler_pair,
)
from arr_utils.linalg import Field


class TestSmallFamilies:
    """Tests for the rank-3 parameter families."""

    @pytest.mark.parametrize("t", [0, 1])
    def test_x3_degenerate_parameters(self, t):
        with pytest.raises(ValidationError):
            x3(t=t)

    def test_x3_multiplicities(self):
        arrangement = x3(t="1/2", n=3)
        assert arrangement.multiplicities == (3, 3, 3, 1, 1, 1)

    def test_x3_over_prime_field(self):
        arrangement = x3(t=3, n=2, field_=Field(7))
        assert arrangement.field.characteristic == 7

    def test_pencils_default_multiplicities(self, pencil_free):
        assert pencil_free.multiplicities == (3, 3, 3, 1, 1, 3)
        assert [f.label for f in pencil_free.lattice.triple_flats()] == ["1345", "236"]

    def test_pencils_need_distinct_parameters(self):
        with pytest.raises(ValidationError):
            pencils(2, 2)

    def test_cycle3_matches_fixture(self, cycle_arrangement):
        built = cycle3(2, -2, n=3)
        assert built.forms == cycle_arrangement.forms
        assert built.multiplicities == cycle_arrangement.multiplicities


class TestLargerFamilies:
    """Tests for families in more variables."""

    def test_xrt_shape(self):
        arrangement = xrt(3, -1)
        assert arrangement.variables == ("x0", "x1", "x2", "x3")
        assert arrangement.size == 1 + 6 + 2 + 1
        assert arrangement.forms[0] == (1, 0, 0, 0)
        assert arrangement.is_essential

    def test_xrt_needs_r_at_least_3(self):
        with pytest.raises(ValidationError):
            xrt(2, -1)

    def test_art_is_ziegler_restriction(self):
        restricted = art(3, 2)
        assert restricted.num_vars == 3
        assert restricted.total_multiplicity == xrt(3, 2).size - 1

    def test_generic_has_only_double_points(self):
        arrangement = generic(5, 3)
        assert arrangement.lattice.triple_flats() == []
        assert arrangement.rank == 3

    def test_generic_too_many_lines_for_field(self):
        with pytest.raises(ValidationError):
            generic(6, 3, field_=Field(5))

    def test_wheel(self):
        arrangement = wheel(4)
        assert arrangement.size == 8
        assert arrangement.rank == 4

    def test_triangle_path(self):
        arrangement = triangle_path()
        assert arrangement.rank == 4
        assert len(arrangement.lattice.triple_flats()) == 3


class TestRegistry:
    """Tests for building families from string parameters."""

    def test_registry_matches_names(self):
        assert set(FAMILIES) == set(FAMILY_NAMES)

    def test_field_parameter(self):
        arrangement = build_family("x3", {"t": "-1"}, {"n": "2"})
        assert arrangement.multiplicities == (2, 2, 2, 1, 1, 1)

    def test_explicit_multiplicity_vector(self):
        arrangement = build_family("chord", None, {"m": "2,1,1,1,2"})
        assert arrangement.multiplicities == (2, 1, 1, 1, 2)

    def test_integer_parameter(self):
        assert build_family("braid", {"l": "4"}).size == 10

    def test_graphic_edges(self):
        arrangement = build_family("graphic", {"edges": "1-2,2-3,3-4,1-4"})
        assert arrangement.size == 4

    def test_unknown_family(self):
        with pytest.raises(ValidationError):
            build_family("nope")

    def test_unknown_parameter(self):
        with pytest.raises(ValidationError):
            build_family("x3", {"q": "2"})

    def test_bad_integer(self):
        with pytest.raises(ValidationError):
            build_family("braid", {"l": "four"})

    def test_field_parameter_vanishing_mod_p(self):
        with pytest.raises(FieldError):
            build_family("x3", {"t": "1/7"}, field_=Field(7))


class TestZieglerPair:
    """Tests for the two realizations of Ziegler's lattice."""

    def test_conic_test(self):
        q = Field(0)
        on_conic = [(p, p * p, 1) for p in range(6)]
        assert on_common_conic(on_conic, q)
        moved = on_conic[:5] + [(5, 26, 1)]
        assert not on_common_conic(moved, q)

    @pytest.mark.integration
    def test_realizations_differ_only_in_conic(self):
        q = Field(0)
        conic = ziegler_pair(conic=True)
        other = ziegler_pair(conic=False)
        assert conic.lattice.profile() == other.lattice.profile()
        assert on_common_conic(triple_points(conic), q)
        assert not on_common_conic(triple_points(other), q)

    @pytest.mark.integration
    def test_scalar_complex_sees_the_conic(self):
        """The six relations drop rank only when the triple points lie on a conic."""
        conic = build_S_complex(ziegler_pair(conic=True))
        other = build_S_complex(ziegler_pair(conic=False))
        assert conic.module_ranks == [3, 9, 6, 1]
        assert conic.differential_ranks[:2] == [3, 5]
        assert conic.cohomology()[1] == 1
        assert other.module_ranks[:3] == [3, 9, 6]
        assert other.differential_ranks[:2] == [3, 6]
