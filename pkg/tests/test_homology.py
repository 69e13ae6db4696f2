"""Tests for degree components, cohomology tables and homological verdicts.

Requires Python 3.10+
"""

from unittest.mock import patch

from arr_utils.analyzer import FreenessVerdict
from arr_utils.arrangement import MultiArrangement
from arr_utils.complexes import build_J_complex
from arr_utils.constants import (
    CERT_NONE,
    CERT_NONZERO_HOMOLOGY,
    CERT_SAITO_BASIS,
    STATUS_FREE,
    STATUS_NOT_FREE,
    STATUS_UNDETERMINED,
)
from arr_utils.families import boolean, generic
from arr_utils.homology import (
    default_degree_bound,
    degree_slice,
    freeness_by_homology,
    homology_table,
    is_generic_flat,
    level_degree_component,
    local_freeness,
    pdim_bounds,
)


def three_lines() -> MultiArrangement:
    """x y (x - y)."""
    return MultiArrangement.new("Q", [[1, 0], [0, 1], [1, -1]])


class TestDegreeComponents:
    """Tests for the degree-d pieces of each level."""

    def test_x3_level_two_degree_one(self, x3_simple):
        """Each triple flat block spans two linear forms."""
        jcomplex = build_J_complex(x3_simple)
        component = level_degree_component(jcomplex, 2, 1)
        assert component.dimension == 6
        assert component.block_dimension(x3_simple.lattice.closure([0, 1])) == 2

    def test_below_generator_degree(self, cycle_arrangement):
        jcomplex = build_J_complex(cycle_arrangement)
        component = level_degree_component(jcomplex, 1, 2)
        # only the four simple hyperplanes contribute below degree 3
        assert component.dimension == 4 * 3

    def test_level_out_of_range(self, x3_simple):
        jcomplex = build_J_complex(x3_simple)
        assert level_degree_component(jcomplex, 0, 2).dimension == 0
        assert level_degree_component(jcomplex, 4, 2).dimension == 0

    def test_three_lines_degree_one(self):
        jcomplex = build_J_complex(three_lines())
        assert level_degree_component(jcomplex, 2, 1).dimension == 2

    def test_degree_slice(self, x3_simple):
        current = degree_slice(build_J_complex(x3_simple), 1)
        assert current.component_dims == {1: 6, 2: 6, 3: 0}
        assert current.cohomology(1) == 1
        assert current.cohomology(2) == 1


class TestHomologyTable:
    """Tests for homology_table."""

    def test_x3_first_nonzero(self, x3_simple):
        table = homology_table(build_J_complex(x3_simple), 2)
        assert table.levels == [2, 3]
        assert table.get(2, 1) == 1
        assert table.first_nonzero() == (2, 1)
        assert table.derivation_dims[1] == 1
        assert not table.vanishes

    def test_stop_at_nonzero(self, x3_simple):
        table = homology_table(build_J_complex(x3_simple), 6, stop_at_nonzero=True)
        assert table.degree_bound == 1

    def test_three_lines_derivations(self):
        """dim D_d = 2d - 1 and H^2 vanishes."""
        table = homology_table(build_J_complex(three_lines()), 5)
        assert table.vanishes
        assert [table.derivation_dims[d] for d in range(1, 6)] == [1, 3, 5, 7, 9]

    def test_braid_derivations(self, braid3):
        table = homology_table(build_J_complex(braid3), 3)
        assert table.vanishes
        assert table.derivation_dims == {0: 0, 1: 1, 2: 4, 3: 10}

    def test_to_dict_shifts_levels(self, x3_simple):
        data = homology_table(build_J_complex(x3_simple), 1).to_dict()
        assert data["levels"]["2"] == {"0": 0, "1": 1}
        assert data["derivation_complex_levels"]["1"] == {"0": 0, "1": 1}
        assert data["derivation_dims"] == {"0": 0, "1": 1}

    def test_default_degree_bound(self, cycle_arrangement, x3_simple):
        assert default_degree_bound(cycle_arrangement) == 13 + 3
        assert default_degree_bound(x3_simple) == 9


class TestFreenessByHomology:
    """Tests for the homological freeness test."""

    def test_x3_not_free(self, x3_simple):
        result = freeness_by_homology(x3_simple, d_max=2)
        assert result.status == "NotFree"
        assert (result.level, result.degree) == (2, 1)
        assert result.is_not_free

    def test_generic_not_formal(self):
        result = freeness_by_homology(generic(4, 3))
        assert result.status == "NotFormal"
        assert result.level == 1
        assert result.to_dict()["flat"] == "1234"

    def test_braid_vanishes(self, braid3):
        result = freeness_by_homology(braid3, d_max=4)
        assert result.status == "VanishesUpTo"
        assert result.degree == 4
        assert not result.is_not_free

    def test_non_essential_input(self):
        arrangement = MultiArrangement.new("Q", [[1, 0, 0], [0, 1, 0], [1, -1, 0]])
        assert freeness_by_homology(arrangement, d_max=3).status == "VanishesUpTo"


class TestLocalData:
    """Tests for generic flats, local freeness and projective dimension."""

    def test_generic_flat(self, x3_simple):
        arrangement = generic(4, 3)
        assert is_generic_flat(arrangement, arrangement.lattice.center)
        assert not is_generic_flat(x3_simple, x3_simple.lattice.center)

    def test_rank_three_is_trivially_local(self, x3_simple):
        assert local_freeness(x3_simple)

    def test_boolean_locally_free(self):
        result = local_freeness(boolean(4))
        assert result.status == STATUS_FREE
        assert result.locally_free is True

    def test_undecided_flat_is_not_a_failure(self):
        undecided = FreenessVerdict(STATUS_UNDETERMINED, CERT_NONE)
        free = FreenessVerdict(STATUS_FREE, CERT_SAITO_BASIS)
        with patch("arr_utils.analyzer.decide_freeness", side_effect=[undecided, free, free, free]):
            result = local_freeness(boolean(4))
        assert result.status == STATUS_UNDETERMINED
        assert result.locally_free is None
        assert not result
        assert result.failing_flat.rank == 3
        assert result.verdict is undecided

    def test_failure_outranks_undecided_flat(self):
        undecided = FreenessVerdict(STATUS_UNDETERMINED, CERT_NONE)
        failed = FreenessVerdict(STATUS_NOT_FREE, CERT_NONZERO_HOMOLOGY)
        free = FreenessVerdict(STATUS_FREE, CERT_SAITO_BASIS)
        with patch(
            "arr_utils.analyzer.decide_freeness", side_effect=[undecided, failed, free, free]
        ):
            result = local_freeness(boolean(4))
        assert result.status == STATUS_NOT_FREE
        assert result.locally_free is False
        assert result.verdict is failed

    def test_pdim_of_free_arrangement(self, braid3):
        """A Saito basis turns a vanishing table into exact bounds."""
        table = homology_table(build_J_complex(braid3), 4)
        bounds = pdim_bounds(braid3, table, certified=True)
        assert (bounds.lower, bounds.upper) == (0, 0)
        assert bounds.exact

    def test_pdim_vanishing_table_without_certificate(self, braid3):
        """Vanishing up to a degree bound says nothing past it."""
        table = homology_table(build_J_complex(braid3), 2)
        assert table.vanishes
        bounds = pdim_bounds(braid3, table)
        assert bounds.heuristic
        assert (bounds.lower, bounds.upper) == (0, 1)
        assert not bounds.exact
        assert bounds.to_dict() == {"lower": 0, "upper": 1, "heuristic": True}

    def test_pdim_vanishing_table_at_the_cap(self):
        """A lower bound equal to r - 2 needs no certificate."""
        arrangement = generic(4, 3)
        table = homology_table(build_J_complex(arrangement), 1)
        assert table.vanishes
        bounds = pdim_bounds(arrangement, table)
        assert bounds.exact
        assert (bounds.lower, bounds.upper) == (1, 1)

    def test_pdim_generic_lines(self):
        arrangement = generic(4, 3)
        table = homology_table(build_J_complex(arrangement), 3)
        bounds = pdim_bounds(arrangement, table)
        assert bounds.lower == 1
        assert bounds.upper == 1

    def test_pdim_heuristic_when_truncated(self, x3_simple):
        """A bound below l cannot certify finite length."""
        table = homology_table(build_J_complex(x3_simple), 1)
        bounds = pdim_bounds(x3_simple, table)
        assert bounds.heuristic
        assert (bounds.lower, bounds.upper) == (0, 1)
        assert not bounds.exact
