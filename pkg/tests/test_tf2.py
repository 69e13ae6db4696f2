"""Tests for TF2 counts, incidence graphs, presentations and classifiers.

Requires Python 3.10+
"""

import pytest

from arr_utils.complexes import build_J_complex
from arr_utils.exceptions import FieldError, PreconditionError, ValidationError
from arr_utils.families import boolean, braid, cycle3, cycle_chord, generic, x3, ziegler_pair
from arr_utils.homology import homology_table
from arr_utils.linalg import Field
from arr_utils.tf2 import (
    classify_free_tf2_multiplicity,
    classify_nonfree_tf2_multiplicity,
    h2_presentation,
    incidence_graphs,
    interval_obstruction_scan,
    is_tf2,
    supersolvable_filtration,
    terao_rank3_complex,
    tf2_freeness_combinatorial,
    xrt_report,
)


class TestCombinatorialFreeness:
    """Tests for tf2_freeness_combinatorial."""

    def test_is_tf2(self, x3_simple, braid3):
        assert is_tf2(x3_simple)
        assert not is_tf2(braid3)
        assert not is_tf2(generic(4, 3))

    def test_chord_is_free(self, chord):
        report = tf2_freeness_combinatorial(chord)
        assert (report.rank, report.size, report.triple_count, report.excess) == (3, 5, 2, 4)
        assert report.free
        assert report.supersolvable
        assert report.identity_holds

    def test_x3_is_not_free(self, x3_simple):
        report = tf2_freeness_combinatorial(x3_simple)
        assert report.triple_count == 3
        assert report.excess == 6
        assert not report.free
        assert not report.totally_non_free

    @pytest.mark.parametrize(
        "alpha, beta", [(2, -2), (2, 3), (-1, 3), ("1/2", -3), (4, "2/3"), (-2, 5)]
    )
    def test_degree_one_euler_identity_on_cycles(self, alpha, beta):
        """dim H^2 in degree 1 equals the triple excess minus |A| plus 1."""
        arrangement = cycle3(alpha, beta).simple()
        report = tf2_freeness_combinatorial(arrangement)
        table = homology_table(build_J_complex(arrangement), 1)
        assert report.identity_holds
        assert table.get(2, 1) == report.excess - report.size + 1

    def test_degree_one_euler_identity_on_free_and_x3(self, x3_simple):
        for arrangement, expected in ((cycle_chord(), 0), (x3_simple, 1), (x3(-1), 1)):
            report = tf2_freeness_combinatorial(arrangement)
            table = homology_table(build_J_complex(arrangement), 1)
            assert table.get(2, 1) == report.excess - report.size + 1 == expected
        assert not report.supersolvable

    def test_seven_lines(self, cycle_arrangement):
        report = tf2_freeness_combinatorial(cycle_arrangement)
        data = report.to_dict()
        assert data["hyperplanes"] == 7
        assert data["triple_flats"] == 3
        assert data["excess"] == 7
        assert data["identity_holds"]
        assert not data["free"]

    def test_requires_tf2(self, braid3):
        with pytest.raises(PreconditionError):
            tf2_freeness_combinatorial(braid3)

    def test_requires_irreducible(self, boolean3):
        with pytest.raises(PreconditionError):
            tf2_freeness_combinatorial(boolean3)

    def test_supersolvable_filtration(self, chord):
        filtration = supersolvable_filtration(chord)
        assert filtration.to_dict() == {
            "flats": ["124", "235"],
            "layers": [[1], [1, 2, 4], [1, 2, 3, 4, 5]],
        }

    def test_filtration_needs_free_input(self, x3_simple):
        with pytest.raises(PreconditionError):
            supersolvable_filtration(x3_simple)


class TestIncidenceGraphs:
    """Tests for the bipartite incidence graph of triple flats."""

    def test_chord_tree(self, chord):
        incidence = incidence_graphs(chord)
        data = incidence.to_dict()
        assert incidence.is_tree
        assert data["nodes"] == ["H2", "X124", "X235"]
        assert data["removed"] == ["H1", "H3", "H4", "H5"]
        assert data["cycle"] is None

    def test_x3_cycle(self, x3_simple):
        incidence = incidence_graphs(x3_simple)
        assert not incidence.is_tree
        assert incidence.to_dict()["cycle"] == ["H1", "X124", "H2", "X236", "H3", "X135"]

    def test_seven_lines_cycle(self, cycle_arrangement):
        data = incidence_graphs(cycle_arrangement).to_dict()
        assert data["cycle"] == ["H1", "X1245", "H2", "X236", "H3", "X137"]
        assert data["removed"] == ["H4", "H5", "H6", "H7"]


class TestPresentation:
    """Tests for the presentation matrix of H^2."""

    def test_x3_shape(self, x3_simple):
        presentation = h2_presentation(x3_simple, d_max=2)
        assert presentation.kappa == 3
        assert len(presentation.rows) == 9
        assert len(presentation.columns) == 6 + 2 * 3
        assert presentation.generator_degrees == {"124": (1, 2), "135": (1, 2), "236": (1, 2)}

    def test_x3_cokernel_matches_homology(self, x3_simple):
        """Nine rows, eight independent degree-1 columns."""
        presentation = h2_presentation(x3_simple, d_max=2)
        assert presentation.cokernel_dims[1] == 1
        assert presentation.homology_dims[1] == 1
        assert not presentation.free

    def test_labels(self, x3_simple):
        presentation = h2_presentation(x3_simple, d_max=1, compare_homology=False)
        assert presentation.row_labels()[0] == "[X124,H1]"
        assert presentation.column_labels()[:2] == ["H1", "H2"]
        assert "[X124,theta]" in presentation.column_labels()
        assert presentation.homology_agrees is None

    def test_rank_precondition(self):
        arrangement = x3(2).subarrangement(x3(2).lattice.closure([0, 1]))
        with pytest.raises(PreconditionError):
            h2_presentation(arrangement)


class TestFreeClassifier:
    """Tests for the tree orientation classifier."""

    @pytest.mark.integration
    def test_pencils_free(self, pencil_free):
        result = classify_free_tf2_multiplicity(pencil_free)
        assert result.free
        assert result.method == "orientation"
        assert result.witness["root"] == "236"
        assert result.witness["edges"] == [
            {"hyperplane": 3, "flat": "1345", "multiplicity": 3, "exponents": [5, 3]}
        ]

    def test_pencils_not_free(self, pencil_not_free):
        result = classify_free_tf2_multiplicity(pencil_not_free)
        assert not result.free
        assert set(result.witness["failures"]) == {"1345", "236"}

    def test_chord_simple_is_free(self, chord):
        assert classify_free_tf2_multiplicity(chord).free

    def test_chord_multiplicities(self, chord):
        """Free iff m(y) is an exponent of one of the two triple points."""
        assert classify_free_tf2_multiplicity(chord, [1, 5, 1, 1, 1]).free
        assert not classify_free_tf2_multiplicity(chord, [3, 1, 3, 3, 3]).free

    def test_needs_free_arrangement(self, x3_simple):
        with pytest.raises(PreconditionError):
            classify_free_tf2_multiplicity(x3_simple)


class TestCycleClassifier:
    """Tests for the cycle classifier on non-free TF2 arrangements."""

    def test_seven_lines_free(self, cycle_arrangement):
        result = classify_nonfree_tf2_multiplicity(cycle_arrangement)
        assert result.free
        assert result.witness["n"] == 3
        assert result.witness["product"] == "4"
        assert [f["B"] for f in result.witness["flats"]] == ["4", "1", "1"]

    def test_simple_x3_not_free(self, x3_simple):
        result = classify_nonfree_tf2_multiplicity(x3_simple)
        assert not result.free
        assert result.reason == "product of the B values is 1"

    @pytest.mark.parametrize(
        "t, n, free",
        [
            (2, 2, True),
            (2, 3, True),
            (-1, 2, True),
            (-1, 3, False),
            ("1/2", 2, True),
            (2, 1, False),
        ],
    )
    def test_x3_rule(self, t, n, free):
        """Free iff n >= 2 and t^(n-1) != 1."""
        assert classify_nonfree_tf2_multiplicity(x3(t, n)).free is free

    def test_x3_witness(self):
        witness = classify_nonfree_tf2_multiplicity(x3(2, 2)).witness
        assert witness["product"] == "2"
        assert witness["flats"][0]["ratios"] == {"H4": "2"}

    def test_off_cycle_multiplicity(self, cycle_arrangement):
        result = classify_nonfree_tf2_multiplicity(cycle_arrangement, [3, 3, 3, 2, 1, 1, 1])
        assert not result.free
        assert result.reason == "multiplicity other than 1 off the cycle"
        assert result.witness["off_cycle_violations"] == [4]

    def test_different_b_values(self):
        result = classify_nonfree_tf2_multiplicity(cycle3(2, 3, n=3))
        assert not result.free
        assert result.reason == "extra forms of a cycle flat give different B values"

    def test_non_constant_on_cycle(self, cycle_arrangement):
        result = classify_nonfree_tf2_multiplicity(cycle_arrangement, [3, 2, 3, 1, 1, 1, 1])
        assert result.reason == "multiplicities on the cycle are not constant"

    def test_characteristic_zero_only(self):
        with pytest.raises(FieldError):
            classify_nonfree_tf2_multiplicity(x3(3, 3, field_=Field(7)))

    def test_needs_non_free_arrangement(self, chord):
        with pytest.raises(PreconditionError):
            classify_nonfree_tf2_multiplicity(chord)


class TestIntervalsAndFamilies:
    """Tests for the interval scan, the twisted family and rank-3 syzygies."""

    def test_interval_scan_needs_rank_four(self, x3_simple):
        with pytest.raises(PreconditionError):
            interval_obstruction_scan(x3_simple)

    @pytest.mark.integration
    def test_braid_has_no_obstruction(self):
        assert interval_obstruction_scan(braid(4)) == []

    @pytest.mark.integration
    def test_interval_scan_finds_ziegler_lattice(self):
        """The nine Ziegler lines times a coordinate line carry a totally non-free interval."""
        arrangement = ziegler_pair(conic=False).product(boolean(1))
        assert arrangement.rank == 4
        found = interval_obstruction_scan(arrangement)
        assert found
        assert all(o.rank == 3 and o.triple_count == 6 for o in found)
        assert any(o.lower.rank == 0 and o.upper.size == 9 for o in found)
        assert found[0].to_dict()["triple_flats"] == 6

    def test_xrt_rejects_t_one(self):
        with pytest.raises(ValidationError):
            xrt_report(3, 1)

    def test_xrt_restriction(self):
        """The Ziegler restriction is an X3-type cycle with product t."""
        report = xrt_report(3, 2, d_max=2, check_ambient=False)
        assert report.restriction.free
        assert report.restriction.witness["n"] == 2
        assert report.h2_dims[1] == 1
        assert report.t == "2"
        assert report.ambient_status is None
        assert not report.ambient_expected_free

    @pytest.mark.integration
    @pytest.mark.parametrize("t", [-1, 2])
    def test_xrt_rank_four(self, t):
        """H^2 sits in degree 1 and the ambient verdict follows t = -1."""
        report = xrt_report(4, t)
        assert report.restriction.free
        assert {d: v for d, v in report.h2_dims.items() if v} == {1: 1}
        assert report.ambient_expected_free is (t == -1)
        assert report.ambient_status is not None
        assert (report.ambient_status == "Free") == report.ambient_expected_free

    @pytest.mark.integration
    def test_terao_on_braid(self, braid3):
        complex_ = terao_rank3_complex(braid3, d_max=3)
        assert complex_.kappa == 6
        assert complex_.middle_shifts == [2, 2, 2, 2]
        assert complex_.generator_degrees == [1, 2, 3]
        assert len(complex_.degrees) == 4

    def test_terao_preconditions(self, x3_simple, boolean3, cycle_arrangement):
        for arrangement in (x3_simple, boolean3, cycle_arrangement, generic(4, 3)):
            with pytest.raises(PreconditionError):
                terao_rank3_complex(arrangement)

    def test_terao_rank_precondition(self):
        with pytest.raises(PreconditionError):
            terao_rank3_complex(boolean(2))
