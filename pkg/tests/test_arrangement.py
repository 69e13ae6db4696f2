"""Tests for multi-arrangements, lattices, restrictions and frames.

Requires Python 3.10+
"""

import pytest

from arr_utils.arrangement import MultiArrangement
from arr_utils.exceptions import FieldError, PreconditionError, ValidationError
from arr_utils.families import boolean, braid
from arr_utils.linalg import Field


class TestConstruction:
    """Tests for MultiArrangement.new validation."""

    def test_defaults(self, x3_simple):
        assert x3_simple.size == 6
        assert x3_simple.num_vars == 3
        assert x3_simple.variables == ("x", "y", "z")
        assert x3_simple.labels == (1, 2, 3, 4, 5, 6)
        assert x3_simple.is_simple

    def test_zero_form_rejected(self):
        with pytest.raises(ValidationError):
            MultiArrangement.new("Q", [[1, 0], [0, 0]])

    def test_proportional_forms_rejected(self):
        with pytest.raises(ValidationError) as exc_info:
            MultiArrangement.new("Q", [[1, 2], [2, 4]])
        assert "Proportional" in str(exc_info.value)

    def test_proportional_only_mod_p(self):
        """(1, 2) and (1, -1) coincide over GF(3)."""
        MultiArrangement.new("Q", [[1, 2], [1, -1]])
        with pytest.raises(ValidationError):
            MultiArrangement.new("GF(3)", [[1, 2], [1, -1]])

    def test_non_positive_multiplicity(self):
        with pytest.raises(ValidationError):
            MultiArrangement.new("Q", [[1, 0], [0, 1]], [1, 0])

    def test_multiplicity_length_mismatch(self):
        with pytest.raises(ValidationError):
            MultiArrangement.new("Q", [[1, 0], [0, 1]], [1])

    def test_bad_field(self):
        with pytest.raises(FieldError):
            MultiArrangement.new("GF(4)", [[1, 0]])

    def test_total_multiplicity(self, cycle_arrangement):
        assert cycle_arrangement.total_multiplicity == 13
        assert not cycle_arrangement.is_simple

    def test_describe(self):
        arrangement = MultiArrangement.new("Q", [[1, 0], [1, -1]], [3, 1])
        assert arrangement.describe() == "(x)^3*(x - y)"


class TestIntersectionLattice:
    """Tests for flats, triple flats and Möbius numbers."""

    def test_x3_flats(self, x3_simple):
        lattice = x3_simple.lattice
        assert lattice.rank == 3
        assert len(lattice.flats(1)) == 6
        assert len(lattice.flats(2)) == 9
        assert [f.label for f in lattice.triple_flats()] == ["124", "135", "236"]
        assert lattice.center.size == 6

    def test_double_points_of_x3(self, x3_simple):
        doubles = [f for f in x3_simple.lattice.flats(2) if f.size == 2]
        assert len(doubles) == 6

    def test_chord_profile(self, chord):
        assert chord.lattice.profile()[2] == (2, 2, 2, 2, 3, 3)

    def test_closure(self, x3_simple):
        lattice = x3_simple.lattice
        flat = lattice.closure([0, 1])
        assert flat.label == "124"
        assert flat.rank == 2

    def test_below_and_above(self, x3_simple):
        lattice = x3_simple.lattice
        flat = lattice.closure([0, 1])
        assert len(lattice.below(flat, rank=1)) == 3
        assert lattice.above(flat, rank=3) == [lattice.center]

    def test_mobius(self, x3_simple):
        lattice = x3_simple.lattice
        assert lattice.mobius_of(lattice.closure([0, 1])) == 2
        assert lattice.mobius_of(lattice.closure([0, 5])) == 1


class TestCharacteristicPolynomial:
    """Tests for the Möbius-sum characteristic polynomial."""

    def test_braid_splits(self, braid3):
        chi = braid3.characteristic_polynomial()
        assert chi.coefficients == (1, -6, 11, -6)
        assert chi.splits
        assert chi.roots() == [3, 2, 1]
        assert chi.matches_exponents((1, 2, 3))

    def test_boolean(self, boolean3):
        assert boolean3.characteristic_polynomial().roots() == [1, 1, 1]

    def test_seven_lines_do_not_split(self, cycle_arrangement):
        chi = cycle_arrangement.simple().characteristic_polynomial()
        assert chi.coefficients == (1, -7, 16, -10)
        assert not chi.splits
        assert chi.roots() == []

    def test_multiarrangement_refused(self, cycle_arrangement):
        with pytest.raises(PreconditionError):
            cycle_arrangement.characteristic_polynomial()


class TestRestriction:
    """Tests for closed subarrangements and restrictions."""

    def test_subarrangement(self, x3_simple):
        flat = x3_simple.lattice.closure([0, 1])
        local = x3_simple.subarrangement(flat)
        assert local.labels == (1, 2, 4)
        assert local.rank == 2

    def test_restriction_to_hyperplane(self, x3_simple):
        restricted = x3_simple.restriction(x3_simple.lattice.hyperplane(0))
        assert restricted.size == 3
        assert restricted.variables == ("y", "z")
        assert restricted.is_simple

    def test_ziegler_restriction(self, x3_simple):
        ziegler = x3_simple.ziegler_restriction(0)
        assert ziegler.size == 3
        assert sorted(ziegler.multiplicities) == [1, 2, 2]
        assert ziegler.total_multiplicity == x3_simple.size - 1

    def test_ziegler_restriction_needs_simple(self, cycle_arrangement):
        with pytest.raises(PreconditionError):
            cycle_arrangement.ziegler_restriction(0)

    def test_ziegler_restriction_index_range(self, x3_simple):
        with pytest.raises(ValidationError):
            x3_simple.ziegler_restriction(6)

    def test_restriction_to_center(self, x3_simple):
        with pytest.raises(PreconditionError):
            x3_simple.restriction(x3_simple.lattice.center)


class TestDecomposition:
    """Tests for irreducible factors, essentialization and products."""

    def test_boolean_is_reducible(self, boolean3):
        assert boolean3.irreducible_groups() == [[0], [1], [2]]
        assert not boolean3.is_irreducible()

    def test_braid_is_irreducible(self, braid3):
        assert braid3.is_irreducible()

    def test_essentialize(self):
        arrangement = MultiArrangement.new("Q", [[1, 0, 0], [0, 1, 0], [1, 1, 0]], [2, 1, 3])
        assert arrangement.rank == 2
        assert not arrangement.is_essential
        essential, frame = arrangement.essentialize()
        assert essential.num_vars == 2
        assert essential.is_essential
        assert essential.multiplicities == (2, 1, 3)
        assert essential.labels == arrangement.labels
        for form, reduced in zip(arrangement.forms, essential.forms):
            coords = frame.coordinates(form)
            assert coords[:2] == reduced
            assert not any(coords[2:])

    def test_essential_factors_share_a_frame(self, boolean3):
        frame, factors = boolean3.essential_factors()
        assert frame.num_vars == 3
        assert [indices for _, indices in factors] == [[0], [1], [2]]
        assert all(factor.num_vars == 1 for factor, _ in factors)

    def test_product(self):
        product = boolean(1).product(braid(2))
        assert product.size == 4
        assert product.num_vars == 3
        assert product.rank == 3
        assert len(product.irreducible_groups()) == 2

    def test_product_field_mismatch(self):
        with pytest.raises(FieldError):
            boolean(1).product(boolean(1, field_=Field(5)))
