"""Tests for freeness verdicts, certificate revalidation and moduli sampling.

Requires Python 3.10+
"""

import random
from fractions import Fraction

import pytest

from arr_utils.analyzer import (
    DecisionOptions,
    FreenessVerdict,
    circuit_bound_flat,
    decide_freeness,
    generic_non_separator,
    moduli_sample,
    revalidate_certificate,
    yoshinaga_check,
)
from arr_utils.arrangement import MultiArrangement
from arr_utils.constants import (
    CERT_CIRCUIT_BOUND,
    CERT_CYCLE_CONDITION,
    CERT_GENERIC_HYPERPLANE,
    CERT_NONE,
    CERT_NONZERO_HOMOLOGY,
    CERT_SAITO_BASIS,
    CERT_SUBARRANGEMENT,
    REPORT_SCHEMA_VERSION,
    STATUS_FREE,
    STATUS_NOT_FREE,
)
from arr_utils.exceptions import FieldError, PreconditionError, ValidationError
from arr_utils.families import boolean, generic, x3, xrt
from arr_utils.linalg import Field


@pytest.fixture
def braid_plus_plane() -> MultiArrangement:
    """Braid arrangement with x + 2y + 3z, which passes through no triple point."""
    return MultiArrangement.new(
        "Q",
        [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, -1, 0], [1, 0, -1], [0, 1, -1], [1, 2, 3]],
    )


class TestGates:
    """Tests for the combinatorial non-freeness gates."""

    def test_circuit_bound(self):
        arrangement = generic(4, 3)
        flat = circuit_bound_flat(arrangement)
        assert flat == arrangement.lattice.center

    def test_no_circuit_bound(self, x3_simple):
        assert circuit_bound_flat(x3_simple) is None

    def test_generic_non_separator(self, braid_plus_plane, braid3):
        assert generic_non_separator(braid_plus_plane) == 6
        assert generic_non_separator(braid3) is None


class TestDecideFreeness:
    """Tests for decide_freeness on small arrangements."""

    def test_boolean_is_free(self, boolean3):
        verdict = decide_freeness(boolean3)
        assert verdict.is_free
        assert verdict.exponents == (1, 1, 1)

    def test_braid_saito_basis(self, braid3):
        verdict = decide_freeness(braid3, options=DecisionOptions(d_max=4))
        assert verdict.status == STATUS_FREE
        assert verdict.certificate_kind == CERT_SAITO_BASIS
        assert verdict.exponents == (3, 2, 1)
        assert verdict.certificate_data["factorization_matches"]
        assert revalidate_certificate(braid3, verdict)

    def test_rank_two(self):
        arrangement = MultiArrangement.new("Q", [[1, 0], [0, 1], [1, -1]], [3, 3, 3])
        verdict = decide_freeness(arrangement)
        assert verdict.is_free
        assert verdict.exponents == (5, 4)

    def test_generic_lines_circuit_bound(self):
        arrangement = generic(4, 3)
        verdict = decide_freeness(arrangement)
        assert verdict.status == STATUS_NOT_FREE
        assert verdict.certificate_kind == CERT_CIRCUIT_BOUND
        assert verdict.certificate_data["hyperplanes"] == [1, 2, 3, 4]
        assert revalidate_certificate(arrangement, verdict)

    def test_generic_hyperplane(self, braid_plus_plane):
        verdict = decide_freeness(braid_plus_plane)
        assert verdict.certificate_kind == CERT_GENERIC_HYPERPLANE
        assert verdict.certificate_data["hyperplane"] == 7
        assert revalidate_certificate(braid_plus_plane, verdict)

    def test_simple_x3_cycle_condition(self, x3_simple):
        verdict = decide_freeness(x3_simple)
        assert verdict.is_not_free
        assert verdict.certificate_kind == CERT_CYCLE_CONDITION
        assert revalidate_certificate(x3_simple, verdict)

    @pytest.mark.integration
    def test_x3_free_multiplicity(self):
        verdict = decide_freeness(x3(2, 2))
        assert verdict.is_free

    def test_x3_by_homology(self, x3_simple):
        """Without the TF2 fast path the cohomology scan finds H^2 in degree 1."""
        options = DecisionOptions(use_tf2_fast_path=False, d_max=2)
        verdict = decide_freeness(x3_simple, options=options)
        assert verdict.certificate_kind == CERT_NONZERO_HOMOLOGY
        assert verdict.certificate_data["level"] == 2
        assert verdict.certificate_data["degree"] == 1
        assert revalidate_certificate(x3_simple, verdict)

    @pytest.mark.integration
    def test_pencils(self, pencil_free, pencil_not_free):
        assert decide_freeness(pencil_free).is_free
        assert decide_freeness(pencil_not_free).is_not_free

    def test_multiplicity_override(self, x3_simple):
        assert decide_freeness(x3_simple, [2, 2, 2, 1, 1, 1]).is_free

    def test_reducible_input(self):
        """A product is free with the factor exponents and a lifted basis."""
        arrangement = boolean(1).product(
            MultiArrangement.new("Q", [[1, 0], [0, 1], [1, -1]])
        )
        verdict = decide_freeness(arrangement)
        assert verdict.is_free
        assert verdict.exponents == (2, 1, 1)
        assert len(verdict.basis) == 3
        assert revalidate_certificate(arrangement, verdict)

    def test_to_dict(self, x3_simple):
        data = decide_freeness(x3_simple).to_dict()
        assert data["schema_version"] == REPORT_SCHEMA_VERSION
        assert data["status"] == STATUS_NOT_FREE
        assert data["certificate"]["kind"] == CERT_CYCLE_CONDITION
        assert "timings" not in data

    def test_to_dict_with_timings(self, x3_simple):
        data = decide_freeness(x3_simple).to_dict(include_timings=True)
        assert "timings" in data


class TestRevalidation:
    """Tests for revalidate_certificate on tampered certificates."""

    def test_wrong_hyperplane(self, braid_plus_plane):
        verdict = FreenessVerdict(
            STATUS_NOT_FREE, CERT_GENERIC_HYPERPLANE, {"hyperplane": 1}
        )
        assert not revalidate_certificate(braid_plus_plane, verdict)

    def test_unknown_label(self, braid_plus_plane):
        verdict = FreenessVerdict(
            STATUS_NOT_FREE, CERT_GENERIC_HYPERPLANE, {"hyperplane": 99}
        )
        with pytest.raises(ValidationError):
            revalidate_certificate(braid_plus_plane, verdict)

    def test_bogus_circuit(self, x3_simple):
        verdict = FreenessVerdict(
            STATUS_NOT_FREE, CERT_CIRCUIT_BOUND, {"hyperplanes": [1, 2, 3, 4, 5, 6]}
        )
        assert not revalidate_certificate(x3_simple, verdict)


class TestYoshinaga:
    """Tests for the Ziegler restriction plus local freeness check."""

    def test_braid_free(self, braid3):
        verdict = yoshinaga_check(braid3, 0)
        assert verdict.is_free
        assert verdict.exponents == (3, 2, 1)
        assert verdict.certificate_data["hyperplane"] == 1
        assert revalidate_certificate(braid3, verdict)

    def test_x3_not_free(self, x3_simple):
        verdict = yoshinaga_check(x3_simple, 0)
        assert verdict.is_not_free
        assert verdict.certificate_kind == CERT_SUBARRANGEMENT
        assert verdict.certificate_data["hyperplanes"] == [1, 2, 3, 4, 5, 6]

    def test_needs_simple(self, cycle_arrangement):
        with pytest.raises(PreconditionError):
            yoshinaga_check(cycle_arrangement, 0)

    def test_characteristic_zero_only(self):
        with pytest.raises(FieldError):
            yoshinaga_check(x3(3, field_=Field(7)), 0)

    @pytest.mark.integration
    def test_twisted_family_at_minus_one(self):
        """The Ziegler restriction to x0 and every rank-3 flat on it are free."""
        arrangement = xrt(3, -1)
        verdict = yoshinaga_check(arrangement, 0)
        assert verdict.is_free
        assert verdict.certificate_data["hyperplane"] == 1
        assert verdict.certificate_data["ziegler_restriction"]["kind"] != CERT_NONE
        assert verdict.certificate_data["local_flats"]
        assert revalidate_certificate(arrangement, verdict)


class TestModuliSample:
    """Tests for sampling family parameters."""

    def test_partition(self):
        report = moduli_sample(
            "x3",
            {"t": ["2"]},
            trials=0,
            mults={"n": "3"},
            include=[{"t": "1"}, {"t": "-1"}, {"t": "2"}],
            seed=0,
        )
        assert report.degenerate == [{"t": "1"}]
        assert report.not_free == [{"t": "-1"}]
        assert report.free == [{"t": "2"}]
        data = report.to_dict()
        assert data["counts"] == {"free": 1, "not_free": 1, "undetermined": 0, "degenerate": 1}
        assert data["seed"] == 0

    def test_deterministic(self):
        kwargs = dict(ranges={"t": ["-1", "2", "3", "1/2"]}, trials=4, mults={"n": "2"}, seed=5)
        first = moduli_sample("x3", **kwargs)
        second = moduli_sample("x3", **kwargs)
        assert [p.params for p in first.points] == [p.params for p in second.points]

    def test_all_degenerate(self):
        with pytest.raises(ValidationError):
            moduli_sample("x3", {"t": ["1", "0"]}, trials=3, seed=0)

    @pytest.mark.integration
    def test_pencils_free_exactly_on_antidiagonal(self):
        """x^3 y^3 z^3 (x - a z)(x - b z)(y - z)^3 is free iff a = -b."""
        values = ["-3", "-2", "-1", "2", "3", "4", "5", "1/2", "-1/2", "1/3", "2/3", "-3/2"]
        antidiagonal = [
            {"alpha": a, "beta": str(-Fraction(a))} for a in ["2", "3", "5", "1/2", "-3/2", "4"]
        ]
        rng = random.Random(11)
        generic_pairs: list[dict[str, str]] = []
        while len(generic_pairs) < 16:
            a, b = rng.sample(values, 2)
            pair = {"alpha": a, "beta": b}
            if Fraction(a) != -Fraction(b) and pair not in generic_pairs:
                generic_pairs.append(pair)

        report = moduli_sample(
            "pencils",
            {"alpha": values, "beta": values},
            trials=4,
            include=antidiagonal + generic_pairs,
            seed=0,
        )
        decided = report.free + report.not_free
        assert len(decided) >= 22
        assert not report.undetermined
        assert all(pair in decided for pair in antidiagonal + generic_pairs)
        for params in decided:
            expected = Fraction(params["alpha"]) == -Fraction(params["beta"])
            assert (params in report.free) is expected
        assert len(report.free) >= 6
