"""Logarithmic derivations of multi-arrangements, degree by degree.

A degree-d derivation sum f_i d/dx_i lies in D(A, m) when every theta(alpha_H)
is divisible by alpha_H^m(H). Each degree is one scalar linear system in
the coefficients of the f_i and of the cofactors h_H with
theta(alpha_H) = alpha_H^m(H) h_H.

Requires Python 3.10+
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyElement

from .arrangement import MultiArrangement
from .exceptions import ArrangementError, FieldError, PreconditionError, ValidationError
from .linalg import (
    Field,
    SparseRow,
    independent_extension,
    kernel_basis,
    monomial_basis,
    monomial_index,
    rank_of_rows,
    reduced_rows,
    rows_to_matrix,
    shift_terms,
    vector_to_poly,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Derivation:
    """theta = sum coeffs[i] d/dx_i with homogeneous coefficients of one degree."""

    coeffs: tuple[PolyElement, ...]
    degree: int

    @property
    def ring(self):
        return self.coeffs[0].ring

    def apply(self, form: Sequence) -> PolyElement:
        """theta(alpha) for a linear form given by its coefficients."""
        total = self.ring.zero
        for a, f in zip(form, self.coeffs):
            if a and f:
                total += f * a
        return total

    def is_member(self, arrangement: MultiArrangement) -> bool:
        """Exact divisibility of theta(alpha_H) by alpha_H^m(H) for every H."""
        for form, power in zip(arrangement.forms, arrangement.powered_forms):
            value = self.apply(form)
            if value and value.rem(power):
                return False
        return True

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_vector(self) -> SparseRow:
        num_vars = len(self.coeffs)
        nmon = len(monomial_basis(num_vars, self.degree))
        index = monomial_index(num_vars, self.degree)
        vector: SparseRow = {}
        for i, f in enumerate(self.coeffs):
            for monom, coeff in f.terms():
                vector[i * nmon + index[monom]] = coeff
        return vector

    def __str__(self) -> str:
        names = self.ring.symbols
        parts = [f"({f})*d/d{names[i]}" for i, f in enumerate(self.coeffs) if f]
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict[str, Any]:
        return {"degree": self.degree, "coefficients": [str(f) for f in self.coeffs]}


def euler_derivation(arrangement: MultiArrangement) -> Derivation:
    return Derivation(tuple(arrangement.ring.gens), 1)


def _vector_to_derivation(arrangement: MultiArrangement, vector: SparseRow, degree: int) -> Derivation:
    num_vars = arrangement.num_vars
    nmon = len(monomial_basis(num_vars, degree))
    parts: list[SparseRow] = [{} for _ in range(num_vars)]
    for col, coeff in vector.items():
        i, idx = divmod(col, nmon)
        parts[i][idx] = coeff
    ring = arrangement.ring
    return Derivation(tuple(vector_to_poly(ring, part, degree) for part in parts), degree)


def _membership_system(arrangement: MultiArrangement, degree: int) -> tuple[DomainMatrix, int]:
    """Rows are (hyperplane, monomial) equations; f-unknowns come first."""
    num_vars = arrangement.num_vars
    domain = arrangement.field.domain
    nmon = len(monomial_basis(num_vars, degree))
    index = monomial_index(num_vars, degree)
    f_width = num_vars * nmon

    rows: list[SparseRow] = []
    offset = f_width
    for form, power, m in zip(
        arrangement.forms, arrangement.powered_forms, arrangement.multiplicities
    ):
        h_basis = monomial_basis(num_vars, degree - m)
        block: list[SparseRow] = [{} for _ in range(nmon)]
        for i, a in enumerate(form):
            if a:
                for k in range(nmon):
                    block[k][i * nmon + k] = a
        terms = list(power.terms())
        for j, mono in enumerate(h_basis):
            for idx, coeff in shift_terms(terms, mono, index):
                block[idx][offset + j] = -coeff
        offset += len(h_basis)
        rows.extend(block)
    return rows_to_matrix(rows, offset, domain), f_width


def _space_vectors(arrangement: MultiArrangement, degree: int) -> list[SparseRow]:
    if degree < 0:
        return []
    matrix, f_width = _membership_system(arrangement, degree)
    projected = [
        {c: v for c, v in enumerate(vector[:f_width]) if v} for vector in kernel_basis(matrix)
    ]
    return reduced_rows(projected, f_width, arrangement.field.domain)


def derivation_space(
    arrangement: MultiArrangement, degree: int, multiplicities: Sequence[int] | None = None
) -> list[Derivation]:
    """Row-reduced basis of the degree-d derivations of (A, m)."""
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    basis = [
        _vector_to_derivation(arrangement, v, degree) for v in _space_vectors(arrangement, degree)
    ]
    logger.debug(f"Derivations of degree {degree}: dimension {len(basis)}")
    return basis


def contains_derivation(basis: Sequence[Derivation], theta: Derivation) -> bool:
    """Whether theta lies in the span of a same-degree basis."""
    if theta.is_zero:
        return True
    if not basis:
        return False
    width = len(theta.coeffs) * len(monomial_basis(len(theta.coeffs), theta.degree))
    domain = theta.ring.domain
    rows = [b.to_vector() for b in basis]
    return rank_of_rows(rows + [theta.to_vector()], width, domain) == rank_of_rows(rows, width, domain)


@dataclass
class DerivationScanner:
    """Walks degrees upward, recording new minimal generators in each degree."""

    arrangement: MultiArrangement
    degree: int = -1
    generators: list[Derivation] = field(default_factory=list)
    dimensions: dict[int, int] = field(default_factory=dict)
    _previous: list[SparseRow] = field(default_factory=list, repr=False)

    def _multiples(self, degree: int) -> list[SparseRow]:
        num_vars = self.arrangement.num_vars
        old_nmon = len(monomial_basis(num_vars, degree - 1))
        new_nmon = len(monomial_basis(num_vars, degree))
        old_basis = monomial_basis(num_vars, degree - 1)
        index = monomial_index(num_vars, degree)
        units = [tuple(1 if k == v else 0 for k in range(num_vars)) for v in range(num_vars)]
        multiples: list[SparseRow] = []
        for vector in self._previous:
            for unit in units:
                row: SparseRow = {}
                for col, coeff in vector.items():
                    i, idx = divmod(col, old_nmon)
                    shifted = tuple(a + b for a, b in zip(old_basis[idx], unit))
                    row[i * new_nmon + index[shifted]] = coeff
                multiples.append(row)
        return multiples

    def advance(self) -> list[Derivation]:
        """Compute the next degree and return its new minimal generators."""
        self.degree += 1
        d = self.degree
        space = _space_vectors(self.arrangement, d)
        self.dimensions[d] = len(space)
        width = self.arrangement.num_vars * len(monomial_basis(self.arrangement.num_vars, d))
        base = self._multiples(d) if d > 0 else []
        picked = independent_extension(base, space, width, self.arrangement.field.domain)
        new = [_vector_to_derivation(self.arrangement, space[i], d) for i in picked]
        self.generators.extend(new)
        self._previous = space
        if new:
            logger.debug(f"Degree {d}: {len(new)} new minimal generator(s)")
        return new

    def scan_to(self, degree: int) -> list[Derivation]:
        while self.degree < degree:
            self.advance()
        return self.generators


def minimal_generator_degrees(
    arrangement: MultiArrangement, d_max: int, multiplicities: Sequence[int] | None = None
) -> list[int]:
    """Degrees of the minimal generators up to d_max, ascending."""
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    scanner = DerivationScanner(arrangement)
    return [g.degree for g in scanner.scan_to(d_max)]


def coefficient_determinant(arrangement: MultiArrangement, thetas: Sequence[Derivation]) -> PolyElement:
    ring = arrangement.ring
    domain = ring.to_domain()
    n = arrangement.num_vars
    matrix = DomainMatrix([list(theta.coeffs) for theta in thetas], (n, n), domain)
    return matrix.det()


def saito_check(
    arrangement: MultiArrangement,
    thetas: Sequence[Derivation],
    multiplicities: Sequence[int] | None = None,
) -> bool:
    """Saito's criterion: det of the coefficient matrix is c * Q(A, m) with c != 0.

    Raises:
        ValidationError: Not exactly l derivations
        PreconditionError: A derivation is not in D(A, m)
    """
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    if len(thetas) != arrangement.num_vars:
        raise ValidationError(
            "Saito's criterion needs exactly l derivations",
            field_name="thetas",
            field_value=len(thetas),
            expected=str(arrangement.num_vars),
        )
    for k, theta in enumerate(thetas):
        if not theta.is_member(arrangement):
            raise PreconditionError(
                "Derivation is not logarithmic along the arrangement",
                operation="saito_check",
                requirement=f"theta {k + 1} in D(A, m)",
            )
    det = coefficient_determinant(arrangement, thetas)
    if not det:
        return False
    q = arrangement.defining_polynomial
    return det * q.LC == q * det.LC


@dataclass(frozen=True)
class FreeBasisResult:
    found: bool
    basis: tuple[Derivation, ...] = ()
    reason: str = ""

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(sorted((theta.degree for theta in self.basis), reverse=True))


def free_basis_search(
    arrangement: MultiArrangement,
    multiplicities: Sequence[int] | None = None,
    scanner: DerivationScanner | None = None,
) -> FreeBasisResult:
    """Look for a homogeneous basis among the minimal generators of degree <= |m|.

    A NotFound outcome is never a non-freeness proof by itself.
    """
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    scanner = scanner or DerivationScanner(arrangement)
    n = arrangement.num_vars
    total = arrangement.total_multiplicity
    while scanner.degree < total:
        scanner.advance()
        gens = scanner.generators
        if len(gens) > n:
            return FreeBasisResult(False, reason=f"{len(gens)} minimal generators exceed l={n}")
        if len(gens) == n:
            if saito_check(arrangement, gens):
                logger.info(f"Saito basis found with exponents {[g.degree for g in gens]}")
                return FreeBasisResult(True, tuple(gens))
            return FreeBasisResult(False, reason="l minimal generators fail Saito's criterion")
        used = sum(g.degree for g in gens)
        if used + (n - len(gens)) * (scanner.degree + 1) > total:
            return FreeBasisResult(False, reason="remaining degrees exceed |m|")
    return FreeBasisResult(False, reason="degree bound |m| reached")


# ---------------------------------------------------------------------------
# Rank two
# ---------------------------------------------------------------------------


def _require_rank2(arrangement: MultiArrangement, operation: str) -> None:
    if arrangement.rank != 2:
        raise PreconditionError(
            "Operation needs a rank-2 arrangement",
            operation=operation,
            requirement=f"rank 2 (got {arrangement.rank})",
        )


def rank2_exponents(
    arrangement: MultiArrangement, multiplicities: Sequence[int] | None = None
) -> tuple[int, int]:
    """Exponents (d1 >= d2) of a rank-2 multi-arrangement; d1 + d2 = |m|."""
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    _require_rank2(arrangement, "rank2_exponents")
    essential, _ = arrangement.essentialize()
    total = essential.total_multiplicity
    for d in range(total + 1):
        if _space_vectors(essential, d):
            return (total - d, d) if total - d >= d else (d, total - d)
    raise ArrangementError("Rank-2 derivation module has no generator below |m|")


def rank2_generators(
    arrangement: MultiArrangement, multiplicities: Sequence[int] | None = None
) -> tuple[Derivation, Derivation]:
    """The two non-constant basis derivations, in the arrangement's coordinates.

    Ascending degree; lifted from the essentialization.
    """
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    _require_rank2(arrangement, "rank2_generators")
    essential, frame = arrangement.essentialize()
    result = free_basis_search(essential)
    if not result.found:
        raise ArrangementError(
            "Rank-2 multi-arrangement without a Saito basis", context={"reason": result.reason}
        )
    lifted = []
    for theta in sorted(result.basis, key=lambda t: t.degree):
        coeffs = frame.lift(theta.coeffs, 0, arrangement.ring)
        lifted.append(Derivation(coeffs, theta.degree))
    return lifted[0], lifted[1]


def rank2_has_exponent(
    arrangement: MultiArrangement, exponent: int, multiplicities: Sequence[int] | None = None
) -> bool:
    return exponent in rank2_exponents(arrangement, multiplicities)


def nn11_arrangement(n: int, roots: Sequence[Any], field_: Field | None = None) -> MultiArrangement:
    """x^n y^n (x - a_1 y)...(x - a_k y)."""
    field_ = field_ or Field(0)
    converted = [field_.convert(a) for a in roots]
    forms = [[1, 0], [0, 1]] + [[1, -a] for a in converted]
    return MultiArrangement.new(field_, forms, [n, n] + [1] * len(converted), name="nn11")


def nn11_closed_form(n: int, roots: Sequence[Any], field_: Field | None = None) -> tuple[int, int]:
    """Exponents of x^n y^n prod(x - a_i y), cross-checked against the solver.

    When the a_i^(n-1) all agree, n is an exponent and the pair is (n + k, n).

    Raises:
        ValidationError: k > n, or a zero or repeated root
        ArrangementError: Closed form and solver disagree
    """
    field_ = field_ or Field(0)
    converted = [field_.convert(a) for a in roots]
    k = len(converted)
    if n < 1 or k < 1 or k > n:
        raise ValidationError(
            "Closed form needs 1 <= k <= n", field_name="k", field_value=k, expected=f"<= {n}"
        )
    if any(not a for a in converted) or len(set(converted)) != k:
        raise ValidationError("Roots must be distinct and nonzero", field_name="roots")

    generic = rank2_exponents(nn11_arrangement(n, converted, field_))
    powers = {a ** (n - 1) for a in converted}
    if len(powers) == 1:
        closed = (n + k, n)
        if closed != generic:
            raise ArrangementError(
                "Closed-form exponents disagree with the solver",
                context={"closed": closed, "solver": generic},
            )
        return closed
    return generic


def wakamiko_has_exponent(m_x: int, m_y: int, m_z: int, field_: Field | None = None) -> bool:
    """Three points in P^1 (characteristic 0): m_z is an exponent iff |m| <= 2 m_z + 1."""
    field_ = field_ or Field(0)
    if field_.characteristic:
        raise FieldError(
            "Exponent criterion for three points holds in characteristic 0 only",
            field=field_.name,
        )
    return m_x + m_y + m_z <= 2 * m_z + 1


def nonvanishing_check(
    arrangement: MultiArrangement, theta: Derivation, multiplicities: Sequence[int] | None = None
) -> bool:
    """theta(alpha_H) != 0 for every hyperplane of a rank-2 non-boolean arrangement."""
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    _require_rank2(arrangement, "nonvanishing_check")
    if arrangement.size < 3:
        raise PreconditionError(
            "Boolean rank-2 arrangements are excluded",
            operation="nonvanishing_check",
            requirement="at least three hyperplanes",
        )
    return all(theta.apply(form) for form in arrangement.forms)
