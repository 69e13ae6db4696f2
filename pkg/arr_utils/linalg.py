"""Exact linear algebra and graded polynomial bookkeeping.

All scalars live in a :class:`Field` (the rationals or a prime field) and are
stored as sympy domain elements. Matrices are sparse
:class:`~sympy.polys.matrices.DomainMatrix` instances; row reduction is
fraction-free over QQ and Gauss-Jordan over GF(p). Polynomials are sympy
``PolyElement`` values in a graded-lex ring.

Requires Python 3.10+
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations_with_replacement
from typing import Any, Iterable, Sequence

from sympy import Rational, isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing, ring

from .exceptions import FieldError, ValidationError

logger = logging.getLogger(__name__)

SparseRow = dict[int, Any]


@dataclass(frozen=True)
class Field:
    """The rationals (characteristic 0) or the prime field GF(p)."""

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p < 0 or (p != 0 and not isprime(p)):
            raise FieldError("Field characteristic must be 0 or a prime", field=f"GF({p})")

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Parse ``Q``, ``QQ`` or ``GF(p)``."""
        token = text.strip().replace(" ", "")
        if token.upper() in ("Q", "QQ"):
            return cls(0)
        upper = token.upper()
        if upper.startswith("GF(") and upper.endswith(")"):
            try:
                p = int(token[3:-1])
            except ValueError as e:
                raise FieldError("Malformed prime field", field=text) from e
            return cls(p)
        raise FieldError("Unknown field (expected Q or GF(p))", field=text)

    @property
    def name(self) -> str:
        return "Q" if self.characteristic == 0 else f"GF({self.characteristic})"

    @cached_property
    def domain(self):
        return QQ if self.characteristic == 0 else GF(self.characteristic)

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    @property
    def rref_method(self) -> str:
        return "FF" if self.characteristic == 0 else "GJ"

    def __str__(self) -> str:
        return self.name

    def convert(self, value: Any):
        """Convert an int, ``"p/q"`` string, Fraction or sympy rational."""
        domain = self.domain
        if domain.of_type(value):
            return value
        if hasattr(value, "mod") and hasattr(value, "val"):
            if self.characteristic != value.mod:
                raise FieldError("Field mismatch between entries", field=self.name, value=value)
            return domain(int(value.val))
        if isinstance(value, bool):
            raise FieldError("Booleans are not field elements", field=self.name, value=value)
        if isinstance(value, int):
            return domain(value)
        if isinstance(value, str):
            return self._convert_string(value)
        if isinstance(value, Rational):
            return self._ratio(int(value.p), int(value.q), value)
        if isinstance(value, Fraction) or (
            hasattr(value, "numerator") and hasattr(value, "denominator")
        ):
            return self._ratio(int(value.numerator), int(value.denominator), value)
        raise FieldError("Cannot interpret value as a field element", field=self.name, value=value)

    def _convert_string(self, text: str):
        token = text.strip()
        try:
            if "/" in token:
                num, den = token.split("/", 1)
                return self._ratio(int(num), int(den), text)
            return self.domain(int(token))
        except ValueError as e:
            raise FieldError("Malformed field element", field=self.name, value=text) from e

    def _ratio(self, num: int, den: int, original: Any):
        if den == 0:
            raise FieldError("Division by zero", field=self.name, value=original)
        if self.characteristic and den % self.characteristic == 0:
            raise FieldError(
                "Denominator vanishes in the prime field", field=self.name, value=original
            )
        if self.characteristic == 0:
            return QQ(num, den)
        return self.domain(num) / self.domain(den)

    def format(self, value: Any) -> str:
        """Render an element as an exact string (``-3``, ``1/2``, ``5``)."""
        if self.characteristic == 0:
            return str(self.domain.to_sympy(value))
        return str(int(value) % self.characteristic)

    def to_sympy(self, value: Any):
        return self.domain.to_sympy(value)

    def elements(self) -> list:
        """All elements of a prime field (refused for the rationals)."""
        if self.characteristic == 0:
            raise FieldError("The rationals cannot be enumerated", field=self.name)
        return [self.domain(i) for i in range(self.characteristic)]


def field_of(domain) -> Field:
    """Recover the :class:`Field` descriptor of a sympy domain."""
    if domain.is_FiniteField:
        return Field(int(domain.mod))
    return Field(0)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


def rows_to_matrix(rows: Sequence[SparseRow | Sequence], ncols: int, domain) -> DomainMatrix:
    """Build a sparse matrix from dict rows or dense rows, dropping zeros."""
    dod: dict[int, dict[int, Any]] = {}
    for i, row in enumerate(rows):
        items = row.items() if isinstance(row, dict) else enumerate(row)
        entries = {j: v for j, v in items if v}
        if entries:
            dod[i] = entries
    return DomainMatrix(dod, (len(rows), ncols), domain)


def columns_to_matrix(columns: Sequence[SparseRow], nrows: int, domain) -> DomainMatrix:
    """Build a sparse matrix whose columns are the given sparse vectors."""
    dod: dict[int, dict[int, Any]] = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            if v:
                dod.setdefault(i, {})[j] = v
    return DomainMatrix(dod, (nrows, len(columns)), domain)


def rref(matrix: DomainMatrix) -> tuple[DomainMatrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns.

    Fraction-free elimination over QQ, Gauss-Jordan over GF(p).
    """
    nrows, ncols = matrix.shape
    if nrows == 0 or ncols == 0:
        return matrix, ()
    method = "GJ" if matrix.domain.is_FiniteField else "FF"
    reduced, pivots = matrix.rref(method=method)
    return reduced, tuple(pivots)


def matrix_rank(matrix: DomainMatrix) -> int:
    return len(rref(matrix)[1])


def rank_of_rows(rows: Sequence[SparseRow], ncols: int, domain) -> int:
    if not rows or ncols == 0:
        return 0
    return matrix_rank(rows_to_matrix(rows, ncols, domain))


def reduced_rows(rows: Sequence[SparseRow], ncols: int, domain) -> list[SparseRow]:
    """Nonzero rows of the reduced row echelon form of ``rows``."""
    if not rows or ncols == 0:
        return []
    reduced, pivots = rref(rows_to_matrix(rows, ncols, domain))
    dod = reduced.to_dod()
    return [dict(dod.get(i, {})) for i in range(len(pivots))]


def kernel_basis(matrix: DomainMatrix) -> list[tuple]:
    """Right kernel basis, one vector per free column of the rref."""
    ncols = matrix.shape[1]
    domain = matrix.domain
    reduced, pivots = rref(matrix)
    dod = reduced.to_dod()
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vector = [domain.zero] * ncols
        vector[free] = domain.one
        for i, p in enumerate(pivots):
            entry = dod.get(i, {}).get(free)
            if entry:
                vector[p] = -entry
        basis.append(tuple(vector))
    return basis


def left_kernel(matrix: DomainMatrix) -> list[tuple]:
    """Canonical (row-reduced) basis of ``{y : y M = 0}``."""
    nrows = matrix.shape[0]
    if nrows == 0:
        return []
    vectors = kernel_basis(matrix.transpose())
    if not vectors:
        return []
    rows = reduced_rows(vectors, nrows, matrix.domain)
    return [
        tuple(row.get(j, matrix.domain.zero) for j in range(nrows)) for row in rows
    ]


@dataclass(frozen=True)
class SolveResult:
    """Rank, kernel and (optionally) a particular solution of ``M x = b``."""

    rank: int
    kernel: list[tuple]
    solution: tuple | None

    @property
    def nullity(self) -> int:
        return len(self.kernel)


def _coerce_vector(values: Sequence, domain) -> list:
    field = field_of(domain)
    return [field.convert(v) for v in values]


def rank_kernel_solve(matrix: DomainMatrix, rhs: Sequence | None = None) -> SolveResult:
    """Rank, kernel basis and a particular solution when ``rhs`` is given.

    Args:
        matrix: Scalar matrix over a single field
        rhs: Optional right-hand side, one entry per row

    Returns:
        SolveResult; ``solution`` is None when the system is inconsistent

    Raises:
        FieldError: If ``rhs`` entries belong to a different field
        ValidationError: If ``rhs`` has the wrong length
    """
    nrows, ncols = matrix.shape
    kernel = kernel_basis(matrix)
    rank = ncols - len(kernel)
    if rhs is None:
        return SolveResult(rank, kernel, None)

    if len(rhs) != nrows:
        raise ValidationError(
            "Right-hand side length does not match row count",
            field_name="rhs",
            field_value=len(rhs),
            expected=str(nrows),
        )
    domain = matrix.domain
    b = _coerce_vector(rhs, domain)
    dod = matrix.to_dod()
    for i, v in enumerate(b):
        if v:
            dod.setdefault(i, {})[ncols] = v
    augmented = DomainMatrix(dod, (nrows, ncols + 1), domain)
    reduced, pivots = rref(augmented)
    if ncols in pivots:
        return SolveResult(rank, kernel, None)
    reduced_dod = reduced.to_dod()
    solution = [domain.zero] * ncols
    for i, p in enumerate(pivots):
        solution[p] = reduced_dod.get(i, {}).get(ncols, domain.zero)
    return SolveResult(rank, kernel, tuple(solution))


def independent_extension(
    base: Sequence[SparseRow], candidates: Sequence[SparseRow], ncols: int, domain
) -> list[int]:
    """Greedily pick candidates independent of ``base`` and of earlier picks.

    Returns:
        Indices into ``candidates`` of the picked vectors, in order
    """
    if not candidates:
        return []
    columns = list(base) + list(candidates)
    _, pivots = rref(columns_to_matrix(columns, ncols, domain))
    offset = len(base)
    return [p - offset for p in pivots if p >= offset]


def determinant(matrix: DomainMatrix):
    """Determinant over the matrix domain (Bareiss with exact division)."""
    return matrix.det()


# ---------------------------------------------------------------------------
# Graded polynomials
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def monomial_basis(num_vars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of total degree ``degree``, graded-lex descending.

    Negative degrees give an empty basis.
    """
    if num_vars < 1:
        raise ValidationError(
            "Monomial basis needs at least one variable",
            field_name="num_vars",
            field_value=num_vars,
        )
    if degree < 0:
        return ()
    monomials = []
    for combo in combinations_with_replacement(range(num_vars), degree):
        exponents = [0] * num_vars
        for i in combo:
            exponents[i] += 1
        monomials.append(tuple(exponents))
    return tuple(sorted(monomials, key=grlex, reverse=True))


@lru_cache(maxsize=None)
def monomial_index(num_vars: int, degree: int) -> dict[tuple[int, ...], int]:
    return {m: i for i, m in enumerate(monomial_basis(num_vars, degree))}


def monomial_count(num_vars: int, degree: int) -> int:
    return len(monomial_basis(num_vars, degree))


def default_variable_names(num_vars: int) -> tuple[str, ...]:
    from .constants import DEFAULT_VARIABLE_NAMES

    if num_vars <= len(DEFAULT_VARIABLE_NAMES):
        return DEFAULT_VARIABLE_NAMES[:num_vars]
    return tuple(f"x{i}" for i in range(num_vars))


@lru_cache(maxsize=None)
def polynomial_ring(variables: tuple[str, ...], field: Field) -> PolyRing:
    """Graded-lex polynomial ring in the named variables."""
    result = ring(list(variables), field.domain, grlex)
    return result[0]


def linear_form(poly_ring: PolyRing, coefficients: Sequence) -> PolyElement:
    return poly_ring.from_dict(
        {
            tuple(1 if k == i else 0 for k in range(poly_ring.ngens)): c
            for i, c in enumerate(coefficients)
            if c
        }
    )


def poly_to_vector(poly: PolyElement, degree: int, num_vars: int) -> SparseRow:
    """Coefficients of a homogeneous polynomial against ``monomial_basis``."""
    index = monomial_index(num_vars, degree)
    vector: SparseRow = {}
    for monom, coeff in poly.terms():
        if sum(monom) != degree:
            raise ValidationError(
                "Polynomial is not homogeneous of the expected degree",
                field_name="degree",
                field_value=sum(monom),
                expected=str(degree),
            )
        vector[index[monom]] = coeff
    return vector


def vector_to_poly(poly_ring: PolyRing, vector: SparseRow, degree: int) -> PolyElement:
    basis = monomial_basis(poly_ring.ngens, degree)
    return poly_ring.from_dict({basis[i]: c for i, c in vector.items() if c})


def shift_terms(
    terms: Iterable[tuple[tuple[int, ...], Any]],
    monomial: tuple[int, ...],
    index: dict[tuple[int, ...], int],
) -> Iterable[tuple[int, Any]]:
    """Yield (basis index, coefficient) of ``monomial * sum(terms)``."""
    for monom, coeff in terms:
        shifted = tuple(a + b for a, b in zip(monom, monomial))
        yield index[shifted], coeff


def compose_linear(
    poly: PolyElement, images: Sequence[PolyElement], target: PolyRing
) -> PolyElement:
    """Substitute the i-th variable of ``poly`` by ``images[i]`` in ``target``."""
    powers: dict[tuple[int, int], PolyElement] = {}

    def power(var: int, exponent: int) -> PolyElement:
        key = (var, exponent)
        if key not in powers:
            powers[key] = images[var] ** exponent
        return powers[key]

    result = target.zero
    for monom, coeff in poly.terms():
        term = target.ground_new(coeff)
        for var, exponent in enumerate(monom):
            if exponent:
                term = term * power(var, exponent)
        result += term
    return result


def is_homogeneous(poly: PolyElement, degree: int) -> bool:
    return all(sum(m) == degree for m in poly.monoms()) if poly else True


@dataclass(frozen=True)
class PolyVector:
    """Homogeneous element of a graded free module.

    Entry ``i`` has total degree ``degree - shifts[i]`` or is zero.
    """

    entries: tuple[PolyElement, ...]
    shifts: tuple[int, ...]
    degree: int

    def __post_init__(self):
        if len(self.entries) != len(self.shifts):
            raise ValidationError("Entries and shifts must have equal length")
        for entry, shift in zip(self.entries, self.shifts):
            if entry and not is_homogeneous(entry, self.degree - shift):
                raise ValidationError(
                    "PolyVector entry is not homogeneous of the expected degree",
                    field_name="degree",
                    field_value=self.degree,
                )

    @classmethod
    def unshifted(cls, entries: Sequence[PolyElement], degree: int) -> "PolyVector":
        return cls(tuple(entries), (0,) * len(entries), degree)

    @property
    def ambient_rank(self) -> int:
        return len(self.entries)

    @property
    def is_zero(self) -> bool:
        return not any(self.entries)

    def evaluate(self, point: Sequence) -> tuple:
        return tuple(entry(*point) if entry else entry.ring.domain.zero for entry in self.entries)

    def scaled(self, scalar) -> "PolyVector":
        return PolyVector(tuple(e * scalar for e in self.entries), self.shifts, self.degree)
