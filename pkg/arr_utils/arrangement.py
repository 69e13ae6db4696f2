"""Central multi-arrangements and their intersection lattices.

A :class:`MultiArrangement` is a list of nonzero, pairwise non-proportional
linear forms over a :class:`~arr_utils.linalg.Field` with positive integer
multiplicities. Flats are stored as closed sets of hyperplane indices together
with a row-reduced basis of the span of their forms.

Requires Python 3.10+
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence

import sympy
from networkx.utils import UnionFind
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyElement, PolyRing

from .exceptions import FieldError, PreconditionError, ValidationError
from .linalg import (
    Field,
    compose_linear,
    default_variable_names,
    linear_form,
    polynomial_ring,
    rank_kernel_solve,
    reduced_rows,
    rows_to_matrix,
)

logger = logging.getLogger(__name__)


def _normalized(form: Sequence) -> tuple:
    lead = next(c for c in form if c)
    return tuple(c / lead for c in form)


def _flat_label(indices: Iterable[int], labels: Sequence[int]) -> str:
    names = sorted(labels[i] for i in indices)
    if not names:
        return "V"
    if all(n < 10 for n in names):
        return "".join(str(n) for n in names)
    return "{" + ",".join(str(n) for n in names) + "}"


@dataclass(frozen=True)
class Flat:
    """Closed set of hyperplane indices with the rref basis of its span."""

    indices: frozenset[int]
    rank: int
    basis: tuple[tuple, ...] = field(compare=False, repr=False)
    pivots: tuple[int, ...] = field(compare=False, repr=False)
    label: str = field(compare=False, default="")

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def sorted_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.indices))

    def __le__(self, other: "Flat") -> bool:
        return self.indices <= other.indices

    def __lt__(self, other: "Flat") -> bool:
        return self.indices < other.indices

    def sort_key(self) -> tuple:
        return (self.rank, self.sorted_indices)


class IntersectionLattice:
    """Ranked lattice of flats with Möbius numbers.

    Flats are built level by level: every rank-(k+1) flat is the closure of a
    rank-k flat together with one more hyperplane.
    """

    def __init__(self, arrangement: "MultiArrangement"):
        self.arrangement = arrangement
        self.domain = arrangement.field.domain
        self._forms = arrangement.forms
        self._by_indices: dict[frozenset[int], Flat] = {}
        self.flats_by_rank: list[list[Flat]] = []
        self._build()
        self.mobius: dict[frozenset[int], int] = self._compute_mobius()
        logger.debug(
            f"Lattice built: {[len(level) for level in self.flats_by_rank]} flats per rank"
        )

    def _span(self, indices: Iterable[int]) -> tuple[tuple[tuple, ...], tuple[int, ...]]:
        ncols = self.arrangement.num_vars
        rows = [dict(enumerate(self._forms[i])) for i in sorted(indices)]
        reduced = reduced_rows(rows, ncols, self.domain)
        basis = tuple(
            tuple(row.get(j, self.domain.zero) for j in range(ncols)) for row in reduced
        )
        pivots = tuple(min(row) for row in reduced)
        return basis, pivots

    @staticmethod
    def _in_span(form: Sequence, basis: Sequence[Sequence], pivots: Sequence[int]) -> bool:
        residual = list(form)
        for row, p in zip(basis, pivots):
            coeff = residual[p]
            if coeff:
                residual = [a - coeff * b for a, b in zip(residual, row)]
        return not any(residual)

    def closure(self, indices: Iterable[int]) -> Flat:
        """Smallest flat containing the given hyperplanes."""
        indices = frozenset(indices)
        if indices in self._by_indices:
            return self._by_indices[indices]
        basis, pivots = self._span(indices)
        members = frozenset(
            j
            for j, form in enumerate(self._forms)
            if j in indices or self._in_span(form, basis, pivots)
        )
        if members in self._by_indices:
            return self._by_indices[members]
        return Flat(
            members,
            len(pivots),
            basis,
            pivots,
            _flat_label(members, self.arrangement.labels),
        )

    def _register(self, flat: Flat) -> None:
        self._by_indices[flat.indices] = flat

    def _build(self) -> None:
        ambient = Flat(frozenset(), 0, (), (), "V")
        self._register(ambient)
        self.flats_by_rank = [[ambient]]
        current = [ambient]
        n = len(self._forms)
        while True:
            found: dict[frozenset[int], Flat] = {}
            for flat in current:
                for i in range(n):
                    if i in flat.indices:
                        continue
                    if any(
                        i in key and flat.indices <= key for key in found
                    ):
                        continue
                    candidate = self.closure(flat.indices | {i})
                    found[candidate.indices] = candidate
            if not found:
                break
            level = sorted(found.values(), key=Flat.sort_key)
            for flat in level:
                self._register(flat)
            self.flats_by_rank.append(level)
            current = level

    def _compute_mobius(self) -> dict[frozenset[int], int]:
        mobius: dict[frozenset[int], int] = {}
        for level in self.flats_by_rank:
            for flat in level:
                if flat.rank == 0:
                    mobius[flat.indices] = 1
                    continue
                mobius[flat.indices] = -sum(
                    mobius[other.indices]
                    for lower in self.flats_by_rank[: flat.rank]
                    for other in lower
                    if other.indices < flat.indices
                )
        return mobius

    @property
    def rank(self) -> int:
        return len(self.flats_by_rank) - 1

    @property
    def ambient(self) -> Flat:
        return self.flats_by_rank[0][0]

    @property
    def center(self) -> Flat:
        return self.flats_by_rank[-1][0]

    def flats(self, rank: int) -> list[Flat]:
        if rank < 0 or rank > self.rank:
            return []
        return self.flats_by_rank[rank]

    def all_flats(self) -> list[Flat]:
        return [flat for level in self.flats_by_rank for flat in level]

    def hyperplane(self, index: int) -> Flat:
        return self._by_indices[frozenset({index})]

    def contains(self, flat: Flat) -> bool:
        return flat.indices in self._by_indices

    def flat_of(self, indices: Iterable[int]) -> Flat:
        return self.closure(indices)

    def below(self, flat: Flat, rank: int | None = None, strict: bool = False) -> list[Flat]:
        """Flats Y <= X (containing fewer hyperplanes), optionally of one rank."""
        levels = self.flats_by_rank if rank is None else [self.flats(rank)]
        return [
            other
            for level in levels
            for other in level
            if other.indices <= flat.indices and not (strict and other == flat)
        ]

    def above(self, flat: Flat, rank: int | None = None) -> list[Flat]:
        levels = self.flats_by_rank if rank is None else [self.flats(rank)]
        return [
            other for level in levels for other in level if flat.indices <= other.indices
        ]

    def join(self, first: Flat, second: Flat) -> Flat:
        """Flat of the intersection of the two subspaces."""
        return self.closure(first.indices | second.indices)

    def mobius_of(self, flat: Flat) -> int:
        return self.mobius[flat.indices]

    def profile(self) -> tuple[tuple[int, ...], ...]:
        """Sorted flat sizes per rank (used as a lattice isomorphism proxy)."""
        return tuple(
            tuple(sorted(flat.size for flat in level)) for level in self.flats_by_rank
        )

    def triple_flats(self) -> list[Flat]:
        return [flat for flat in self.flats(2) if flat.size >= 3]


@dataclass(frozen=True)
class CharacteristicPolynomial:
    """chi(t) = sum over flats of mu(X) t^dim(X), highest degree first."""

    coefficients: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def as_expr(self, symbol: str = "t"):
        t = sympy.Symbol(symbol)
        return sympy.Poly(list(self.coefficients), t).as_expr()

    def factorization(self) -> tuple[int, list[tuple[Any, int]]]:
        return sympy.factor_list(self.as_expr())

    @property
    def splits(self) -> bool:
        """True when chi factors into integer linear factors."""
        t = sympy.Symbol("t")
        _, factors = self.factorization()
        return all(
            sympy.degree(f, t) == 1 and abs(sympy.Poly(f, t).LC()) == 1
            for f, _ in factors
        )

    def roots(self) -> list[int]:
        """Integer roots with multiplicity, descending (only when chi splits)."""
        if not self.splits:
            return []
        t = sympy.Symbol("t")
        roots: list[int] = []
        _, factors = self.factorization()
        for factor, mult in factors:
            coeffs = sympy.Poly(factor, t).all_coeffs()
            roots.extend([int(-coeffs[1] / coeffs[0])] * mult)
        return sorted(roots, reverse=True)

    def matches_exponents(self, exponents: Sequence[int]) -> bool:
        t = sympy.Symbol("t")
        product = sympy.Integer(1)
        for d in exponents:
            product *= t - d
        return sympy.expand(product - self.as_expr()) == 0

    def __str__(self) -> str:
        return str(sympy.factor(self.as_expr()))


@dataclass(frozen=True)
class CoordinateFrame:
    """Invertible change of coordinates ``u = B x``.

    The first rows of ``B`` are row-reduced bases of independent blocks of the
    dual space; the remaining rows are unit vectors completing them. A form
    ``a`` has new coordinates ``a B^-1``.
    """

    field: Field
    matrix: tuple[tuple, ...]
    inverse: tuple[tuple, ...]
    block_ranges: tuple[tuple[int, int], ...]
    variables: tuple[str, ...]
    source_variables: tuple[str, ...]

    @classmethod
    def from_blocks(
        cls,
        field_: Field,
        blocks: Sequence[Sequence[Sequence]],
        source_variables: Sequence[str],
    ) -> "CoordinateFrame":
        num_vars = len(source_variables)
        domain = field_.domain
        rows: list[tuple] = []
        ranges: list[tuple[int, int]] = []
        names: list[str] = []
        for block in blocks:
            start = len(rows)
            for row in block:
                rows.append(tuple(row))
                pivot = next(j for j, c in enumerate(row) if c)
                names.append(source_variables[pivot])
            ranges.append((start, len(rows)))

        combined = reduced_rows([dict(enumerate(r)) for r in rows], num_vars, domain)
        pivots = {min(row) for row in combined}
        for j in range(num_vars):
            if j not in pivots:
                rows.append(tuple(domain.one if k == j else domain.zero for k in range(num_vars)))
                names.append(source_variables[j])

        if len(rows) != num_vars:
            raise ValidationError("Coordinate blocks are not independent")
        if len(set(names)) != len(names):
            names = [f"u{i + 1}" for i in range(num_vars)]

        matrix = DomainMatrix([list(r) for r in rows], (num_vars, num_vars), domain)
        inverse = matrix.inv().to_list()
        return cls(
            field_,
            tuple(rows),
            tuple(tuple(r) for r in inverse),
            tuple(ranges),
            tuple(names),
            tuple(source_variables),
        )

    @property
    def num_vars(self) -> int:
        return len(self.matrix)

    @property
    def essential_rank(self) -> int:
        return self.block_ranges[-1][1] if self.block_ranges else 0

    def coordinates(self, form: Sequence) -> tuple:
        """New coordinates ``a B^-1`` of a form."""
        n = self.num_vars
        return tuple(
            sum((form[i] * self.inverse[i][k] for i in range(n)), self.field.zero)
            for k in range(n)
        )

    def block_variables(self, block: int) -> tuple[str, ...]:
        start, stop = self.block_ranges[block]
        return self.variables[start:stop]

    def lift(
        self, coeffs: Sequence[PolyElement], block: int, target: PolyRing
    ) -> tuple[PolyElement, ...]:
        """Lift ``sum g_k d/du_k`` on one block to source coordinates.

        Args:
            coeffs: Coefficients ``g_k`` in the block's own ring
            block: Block index
            target: Polynomial ring of the source coordinates

        Returns:
            Source-coordinate coefficients of the lifted derivation
        """
        start, stop = self.block_ranges[block]
        images = [linear_form(target, self.matrix[k]) for k in range(start, stop)]
        substituted = [compose_linear(g, images, target) for g in coeffs]
        lifted = []
        for i in range(self.num_vars):
            total = target.zero
            for k, g in enumerate(substituted):
                scalar = self.inverse[i][start + k]
                if scalar and g:
                    total += g * scalar
            lifted.append(total)
        return tuple(lifted)

    def center_derivations(self, target: PolyRing) -> list[tuple[PolyElement, ...]]:
        """Constant derivations ``d/du_k`` along the center directions."""
        return [
            tuple(target.ground_new(self.inverse[i][k]) for i in range(self.num_vars))
            for k in range(self.essential_rank, self.num_vars)
        ]


@dataclass(frozen=True)
class MultiArrangement:
    """Central multi-arrangement over a field.

    ``labels`` are the 1-based hyperplane numbers used in reports; they are
    preserved when taking subarrangements and factors.
    """

    field: Field
    num_vars: int
    forms: tuple[tuple, ...]
    multiplicities: tuple[int, ...]
    variables: tuple[str, ...]
    labels: tuple[int, ...]
    name: str = field(default="", compare=False)

    @classmethod
    def new(
        cls,
        field_: Field | str,
        forms: Sequence[Sequence],
        multiplicities: Sequence[int] | None = None,
        variables: Sequence[str] | None = None,
        labels: Sequence[int] | None = None,
        name: str = "",
    ) -> "MultiArrangement":
        """Validate and build a multi-arrangement.

        Raises:
            FieldError: Non-prime characteristic or unconvertible coefficients
            ValidationError: Empty input, zero or proportional forms,
                non-positive multiplicities or length mismatches
        """
        if isinstance(field_, str):
            field_ = Field.parse(field_)
        if not forms:
            raise ValidationError("An arrangement needs at least one hyperplane")
        num_vars = len(forms[0])
        if num_vars < 1:
            raise ValidationError("Forms need at least one coefficient")
        if multiplicities is None:
            multiplicities = [1] * len(forms)
        if len(multiplicities) != len(forms):
            raise ValidationError(
                "Forms and multiplicities differ in length",
                field_name="multiplicities",
                field_value=len(multiplicities),
                expected=str(len(forms)),
            )

        converted = []
        seen: dict[tuple, int] = {}
        for i, form in enumerate(forms):
            if len(form) != num_vars:
                raise ValidationError(
                    "Form has the wrong number of coefficients",
                    field_name=f"form {i + 1}",
                    field_value=len(form),
                    expected=str(num_vars),
                )
            row = tuple(field_.convert(c) for c in form)
            if not any(row):
                raise ValidationError("Zero linear form", field_name=f"form {i + 1}")
            key = _normalized(row)
            if key in seen:
                raise ValidationError(
                    "Proportional linear forms",
                    field_name=f"form {i + 1}",
                    field_value=f"proportional to form {seen[key] + 1}",
                )
            seen[key] = i
            converted.append(row)

        mults = []
        for i, m in enumerate(multiplicities):
            if isinstance(m, bool) or int(m) != m or m < 1:
                raise ValidationError(
                    "Multiplicities must be positive integers",
                    field_name=f"multiplicity {i + 1}",
                    field_value=m,
                )
            mults.append(int(m))

        if variables is None:
            variables = default_variable_names(num_vars)
        if len(variables) != num_vars or len(set(variables)) != num_vars:
            raise ValidationError(
                "Variable names must be distinct, one per coordinate",
                field_name="variables",
                field_value=",".join(variables),
            )
        if labels is None:
            labels = range(1, len(forms) + 1)

        return cls(
            field_,
            num_vars,
            tuple(converted),
            tuple(mults),
            tuple(variables),
            tuple(labels),
            name,
        )

    # -- basic data -------------------------------------------------------

    @property
    def size(self) -> int:
        """Number of hyperplanes."""
        return len(self.forms)

    @property
    def total_multiplicity(self) -> int:
        return sum(self.multiplicities)

    @property
    def is_simple(self) -> bool:
        return all(m == 1 for m in self.multiplicities)

    @cached_property
    def lattice(self) -> IntersectionLattice:
        return IntersectionLattice(self)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def is_essential(self) -> bool:
        return self.rank == self.num_vars

    @property
    def ring(self) -> PolyRing:
        return polynomial_ring(self.variables, self.field)

    @cached_property
    def linear_forms(self) -> tuple[PolyElement, ...]:
        return tuple(linear_form(self.ring, form) for form in self.forms)

    @cached_property
    def powered_forms(self) -> tuple[PolyElement, ...]:
        return tuple(a**m for a, m in zip(self.linear_forms, self.multiplicities))

    @cached_property
    def defining_polynomial(self) -> PolyElement:
        result = self.ring.one
        for power in self.powered_forms:
            result *= power
        return result

    def format_form(self, index: int) -> str:
        return str(self.linear_forms[index])

    def describe(self) -> str:
        """Defining polynomial as a product of powered forms."""
        parts = []
        for i in range(self.size):
            base = f"({self.format_form(i)})"
            m = self.multiplicities[i]
            parts.append(base if m == 1 else f"{base}^{m}")
        return "*".join(parts)

    # -- derived arrangements ----------------------------------------------

    def _check_flat(self, flat: Flat) -> None:
        if not self.lattice.contains(flat):
            raise ValidationError(
                "Not a flat of this arrangement",
                field_name="flat",
                field_value=sorted(flat.indices),
            )

    def with_multiplicities(self, multiplicities: Sequence[int]) -> "MultiArrangement":
        return MultiArrangement.new(
            self.field, self.forms, multiplicities, self.variables, self.labels, self.name
        )

    def simple(self) -> "MultiArrangement":
        return self.with_multiplicities([1] * self.size)

    def subset(self, indices: Iterable[int], name: str = "") -> "MultiArrangement":
        chosen = sorted(indices)
        return MultiArrangement(
            self.field,
            self.num_vars,
            tuple(self.forms[i] for i in chosen),
            tuple(self.multiplicities[i] for i in chosen),
            self.variables,
            tuple(self.labels[i] for i in chosen),
            name,
        )

    def subarrangement(self, flat: Flat) -> "MultiArrangement":
        """Closed subarrangement A_X with restricted multiplicities m_X."""
        self._check_flat(flat)
        if not flat.indices:
            raise ValidationError("The ambient flat has no hyperplanes")
        return self.subset(flat.indices, name=f"{self.name}_{flat.label}".strip("_"))

    def _trace(self, form: Sequence, flat: Flat) -> tuple:
        free = [f for f in range(self.num_vars) if f not in flat.pivots]
        return tuple(
            form[f]
            - sum(
                (form[p] * row[f] for row, p in zip(flat.basis, flat.pivots)),
                self.field.zero,
            )
            for f in free
        )

    def _grouped_traces(self, flat: Flat) -> list[tuple[tuple, list[int]]]:
        groups: list[tuple[tuple, list[int]]] = []
        keys: dict[tuple, int] = {}
        for i, form in enumerate(self.forms):
            if i in flat.indices:
                continue
            trace = self._trace(form, flat)
            key = _normalized(trace)
            if key in keys:
                groups[keys[key]][1].append(i)
            else:
                keys[key] = len(groups)
                groups.append((trace, [i]))
        return groups

    def _restriction_variables(self, flat: Flat) -> tuple[str, ...]:
        return tuple(
            self.variables[f] for f in range(self.num_vars) if f not in flat.pivots
        )

    def restriction(self, flat: Flat) -> "MultiArrangement":
        """Simple arrangement A^X of distinct traces, in coordinates on X."""
        self._check_flat(flat)
        groups = self._grouped_traces(flat)
        if not groups:
            raise PreconditionError(
                "Restriction to the center is empty",
                operation="restriction",
                requirement="flat strictly below the center",
            )
        return MultiArrangement.new(
            self.field,
            [trace for trace, _ in groups],
            None,
            self._restriction_variables(flat),
            [self.labels[members[0]] for _, members in groups],
            name=f"{self.name}^{flat.label}",
        )

    def ziegler_restriction(self, hyperplane: int) -> "MultiArrangement":
        """Restriction to H with multiplicities counting coincident traces."""
        if not self.is_simple:
            raise PreconditionError(
                "Ziegler restriction needs a simple arrangement",
                operation="ziegler_restriction",
                requirement="all multiplicities equal to 1",
            )
        if not 0 <= hyperplane < self.size:
            raise ValidationError(
                "Hyperplane index out of range",
                field_name="hyperplane",
                field_value=hyperplane,
                expected=f"0..{self.size - 1}",
            )
        flat = self.lattice.hyperplane(hyperplane)
        groups = self._grouped_traces(flat)
        if not groups:
            raise PreconditionError(
                "Ziegler restriction of a single hyperplane is empty",
                operation="ziegler_restriction",
            )
        return MultiArrangement.new(
            self.field,
            [trace for trace, _ in groups],
            [len(members) for _, members in groups],
            self._restriction_variables(flat),
            [self.labels[members[0]] for _, members in groups],
            name=f"{self.name}^H{self.labels[hyperplane]}",
        )

    def irreducible_groups(self) -> list[list[int]]:
        """Index groups of the finest direct-sum decomposition.

        Fundamental circuits of a greedy basis are merged with union-find.
        """
        domain = self.field.domain
        basis: list[int] = []
        uf = UnionFind(range(self.size))
        for i, form in enumerate(self.forms):
            if basis:
                columns = rows_to_matrix(
                    [
                        {j: self.forms[b][r] for j, b in enumerate(basis)}
                        for r in range(self.num_vars)
                    ],
                    len(basis),
                    domain,
                )
                result = rank_kernel_solve(columns, list(form))
            else:
                result = None
            if result is None or result.solution is None:
                basis.append(i)
                continue
            for j, coeff in enumerate(result.solution):
                if coeff:
                    uf.union(i, basis[j])
        groups = [sorted(group) for group in uf.to_sets()]
        return sorted(groups, key=lambda g: g[0])

    def irreducible_factors(self) -> list["MultiArrangement"]:
        """Irreducible factors as subarrangements in the original coordinates."""
        return [
            self.subset(group, name=f"{self.name}_factor{k + 1}".lstrip("_"))
            for k, group in enumerate(self.irreducible_groups())
        ]

    def is_irreducible(self) -> bool:
        return len(self.irreducible_groups()) == 1

    def _frame_for(self, groups: Sequence[Sequence[int]]) -> CoordinateFrame:
        blocks = []
        for group in groups:
            span = self.lattice.closure(group)
            blocks.append(span.basis)
        return CoordinateFrame.from_blocks(self.field, blocks, self.variables)

    def _block_arrangement(
        self, frame: CoordinateFrame, block: int, group: Sequence[int], name: str
    ) -> "MultiArrangement":
        start, stop = frame.block_ranges[block]
        forms = [frame.coordinates(self.forms[i])[start:stop] for i in group]
        return MultiArrangement.new(
            self.field,
            forms,
            [self.multiplicities[i] for i in group],
            frame.block_variables(block),
            [self.labels[i] for i in group],
            name=name,
        )

    def essentialize(self) -> tuple["MultiArrangement", CoordinateFrame]:
        """Essential arrangement in rank(A) variables and the frame used."""
        group = list(range(self.size))
        frame = self._frame_for([group])
        return self._block_arrangement(frame, 0, group, self.name), frame

    def essential_factors(
        self,
    ) -> tuple[CoordinateFrame, list[tuple["MultiArrangement", list[int]]]]:
        """Essential irreducible factors sharing one coordinate frame.

        Returns:
            The frame and, per factor, the factor arrangement and the
            original hyperplane indices it came from
        """
        groups = self.irreducible_groups()
        frame = self._frame_for(groups)
        factors = [
            (
                self._block_arrangement(
                    frame, k, group, f"{self.name}_factor{k + 1}".lstrip("_")
                ),
                list(group),
            )
            for k, group in enumerate(groups)
        ]
        return frame, factors

    def product(self, other: "MultiArrangement") -> "MultiArrangement":
        """Direct product in disjoint variable sets."""
        if self.field != other.field:
            raise FieldError(
                "Products need a common field", field=f"{self.field} vs {other.field}"
            )
        zero = self.field.zero
        forms = [tuple(f) + (zero,) * other.num_vars for f in self.forms]
        forms += [(zero,) * self.num_vars + tuple(f) for f in other.forms]
        variables = self.variables + other.variables
        if len(set(variables)) != len(variables):
            variables = default_variable_names(len(variables))
        return MultiArrangement.new(
            self.field,
            forms,
            list(self.multiplicities) + list(other.multiplicities),
            variables,
            name=f"{self.name}x{other.name}",
        )

    def characteristic_polynomial(self) -> CharacteristicPolynomial:
        """Möbius-sum characteristic polynomial of a simple arrangement."""
        if not self.is_simple:
            raise PreconditionError(
                "Characteristic polynomial is only defined here for simple arrangements",
                operation="characteristic_polynomial",
                requirement="all multiplicities equal to 1",
            )
        coefficients = [0] * (self.num_vars + 1)
        for flat in self.lattice.all_flats():
            coefficients[flat.rank] += self.lattice.mobius_of(flat)
        return CharacteristicPolynomial(tuple(coefficients))
