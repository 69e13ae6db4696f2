"""The scalar complex and the graded complex of powered-form submodules.

The scalar complex has one coordinate block per flat: level k is indexed by
rank-k flats and the block of X holds a basis of the relations among the
level-(k-1) rows below X. The graded complex carries, per block, explicit
polynomial generators of the submodule spanned by pushforwards of powered
linear forms.

Requires Python 3.10+
"""

import logging
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Sequence

from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyElement

from .arrangement import Flat, MultiArrangement
from .graphs import Edge, clique_complex, graphic_arrangement
from .linalg import (
    Field,
    PolyVector,
    SparseRow,
    left_kernel,
    matrix_rank,
    monomial_basis,
    monomial_index,
    rank_of_rows,
    rows_to_matrix,
    shift_terms,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Block:
    """Coordinate range of one flat at one level."""

    flat: Flat
    start: int
    stop: int

    @property
    def size(self) -> int:
        return self.stop - self.start


@dataclass
class ScalarComplex:
    """Block-structured scalar matrices delta^0 ... delta^(r-1)."""

    arrangement: MultiArrangement
    matrices: list[DomainMatrix]
    blocks: list[list[Block]]
    scope: Flat | None = None

    @property
    def rank(self) -> int:
        return len(self.blocks) - 1

    @property
    def domain(self):
        return self.arrangement.field.domain

    @property
    def module_ranks(self) -> list[int]:
        return [self.arrangement.num_vars] + [m.shape[0] for m in self.matrices]

    @cached_property
    def differential_ranks(self) -> list[int]:
        return [matrix_rank(m) for m in self.matrices]

    def cohomology(self) -> list[int]:
        """dim H^k for k = 0..r."""
        sizes = self.module_ranks
        ranks = self.differential_ranks
        return [
            sizes[k]
            - (ranks[k] if k < len(ranks) else 0)
            - (ranks[k - 1] if k > 0 else 0)
            for k in range(len(sizes))
        ]

    def block_of(self, level: int, flat: Flat) -> Block:
        for block in self.blocks[level]:
            if block.flat == flat:
                return block
        raise KeyError(f"No block for flat {flat.label} at level {level}")

    @cached_property
    def _dods(self) -> list[dict[int, dict[int, Any]]]:
        return [m.to_dod() for m in self.matrices]

    def entry(self, level: int, row: int, col: int):
        return self._dods[level].get(row, {}).get(col, self.domain.zero)

    def row(self, level: int, row: int) -> dict[int, Any]:
        return self._dods[level].get(row, {})

    def composites_vanish(self) -> bool:
        """Check delta^k delta^(k-1) = 0 for every k."""
        for k in range(1, len(self.matrices)):
            product = self.matrices[k] * self.matrices[k - 1]
            if not product.is_zero_matrix:
                return False
        return True

    def localize(self, flat: Flat) -> "ScalarComplex":
        """Sub-complex on the blocks of flats below X (the complex of A_X)."""
        kept = [
            [b for b in level if b.flat.indices <= flat.indices]
            for level in self.blocks[: flat.rank + 1]
        ]
        kept[0] = self.blocks[0]
        new_blocks: list[list[Block]] = []
        positions: list[list[int]] = []
        for level in kept:
            coords: list[int] = []
            renumbered = []
            for b in level:
                start = len(coords)
                coords.extend(range(b.start, b.stop))
                renumbered.append(Block(b.flat, start, len(coords)))
            new_blocks.append(renumbered)
            positions.append(coords)

        matrices = []
        for k in range(flat.rank):
            col_index = {c: j for j, c in enumerate(positions[k])}
            rows = []
            for r in positions[k + 1]:
                rows.append(
                    {col_index[c]: v for c, v in self.row(k, r).items() if c in col_index}
                )
            matrices.append(rows_to_matrix(rows, len(positions[k]), self.domain))
        return ScalarComplex(self.arrangement, matrices, new_blocks, scope=flat)

    def to_dict(self) -> dict[str, Any]:
        fmt = self.arrangement.field.format
        return {
            "module_ranks": self.module_ranks,
            "differential_ranks": self.differential_ranks,
            "cohomology": self.cohomology(),
            "differentials": [
                {
                    "level": k,
                    "shape": list(m.shape),
                    "entries": [
                        [fmt(v) for v in row] for row in m.to_dense().to_list()
                    ],
                }
                for k, m in enumerate(self.matrices)
            ],
            "blocks": [
                [{"flat": b.flat.label, "start": b.start, "stop": b.stop} for b in level]
                for level in self.blocks
            ],
        }


def relation_space(arrangement: MultiArrangement) -> DomainMatrix:
    """Rows form a basis of the linear relations among the forms."""
    coefficients = rows_to_matrix(
        [dict(enumerate(f)) for f in arrangement.forms],
        arrangement.num_vars,
        arrangement.field.domain,
    )
    kernel = left_kernel(coefficients)
    return rows_to_matrix(list(kernel), arrangement.size, arrangement.field.domain)


def _recombine(vectors: list[tuple], rng: random.Random, field_: Field) -> list[tuple]:
    # unit-triangular recombination followed by reversal is invertible
    mixed = []
    for i, v in enumerate(vectors):
        combo = list(v)
        for w in vectors[i + 1 :]:
            c = field_.convert(rng.randint(-3, 3))
            combo = [a + c * b for a, b in zip(combo, w)]
        mixed.append(tuple(combo))
    return list(reversed(mixed))


def build_S_complex(
    arrangement: MultiArrangement, rng: random.Random | None = None
) -> ScalarComplex:
    """Build the scalar complex of an arrangement.

    Args:
        arrangement: Any multi-arrangement (multiplicities are ignored)
        rng: When given, every relation block is replaced by a random
            invertible recombination of the canonical basis

    Returns:
        ScalarComplex with canonical row-reduced relation blocks
    """
    lattice = arrangement.lattice
    domain = arrangement.field.domain
    num_vars = arrangement.num_vars

    delta0 = [dict(enumerate(form)) for form in arrangement.forms]
    matrices = [rows_to_matrix(delta0, num_vars, domain)]
    blocks: list[list[Block]] = [[Block(lattice.ambient, 0, num_vars)]]
    blocks.append([Block(lattice.hyperplane(i), i, i + 1) for i in range(arrangement.size)])

    previous_rows: list[SparseRow] = [{j: v for j, v in r.items() if v} for r in delta0]
    previous_width = num_vars
    for k in range(1, lattice.rank):
        new_rows: list[SparseRow] = []
        new_blocks: list[Block] = []
        for flat in lattice.flats(k + 1):
            positions = [
                c
                for b in blocks[k]
                if b.flat.indices < flat.indices
                for c in range(b.start, b.stop)
            ]
            start = len(new_rows)
            if positions:
                sub = rows_to_matrix(
                    [previous_rows[c] for c in positions], previous_width, domain
                )
                kernel = left_kernel(sub)
                if rng is not None and len(kernel) > 1:
                    kernel = _recombine(kernel, rng, arrangement.field)
                for vector in kernel:
                    new_rows.append({positions[j]: v for j, v in enumerate(vector) if v})
            new_blocks.append(Block(flat, start, len(new_rows)))
        width = len(previous_rows)
        matrices.append(rows_to_matrix(new_rows, width, domain))
        blocks.append(new_blocks)
        previous_rows, previous_width = new_rows, width

    complex_ = ScalarComplex(arrangement, matrices, blocks)
    logger.debug(f"Scalar complex module ranks: {complex_.module_ranks}")
    return complex_


@dataclass(frozen=True)
class FormalityProfile:
    """Cohomology of the scalar complex and the formality it implies."""

    module_ranks: tuple[int, ...]
    differential_ranks: tuple[int, ...]
    cohomology: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.cohomology) - 1

    @property
    def is_essential(self) -> bool:
        return self.cohomology[0] == 0

    def is_k_formal(self, k: int) -> bool:
        """k-formal iff H^i = 0 for 1 <= i <= k-1."""
        return all(self.cohomology[i] == 0 for i in range(1, min(k, len(self.cohomology))))

    @property
    def is_formal(self) -> bool:
        return self.is_k_formal(2)

    @property
    def formal_up_to(self) -> int:
        k = 1
        while k < self.rank and self.is_k_formal(k + 1):
            k += 1
        return k

    @property
    def is_fully_formal(self) -> bool:
        return self.is_k_formal(self.rank)

    def to_dict(self) -> dict[str, Any]:
        return {
            "module_ranks": list(self.module_ranks),
            "differential_ranks": list(self.differential_ranks),
            "cohomology": list(self.cohomology),
            "essential": self.is_essential,
            "formal": self.is_formal,
            "k_formal_up_to": self.formal_up_to,
        }


def formality_profile(source: MultiArrangement | ScalarComplex) -> FormalityProfile:
    scalar = source if isinstance(source, ScalarComplex) else build_S_complex(source)
    return FormalityProfile(
        tuple(scalar.module_ranks),
        tuple(scalar.differential_ranks),
        tuple(scalar.cohomology()),
    )


@dataclass(frozen=True)
class TotalFormality:
    """Outcome of the total-formality test with the first failing flat."""

    totally_formal: bool
    failing_flat: Flat | None = None
    failing_level: int | None = None

    def __bool__(self) -> bool:
        return self.totally_formal


def is_totally_formal(source: MultiArrangement | ScalarComplex) -> TotalFormality:
    """Every closed subarrangement A_X is k-formal for 2 <= k <= r(X)."""
    scalar = source if isinstance(source, ScalarComplex) else build_S_complex(source)
    lattice = scalar.arrangement.lattice
    for rank in range(3, lattice.rank + 1):
        for flat in lattice.flats(rank):
            cohomology = scalar.localize(flat).cohomology()
            for level in range(1, rank):
                if cohomology[level] != 0:
                    logger.debug(f"Total formality fails at {flat.label}, level {level}")
                    return TotalFormality(False, flat, level)
    return TotalFormality(True)


def euler_block_prediction(scalar: ScalarComplex, flat: Flat) -> int:
    """Block size of X at level r(X) predicted by a vanishing Euler characteristic.

    Valid for totally formal inputs, where only H^0 survives.
    """
    sizes = scalar.localize(flat).module_ranks
    top = flat.rank
    h0 = scalar.arrangement.num_vars - top
    partial = sum((-1) ** k * sizes[k] for k in range(top))
    return (-1) ** top * (h0 - partial)


@dataclass(frozen=True)
class Generator:
    """Polynomial generator of one block of the graded complex."""

    level: int
    flat: Flat
    entries: tuple[PolyElement, ...]
    degree: int
    source: int | None = field(default=None, compare=False)

    def as_poly_vector(self) -> PolyVector:
        return PolyVector.unshifted(self.entries, self.degree)


def _scalar_key(entries: Sequence[PolyElement]) -> tuple:
    lead = next(e for e in entries if e).LC
    return tuple(e.quo_ground(lead) if e else e for e in entries)


@dataclass
class GradedSubmoduleComplex:
    """Generators of J^k inside the free modules of the scalar complex."""

    scalar: ScalarComplex
    multiplicities: tuple[int, ...]
    generators: list[list[Generator]]

    @property
    def rank(self) -> int:
        return self.scalar.rank

    @property
    def arrangement(self) -> MultiArrangement:
        return self.scalar.arrangement

    def generators_in(self, level: int, flat: Flat) -> list[Generator]:
        return [g for g in self.generators[level] if g.flat == flat]

    def push_forward(self, generator: Generator) -> dict[int, PolyElement]:
        """Image of a generator under delta^level, keyed by level+1 coordinate."""
        k = generator.level
        block = self.scalar.block_of(k, generator.flat)
        image: dict[int, PolyElement] = {}
        if k >= len(self.scalar.matrices):
            return image
        ring = self.arrangement.ring
        for row_index, row in self.scalar._dods[k].items():
            total = ring.zero
            for c, entry in enumerate(generator.entries):
                coeff = row.get(block.start + c)
                if coeff and entry:
                    total += entry * coeff
            if total:
                image[row_index] = total
        return image

    def verify_pushforward(self) -> bool:
        """Each generator above level 1 equals delta applied to its source."""
        for level in range(2, len(self.generators)):
            for gen in self.generators[level]:
                source = self.generators[level - 1][gen.source]
                image = self.push_forward(source)
                block = self.scalar.block_of(level, gen.flat)
                expected = tuple(
                    image.get(block.start + c, self.arrangement.ring.zero)
                    for c in range(block.size)
                )
                if expected != gen.entries:
                    return False
        return True

    def composites_vanish(self) -> bool:
        """Check that delta applied twice kills every generator."""
        zero = self.arrangement.ring.zero
        matrices = self.scalar.matrices
        for level in range(1, len(self.generators)):
            if level + 1 >= len(matrices):
                break
            for gen in self.generators[level]:
                image = self.push_forward(gen)
                if not image:
                    continue
                for row in self.scalar._dods[level + 1].values():
                    total = zero
                    for c, coeff in row.items():
                        if c in image:
                            total += image[c] * coeff
                    if total:
                        return False
        return True

    def to_dict(self) -> dict[str, Any]:
        return {
            "levels": {
                str(level): [
                    {
                        "flat": g.flat.label,
                        "degree": g.degree,
                        "entries": [str(e) for e in g.entries],
                    }
                    for g in gens
                ]
                for level, gens in enumerate(self.generators)
                if level > 0
            }
        }


def build_J_complex(
    arrangement: MultiArrangement,
    multiplicities: Sequence[int] | None = None,
    scalar: ScalarComplex | None = None,
) -> GradedSubmoduleComplex:
    """Build the graded complex of powered-form submodules.

    Level 1 holds alpha_H^m(H) in the block of H. The generators of the X
    block at level k+1 are the X-components of delta^k applied to the
    generators of the blocks below X, deduplicated up to scalars.
    Level 0 is the zero module.
    """
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    scalar = scalar or build_S_complex(arrangement)
    ring = arrangement.ring
    mults = arrangement.multiplicities

    generators: list[list[Generator]] = [[]]
    generators.append(
        [
            Generator(1, arrangement.lattice.hyperplane(i), (power,), mults[i])
            for i, power in enumerate(arrangement.powered_forms)
        ]
    )
    complex_ = GradedSubmoduleComplex(scalar, mults, generators)

    for k in range(1, scalar.rank):
        level: list[Generator] = []
        images = [complex_.push_forward(gen) for gen in generators[k]]
        for block in scalar.blocks[k + 1]:
            if block.size == 0:
                continue
            seen: set[tuple] = set()
            for source_index, (gen, image) in enumerate(zip(generators[k], images)):
                if not gen.flat.indices < block.flat.indices:
                    continue
                entries = tuple(
                    image.get(block.start + c, ring.zero) for c in range(block.size)
                )
                if not any(entries):
                    continue
                key = _scalar_key(entries)
                if key in seen:
                    continue
                seen.add(key)
                level.append(Generator(k + 1, block.flat, entries, gen.degree, source_index))
        generators.append(level)

    logger.debug(
        f"Graded complex generator counts: {[len(g) for g in generators[1:]]}"
    )
    return complex_


def graphic_D_description(
    edges: Sequence[Edge],
    multiplicities: Sequence[int] | None = None,
    vertices: Sequence[Hashable] | None = None,
    field_: Field | None = None,
) -> dict[tuple, list[PolyElement]]:
    """Powered edge forms generating J(sigma) for each simplex of dimension >= 1."""
    arrangement = graphic_arrangement(edges, multiplicities, vertices, field_)
    edge_index = {frozenset(e): i for i, e in enumerate(edges)}
    description: dict[tuple, list[PolyElement]] = {}
    for dim, simplices in clique_complex(edges, vertices).items():
        if dim < 1:
            continue
        for simplex in simplices:
            description[simplex] = [
                arrangement.powered_forms[edge_index[frozenset((u, v))]]
                for a, u in enumerate(simplex)
                for v in simplex[a + 1 :]
            ]
    return description


def _degree_span(polys: Sequence[PolyElement], degree: int, num_vars: int) -> list[SparseRow]:
    index = monomial_index(num_vars, degree)
    rows: list[SparseRow] = []
    for poly in polys:
        if not poly:
            continue
        shift = degree - sum(poly.LM)
        for mono in monomial_basis(num_vars, shift):
            row: SparseRow = {}
            for idx, coeff in shift_terms(poly.terms(), mono, index):
                row[idx] = coeff
            rows.append(row)
    return rows


def graphic_description_agrees(
    edges: Sequence[Edge],
    multiplicities: Sequence[int] | None = None,
    max_degree: int = 4,
    vertices: Sequence[Hashable] | None = None,
) -> bool:
    """Compare J(sigma) with the graded complex blocks degree by degree."""
    arrangement = graphic_arrangement(edges, multiplicities, vertices)
    description = graphic_D_description(edges, multiplicities, vertices)
    jcomplex = build_J_complex(arrangement)
    edge_index = {frozenset(e): i for i, e in enumerate(edges)}
    domain = arrangement.field.domain
    n = arrangement.num_vars

    for simplex, ideal in description.items():
        members = {
            edge_index[frozenset((u, v))]
            for a, u in enumerate(simplex)
            for v in simplex[a + 1 :]
        }
        flat = arrangement.lattice.closure(members)
        level = len(simplex) - 1
        block_gens = [g.entries[0] for g in jcomplex.generators_in(level, flat)]
        for d in range(max_degree + 1):
            width = len(monomial_basis(n, d))
            left = _degree_span(ideal, d, n)
            right = _degree_span(block_gens, d, n)
            rank_left = rank_of_rows(left, width, domain)
            rank_right = rank_of_rows(right, width, domain)
            rank_both = rank_of_rows(left + right, width, domain)
            if not rank_left == rank_right == rank_both:
                logger.debug(f"Graphic block mismatch at simplex {simplex}, degree {d}")
                return False
    return True
