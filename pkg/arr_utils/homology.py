"""Degree-by-degree cohomology of the graded complex and what it certifies.

The degree-d piece of level k is spanned by monomial multiples of the block
generators. For each degree the cohomology at level k is

    dim J^k_d - rank(delta^k on J^k_d) - rank(delta^(k-1) on J^(k-1)_d)

with J^0 = 0. Freeness of an essential totally formal multi-arrangement is
equivalent to the vanishing of levels 2..r, which are the levels 1..r-1 of
the derivation complex.

Requires Python 3.10+
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

from .arrangement import Flat, MultiArrangement
from .complexes import (
    Block,
    GradedSubmoduleComplex,
    build_J_complex,
    build_S_complex,
    is_totally_formal,
)
from .constants import STATUS_FREE, STATUS_NOT_FREE, STATUS_UNDETERMINED
from .linalg import SparseRow, monomial_basis, monomial_index, rank_of_rows, reduced_rows, shift_terms
from .performance import run_parallel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DegreeComponent:
    """Basis of J^k_d with columns ``coordinate * monomials + monomial``."""

    level: int
    degree: int
    num_monomials: int
    block_bases: tuple[tuple[Block, tuple[SparseRow, ...]], ...]

    @property
    def dimension(self) -> int:
        return sum(len(rows) for _, rows in self.block_bases)

    def rows(self) -> list[SparseRow]:
        return [row for _, rows in self.block_bases for row in rows]

    def block_dimension(self, flat: Flat) -> int:
        return sum(len(rows) for block, rows in self.block_bases if block.flat == flat)


def level_degree_component(
    complex_: GradedSubmoduleComplex, level: int, degree: int
) -> DegreeComponent:
    """Basis of the degree-d piece of J^k, one row-reduced block at a time."""
    scalar = complex_.scalar
    domain = scalar.domain
    num_vars = complex_.arrangement.num_vars
    nmon = len(monomial_basis(num_vars, degree))
    index = monomial_index(num_vars, degree)

    bases = []
    if level < 1 or level >= len(complex_.generators):
        return DegreeComponent(level, degree, nmon, ())
    for block in scalar.blocks[level]:
        gens = [g for g in complex_.generators[level] if g.flat == block.flat]
        spanning: list[SparseRow] = []
        for gen in gens:
            shift = degree - gen.degree
            if shift < 0:
                continue
            for mono in monomial_basis(num_vars, shift):
                row: SparseRow = {}
                for c, entry in enumerate(gen.entries):
                    if not entry:
                        continue
                    offset = c * nmon
                    for idx, coeff in shift_terms(entry.terms(), mono, index):
                        row[offset + idx] = coeff
                spanning.append(row)
        if not spanning:
            continue
        local = reduced_rows(spanning, block.size * nmon, domain)
        shift_cols = block.start * nmon
        bases.append((block, tuple({shift_cols + c: v for c, v in r.items()} for r in local)))
    return DegreeComponent(level, degree, nmon, tuple(bases))


def _image_rank(
    complex_: GradedSubmoduleComplex, component: DegreeComponent
) -> int:
    """Rank of delta^k applied to a degree component."""
    scalar = complex_.scalar
    k = component.level
    if k >= len(scalar.matrices) or component.dimension == 0:
        return 0
    nmon = component.num_monomials
    columns: dict[int, list[tuple[int, Any]]] = {}
    for row_index, row in scalar._dods[k].items():
        for col, value in row.items():
            columns.setdefault(col, []).append((row_index, value))
    images: list[SparseRow] = []
    for vector in component.rows():
        image: SparseRow = {}
        for col, coeff in vector.items():
            coord, mono = divmod(col, nmon)
            for target, value in columns.get(coord, ()):
                key = target * nmon + mono
                total = image.get(key, scalar.domain.zero) + value * coeff
                if total:
                    image[key] = total
                else:
                    image.pop(key, None)
        images.append(image)
    width = scalar.module_ranks[k + 1] * nmon
    return rank_of_rows(images, width, scalar.domain)


@dataclass(frozen=True)
class DegreeSlice:
    """Component dimensions and differential ranks in one degree."""

    degree: int
    component_dims: dict[int, int]
    image_ranks: dict[int, int]

    def cohomology(self, level: int) -> int:
        return (
            self.component_dims.get(level, 0)
            - self.image_ranks.get(level, 0)
            - self.image_ranks.get(level - 1, 0)
        )


def degree_slice(complex_: GradedSubmoduleComplex, degree: int) -> DegreeSlice:
    dims: dict[int, int] = {}
    ranks: dict[int, int] = {}
    for level in range(1, complex_.rank + 1):
        component = level_degree_component(complex_, level, degree)
        dims[level] = component.dimension
        ranks[level] = _image_rank(complex_, component)
    logger.debug(f"Degree {degree}: component dims {dims}, image ranks {ranks}")
    return DegreeSlice(degree, dims, ranks)


@dataclass
class HomologyTable:
    """dim H^i(J)_d for levels 2..r and degrees 0..degree_bound.

    ``derivation_dims`` holds level 1 (the kernel of delta^1 on J^1), which is
    the degree-d piece of the derivation module of an essential formal input.
    """

    dims: dict[int, dict[int, int]]
    degree_bound: int
    num_vars: int
    derivation_dims: dict[int, int] = field(default_factory=dict)

    @property
    def levels(self) -> list[int]:
        return sorted(self.dims)

    def get(self, level: int, degree: int) -> int:
        return self.dims.get(level, {}).get(degree, 0)

    def nonzero_entries(self) -> list[tuple[int, int, int]]:
        return [
            (level, degree, dim)
            for level in self.levels
            for degree, dim in sorted(self.dims[level].items())
            if dim
        ]

    def first_nonzero(self) -> tuple[int, int] | None:
        for level, degree, _ in self.nonzero_entries():
            return level, degree
        return None

    @property
    def vanishes(self) -> bool:
        return not self.nonzero_entries()

    def nonzero_levels(self) -> list[int]:
        return sorted({level for level, _, _ in self.nonzero_entries()})

    def is_finite_length(self, level: int) -> bool | None:
        """Zero in a trailing window of width l at the bound; None if undecidable."""
        window = range(self.degree_bound - self.num_vars + 1, self.degree_bound + 1)
        if window.start < 0:
            return None
        row = self.dims.get(level, {})
        return all(row.get(d, 0) == 0 for d in window)

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree_bound": self.degree_bound,
            "levels": {
                str(level): {str(d): dim for d, dim in sorted(row.items())}
                for level, row in sorted(self.dims.items())
            },
            "derivation_complex_levels": {
                str(level - 1): {str(d): dim for d, dim in sorted(row.items())}
                for level, row in sorted(self.dims.items())
            },
            "derivation_dims": {str(d): v for d, v in sorted(self.derivation_dims.items())},
        }


def homology_table(
    complex_: GradedSubmoduleComplex,
    d_max: int,
    jobs: int | None = None,
    stop_at_nonzero: bool = False,
) -> HomologyTable:
    """Cohomology dimensions of the graded complex up to degree ``d_max``.

    Args:
        complex_: Graded complex
        d_max: Largest degree computed
        jobs: Worker cap for the per-degree computations
        stop_at_nonzero: Stop at the first degree with a nonzero entry
            (sequential scan)

    Returns:
        HomologyTable covering levels 2..r
    """
    degrees = list(range(d_max + 1))
    if stop_at_nonzero:
        slices = []
        for d in degrees:
            current = degree_slice(complex_, d)
            slices.append(current)
            if any(current.cohomology(k) for k in range(2, complex_.rank + 1)):
                break
    else:
        slices = run_parallel(
            degrees, lambda d: degree_slice(complex_, d), max_workers=jobs, desc="Degrees"
        )

    dims = {level: {} for level in range(2, complex_.rank + 1)}
    derivation_dims = {}
    for current in slices:
        for level in dims:
            dims[level][current.degree] = current.cohomology(level)
        derivation_dims[current.degree] = current.cohomology(1)
    bound = slices[-1].degree if slices else -1
    return HomologyTable(dims, bound, complex_.arrangement.num_vars, derivation_dims)


def default_degree_bound(arrangement: MultiArrangement) -> int:
    return arrangement.total_multiplicity + arrangement.rank


@dataclass(frozen=True)
class HomologyResult:
    """Outcome of the homological freeness test."""

    status: str
    level: int | None = None
    degree: int | None = None
    flat: Flat | None = None
    table: HomologyTable | None = None

    @property
    def is_not_free(self) -> bool:
        return self.status in ("NotFree", "NotFormal")

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"status": self.status}
        if self.level is not None:
            data["level"] = self.level
        if self.degree is not None:
            data["degree"] = self.degree
        if self.flat is not None:
            data["flat"] = self.flat.label
        if self.table is not None:
            data["table"] = self.table.to_dict()
        return data


def freeness_by_homology(
    arrangement: MultiArrangement,
    multiplicities: Sequence[int] | None = None,
    d_max: int | None = None,
    jobs: int | None = None,
) -> HomologyResult:
    """Homological freeness test with the total-formality gate.

    Non-essential inputs are essentialized first. A nonzero entry is a
    non-freeness certificate; an all-zero table only says the cohomology
    vanishes up to the bound.
    """
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    if not arrangement.is_essential:
        arrangement, _ = arrangement.essentialize()
    scalar = build_S_complex(arrangement)
    formality = is_totally_formal(scalar)
    if not formality:
        return HomologyResult(
            "NotFormal", level=formality.failing_level, flat=formality.failing_flat
        )
    bound = default_degree_bound(arrangement) if d_max is None else d_max
    table = homology_table(build_J_complex(arrangement, scalar=scalar), bound, jobs)
    witness = table.first_nonzero()
    if witness:
        return HomologyResult("NotFree", witness[0], witness[1], table=table)
    return HomologyResult("VanishesUpTo", degree=bound, table=table)


@dataclass(frozen=True)
class LocalFreeness:
    """Outcome of the local scan; ``status`` is Free, NotFree or Undetermined."""

    status: str
    failing_flat: Flat | None = None
    verdict: Any = None

    @property
    def locally_free(self) -> bool | None:
        """True, False, or None when some flat could not be decided."""
        return {STATUS_FREE: True, STATUS_NOT_FREE: False}.get(self.status)

    def __bool__(self) -> bool:
        return self.status == STATUS_FREE


def local_freeness(
    arrangement: MultiArrangement,
    multiplicities: Sequence[int] | None = None,
    d_max: int | None = None,
) -> LocalFreeness:
    """Freeness of (A_X, m_X) for every proper flat of rank at least 3.

    A NotFree flat decides the scan; an undecided flat only makes it
    Undetermined when no other flat fails.
    """
    from .analyzer import DecisionOptions, decide_freeness

    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    lattice = arrangement.lattice
    pending: LocalFreeness | None = None
    for rank in range(3, lattice.rank):
        for flat in lattice.flats(rank):
            verdict = decide_freeness(
                arrangement.subarrangement(flat), options=DecisionOptions(d_max=d_max)
            )
            logger.debug(f"Local freeness at {flat.label}: {verdict.status}")
            if verdict.status == STATUS_NOT_FREE:
                return LocalFreeness(STATUS_NOT_FREE, flat, verdict)
            if verdict.status != STATUS_FREE and pending is None:
                pending = LocalFreeness(STATUS_UNDETERMINED, flat, verdict)
    return pending if pending is not None else LocalFreeness(STATUS_FREE)


def is_generic_flat(arrangement: MultiArrangement, flat: Flat) -> bool:
    """Every flat strictly below X has exactly as many hyperplanes as its rank."""
    return all(
        other.size == other.rank
        for other in arrangement.lattice.below(flat, strict=True)
    )


@dataclass(frozen=True)
class PdimBounds:
    lower: int
    upper: int
    heuristic: bool = False

    @property
    def exact(self) -> bool:
        return self.lower == self.upper and not self.heuristic

    def to_dict(self) -> dict[str, Any]:
        return {"lower": self.lower, "upper": self.upper, "heuristic": self.heuristic}


def pdim_bounds(
    arrangement: MultiArrangement,
    table: HomologyTable,
    multiplicities: Sequence[int] | None = None,
    certified: bool = False,
) -> PdimBounds:
    """Bounds on the projective dimension of the derivation module.

    The lower bound comes from generic closed flats with more hyperplanes
    than their rank; the upper bound from the nonzero cohomology levels,
    each taken to be of finite length (projective dimension l). With a
    single nonzero finite-length level the bounds coincide.

    An all-zero table is only a truncation. It pins the upper bound to the
    lower one when ``certified`` is set (freeness proved by a Saito basis
    or a TF2 classifier) or when the lower bound already meets the cap.
    """
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    rank = arrangement.rank
    cap = max(rank - 2, 0)
    lower = 0
    for flat in arrangement.lattice.all_flats():
        if flat.rank >= 3 and flat.size > flat.rank and is_generic_flat(arrangement, flat):
            lower = max(lower, flat.rank - 2)
    lower = min(lower, cap)

    levels = table.nonzero_levels()
    num_vars = table.num_vars
    if not levels:
        if certified or lower == cap:
            return PdimBounds(lower, lower)
        logger.warning(
            f"Cohomology vanishes up to degree {table.degree_bound} without a freeness "
            "certificate; projective dimension bounds are heuristic"
        )
        return PdimBounds(lower, cap, heuristic=True)

    finite = [table.is_finite_length(level) for level in levels]
    heuristic = any(f is not True for f in finite)
    if heuristic:
        upper = cap
        logger.warning(
            f"Truncation at degree {table.degree_bound} cannot certify finite length; "
            "projective dimension bounds are heuristic"
        )
    else:
        upper = min(max(num_vars - level for level in levels), cap)
        if len(levels) == 1:
            lower = max(lower, upper)
    return PdimBounds(lower, max(upper, lower), heuristic)
