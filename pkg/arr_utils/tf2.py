"""TF2 arrangements: combinatorial freeness, incidence graphs, the H^2
presentation and the classification of free multiplicities.

A TF2 arrangement is totally formal with a scalar complex that stops at level
2. Its graded complex has two levels, so H^2 is the cokernel of one explicit
polynomial matrix whose rows are the incidences [X, H] with X a triple flat.

Requires Python 3.10+
"""

import logging
import random
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Any, Sequence

import networkx as nx
from sympy.polys.rings import PolyElement

from .arrangement import Flat, MultiArrangement
from .complexes import build_J_complex, build_S_complex, is_totally_formal
from .derivations import (
    Derivation,
    derivation_space,
    minimal_generator_degrees,
    rank2_exponents,
    rank2_generators,
)
from .exceptions import ArrangementError, FieldError, PreconditionError, ValidationError
from .families import xrt
from .homology import PdimBounds, homology_table, level_degree_component, pdim_bounds
from .linalg import (
    Field,
    SparseRow,
    columns_to_matrix,
    monomial_basis,
    monomial_index,
    rank_kernel_solve,
    rank_of_rows,
    shift_terms,
)
from .performance import run_parallel

logger = logging.getLogger(__name__)

Node = tuple[str, Any]


def triple_flats(arrangement: MultiArrangement) -> list[Flat]:
    """Rank-2 flats on at least three hyperplanes."""
    return arrangement.lattice.triple_flats()


def is_tf2(arrangement: MultiArrangement) -> bool:
    scalar = build_S_complex(arrangement)
    if any(scalar.module_ranks[3:]):
        return False
    return bool(is_totally_formal(scalar))


def _require_irreducible_tf2(arrangement: MultiArrangement, operation: str) -> None:
    if not arrangement.is_irreducible():
        raise PreconditionError(
            "Arrangement is not irreducible", operation=operation, requirement="irreducible"
        )
    if not is_tf2(arrangement):
        raise PreconditionError(
            "Arrangement is not TF2", operation=operation, requirement="TF2"
        )


# ---------------------------------------------------------------------------
# Combinatorial freeness and supersolvability
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tf2CombinatorialReport:
    """Counts behind the lattice-only freeness test for irreducible TF2 input."""

    rank: int
    size: int
    triple_count: int
    excess: int
    supersolvable: bool

    @property
    def identity_holds(self) -> bool:
        return self.size == self.rank - self.triple_count + self.excess

    @property
    def bound_holds(self) -> bool:
        return self.size <= 1 + self.excess

    @property
    def free(self) -> bool:
        return self.triple_count == self.rank - 1

    @property
    def totally_non_free(self) -> bool:
        return self.triple_count > self.rank

    def to_dict(self) -> dict[str, Any]:
        return {
            "rank": self.rank,
            "hyperplanes": self.size,
            "triple_flats": self.triple_count,
            "excess": self.excess,
            "identity_holds": self.identity_holds,
            "bound_holds": self.bound_holds,
            "free": self.free,
            "supersolvable": self.supersolvable,
            "totally_non_free": self.totally_non_free,
        }


def _greedy_filtration(arrangement: MultiArrangement) -> tuple[list[Flat], list[frozenset[int]]]:
    flats = triple_flats(arrangement)
    if not flats:
        return [], [frozenset(range(arrangement.size))]
    first = flats[0]
    used = [first]
    layers = [frozenset({min(first.indices)}), first.indices]
    remaining = flats[1:]
    while remaining:
        step = next((f for f in remaining if f.indices & layers[-1]), None)
        if step is None:
            break
        remaining.remove(step)
        used.append(step)
        layers.append(layers[-1] | step.indices)
    return used, layers


def _satisfies_rp_ip(arrangement: MultiArrangement, layers: Sequence[frozenset[int]]) -> bool:
    lattice = arrangement.lattice
    if len(layers) != arrangement.rank or layers[-1] != frozenset(range(arrangement.size)):
        return False
    for i, layer in enumerate(layers, start=1):
        if lattice.closure(layer).rank != i:
            return False
        if i == 1:
            continue
        previous = layers[i - 2]
        for a, b in combinations(sorted(layer - previous), 2):
            if not lattice.closure({a, b}).indices & previous:
                return False
    return True


def tf2_freeness_combinatorial(arrangement: MultiArrangement) -> Tf2CombinatorialReport:
    """Freeness of an irreducible TF2 arrangement read off its triple flats.

    Raises:
        PreconditionError: Input is not irreducible TF2
        ArrangementError: The Euler characteristic identity fails
    """
    _require_irreducible_tf2(arrangement, "tf2_freeness_combinatorial")
    flats = triple_flats(arrangement)
    _, layers = _greedy_filtration(arrangement)
    report = Tf2CombinatorialReport(
        rank=arrangement.rank,
        size=arrangement.size,
        triple_count=len(flats),
        excess=sum(flat.size - 1 for flat in flats),
        supersolvable=_satisfies_rp_ip(arrangement, layers),
    )
    if not report.identity_holds:
        raise ArrangementError(
            "Euler characteristic identity fails on a TF2 arrangement",
            context=report.to_dict(),
        )
    if report.free != report.supersolvable:
        logger.warning(
            f"Free={report.free} but supersolvable={report.supersolvable} "
            "for the greedy filtration"
        )
    logger.info(
        f"TF2 counts: r={report.rank}, |A|={report.size}, "
        f"#trip={report.triple_count}, free={report.free}"
    )
    return report


@dataclass(frozen=True)
class SupersolvableFiltration:
    """Triple flats X_1..X_(r-1) and the layers A_1 < ... < A_r they build."""

    flats: tuple[Flat, ...]
    layers: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...] = field(repr=False, default=())

    def to_dict(self) -> dict[str, Any]:
        return {
            "flats": [flat.label for flat in self.flats],
            "layers": [[self.labels[i] for i in layer] for layer in self.layers],
        }


def supersolvable_filtration(arrangement: MultiArrangement) -> SupersolvableFiltration:
    """Filtration through the triple flats, with the rank and intersection
    properties checked directly.

    Raises:
        PreconditionError: Input is not a free TF2 arrangement
    """
    report = tf2_freeness_combinatorial(arrangement)
    if not report.free:
        raise PreconditionError(
            "Supersolvable filtrations exist only for free TF2 arrangements",
            operation="supersolvable_filtration",
            requirement="#L2trip = r - 1",
        )
    flats, layers = _greedy_filtration(arrangement)
    if not _satisfies_rp_ip(arrangement, layers):
        raise ArrangementError("Greedy filtration violates the rank or intersection property")
    return SupersolvableFiltration(
        tuple(flats),
        tuple(tuple(sorted(layer)) for layer in layers),
        arrangement.labels,
    )


# ---------------------------------------------------------------------------
# Incidence graphs
# ---------------------------------------------------------------------------


def _flat_node(flat: Flat) -> Node:
    return ("X", flat.sorted_indices)


@dataclass
class IncidenceGraph:
    """Bipartite incidence of triple flats and hyperplanes, full and reduced.

    The reduced graph drops hyperplanes of valence at most one.
    """

    arrangement: MultiArrangement
    graph: nx.Graph
    reduced: nx.Graph

    def label(self, node: Node) -> str:
        kind, key = node
        if kind == "H":
            return f"H{self.arrangement.labels[key]}"
        return f"X{self.graph.nodes[node]['flat'].label}"

    def flat(self, node: Node) -> Flat:
        return self.graph.nodes[node]["flat"]

    @property
    def is_connected(self) -> bool:
        return self.reduced.number_of_nodes() > 0 and nx.is_connected(self.reduced)

    @property
    def is_tree(self) -> bool:
        return self.reduced.number_of_nodes() > 0 and nx.is_tree(self.reduced)

    def cycle(self) -> list[Node] | None:
        """The unique cycle H_0, X_0, H_1, X_1, ... of a unicyclic reduced graph."""
        g = self.reduced
        if not self.is_connected or g.number_of_edges() != g.number_of_nodes():
            return None
        basis = nx.cycle_basis(g)
        if len(basis) != 1:
            return None
        members = set(basis[0])
        start = min(n for n in members if n[0] == "H")
        order = [start]
        previous, current = None, start
        while True:
            step = min(n for n in g.neighbors(current) if n in members and n != previous)
            if step == start:
                break
            order.append(step)
            previous, current = current, step
        return order

    def to_dict(self) -> dict[str, Any]:
        cycle = self.cycle()
        return {
            "nodes": sorted(self.label(n) for n in self.reduced.nodes),
            "edges": sorted(
                sorted((self.label(u), self.label(v))) for u, v in self.reduced.edges
            ),
            "removed": sorted(
                self.label(n) for n in self.graph.nodes if n not in self.reduced
            ),
            "tree": self.is_tree,
            "cycle": [self.label(n) for n in cycle] if cycle else None,
        }


def incidence_graphs(arrangement: MultiArrangement) -> IncidenceGraph:
    graph = nx.Graph()
    for i in range(arrangement.size):
        graph.add_node(("H", i), bipartite=1)
    for flat in triple_flats(arrangement):
        node = _flat_node(flat)
        graph.add_node(node, bipartite=0, flat=flat)
        for i in flat.sorted_indices:
            graph.add_edge(node, ("H", i))
    reduced = graph.copy()
    reduced.remove_nodes_from(
        [n for n in graph.nodes if n[0] == "H" and graph.degree(n) <= 1]
    )
    logger.debug(
        f"Reduced incidence graph: {reduced.number_of_nodes()} nodes, "
        f"{reduced.number_of_edges()} edges"
    )
    return IncidenceGraph(arrangement, graph, reduced)


# ---------------------------------------------------------------------------
# The presentation matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PresentationColumn:
    """One column: an inclusion [H] or a local generator (X, theta) / (X, psi)."""

    kind: str
    key: str
    degree: int
    entries: dict[int, PolyElement]


def _incidence_rows(arrangement: MultiArrangement) -> list[tuple[Flat, int]]:
    return [(flat, i) for flat in triple_flats(arrangement) for i in flat.sorted_indices]


def _bar(theta: Derivation, arrangement: MultiArrangement, index: int) -> PolyElement:
    """theta(alpha_H) / alpha_H^m(H)."""
    value = theta.apply(arrangement.forms[index])
    if not value:
        return value
    quotient, remainder = divmod(value, arrangement.powered_forms[index])
    if remainder:
        raise ArrangementError(
            "Local generator is not logarithmic along its hyperplane",
            context={"hyperplane": arrangement.labels[index]},
        )
    return quotient


def _iota_columns(
    arrangement: MultiArrangement, rows: Sequence[tuple[Flat, int]]
) -> list[PresentationColumn]:
    one = arrangement.ring.one
    return [
        PresentationColumn(
            "iota",
            f"H{arrangement.labels[i]}",
            arrangement.multiplicities[i],
            {r: one for r, (_, j) in enumerate(rows) if j == i},
        )
        for i in range(arrangement.size)
    ]


def _generator_column(
    kind: str,
    flat: Flat,
    theta: Derivation,
    arrangement: MultiArrangement,
    row_of: dict[tuple[frozenset[int], int], int],
) -> PresentationColumn:
    entries = {
        row_of[(flat.indices, i)]: _bar(theta, arrangement, i) for i in flat.sorted_indices
    }
    return PresentationColumn(kind, f"X{flat.label}", theta.degree, entries)


def _random_form(arrangement: MultiArrangement, degree: int, rng: random.Random) -> PolyElement:
    field_ = arrangement.field
    return arrangement.ring.from_dict(
        {
            mono: field_.convert(rng.randint(-3, 3))
            for mono in monomial_basis(arrangement.num_vars, degree)
        }
    )


def _recombine_pair(
    theta: Derivation, psi: Derivation, arrangement: MultiArrangement, rng: random.Random
) -> tuple[Derivation, Derivation]:
    # theta -> c theta, psi -> psi + g theta keeps a basis of the local module
    c = arrangement.field.convert(rng.choice([-2, -1, 1, 2, 3]))
    g = _random_form(arrangement, psi.degree - theta.degree, rng)
    new_theta = Derivation(tuple(f * c for f in theta.coeffs), theta.degree)
    new_psi = Derivation(
        tuple(p + g * t for p, t in zip(psi.coeffs, theta.coeffs)), psi.degree
    )
    return new_theta, new_psi


def _image_vectors(
    columns: Sequence[PresentationColumn],
    row_degrees: Sequence[int],
    degree: int,
    num_vars: int,
) -> tuple[list[SparseRow], int]:
    """Degree-d images of the columns in the target sum of S(-m_H)."""
    offsets = []
    width = 0
    for m in row_degrees:
        offsets.append(width)
        width += len(monomial_basis(num_vars, degree - m))
    vectors: list[SparseRow] = []
    for column in columns:
        shift = degree - column.degree
        if shift < 0:
            continue
        for mono in monomial_basis(num_vars, shift):
            vector: SparseRow = {}
            for r, entry in column.entries.items():
                if not entry:
                    continue
                index = monomial_index(num_vars, degree - row_degrees[r])
                for idx, coeff in shift_terms(entry.terms(), mono, index):
                    vector[offsets[r] + idx] = coeff
            if vector:
                vectors.append(vector)
    return vectors, width


def _span_rank(
    arrangement: MultiArrangement,
    columns: Sequence[PresentationColumn],
    row_degrees: Sequence[int],
    degree: int,
) -> tuple[int, int]:
    vectors, width = _image_vectors(columns, row_degrees, degree, arrangement.num_vars)
    return rank_of_rows(vectors, width, arrangement.field.domain), width


@dataclass
class Tf2Presentation:
    """Matrix M with coker(M) = H^2 of the graded complex."""

    arrangement: MultiArrangement = field(repr=False)
    kappa: int
    rows: tuple[tuple[Flat, int], ...]
    columns: tuple[PresentationColumn, ...]
    generator_degrees: dict[str, tuple[int, int]]
    cokernel_dims: dict[int, int]
    homology_dims: dict[int, int] | None = None

    @property
    def is_surjective(self) -> bool:
        """coker is generated in degrees <= max m, all of which are computed."""
        return not any(self.cokernel_dims.values())

    @property
    def free(self) -> bool:
        return self.is_surjective

    @property
    def homology_agrees(self) -> bool | None:
        if self.homology_dims is None:
            return None
        return self.cokernel_dims == self.homology_dims

    def row_labels(self) -> list[str]:
        labels = self.arrangement.labels
        return [f"[X{flat.label},H{labels[i]}]" for flat, i in self.rows]

    def column_labels(self) -> list[str]:
        return [
            c.key if c.kind == "iota" else f"[{c.key},{c.kind}]" for c in self.columns
        ]

    def matrix_entries(self) -> list[list[str]]:
        return [
            [str(c.entries[r]) if c.entries.get(r) else "0" for c in self.columns]
            for r in range(len(self.rows))
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "kappa": self.kappa,
            "rows": self.row_labels(),
            "columns": self.column_labels(),
            "column_degrees": [c.degree for c in self.columns],
            "matrix": self.matrix_entries(),
            "generator_degrees": {k: list(v) for k, v in self.generator_degrees.items()},
            "cokernel_dims": {str(d): v for d, v in sorted(self.cokernel_dims.items())},
            "homology_dims": (
                {str(d): v for d, v in sorted(self.homology_dims.items())}
                if self.homology_dims is not None
                else None
            ),
            "homology_agrees": self.homology_agrees,
            "free": self.free,
        }


def h2_presentation(
    arrangement: MultiArrangement,
    multiplicities: Sequence[int] | None = None,
    d_max: int | None = None,
    rng: random.Random | None = None,
    compare_homology: bool = True,
) -> Tf2Presentation:
    """Presentation of H^2 for an irreducible TF2 multi-arrangement of rank >= 3.

    Args:
        arrangement: Irreducible TF2 arrangement
        multiplicities: Optional multiplicity override
        d_max: Largest degree of the cokernel table (at least max m)
        rng: Recombine each local generator pair at random before building M
        compare_homology: Also tabulate H^2 from the graded complex

    Raises:
        PreconditionError: Rank below 3, or not irreducible TF2
    """
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    if arrangement.rank < 3:
        raise PreconditionError(
            "The H^2 presentation needs rank at least 3",
            operation="h2_presentation",
            requirement=f"rank >= 3 (got {arrangement.rank})",
        )
    if not arrangement.is_essential:
        arrangement, _ = arrangement.essentialize()
    _require_irreducible_tf2(arrangement, "h2_presentation")

    flats = triple_flats(arrangement)
    rows = _incidence_rows(arrangement)
    row_of = {(flat.indices, i): r for r, (flat, i) in enumerate(rows)}
    row_degrees = [arrangement.multiplicities[i] for _, i in rows]

    columns = _iota_columns(arrangement, rows)
    generator_degrees: dict[str, tuple[int, int]] = {}
    for flat in flats:
        theta, psi = rank2_generators(arrangement.subarrangement(flat))
        if rng is not None:
            theta, psi = _recombine_pair(theta, psi, arrangement, rng)
        columns.append(_generator_column("theta", flat, theta, arrangement, row_of))
        columns.append(_generator_column("psi", flat, psi, arrangement, row_of))
        generator_degrees[flat.label] = (theta.degree, psi.degree)

    top = max(arrangement.multiplicities)
    bound = top + 2 if d_max is None else max(d_max, top)
    cokernel_dims = {}
    for d in range(bound + 1):
        rank, width = _span_rank(arrangement, columns, row_degrees, d)
        cokernel_dims[d] = width - rank

    homology_dims = None
    if compare_homology:
        table = homology_table(build_J_complex(arrangement), bound)
        homology_dims = {d: table.get(2, d) for d in range(bound + 1)}

    presentation = Tf2Presentation(
        arrangement,
        sum(flat.size for flat in flats) - arrangement.size,
        tuple(rows),
        tuple(columns),
        generator_degrees,
        cokernel_dims,
        homology_dims,
    )
    logger.info(
        f"H^2 presentation: kappa={presentation.kappa}, {len(rows)}x{len(columns)}, "
        f"free={presentation.free}"
    )
    if presentation.homology_agrees is False:
        logger.warning(
            f"Presentation cokernel {cokernel_dims} differs from H^2 {homology_dims}"
        )
    return presentation


# ---------------------------------------------------------------------------
# Free multiplicities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tf2Classification:
    """Verdict of a TF2 multiplicity classifier with its witness."""

    free: bool
    method: str
    witness: dict[str, Any]
    reason: str = ""

    def to_dict(self) -> dict[str, Any]:
        data = {"free": self.free, "method": self.method, "witness": self.witness}
        if self.reason:
            data["reason"] = self.reason
        return data


def _local_exponents(
    arrangement: MultiArrangement, flats: Sequence[Flat], jobs: int | None = None
) -> dict[frozenset[int], tuple[int, int]]:
    results = run_parallel(
        list(flats), lambda f: rank2_exponents(arrangement.subarrangement(f)), max_workers=jobs
    )
    return {flat.indices: exps for flat, exps in zip(flats, results)}


def classify_free_tf2_multiplicity(
    arrangement: MultiArrangement,
    multiplicities: Sequence[int] | None = None,
    jobs: int | None = None,
) -> Tf2Classification:
    """Free multiplicities on a free TF2 arrangement via tree orientations.

    m is free iff some triple flat, taken as the root of the reduced incidence
    tree, orients every edge H -> X so that m(H) is an exponent of (A_X, m_X).

    Raises:
        PreconditionError: Input is not a free TF2 arrangement
    """
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    report = tf2_freeness_combinatorial(arrangement)
    if not report.free:
        raise PreconditionError(
            "Orientation classifier needs a free TF2 arrangement",
            operation="classify_free_tf2_multiplicity",
            requirement="#L2trip = r - 1",
        )
    flats = triple_flats(arrangement)
    if not flats:
        return Tf2Classification(True, "orientation", {"root": None, "edges": []})
    incidence = incidence_graphs(arrangement)
    if not incidence.is_tree:
        raise ArrangementError("Reduced incidence graph of a free TF2 arrangement is not a tree")
    exponents = _local_exponents(arrangement, flats, jobs)
    mults = arrangement.multiplicities

    failures: dict[str, dict[str, Any]] = {}
    for root_flat in flats:
        edges = []
        failed = None
        for parent, child in nx.bfs_edges(incidence.reduced, _flat_node(root_flat)):
            if child[0] != "X":
                continue
            child_flat = incidence.flat(child)
            h = parent[1]
            edge = {
                "hyperplane": arrangement.labels[h],
                "flat": child_flat.label,
                "multiplicity": mults[h],
                "exponents": list(exponents[child_flat.indices]),
            }
            if mults[h] not in exponents[child_flat.indices]:
                failed = edge
                break
            edges.append(edge)
        if failed is None:
            logger.info(f"Free orientation rooted at X{root_flat.label}")
            return Tf2Classification(
                True, "orientation", {"root": root_flat.label, "edges": edges}
            )
        failures[root_flat.label] = failed
    return Tf2Classification(
        False,
        "orientation",
        {"failures": failures},
        reason="no root orients every edge into an exponent",
    )


def _decompose(arrangement: MultiArrangement, target: int, first: int, second: int) -> tuple:
    """(lambda, mu) with alpha_target = lambda alpha_first + mu alpha_second."""
    domain = arrangement.field.domain
    matrix = columns_to_matrix(
        [dict(enumerate(arrangement.forms[first])), dict(enumerate(arrangement.forms[second]))],
        arrangement.num_vars,
        domain,
    )
    result = rank_kernel_solve(matrix, list(arrangement.forms[target]))
    if result.solution is None:
        raise ArrangementError(
            "Form of a triple flat is not in the span of its cycle neighbours",
            context={"hyperplane": arrangement.labels[target]},
        )
    return result.solution


def classify_nonfree_tf2_multiplicity(
    arrangement: MultiArrangement, multiplicities: Sequence[int] | None = None
) -> Tf2Classification:
    """Free multiplicities on a non-free TF2 arrangement with #L2trip = r.

    Along the unique cycle H_0, X_0, H_1, ... of the reduced incidence graph,
    m is free iff m is 1 off the cycle, a constant n on it, and for each X_i
    every other form lambda alpha_i + mu alpha_(i+1) has the same
    B_i = (-mu/lambda)^(n-1), with the product of the B_i different from 1.

    Raises:
        FieldError: Positive characteristic
        PreconditionError: Not a non-free irreducible TF2 arrangement, or
            totally non-free (#L2trip > r)
    """
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    field_ = arrangement.field
    if field_.characteristic:
        raise FieldError(
            "Cycle classifier holds in characteristic 0 only", field=field_.name
        )
    report = tf2_freeness_combinatorial(arrangement)
    if report.free:
        raise PreconditionError(
            "Cycle classifier needs a non-free TF2 arrangement",
            operation="classify_nonfree_tf2_multiplicity",
            requirement="#L2trip = r",
        )
    if report.totally_non_free:
        raise PreconditionError(
            "Arrangement is totally non-free",
            operation="classify_nonfree_tf2_multiplicity",
            requirement=f"#L2trip <= r (got {report.triple_count} > {report.rank})",
        )

    incidence = incidence_graphs(arrangement)
    cycle = incidence.cycle()
    if cycle is None:
        raise ArrangementError("Reduced incidence graph has no unique cycle")
    hyperplanes = [node[1] for node in cycle[0::2]]
    flats = [incidence.flat(node) for node in cycle[1::2]]
    labels = arrangement.labels
    mults = arrangement.multiplicities
    k = len(hyperplanes)

    on_cycle = set(hyperplanes)
    off_cycle = [labels[i] for i in range(arrangement.size) if i not in on_cycle and mults[i] != 1]
    cycle_mults = {mults[i] for i in hyperplanes}
    n = mults[hyperplanes[0]] if len(cycle_mults) == 1 else None

    flat_data = []
    b_values = []
    for idx, flat in enumerate(flats):
        first, second = hyperplanes[idx], hyperplanes[(idx + 1) % k]
        ratios = {}
        powers = set()
        for h in flat.sorted_indices:
            if h in (first, second):
                continue
            lam, mu = _decompose(arrangement, h, first, second)
            a = -mu / lam
            ratios[f"H{labels[h]}"] = field_.format(a)
            if n is not None:
                powers.add(a ** (n - 1))
        b = powers.pop() if len(powers) == 1 else None
        b_values.append(b)
        flat_data.append(
            {
                "flat": flat.label,
                "between": [labels[first], labels[second]],
                "ratios": ratios,
                "B": field_.format(b) if b is not None else None,
            }
        )

    product = None
    if n is not None and all(b is not None for b in b_values):
        product = field_.one
        for b in b_values:
            product *= b

    witness = {
        "cycle": [incidence.label(node) for node in cycle],
        "n": n,
        "off_cycle_violations": off_cycle,
        "flats": flat_data,
        "product": field_.format(product) if product is not None else None,
    }
    if off_cycle:
        reason = "multiplicity other than 1 off the cycle"
    elif n is None:
        reason = "multiplicities on the cycle are not constant"
    elif product is None:
        reason = "extra forms of a cycle flat give different B values"
    elif product == field_.one:
        reason = "product of the B values is 1"
    else:
        reason = ""
    free = not reason
    logger.info(f"Cycle classifier: free={free} {reason}".rstrip())
    return Tf2Classification(free, "cycle", witness, reason)


# ---------------------------------------------------------------------------
# Totally non-free intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalObstruction:
    """Interval [X, Y] whose arrangement (B_Y)^X is totally non-free TF2."""

    lower: Flat
    upper: Flat
    rank: int
    triple_count: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "lower": self.lower.label,
            "upper": self.upper.label,
            "rank": self.rank,
            "triple_flats": self.triple_count,
        }


def interval_arrangement(arrangement: MultiArrangement, lower: Flat, upper: Flat) -> MultiArrangement:
    """(A_Y)^X for flats X <= Y, as a simple arrangement."""
    local = arrangement.subarrangement(upper).simple()
    if lower.rank == 0:
        return local
    position = {i: k for k, i in enumerate(upper.sorted_indices)}
    flat = local.lattice.closure(position[i] for i in lower.indices)
    return local.restriction(flat)


def _totally_non_free_count(arrangement: MultiArrangement) -> int | None:
    if arrangement.rank < 3 or not arrangement.is_irreducible() or not is_tf2(arrangement):
        return None
    count = len(triple_flats(arrangement))
    return count if count > arrangement.rank else None


def interval_obstruction_scan(
    arrangement: MultiArrangement, jobs: int | None = None
) -> list[IntervalObstruction]:
    """Intervals of length 3 in a rank-4 lattice that certify non-freeness.

    Raises:
        PreconditionError: Rank other than 4
    """
    if arrangement.rank != 4:
        raise PreconditionError(
            "Interval scan is defined for rank 4",
            operation="interval_obstruction_scan",
            requirement=f"rank 4 (got {arrangement.rank})",
        )
    lattice = arrangement.lattice
    intervals = [
        (lower, upper)
        for lower in lattice.all_flats()
        for upper in lattice.above(lower, lower.rank + 3)
    ]

    def check(interval: tuple[Flat, Flat]) -> IntervalObstruction | None:
        lower, upper = interval
        local = interval_arrangement(arrangement, lower, upper)
        count = _totally_non_free_count(local)
        if count is None:
            return None
        return IntervalObstruction(lower, upper, local.rank, count)

    results = run_parallel(intervals, check, max_workers=jobs, desc="Intervals")
    found = [r for r in results if r is not None]
    logger.info(f"Interval scan: {len(found)} obstruction(s) in {len(intervals)} intervals")
    return found


# ---------------------------------------------------------------------------
# The twisted family
# ---------------------------------------------------------------------------


def xrt_family(r: int, t: Any, field_: Field | None = None) -> MultiArrangement:
    return xrt(r, t, field_)


@dataclass
class XrtReport:
    r: int
    t: str
    restriction: Tf2Classification
    generator_degrees: list[int]
    h2_dims: dict[int, int]
    pdim: PdimBounds
    ambient_status: str | None = None
    ambient_expected_free: bool = False
    ambient_certificate: dict[str, Any] | None = None

    @property
    def expected_generator_degrees(self) -> list[int]:
        return [1] + [3] * comb(self.r, 2)

    @property
    def consistent(self) -> bool:
        checks = [
            self.restriction.free,
            self.generator_degrees == self.expected_generator_degrees,
            {d: v for d, v in self.h2_dims.items() if v} == {1: 1},
            self.pdim.lower == self.pdim.upper == self.r - 2,
        ]
        if self.ambient_status is not None:
            checks.append((self.ambient_status == "Free") == self.ambient_expected_free)
        return all(checks)

    def to_dict(self) -> dict[str, Any]:
        return {
            "r": self.r,
            "t": self.t,
            "restriction": self.restriction.to_dict(),
            "generator_degrees": self.generator_degrees,
            "expected_generator_degrees": self.expected_generator_degrees,
            "h2_dims": {str(d): v for d, v in sorted(self.h2_dims.items())},
            "pdim": self.pdim.to_dict(),
            "ambient_status": self.ambient_status,
            "ambient_expected_free": self.ambient_expected_free,
            "ambient_certificate": self.ambient_certificate,
            "consistent": self.consistent,
        }


def xrt_report(
    r: int,
    t: Any,
    d_max: int | None = None,
    field_: Field | None = None,
    check_ambient: bool = True,
) -> XrtReport:
    """Verify the twisted family at (r, t).

    The Ziegler restriction to x0 is free by the cycle classifier; its simple
    restriction has generators in degrees 1 and 3, H^2 concentrated in degree
    1, and projective dimension r - 2; the ambient arrangement is free iff
    t = -1.

    Raises:
        ValidationError: t is 0 or 1
    """
    field_ = field_ or Field(0)
    t_value = field_.convert(t)
    if t_value == field_.one:
        raise ValidationError("The twisted family needs t != 1", field_name="t", field_value=1)
    ambient = xrt(r, t_value, field_)
    ziegler = ambient.ziegler_restriction(0)
    restriction = classify_nonfree_tf2_multiplicity(ziegler)

    simple = ziegler.simple()
    bound = r + 2 if d_max is None else d_max
    degrees = minimal_generator_degrees(simple, min(bound, 4))
    table = homology_table(build_J_complex(simple), bound)
    report = XrtReport(
        r=r,
        t=field_.format(t_value),
        restriction=restriction,
        generator_degrees=degrees,
        h2_dims={d: table.get(2, d) for d in range(bound + 1)},
        pdim=pdim_bounds(simple, table),
        ambient_expected_free=t_value == -field_.one,
    )
    if check_ambient:
        from .analyzer import yoshinaga_check

        verdict = yoshinaga_check(ambient, 0)
        report.ambient_status = verdict.status
        report.ambient_certificate = verdict.certificate_dict()
    logger.info(f"Twisted family r={r}, t={report.t}: consistent={report.consistent}")
    return report


# ---------------------------------------------------------------------------
# Rank three, not TF2
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyzygyDegree:
    """One degree of 0 -> D/SE -> sum S(1-|A_X|) -> S(-1)^(kappa-e) -> J3 -> 0."""

    degree: int
    middle_dim: int
    right_dim: int
    image_rank: int
    reduced_derivation_dim: int
    j3_dim: int

    @property
    def kernel_defect(self) -> int:
        return self.middle_dim - self.image_rank - self.reduced_derivation_dim

    @property
    def cokernel_defect(self) -> int:
        return self.right_dim - self.image_rank - self.j3_dim

    @property
    def exact(self) -> bool:
        return self.kernel_defect == 0 and self.cokernel_defect == 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "degree": self.degree,
            "middle": self.middle_dim,
            "right": self.right_dim,
            "image_rank": self.image_rank,
            "reduced_derivations": self.reduced_derivation_dim,
            "j3": self.j3_dim,
            "exact": self.exact,
        }


@dataclass
class TeraoComplex:
    kappa: int
    euler_rank: int
    flat_sizes: dict[str, int]
    degrees: list[SyzygyDegree]
    generator_degrees: list[int]

    @property
    def free_rank(self) -> int:
        return self.kappa - self.euler_rank

    @property
    def middle_shifts(self) -> list[int]:
        return sorted(size - 1 for size in self.flat_sizes.values())

    @property
    def exact(self) -> bool:
        return all(d.exact for d in self.degrees)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kappa": self.kappa,
            "euler_rank": self.euler_rank,
            "free_rank": self.free_rank,
            "middle_shifts": self.middle_shifts,
            "flat_sizes": self.flat_sizes,
            "cokernel_module": "J3",
            "cokernel_note": "the cokernel is the top module of the graded complex",
            "generator_degrees": self.generator_degrees,
            "degrees": [d.to_dict() for d in self.degrees],
            "exact": self.exact,
        }


def terao_rank3_complex(arrangement: MultiArrangement, d_max: int = 4) -> TeraoComplex:
    """The Euler-pruned complex of a formal, non-TF2 simple rank-3 arrangement.

    Raises:
        PreconditionError: Not simple, rank other than 3, reducible, not
            formal, or TF2
    """
    operation = "terao_rank3_complex"
    if not arrangement.is_simple:
        raise PreconditionError("Needs a simple arrangement", operation=operation, requirement="m = 1")
    if arrangement.rank != 3:
        raise PreconditionError(
            "Needs a rank-3 arrangement", operation=operation, requirement=f"rank 3 (got {arrangement.rank})"
        )
    if not arrangement.is_essential:
        arrangement, _ = arrangement.essentialize()
    if not arrangement.is_irreducible():
        raise PreconditionError("Needs an irreducible arrangement", operation=operation, requirement="irreducible")
    scalar = build_S_complex(arrangement)
    if not is_totally_formal(scalar):
        raise PreconditionError("Needs a formal arrangement", operation=operation, requirement="formal")
    if scalar.module_ranks[3] == 0:
        raise PreconditionError(
            "TF2 input; use the H^2 presentation instead", operation=operation, requirement="S^3 != 0"
        )

    flats = triple_flats(arrangement)
    rows = _incidence_rows(arrangement)
    row_of = {(flat.indices, i): r for r, (flat, i) in enumerate(rows)}
    row_degrees = [1] * len(rows)
    one = arrangement.ring.one
    iota = _iota_columns(arrangement, rows)
    euler = [
        PresentationColumn(
            "euler", f"X{flat.label}", 1, {row_of[(flat.indices, i)]: one for i in flat.sorted_indices}
        )
        for flat in flats
    ]
    psi = []
    for flat in flats:
        _, generator = rank2_generators(arrangement.subarrangement(flat))
        psi.append(_generator_column("psi", flat, generator, arrangement, row_of))

    euler_rank = (
        _span_rank(arrangement, iota + euler, row_degrees, 1)[0]
        - _span_rank(arrangement, iota, row_degrees, 1)[0]
    )
    jcomplex = build_J_complex(arrangement, scalar=scalar)
    n = arrangement.num_vars
    degrees = []
    for d in range(d_max + 1):
        base_rank, width = _span_rank(arrangement, iota + euler, row_degrees, d)
        full_rank, _ = _span_rank(arrangement, iota + euler + psi, row_degrees, d)
        derivations = len(derivation_space(arrangement, d))
        degrees.append(
            SyzygyDegree(
                degree=d,
                middle_dim=sum(len(monomial_basis(n, d - flat.size + 1)) for flat in flats),
                right_dim=width - base_rank,
                image_rank=full_rank - base_rank,
                reduced_derivation_dim=derivations - len(monomial_basis(n, d - 1)),
                j3_dim=level_degree_component(jcomplex, 3, d).dimension,
            )
        )
    complex_ = TeraoComplex(
        kappa=sum(flat.size for flat in flats) - arrangement.size,
        euler_rank=euler_rank,
        flat_sizes={flat.label: flat.size for flat in flats},
        degrees=degrees,
        generator_degrees=minimal_generator_degrees(arrangement, d_max),
    )
    logger.info(
        f"Rank-3 syzygy complex: kappa={complex_.kappa}, e={euler_rank}, exact={complex_.exact}"
    )
    return complex_
