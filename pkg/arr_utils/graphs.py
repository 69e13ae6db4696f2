"""Graphic arrangements and clique complexes.

Requires Python 3.10+
"""

import logging
from typing import Hashable, Iterator, Sequence

import networkx as nx

from .arrangement import MultiArrangement
from .exceptions import ValidationError
from .linalg import Field, rank_of_rows

logger = logging.getLogger(__name__)

Edge = tuple[Hashable, Hashable]


def build_graph(edges: Sequence[Edge], vertices: Sequence[Hashable] | None = None) -> nx.Graph:
    """Simple graph from an edge list; loops and repeated edges are rejected."""
    graph = nx.Graph()
    if vertices:
        graph.add_nodes_from(vertices)
    for u, v in edges:
        if u == v:
            raise ValidationError("Graph has a loop", field_name="edge", field_value=(u, v))
        if graph.has_edge(u, v):
            raise ValidationError(
                "Graph has a repeated edge", field_name="edge", field_value=(u, v)
            )
        graph.add_edge(u, v)
    return graph


def graphic_arrangement(
    edges: Sequence[Edge],
    multiplicities: Sequence[int] | None = None,
    vertices: Sequence[Hashable] | None = None,
    field: Field | None = None,
) -> MultiArrangement:
    """Arrangement of the forms x_i - x_j, one per edge, in one variable per vertex."""
    graph = build_graph(edges, vertices)
    if graph.number_of_edges() == 0:
        raise ValidationError("Graph has no edges")
    order = sorted(graph.nodes)
    position = {v: k for k, v in enumerate(order)}
    forms = []
    for u, v in edges:
        i, j = sorted((position[u], position[v]))
        row = [0] * len(order)
        row[i], row[j] = 1, -1
        forms.append(row)
    return MultiArrangement.new(
        field or Field(0),
        forms,
        multiplicities,
        variables=[f"x{v}" for v in order],
        name="graphic",
    )


def clique_complex(
    edges: Sequence[Edge], vertices: Sequence[Hashable] | None = None
) -> dict[int, list[tuple]]:
    """Simplices of the flag complex by dimension, each a sorted vertex tuple."""
    graph = build_graph(edges, vertices)
    complex_: dict[int, list[tuple]] = {}
    for clique in nx.enumerate_all_cliques(graph):
        simplex = tuple(sorted(clique))
        complex_.setdefault(len(simplex) - 1, []).append(simplex)
    return {dim: sorted(simplices) for dim, simplices in sorted(complex_.items())}


def simplicial_cohomology(complex_: dict[int, list[tuple]], field: Field | None = None) -> list[int]:
    """Unreduced cohomology dimensions from the signed coboundary maps."""
    field = field or Field(0)
    domain = field.domain
    top = max(complex_) if complex_ else -1
    counts = [len(complex_.get(k, [])) for k in range(top + 1)]
    ranks = []
    for k in range(top):
        index = {s: i for i, s in enumerate(complex_.get(k, []))}
        rows = []
        for simplex in complex_.get(k + 1, []):
            row = {}
            for j in range(len(simplex)):
                face = simplex[:j] + simplex[j + 1 :]
                row[index[face]] = domain(-1 if j % 2 else 1)
            rows.append(row)
        ranks.append(rank_of_rows(rows, counts[k], domain))
    return [
        counts[k] - (ranks[k] if k < top else 0) - (ranks[k - 1] if k > 0 else 0)
        for k in range(top + 1)
    ]


def is_chordal(edges: Sequence[Edge], vertices: Sequence[Hashable] | None = None) -> bool:
    return nx.is_chordal(build_graph(edges, vertices))


def random_graphs(
    count: int, max_vertices: int, seed: int, probability: float = 0.5
) -> Iterator[tuple[list[int], list[Edge]]]:
    """Deterministic stream of random graphs with at least one edge."""
    produced = 0
    attempt = 0
    while produced < count:
        n = 2 + (seed + attempt) % (max_vertices - 1)
        graph = nx.gnp_random_graph(n, probability, seed=seed * 1000 + attempt)
        attempt += 1
        if graph.number_of_edges() == 0:
            continue
        produced += 1
        yield list(graph.nodes), sorted(tuple(sorted(e)) for e in graph.edges)
