"""Text reports for lattices, complexes, homology tables and verdicts.

Requires Python 3.10+
"""

import logging
from typing import Any, Sequence

from .arrangement import MultiArrangement
from .complexes import FormalityProfile, ScalarComplex
from .homology import HomologyTable

logger = logging.getLogger(__name__)


def section_header(title: str, width: int = 50) -> str:
    return "\n".join(["", "=" * width, title, "=" * width])


def print_section_header(title: str, width: int = 50) -> None:
    """Print a formatted section header."""
    print(section_header(title, width))


def summary(title: str, stats: dict[str, Any], width: int = 50) -> str:
    lines = ["", "=" * width, f"✓ {title}"]
    for key, value in stats.items():
        if isinstance(value, int) and not isinstance(value, bool):
            lines.append(f"  - {key}: {value:,}")
        else:
            lines.append(f"  - {key}: {value}")
    lines.append("=" * width)
    return "\n".join(lines)


def print_summary(title: str, stats: dict[str, Any], width: int = 50) -> None:
    """Print a summary section with statistics.

    Args:
        title: Summary title
        stats: Dictionary of statistic name -> value pairs
        width: Width of the header line
    """
    print(summary(title, stats, width))


def format_arrangement_header(arrangement: MultiArrangement) -> str:
    lines = [
        f"Field: {arrangement.field.name}",
        f"Variables: {' '.join(arrangement.variables)}",
        f"Hyperplanes: {arrangement.size}  |m| = {arrangement.total_multiplicity}",
        f"Q = {arrangement.describe()}",
    ]
    return "\n".join(lines)


def format_lattice(arrangement: MultiArrangement) -> str:
    """Flats by rank with their hyperplane labels."""
    lattice = arrangement.lattice
    lines = [section_header("INTERSECTION LATTICE")]
    lines.append(f"Rank {lattice.rank} in {arrangement.num_vars} variables")
    for rank in range(1, lattice.rank + 1):
        flats = lattice.flats(rank)
        labels = " ".join(flat.label for flat in flats)
        lines.append(f"  L{rank} ({len(flats)}): {labels}")
    triples = lattice.triple_flats()
    lines.append(f"Triple flats: {' '.join(f.label for f in triples) or '-'}")
    if arrangement.is_simple:
        lines.append(f"chi(t) = {arrangement.characteristic_polynomial()}")
    return "\n".join(lines)


def format_scalar_complex(scalar: ScalarComplex, profile: FormalityProfile) -> str:
    lines = [section_header("SCALAR COMPLEX")]
    lines.append(f"Module ranks:       {list(profile.module_ranks)}")
    lines.append(f"Differential ranks: {list(profile.differential_ranks)}")
    lines.append(f"Cohomology:         {list(profile.cohomology)}")
    lines.append(f"Formal: {profile.is_formal}  k-formal up to {profile.formal_up_to}")
    for level, blocks in enumerate(scalar.blocks):
        sizes = ", ".join(f"{b.flat.label}:{b.size}" for b in blocks if b.size)
        if sizes:
            lines.append(f"  level {level}: {sizes}")
    return "\n".join(lines)


def format_homology_table(table: HomologyTable) -> str:
    """Levels as rows, degrees as columns; level 1 shows derivation dimensions."""
    degrees = list(range(table.degree_bound + 1))
    width = max(3, *(len(str(d)) for d in degrees)) if degrees else 3
    header = "level " + " ".join(f"{d:>{width}}" for d in degrees)
    lines = [section_header("COHOMOLOGY OF THE GRADED COMPLEX"), header]
    rows = [("D", table.derivation_dims)] + [(str(k), table.dims[k]) for k in table.levels]
    for name, row in rows:
        values = " ".join(f"{row.get(d, 0):>{width}}" for d in degrees)
        lines.append(f"{name:>5} {values}")
    first = table.first_nonzero()
    if first:
        lines.append(f"First nonzero entry: level {first[0]}, degree {first[1]}")
    else:
        lines.append(f"All levels vanish up to degree {table.degree_bound}")
    return "\n".join(lines)


def format_certificate(kind: str, data: dict[str, Any], indent: int = 2) -> list[str]:
    pad = " " * indent
    lines = [f"{pad}certificate: {kind}"]
    for key, value in data.items():
        if key == "basis":
            lines.append(f"{pad}  basis:")
            for theta in value:
                coeffs = ", ".join(theta["coefficients"])
                lines.append(f"{pad}    [deg {theta['degree']}] ({coeffs})")
        elif isinstance(value, dict) and {"kind", "data"} <= value.keys():
            lines.append(f"{pad}  {key}:")
            lines.extend(format_certificate(value["kind"], value["data"], indent + 4))
        else:
            lines.append(f"{pad}  {key}: {value}")
    return lines


def format_verdict(verdict: Any, title: str = "FREENESS") -> str:
    lines = [section_header(title)]
    lines.append(f"Status: {verdict.status}")
    if verdict.exponents is not None:
        lines.append(f"Exponents: {tuple(verdict.exponents)}")
    if verdict.degree_bound is not None:
        lines.append(f"Degree bound: {verdict.degree_bound}")
    lines.extend(format_certificate(verdict.certificate_kind, verdict.certificate_data))
    return "\n".join(lines)


def format_key_values(title: str, data: dict[str, Any]) -> str:
    lines = [section_header(title)]
    for key, value in data.items():
        if isinstance(value, dict):
            lines.append(f"{key}:")
            lines.extend(f"  {k}: {v}" for k, v in value.items())
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def format_matrix(row_labels: Sequence[str], column_labels: Sequence[str], entries: Sequence[Sequence[str]]) -> str:
    widths = [
        max(len(column_labels[c]), *(len(row[c]) for row in entries)) if entries else len(column_labels[c])
        for c in range(len(column_labels))
    ]
    left = max((len(label) for label in row_labels), default=0)
    lines = [" " * left + "  " + "  ".join(f"{h:>{w}}" for h, w in zip(column_labels, widths))]
    for label, row in zip(row_labels, entries):
        lines.append(f"{label:<{left}}  " + "  ".join(f"{v:>{w}}" for v, w in zip(row, widths)))
    return "\n".join(lines)
