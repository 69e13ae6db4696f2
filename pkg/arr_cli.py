#!/usr/bin/env python3
"""
Unified CLI interface for arrangement freeness computations.

Every subcommand reads one multi-arrangement (a file, a named family or a
factored polynomial), runs one computation and prints a text report or JSON.

Requires Python 3.10+
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable

import tqdm

from arr_utils import (
    DecisionOptions,
    Field,
    MultiArrangement,
    build_family,
    build_J_complex,
    build_S_complex,
    decide_freeness,
    formality_profile,
    free_basis_search,
    homology_table,
    is_totally_formal,
    moduli_sample,
    parse_polynomial_arrangement,
    pdim_bounds,
    rank2_exponents,
    read_arrangement,
    saito_check,
    setup_environment,
    yoshinaga_check,
)
from arr_utils.constants import (
    DEFAULT_TRIALS,
    EXIT_ERROR,
    EXIT_UNDETERMINED,
    EXIT_VERDICT,
    FAMILY_NAMES,
    STATUS_UNDETERMINED,
)
from arr_utils.derivations import coefficient_determinant
from arr_utils.exceptions import ArrangementError, ValidationError
from arr_utils.homology import default_degree_bound
from arr_utils.io_operations import arrangement_to_dict, format_json, write_json_file
from arr_utils.performance import ProcessingStats
from arr_utils.reporting import (
    format_arrangement_header,
    format_homology_table,
    format_key_values,
    format_lattice,
    format_matrix,
    format_scalar_complex,
    format_verdict,
    section_header,
)
from arr_utils.tf2 import (
    classify_free_tf2_multiplicity,
    classify_nonfree_tf2_multiplicity,
    h2_presentation,
    incidence_graphs,
    interval_obstruction_scan,
    is_tf2,
    terao_rank3_complex,
    tf2_freeness_combinatorial,
    xrt_report,
)

logger = logging.getLogger(__name__)


class TqdmLoggingHandler(logging.Handler):
    """Custom logging handler that works with tqdm progress bars."""

    def emit(self, record):
        try:
            msg = self.format(record)
            tqdm.tqdm.write(msg, file=sys.stderr)
        except Exception:
            self.handleError(record)


def setup_tqdm_logging():
    """Set up logging to work properly with tqdm progress bars."""
    root = logging.getLogger()
    for handler in root.handlers[:]:
        if not isinstance(handler, logging.FileHandler):
            root.removeHandler(handler)

    handler = TqdmLoggingHandler()
    handler.setFormatter(
        logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    )
    root.addHandler(handler)


def parse_assignments(items: list[str] | None) -> dict[str, str]:
    """Parse repeated ``key=value`` options into a dict.

    Raises:
        ValidationError: An item without ``=``
    """
    result: dict[str, str] = {}
    for item in items or []:
        if "=" not in item:
            raise ValidationError("Expected key=value", field_name="option", field_value=item)
        key, value = item.split("=", 1)
        result[key.strip()] = value.strip()
    return result


def load_arrangement(args: argparse.Namespace) -> MultiArrangement:
    """Resolve --file, --family or --poly into an arrangement.

    Raises:
        ValidationError: None or several input sources given
    """
    field_ = Field.parse(args.field)
    sources = [s for s in (args.file, args.family, args.poly) if s]
    if len(sources) != 1:
        raise ValidationError(
            "Give exactly one of --file, --family or --poly",
            field_name="input",
            field_value=len(sources),
        )
    if args.file:
        arrangement = read_arrangement(Path(args.file))
    elif args.family:
        arrangement = build_family(
            args.family, parse_assignments(args.param), parse_assignments(args.mult), field_
        )
    else:
        arrangement = parse_polynomial_arrangement(args.poly, field_)
    if args.mults:
        arrangement = arrangement.with_multiplicities([int(m) for m in args.mults.split(",")])
    return arrangement


def emit(args: argparse.Namespace, text: str, data: dict[str, Any], stats: ProcessingStats | None = None) -> None:
    """Print the text report or JSON; optionally write JSON to --output."""
    if stats is not None and args.timings and "timings" not in data:
        data = {**data, "timings": stats.to_dict()}
    if args.json:
        print(format_json(data))
    else:
        print(text)
        if stats is not None and args.timings:
            print(format_key_values("TIMINGS", stats.to_dict()))
    if args.output:
        write_json_file(data, Path(args.output))
        logger.info(f"✓ Report written to {args.output}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def lattice_command(args: argparse.Namespace) -> int:
    """Intersection lattice, triple flats and characteristic polynomial."""
    arrangement = load_arrangement(args)
    lattice = arrangement.lattice
    data: dict[str, Any] = {
        "arrangement": arrangement_to_dict(arrangement),
        "rank": lattice.rank,
        "flats": {
            str(rank): [flat.label for flat in lattice.flats(rank)]
            for rank in range(1, lattice.rank + 1)
        },
        "triple_flats": [flat.label for flat in lattice.triple_flats()],
        "irreducible_factors": [
            [arrangement.labels[i] for i in group] for group in arrangement.irreducible_groups()
        ],
    }
    if arrangement.is_simple:
        chi = arrangement.characteristic_polynomial()
        data["characteristic_polynomial"] = str(chi)
        data["chi_splits"] = chi.splits
    text = format_arrangement_header(arrangement) + "\n" + format_lattice(arrangement)
    emit(args, text, data)
    return EXIT_VERDICT


def formality_command(args: argparse.Namespace) -> int:
    """Scalar complex cohomology, k-formality and total formality."""
    arrangement = load_arrangement(args)
    scalar = build_S_complex(arrangement)
    profile = formality_profile(scalar)
    total = is_totally_formal(scalar)
    data = {
        **profile.to_dict(),
        "totally_formal": total.totally_formal,
        "tf2": is_tf2(arrangement),
    }
    if not total:
        data["failing_flat"] = total.failing_flat.label
        data["failing_level"] = total.failing_level
    text = format_scalar_complex(scalar, profile) + "\n" + format_key_values(
        "FORMALITY",
        {k: v for k, v in data.items() if k not in profile.to_dict()},
    )
    emit(args, text, data)
    return EXIT_VERDICT


def complex_command(args: argparse.Namespace) -> int:
    """Scalar differentials and graded complex generators."""
    arrangement = load_arrangement(args)
    scalar = build_S_complex(arrangement)
    complex_ = build_J_complex(arrangement, scalar=scalar)
    data = {
        "scalar": scalar.to_dict(),
        "graded": complex_.to_dict(),
        "composites_vanish": scalar.composites_vanish() and complex_.verify_pushforward(),
    }
    text = format_scalar_complex(scalar, formality_profile(scalar)) + "\n" + format_key_values(
        "GRADED COMPLEX",
        {
            "generators per level": [len(level) for level in complex_.generators[1:]],
            "delta^2 = 0": data["composites_vanish"],
        },
    )
    emit(args, text, data)
    return EXIT_VERDICT


def homology_command(args: argparse.Namespace) -> int:
    """Cohomology table of the graded complex up to --dmax."""
    arrangement = load_arrangement(args)
    if not arrangement.is_essential:
        arrangement, _ = arrangement.essentialize()
    stats = ProcessingStats()
    bound = args.dmax if args.dmax is not None else default_degree_bound(arrangement)
    formal = is_totally_formal(arrangement)
    if not formal:
        logger.warning("Arrangement is not totally formal; the table does not decide freeness")
    with stats.stage("homology"):
        table = homology_table(build_J_complex(arrangement), bound, args.jobs)
    certified = False
    if table.vanishes:
        with stats.stage("saito"):
            certified = free_basis_search(arrangement).found
    pdim = pdim_bounds(arrangement, table, certified=certified)
    data = {
        "table": table.to_dict(),
        "totally_formal": formal.totally_formal,
        "certified_free": certified,
        "pdim": pdim.to_dict(),
    }
    text = format_homology_table(table) + f"\npdim bounds: [{pdim.lower}, {pdim.upper}]"
    if pdim.heuristic:
        text += " (heuristic)"
    emit(args, text, data, stats)
    return EXIT_VERDICT


def freeness_command(args: argparse.Namespace) -> int:
    """Decide freeness with a certificate."""
    arrangement = load_arrangement(args)
    options = DecisionOptions(
        d_max=args.dmax, use_tf2_fast_path=not args.no_tf2, jobs=args.jobs
    )
    verdict = decide_freeness(arrangement, options=options)
    emit(args, format_verdict(verdict), verdict.to_dict(args.timings), verdict.stats)
    return EXIT_UNDETERMINED if verdict.status == STATUS_UNDETERMINED else EXIT_VERDICT


def tf2_command(args: argparse.Namespace) -> int:
    """TF2 counts, incidence graph, multiplicity classification and H^2 presentation."""
    arrangement = load_arrangement(args)
    if not arrangement.is_essential:
        arrangement, _ = arrangement.essentialize()
    data: dict[str, Any] = {"tf2": is_tf2(arrangement)}
    sections = []
    if data["tf2"]:
        report = tf2_freeness_combinatorial(arrangement)
        graph = incidence_graphs(arrangement)
        data["combinatorial"] = report.to_dict()
        data["incidence"] = graph.to_dict()
        sections.append(format_key_values("TF2 COUNTS", report.to_dict()))
        sections.append(format_key_values("INCIDENCE GRAPH", graph.to_dict()))
        classification = None
        if report.free:
            classification = classify_free_tf2_multiplicity(arrangement, jobs=args.jobs)
        elif report.triple_count == report.rank and arrangement.field.characteristic == 0:
            classification = classify_nonfree_tf2_multiplicity(arrangement)
        if classification is not None:
            data["classification"] = classification.to_dict()
            sections.append(format_key_values("CLASSIFICATION", classification.to_dict()))
        if args.presentation and arrangement.rank >= 3:
            presentation = h2_presentation(arrangement, d_max=args.dmax)
            data["presentation"] = presentation.to_dict()
            sections.append(section_header("H^2 PRESENTATION"))
            sections.append(
                format_matrix(
                    presentation.row_labels(),
                    presentation.column_labels(),
                    presentation.matrix_entries(),
                )
            )
            sections.append(f"cokernel dims: {presentation.cokernel_dims}")
    else:
        sections.append(section_header("TF2") + "\nArrangement is not TF2")
    if args.intervals:
        found = interval_obstruction_scan(arrangement, jobs=args.jobs)
        data["interval_obstructions"] = [o.to_dict() for o in found]
        sections.append(
            format_key_values("INTERVAL OBSTRUCTIONS", {"found": [o.to_dict() for o in found]})
        )
    emit(args, "\n".join(sections), data)
    return EXIT_VERDICT


def exponents_command(args: argparse.Namespace) -> int:
    """Exponents of a rank-2 input, or of a free input via the Saito search."""
    if args.rank2:
        arrangement = parse_polynomial_arrangement(args.rank2, Field.parse(args.field))
    else:
        arrangement = load_arrangement(args)
    if arrangement.rank <= 2:
        exponents = rank2_exponents(arrangement) if arrangement.rank == 2 else (
            arrangement.total_multiplicity,
        )
        data = {"exponents": list(exponents), "method": "rank2"}
    else:
        result = free_basis_search(arrangement)
        if not result.found:
            data = {"exponents": None, "reason": result.reason}
            emit(args, format_key_values("EXPONENTS", data), data)
            return EXIT_UNDETERMINED
        data = {"exponents": list(result.exponents), "method": "saito"}
    emit(args, format_key_values("EXPONENTS", {"exponents": tuple(data["exponents"])}), data)
    return EXIT_VERDICT


def saito_command(args: argparse.Namespace) -> int:
    """Minimal generators and Saito's criterion on them."""
    arrangement = load_arrangement(args)
    result = free_basis_search(arrangement)
    data: dict[str, Any] = {"found": result.found, "reason": result.reason}
    if result.found:
        det = coefficient_determinant(arrangement, result.basis)
        data.update(
            {
                "exponents": list(result.exponents),
                "basis": [theta.to_dict() for theta in result.basis],
                "determinant": str(det),
                "saito": saito_check(arrangement, result.basis),
            }
        )
    emit(args, format_key_values("SAITO", data), data)
    return EXIT_VERDICT if result.found else EXIT_UNDETERMINED


def yoshinaga_command(args: argparse.Namespace) -> int:
    """Ziegler restriction plus local freeness along one hyperplane."""
    arrangement = load_arrangement(args)
    if args.hyperplane not in arrangement.labels:
        raise ValidationError(
            "Unknown hyperplane label", field_name="hyperplane", field_value=args.hyperplane
        )
    index = arrangement.labels.index(args.hyperplane)
    verdict = yoshinaga_check(
        arrangement, index, DecisionOptions(d_max=args.dmax, jobs=args.jobs)
    )
    emit(args, format_verdict(verdict, "LOCALIZATION"), verdict.to_dict(args.timings), verdict.stats)
    return EXIT_UNDETERMINED if verdict.status == STATUS_UNDETERMINED else EXIT_VERDICT


def xrt_command(args: argparse.Namespace) -> int:
    """Verification bundle for the twisted family."""
    stats = ProcessingStats()
    with stats.stage("xrt"):
        report = xrt_report(
            args.r, args.t, d_max=args.dmax, field_=Field.parse(args.field),
            check_ambient=not args.skip_ambient,
        )
    data = report.to_dict()
    emit(args, format_key_values(f"TWISTED FAMILY r={args.r} t={report.t}", data), data, stats)
    return EXIT_VERDICT


def terao3_command(args: argparse.Namespace) -> int:
    """Euler-pruned syzygy complex of a rank-3 formal non-TF2 arrangement."""
    arrangement = load_arrangement(args)
    complex_ = terao_rank3_complex(arrangement, args.dmax if args.dmax is not None else 4)
    data = complex_.to_dict()
    rows = [
        f"  d={d.degree}: middle {d.middle_dim}, right {d.right_dim}, image {d.image_rank}, "
        f"D/SE {d.reduced_derivation_dim}, J3 {d.j3_dim}, exact {d.exact}"
        for d in complex_.degrees
    ]
    text = format_key_values(
        "RANK-3 SYZYGY COMPLEX",
        {k: v for k, v in data.items() if k != "degrees"},
    ) + "\n" + "\n".join(rows)
    emit(args, text, data)
    return EXIT_VERDICT


def sample_command(args: argparse.Namespace) -> int:
    """Sample family parameters and partition them by verdict."""
    if not args.family:
        raise ValidationError("sample needs --family", field_name="family")
    ranges = {k: v.split(",") for k, v in parse_assignments(args.range).items()}
    include = [parse_assignments(point.split(";")) for point in args.include or []]
    report = moduli_sample(
        args.family,
        ranges,
        trials=args.trials,
        seed=args.seed,
        mults=parse_assignments(args.mult),
        field_=Field.parse(args.field),
        include=include,
        reference=parse_assignments(args.param) or None,
        options=DecisionOptions(d_max=args.dmax, jobs=args.jobs),
    )
    data = report.to_dict()
    emit(args, format_key_values(f"MODULI SAMPLE: {args.family}", data["counts"]), data)
    return EXIT_VERDICT


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "lattice": lattice_command,
    "formality": formality_command,
    "complex": complex_command,
    "homology": homology_command,
    "freeness": freeness_command,
    "tf2": tf2_command,
    "exponents": exponents_command,
    "saito": saito_command,
    "yoshinaga": yoshinaga_command,
    "xrt": xrt_command,
    "terao3": terao3_command,
    "sample": sample_command,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arrh",
        description="Homological freeness tests for hyperplane multi-arrangements",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    arrh lattice --file tests/data/x3.arr
    arrh freeness --family x3 --param t=-1 --mult n=2
    arrh homology --file ziegler.arr --dmax 6 --json
    arrh exponents --rank2 "x^3 y^3 (x-y)^3"
    arrh tf2 --family cycle3 --param alpha=2 --param beta=-2 --mult n=3 --presentation
    arrh xrt --r 4 --t 2
    arrh sample --family pencils --range alpha=2,3,-2,-3 --range beta=2,3,-2,-3 --trials 20
        """,
    )
    parser.add_argument("--log-level", help="Logging level (DEBUG, INFO, WARNING, ERROR)")
    parser.add_argument("--log-file", help="Also write log lines to this file")

    common = argparse.ArgumentParser(add_help=False)
    source = common.add_argument_group("input")
    source.add_argument("--file", help="Arrangement text file")
    source.add_argument("--family", choices=FAMILY_NAMES, help="Named family")
    source.add_argument("--param", action="append", help="Family parameter key=value (p/q allowed)")
    source.add_argument("--mult", action="append", help="Family multiplicity n=... or m=3,3,1")
    source.add_argument("--poly", help='Factored defining polynomial, e.g. "x^3 y^3 (x-y)^3"')
    source.add_argument("--mults", help="Override multiplicities: comma-separated list")
    source.add_argument("--field", default="Q", help="Q or GF(p) (default: Q)")
    output = common.add_argument_group("output")
    output.add_argument("--json", action="store_true", help="Print the JSON report")
    output.add_argument("--output", help="Also write the JSON report to this file")
    output.add_argument("--timings", action="store_true", help="Include stage timings")
    run = common.add_argument_group("computation")
    run.add_argument("--dmax", type=int, help="Degree bound (default: |m| + rank)")
    run.add_argument("--jobs", type=int, help="Worker cap for parallel scans")
    run.add_argument("--seed", type=int, help="Sampling seed")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    for name in ("lattice", "formality", "complex", "homology", "saito", "terao3"):
        subparsers.add_parser(name, parents=[common], help=COMMANDS[name].__doc__)

    freeness = subparsers.add_parser("freeness", parents=[common], help=freeness_command.__doc__)
    freeness.add_argument("--no-tf2", action="store_true", help="Skip the TF2 fast path")

    tf2 = subparsers.add_parser("tf2", parents=[common], help=tf2_command.__doc__)
    tf2.add_argument("--presentation", action="store_true", help="Build the H^2 presentation")
    tf2.add_argument("--intervals", action="store_true", help="Scan rank-4 intervals")

    exponents = subparsers.add_parser("exponents", parents=[common], help=exponents_command.__doc__)
    exponents.add_argument("--rank2", help="Rank-2 defining polynomial")

    yoshinaga = subparsers.add_parser("yoshinaga", parents=[common], help=yoshinaga_command.__doc__)
    yoshinaga.add_argument("--hyperplane", type=int, default=1, help="Hyperplane label (default: 1)")

    xrt = subparsers.add_parser("xrt", parents=[common], help=xrt_command.__doc__)
    xrt.add_argument("--r", type=int, default=3, help="Number of twisted coordinates")
    xrt.add_argument("--t", default="2", help="Twist parameter (p/q allowed)")
    xrt.add_argument("--skip-ambient", action="store_true", help="Skip the ambient freeness check")

    sample = subparsers.add_parser("sample", parents=[common], help=sample_command.__doc__)
    sample.add_argument("--range", action="append", help="Candidates key=v1,v2,...")
    sample.add_argument("--include", action="append", help="Fixed point k=v;k=v sampled first")
    sample.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="Random draws")
    return parser


def main(argv: list[str] | None = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_ERROR

    try:
        setup_environment(
            log_level=args.log_level,
            log_file=args.log_file,
            seed=args.seed,
            jobs=args.jobs,
        )
    except ValueError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_ERROR
    setup_tqdm_logging()

    try:
        return COMMANDS[args.command](args)
    except ArrangementError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
