"""Freeness decisions with certificates.

``decide_freeness`` runs a fixed pipeline on each essential irreducible
factor: rank-2 shortcut, combinatorial gates, the TF2 fast path, the rank-3
subarrangement scan, the truncated homology scan and finally the Saito basis
search. Every Free verdict carries a Saito basis or a TF2 classifier witness;
every NotFree verdict carries something that ``revalidate_certificate`` can
check again from scratch.

Requires Python 3.10+
"""

import logging
import random
import time
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

from .arrangement import Flat, MultiArrangement
from .complexes import build_J_complex, build_S_complex, is_totally_formal
from .config import get_seed
from .constants import (
    CERT_CIRCUIT_BOUND,
    CERT_CYCLE_CONDITION,
    CERT_EULER_CHAR,
    CERT_GENERIC_HYPERPLANE,
    CERT_NONE,
    CERT_NONZERO_HOMOLOGY,
    CERT_NOT_ESSENTIAL,
    CERT_NOT_FORMAL,
    CERT_SAITO_BASIS,
    CERT_SUBARRANGEMENT,
    CERT_TF2_CLASSIFIER,
    DEFAULT_TRIALS,
    REPORT_SCHEMA_VERSION,
    STATUS_FREE,
    STATUS_NOT_FREE,
    STATUS_UNDETERMINED,
)
from .derivations import Derivation, DerivationScanner, free_basis_search, saito_check
from .exceptions import ArrangementError, FieldError, PreconditionError, ValidationError
from .families import build_family
from .homology import default_degree_bound, degree_slice, homology_table, is_generic_flat
from .linalg import Field
from .performance import ProcessingStats, run_parallel
from .tf2 import (
    classify_free_tf2_multiplicity,
    classify_nonfree_tf2_multiplicity,
    is_tf2,
    tf2_freeness_combinatorial,
    triple_flats,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecisionOptions:
    """Knobs for ``decide_freeness``."""

    d_max: int | None = None
    use_tf2_fast_path: bool = True
    scan_subarrangements: bool = True
    jobs: int | None = None


@dataclass
class FreenessVerdict:
    """Status with its certificate; ``basis`` is in the input's coordinates."""

    status: str
    certificate_kind: str
    certificate_data: dict[str, Any] = field(default_factory=dict)
    exponents: tuple[int, ...] | None = None
    basis: tuple[Derivation, ...] = ()
    degree_bound: int | None = None
    stats: ProcessingStats = field(default_factory=ProcessingStats, repr=False)

    @property
    def is_free(self) -> bool:
        return self.status == STATUS_FREE

    @property
    def is_not_free(self) -> bool:
        return self.status == STATUS_NOT_FREE

    def certificate_dict(self) -> dict[str, Any]:
        return {"kind": self.certificate_kind, "data": self.certificate_data}

    def to_dict(self, include_timings: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "status": self.status,
            "certificate": self.certificate_dict(),
        }
        if self.exponents is not None:
            data["exponents"] = list(self.exponents)
        data["degree_bound"] = self.degree_bound
        if include_timings:
            data["timings"] = self.stats.to_dict()
        return data


def _verdict(status: str, kind: str, data: dict[str, Any] | None = None, **kwargs) -> FreenessVerdict:
    return FreenessVerdict(status, kind, data or {}, **kwargs)


def _labels(arrangement: MultiArrangement, indices) -> list[int]:
    return sorted(arrangement.labels[i] for i in indices)


def _indices(arrangement: MultiArrangement, labels: Sequence[int]) -> list[int]:
    position = {label: i for i, label in enumerate(arrangement.labels)}
    missing = [label for label in labels if label not in position]
    if missing:
        raise ValidationError(
            "Certificate names hyperplanes missing from the arrangement",
            field_name="labels",
            field_value=missing,
        )
    return [position[label] for label in labels]


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------


def circuit_bound_flat(arrangement: MultiArrangement) -> Flat | None:
    """A generic closed flat with more hyperplanes than its rank >= 3."""
    for flat in arrangement.lattice.all_flats():
        if flat.rank >= 3 and flat.size > flat.rank and is_generic_flat(arrangement, flat):
            return flat
    return None


def generic_non_separator(arrangement: MultiArrangement) -> int | None:
    """A hyperplane on no triple flat whose removal keeps the rank."""
    lattice = arrangement.lattice
    if lattice.rank < 2:
        return None
    on_triples = set()
    for flat in triple_flats(arrangement):
        on_triples |= flat.indices
    everything = set(range(arrangement.size))
    for i in range(arrangement.size):
        if i in on_triples:
            continue
        if lattice.closure(everything - {i}).rank == lattice.rank:
            return i
    return None


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


def _saito_verdict(result, degree_bound: int | None, data: dict[str, Any] | None = None) -> FreenessVerdict:
    payload = {
        "exponents": list(result.exponents),
        "basis": [theta.to_dict() for theta in result.basis],
    }
    payload.update(data or {})
    return _verdict(
        STATUS_FREE,
        CERT_SAITO_BASIS,
        payload,
        exponents=result.exponents,
        basis=tuple(result.basis),
        degree_bound=degree_bound,
    )


def _tf2_fast_path(arrangement: MultiArrangement, options: DecisionOptions) -> FreenessVerdict | None:
    report = tf2_freeness_combinatorial(arrangement)
    if report.totally_non_free:
        return _verdict(STATUS_NOT_FREE, CERT_EULER_CHAR, report.to_dict())
    if report.free:
        classification = classify_free_tf2_multiplicity(arrangement, jobs=options.jobs)
        failed_kind = CERT_TF2_CLASSIFIER
    elif report.triple_count == report.rank:
        classification = classify_nonfree_tf2_multiplicity(arrangement)
        failed_kind = CERT_CYCLE_CONDITION
    else:
        return None
    if not classification.free:
        return _verdict(STATUS_NOT_FREE, failed_kind, classification.to_dict())

    result = free_basis_search(arrangement)
    if result.found:
        return _saito_verdict(result, None, {"classifier": classification.to_dict()})
    logger.warning(
        f"TF2 classifier says Free but no Saito basis was found: {result.reason}"
    )
    return _verdict(STATUS_FREE, CERT_TF2_CLASSIFIER, classification.to_dict())


def _scan_rank3(arrangement: MultiArrangement, options: DecisionOptions) -> FreenessVerdict | None:
    flats = arrangement.lattice.flats(3)

    def local(flat: Flat) -> FreenessVerdict:
        return decide_freeness(arrangement.subarrangement(flat), options=options)

    verdicts = run_parallel(flats, local, max_workers=options.jobs, desc="Rank-3 flats")
    for flat, verdict in zip(flats, verdicts):
        logger.debug(f"Closed rank-3 flat {flat.label}: {verdict.status}")
        if verdict.is_not_free:
            return _verdict(
                STATUS_NOT_FREE,
                CERT_SUBARRANGEMENT,
                {"hyperplanes": _labels(arrangement, flat.indices), "local": verdict.certificate_dict()},
            )
    return None


def _decide_factor(arrangement: MultiArrangement, options: DecisionOptions) -> FreenessVerdict:
    """Decide an essential irreducible multi-arrangement."""
    stats = ProcessingStats()
    rank = arrangement.rank

    if rank <= 2:
        with stats.stage("saito"):
            result = free_basis_search(arrangement)
        if result.found:
            return _saito_verdict(result, None)
        raise ArrangementError(
            "Rank-2 multi-arrangement without a Saito basis", context={"reason": result.reason}
        )

    with stats.stage("gates"):
        flat = circuit_bound_flat(arrangement)
        if flat is not None:
            return _verdict(
                STATUS_NOT_FREE,
                CERT_CIRCUIT_BOUND,
                {"hyperplanes": _labels(arrangement, flat.indices), "rank": flat.rank},
            )
        generic = generic_non_separator(arrangement)
        if generic is not None:
            return _verdict(
                STATUS_NOT_FREE,
                CERT_GENERIC_HYPERPLANE,
                {"hyperplane": arrangement.labels[generic]},
            )
        scalar = build_S_complex(arrangement)
        formality = is_totally_formal(scalar)
        if not formality:
            return _verdict(
                STATUS_NOT_FREE,
                CERT_NOT_FORMAL,
                {
                    "level": formality.failing_level,
                    "hyperplanes": _labels(arrangement, formality.failing_flat.indices),
                },
            )
    logger.info(f"Gates passed for {arrangement.name or 'arrangement'} (rank {rank})")

    tf2 = not any(scalar.module_ranks[3:])
    if options.use_tf2_fast_path and tf2 and arrangement.field.characteristic == 0:
        with stats.stage("tf2"):
            verdict = _tf2_fast_path(arrangement, options)
        if verdict is not None:
            verdict.stats = stats
            return verdict

    if options.scan_subarrangements and rank >= 4:
        with stats.stage("subarrangements"):
            verdict = _scan_rank3(arrangement, options)
        if verdict is not None:
            verdict.stats = stats
            return verdict

    bound = default_degree_bound(arrangement) if options.d_max is None else options.d_max
    with stats.stage("homology"):
        table = homology_table(
            build_J_complex(arrangement, scalar=scalar), bound, options.jobs, stop_at_nonzero=True
        )
    witness = table.first_nonzero()
    if witness:
        level, degree = witness
        return _verdict(
            STATUS_NOT_FREE,
            CERT_NONZERO_HOMOLOGY,
            {"level": level, "degree": degree, "dimension": table.get(level, degree)},
            degree_bound=bound,
            stats=stats,
        )

    with stats.stage("saito"):
        result = free_basis_search(arrangement, scanner=DerivationScanner(arrangement))
    if result.found:
        verdict = _saito_verdict(result, bound)
        verdict.stats = stats
        return verdict
    logger.info(f"No certificate up to degree {bound}: {result.reason}")
    return _verdict(
        STATUS_UNDETERMINED, CERT_NONE, {"reason": result.reason}, degree_bound=bound, stats=stats
    )


def _lift_basis(
    arrangement: MultiArrangement, frame, factor_verdicts: Sequence[FreenessVerdict]
) -> tuple[Derivation, ...]:
    ring = arrangement.ring
    basis = []
    for block, verdict in enumerate(factor_verdicts):
        for theta in verdict.basis:
            basis.append(Derivation(frame.lift(theta.coeffs, block, ring), theta.degree))
    basis.extend(Derivation(coeffs, 0) for coeffs in frame.center_derivations(ring))
    return tuple(basis)


def _supporting_data(arrangement: MultiArrangement, exponents: Sequence[int]) -> dict[str, Any]:
    if not arrangement.is_simple:
        return {}
    chi = arrangement.characteristic_polynomial()
    return {
        "characteristic_polynomial": str(chi),
        "factorization_matches": chi.matches_exponents(exponents),
    }


def decide_freeness(
    arrangement: MultiArrangement,
    multiplicities: Sequence[int] | None = None,
    options: DecisionOptions | None = None,
) -> FreenessVerdict:
    """Decide freeness of (A, m) with a certificate.

    The arrangement is split into essential irreducible factors; it is free
    iff every factor is, with the factor exponents plus l - r zeros.
    """
    options = options or DecisionOptions()
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    start = time.perf_counter()
    frame, factors = arrangement.essential_factors()
    logger.info(
        f"Deciding freeness: {arrangement.size} hyperplanes, rank {arrangement.rank}, "
        f"{len(factors)} factor(s)"
    )

    verdicts = []
    for factor, group in factors:
        verdict = _decide_factor(factor, options)
        verdict.certificate_data = {"factor": _labels(arrangement, group), **verdict.certificate_data}
        verdicts.append(verdict)
        if not verdict.is_free:
            break

    stats = ProcessingStats()
    for verdict in verdicts:
        for name, seconds in verdict.stats.stages.items():
            stats.stages[name] = stats.stages.get(name, 0.0) + seconds
    stats.start_time, stats.end_time = start, time.perf_counter()

    reduced = len(factors) > 1 or not arrangement.is_essential
    pending = next((v for v in verdicts if not v.is_free), None)
    if pending is not None:
        return replace(pending, stats=stats)

    exponents = tuple(
        sorted(
            [d for v in verdicts for d in v.exponents or ()]
            + [0] * (arrangement.num_vars - arrangement.rank),
            reverse=True,
        )
    )
    bounds = [v.degree_bound for v in verdicts if v.degree_bound is not None]
    degree_bound = max(bounds) if bounds else None
    if all(v.certificate_kind == CERT_SAITO_BASIS for v in verdicts):
        basis = _lift_basis(arrangement, frame, verdicts)
        data = {
            "exponents": list(exponents),
            "basis": [theta.to_dict() for theta in basis],
            **_supporting_data(arrangement, exponents),
        }
        if reduced:
            data["factors"] = [v.certificate_dict() for v in verdicts]
        result = _verdict(
            STATUS_FREE, CERT_SAITO_BASIS, data, exponents=exponents, basis=basis,
            degree_bound=degree_bound, stats=stats,
        )
    elif reduced:
        result = _verdict(
            STATUS_FREE,
            CERT_NOT_ESSENTIAL,
            {"factors": [v.certificate_dict() for v in verdicts]},
            exponents=exponents,
            degree_bound=degree_bound,
            stats=stats,
        )
    else:
        result = replace(verdicts[0], exponents=exponents, stats=stats)
    logger.info(f"Verdict: {result.status} ({result.certificate_kind})")
    return result


# ---------------------------------------------------------------------------
# Revalidation
# ---------------------------------------------------------------------------


def _factor_for(arrangement: MultiArrangement, labels: Sequence[int] | None) -> MultiArrangement:
    _, factors = arrangement.essential_factors()
    for factor, group in factors:
        if labels is None or _labels(arrangement, group) == sorted(labels):
            return factor
    raise ValidationError("Certificate factor not found", field_name="factor", field_value=labels)


def revalidate_certificate(
    arrangement: MultiArrangement,
    verdict: FreenessVerdict,
    multiplicities: Sequence[int] | None = None,
) -> bool:
    """Re-check a verdict's certificate independently of the pipeline."""
    if multiplicities is not None:
        arrangement = arrangement.with_multiplicities(multiplicities)
    kind = verdict.certificate_kind
    data = verdict.certificate_data

    if verdict.is_free and "ziegler_restriction" in data:
        (index,) = _indices(arrangement, [data["hyperplane"]])
        return yoshinaga_check(arrangement, index).is_free
    if verdict.is_free and kind == CERT_SAITO_BASIS:
        return saito_check(arrangement, verdict.basis)
    if verdict.status == STATUS_UNDETERMINED:
        return kind == CERT_NONE
    if verdict.is_free and kind == CERT_NOT_ESSENTIAL:
        return decide_freeness(arrangement).is_free

    factor = _factor_for(arrangement, data.get("factor"))
    if kind == CERT_CIRCUIT_BOUND:
        flat = factor.lattice.closure(_indices(factor, data["hyperplanes"]))
        return (
            sorted(factor.labels[i] for i in flat.indices) == sorted(data["hyperplanes"])
            and flat.rank >= 3
            and flat.size > flat.rank
            and is_generic_flat(factor, flat)
        )
    if kind == CERT_GENERIC_HYPERPLANE:
        (index,) = _indices(factor, [data["hyperplane"]])
        others = set(range(factor.size)) - {index}
        return (
            factor.rank >= 2
            and not any(index in flat.indices for flat in triple_flats(factor))
            and factor.lattice.closure(others).rank == factor.rank
        )
    if kind == CERT_NOT_FORMAL:
        return not is_totally_formal(factor)
    if kind == CERT_EULER_CHAR:
        return (
            factor.is_irreducible()
            and is_tf2(factor)
            and len(triple_flats(factor)) > factor.rank
        )
    if kind in (CERT_TF2_CLASSIFIER, CERT_CYCLE_CONDITION):
        if data.get("method") == "cycle":
            classification = classify_nonfree_tf2_multiplicity(factor)
        else:
            classification = classify_free_tf2_multiplicity(factor)
        return classification.free == verdict.is_free
    if kind == CERT_NONZERO_HOMOLOGY:
        if not is_totally_formal(factor):
            return False
        current = degree_slice(build_J_complex(factor), data["degree"])
        return current.cohomology(data["level"]) != 0
    if kind == CERT_SUBARRANGEMENT:
        if "ziegler_restriction" in data:
            (index,) = _indices(arrangement, [data["hyperplane"]])
            return decide_freeness(arrangement.ziegler_restriction(index)).is_not_free
        flat = factor.lattice.closure(_indices(factor, data["hyperplanes"]))
        return decide_freeness(factor.subarrangement(flat)).is_not_free
    logger.warning(f"No revalidation rule for certificate {kind}")
    return False


# ---------------------------------------------------------------------------
# Yoshinaga localization
# ---------------------------------------------------------------------------


def yoshinaga_check(
    arrangement: MultiArrangement, hyperplane: int, options: DecisionOptions | None = None
) -> FreenessVerdict:
    """Free iff the Ziegler restriction to H and every closed rank-3 flat on H are free.

    In rank 3 the only such flat is the center, so the arrangement itself
    is decided.

    Raises:
        FieldError: Positive characteristic
        PreconditionError: Multiplicities other than 1
    """
    if arrangement.field.characteristic:
        raise FieldError(
            "Localization criterion holds in characteristic 0 only", field=arrangement.field.name
        )
    if not arrangement.is_simple:
        raise PreconditionError(
            "Localization criterion needs a simple arrangement",
            operation="yoshinaga_check",
            requirement="all multiplicities equal to 1",
        )
    options = options or DecisionOptions()
    label = arrangement.labels[hyperplane]
    ziegler = decide_freeness(arrangement.ziegler_restriction(hyperplane), options=options)
    logger.info(f"Ziegler restriction to H{label}: {ziegler.status}")
    if ziegler.is_not_free:
        return _verdict(
            STATUS_NOT_FREE,
            CERT_SUBARRANGEMENT,
            {"hyperplane": label, "ziegler_restriction": ziegler.certificate_dict()},
        )
    if not ziegler.is_free:
        return _verdict(
            STATUS_UNDETERMINED, CERT_NONE, {"hyperplane": label, "reason": "Ziegler restriction undetermined"}
        )

    lattice = arrangement.lattice
    flats = lattice.above(lattice.hyperplane(hyperplane), 3)
    local = run_parallel(
        flats,
        lambda flat: decide_freeness(arrangement.subarrangement(flat), options=options),
        max_workers=options.jobs,
        desc="Local flats",
    )
    for flat, verdict in zip(flats, local):
        if verdict.is_not_free:
            return _verdict(
                STATUS_NOT_FREE,
                CERT_SUBARRANGEMENT,
                {
                    "hyperplane": label,
                    "hyperplanes": _labels(arrangement, flat.indices),
                    "local": verdict.certificate_dict(),
                },
            )
        if not verdict.is_free:
            return _verdict(
                STATUS_UNDETERMINED,
                CERT_NONE,
                {"hyperplane": label, "reason": f"flat {flat.label} undetermined"},
            )

    exponents = None
    if ziegler.exponents is not None:
        exponents = tuple(sorted((1, *ziegler.exponents), reverse=True))
    return _verdict(
        STATUS_FREE,
        ziegler.certificate_kind,
        {
            "hyperplane": label,
            "ziegler_restriction": ziegler.certificate_dict(),
            "local_flats": [flat.label for flat in flats],
        },
        exponents=exponents,
    )


# ---------------------------------------------------------------------------
# Moduli sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplePoint:
    params: dict[str, str]
    status: str
    certificate_kind: str = CERT_NONE

    def to_dict(self) -> dict[str, Any]:
        return {"params": self.params, "status": self.status, "certificate": self.certificate_kind}


@dataclass
class SampleReport:
    """Partition of sampled parameters into free, non-free and degenerate."""

    family: str
    seed: int
    reference_profile: tuple[tuple[int, ...], ...]
    points: list[SamplePoint]

    def _with_status(self, status: str) -> list[dict[str, str]]:
        return [p.params for p in self.points if p.status == status]

    @property
    def free(self) -> list[dict[str, str]]:
        return self._with_status(STATUS_FREE)

    @property
    def not_free(self) -> list[dict[str, str]]:
        return self._with_status(STATUS_NOT_FREE)

    @property
    def undetermined(self) -> list[dict[str, str]]:
        return self._with_status(STATUS_UNDETERMINED)

    @property
    def degenerate(self) -> list[dict[str, str]]:
        return self._with_status("Degenerate")

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "family": self.family,
            "seed": self.seed,
            "reference_profile": [list(level) for level in self.reference_profile],
            "counts": {
                "free": len(self.free),
                "not_free": len(self.not_free),
                "undetermined": len(self.undetermined),
                "degenerate": len(self.degenerate),
            },
            "points": [p.to_dict() for p in self.points],
        }


def moduli_sample(
    family: str,
    ranges: dict[str, Sequence[str]],
    trials: int = DEFAULT_TRIALS,
    seed: int | None = None,
    mults: dict[str, str] | None = None,
    field_: Field | None = None,
    include: Sequence[dict[str, str]] = (),
    reference: dict[str, str] | None = None,
    options: DecisionOptions | None = None,
) -> SampleReport:
    """Sample family parameters and partition them by verdict.

    Args:
        family: Registered family name
        ranges: Candidate values per parameter, sampled uniformly
        trials: Number of random draws
        seed: Random seed (defaults to the configured seed)
        mults: Multiplicity parameters passed to the family builder
        field_: Coefficient field
        include: Parameter tuples always sampled first
        reference: Parameters of the reference lattice (family defaults if None)
        options: Decision options for each sample

    Raises:
        ValidationError: No sample has the reference lattice
    """
    seed = get_seed() if seed is None else seed
    rng = random.Random(seed)
    reference_arr = build_family(family, reference, mults, field_)
    profile = reference_arr.lattice.profile()

    points: list[dict[str, str]] = [dict(p) for p in include]
    for _ in range(trials):
        points.append({k: str(rng.choice(list(ranges[k]))) for k in sorted(ranges)})
    unique: list[dict[str, str]] = []
    for point in points:
        if point not in unique:
            unique.append(point)

    def evaluate(params: dict[str, str]) -> SamplePoint:
        try:
            arrangement = build_family(family, params, mults, field_)
        except (ValidationError, FieldError) as e:
            logger.debug(f"Degenerate sample {params}: {e}")
            return SamplePoint(params, "Degenerate")
        if arrangement.lattice.profile() != profile:
            return SamplePoint(params, "Degenerate")
        verdict = decide_freeness(arrangement, options=options)
        return SamplePoint(params, verdict.status, verdict.certificate_kind)

    jobs = options.jobs if options else None
    results = run_parallel(unique, evaluate, max_workers=jobs, desc="Samples")
    report = SampleReport(family, seed, profile, results)
    if len(report.degenerate) == len(results):
        raise ValidationError(
            "No sample has the reference lattice", field_name="family", field_value=family
        )
    logger.info(
        f"Sampled {len(results)} point(s) of {family}: {len(report.free)} free, "
        f"{len(report.not_free)} not free, {len(report.degenerate)} degenerate"
    )
    return report

