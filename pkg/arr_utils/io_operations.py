"""I/O operations for arrangements and reports.

This module reads and writes the arrangement text format, builds
arrangements from factored defining polynomials, and writes JSON reports.

Text format::

    # comment
    field Q            (or GF(p))
    vars 3 [x y z]
    1 0 0 ^3           coefficients, then an optional multiplicity
    1 -2 0

Requires Python 3.10+
"""

import itertools
import json
import logging
import re
from pathlib import Path
from typing import Any, Sequence

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication,
    parse_expr,
    standard_transformations,
)

from .arrangement import MultiArrangement
from .constants import ARRANGEMENT_SUFFIX, DEFAULT_VARIABLE_NAMES, REPORT_SCHEMA_VERSION
from .exceptions import ArrangementError, FieldError, ParseError, ValidationError
from .linalg import Field, default_variable_names

logger = logging.getLogger(__name__)

_TRANSFORMATIONS = standard_transformations + (implicit_multiplication, convert_xor)


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _column_of(raw: str, token: str) -> int:
    return raw.find(token) + 1


def _parse_multiplicity(raw: str, tokens: list[str], file_path, line_no: int) -> tuple[list[str], int]:
    """Split ``... ^ m`` / ``... ^m`` off the coefficient tokens."""
    for k, token in enumerate(tokens):
        if token.startswith("^"):
            rest = token[1:] or (tokens[k + 1] if k + 1 < len(tokens) else "")
            extra = tokens[k + 1 :] if token[1:] else tokens[k + 2 :]
            if extra:
                raise ParseError(
                    "Unexpected text after the multiplicity",
                    file_path, line_no, _column_of(raw, extra[0]),
                )
            try:
                return tokens[:k], int(rest)
            except ValueError as e:
                raise ParseError(
                    f"Malformed multiplicity {rest!r}", file_path, line_no, _column_of(raw, token)
                ) from e
    return tokens, 1


def parse_arrangement_text(text: str, file_path: Path | str | None = None) -> MultiArrangement:
    """Parse the arrangement text format.

    Raises:
        ParseError: Malformed header or hyperplane line, with line and column
        FieldError: Non-prime field or coefficient outside the field
        ValidationError: Zero or proportional forms, bad multiplicities
    """
    field_: Field | None = None
    num_vars: int | None = None
    variables: tuple[str, ...] | None = None
    forms: list[list] = []
    mults: list[int] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        content = _strip_comment(raw)
        if not content:
            continue
        tokens = content.split()
        keyword = tokens[0].lower()

        if keyword == "field":
            if field_ is not None:
                raise ParseError("Duplicate field line", file_path, line_no, 1)
            if len(tokens) != 2:
                raise ParseError("Expected 'field Q' or 'field GF(p)'", file_path, line_no, 1)
            try:
                field_ = Field.parse(tokens[1])
            except FieldError as e:
                e.context.update({"line": line_no, "column": _column_of(raw, tokens[1])})
                raise
            continue

        if keyword == "vars":
            if field_ is None:
                raise ParseError("The field line must come first", file_path, line_no, 1)
            if num_vars is not None:
                raise ParseError("Duplicate vars line", file_path, line_no, 1)
            try:
                num_vars = int(tokens[1])
            except (IndexError, ValueError) as e:
                raise ParseError("Expected 'vars <count>'", file_path, line_no, 1) from e
            if num_vars < 1:
                raise ParseError("Variable count must be positive", file_path, line_no, 1)
            names = tokens[2:]
            if names and len(names) != num_vars:
                raise ParseError(
                    f"Expected {num_vars} variable names, got {len(names)}",
                    file_path, line_no, _column_of(raw, names[0]),
                )
            variables = tuple(names) if names else default_variable_names(num_vars)
            continue

        if field_ is None or num_vars is None:
            raise ParseError("Hyperplanes must follow the field and vars lines", file_path, line_no, 1)
        coefficients, multiplicity = _parse_multiplicity(raw, tokens, file_path, line_no)
        if len(coefficients) != num_vars:
            raise ParseError(
                f"Expected {num_vars} coefficients, got {len(coefficients)}",
                file_path, line_no, 1,
            )
        row = []
        for token in coefficients:
            if not re.fullmatch(r"[+-]?\d+(/[+-]?\d+)?", token):
                raise ParseError(
                    f"Malformed coefficient {token!r}", file_path, line_no, _column_of(raw, token)
                )
            row.append(field_.convert(token))
        forms.append(row)
        mults.append(multiplicity)

    if field_ is None:
        raise ParseError("Missing field line", file_path)
    if num_vars is None:
        raise ParseError("Missing vars line", file_path)
    if not forms:
        raise ParseError("No hyperplanes given", file_path)

    name = Path(file_path).stem if file_path else ""
    arrangement = MultiArrangement.new(field_, forms, mults, variables, name=name)
    logger.debug(f"Parsed {arrangement.size} hyperplanes over {field_.name}")
    return arrangement


def read_arrangement(file_path: Path) -> MultiArrangement:
    """Read an arrangement file.

    Raises:
        ParseError: Missing file or malformed content
    """
    file_path = Path(file_path)
    if not file_path.exists():
        raise ParseError("Arrangement file not found", file_path)
    if file_path.suffix != ARRANGEMENT_SUFFIX:
        logger.warning(f"Unexpected suffix {file_path.suffix!r} for {file_path}")
    logger.info(f"Reading arrangement: {file_path}")
    with open(file_path, "r", encoding="utf-8") as f:
        return parse_arrangement_text(f.read(), file_path)


def format_arrangement(arrangement: MultiArrangement) -> str:
    """Canonical text form; parsing it yields the same arrangement."""
    field_ = arrangement.field
    lines = [f"field {field_.name}"]
    header = f"vars {arrangement.num_vars}"
    if arrangement.variables != default_variable_names(arrangement.num_vars):
        header += " " + " ".join(arrangement.variables)
    lines.append(header)
    for form, m in zip(arrangement.forms, arrangement.multiplicities):
        line = " ".join(field_.format(c) for c in form)
        lines.append(line if m == 1 else f"{line} ^{m}")
    return "\n".join(lines) + "\n"


def write_arrangement(arrangement: MultiArrangement, file_path: Path) -> None:
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8") as f:
        f.write(format_arrangement(arrangement))
    logger.debug(f"✓ Wrote arrangement: {file_path}")


def _variable_order(names: Sequence[str]) -> list[str]:
    def key(name: str) -> tuple:
        if name in DEFAULT_VARIABLE_NAMES:
            return (0, DEFAULT_VARIABLE_NAMES.index(name), name)
        return (1, 0, name)

    return sorted(names, key=key)


def _normalized_mod_p(coeffs: Sequence, p: int) -> tuple[int, ...]:
    residues = [int(sympy.Rational(c).p) * pow(int(sympy.Rational(c).q), -1, p) % p for c in coeffs]
    lead = next((c for c in residues if c), 0)
    if not lead:
        return ()
    inverse = pow(lead, -1, p)
    return tuple(c * inverse % p for c in residues)


def _split_linear_mod_p(poly: sympy.Poly, p: int) -> list[tuple[tuple[int, ...], int]]:
    """Linear factors over GF(p) of a homogeneous integer polynomial, by trial division.

    Raises:
        ValidationError: Some factor over GF(p) is not linear
    """
    gens = poly.gens
    remainder = sympy.Poly(poly.as_expr(), *gens, modulus=p)
    found = []
    for coeffs in itertools.product(range(p), repeat=len(gens)):
        if remainder.total_degree() <= 0:
            break
        if _normalized_mod_p(coeffs, p) != coeffs:
            continue
        candidate = sympy.Poly(sum(c * g for c, g in zip(coeffs, gens)), *gens, modulus=p)
        exponent = 0
        while remainder.total_degree() > 0:
            quotient, rest = remainder.div(candidate)
            if not rest.is_zero:
                break
            remainder, exponent = quotient, exponent + 1
        if exponent:
            found.append((coeffs, exponent))
    if remainder.total_degree() > 0:
        raise ValidationError(
            f"Defining polynomial must factor into linear forms over GF({p})",
            field_name="factor",
            field_value=poly.as_expr(),
        )
    return found


def parse_polynomial_arrangement(
    text: str,
    field_: Field | None = None,
    variables: Sequence[str] | None = None,
) -> MultiArrangement:
    """Build a multi-arrangement from a defining polynomial such as ``x^3 y^3 (x-y)^3``.

    Repeated linear factors become multiplicities.

    Raises:
        ParseError: The text is not a polynomial expression
        ValidationError: A factor is not a homogeneous linear form
    """
    field_ = field_ or Field(0)
    names = sorted(set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text)))
    symbols = {name: sympy.Symbol(name) for name in names}
    try:
        expr = parse_expr(text, local_dict=symbols, transformations=_TRANSFORMATIONS)
    except (SyntaxError, TypeError, sympy.SympifyError) as e:
        raise ParseError(f"Cannot parse polynomial {text!r}: {e}") from e

    order = list(variables) if variables else _variable_order(names)
    unknown = set(names) - set(order)
    if unknown:
        raise ValidationError(
            "Polynomial uses undeclared variables", field_name="variables", field_value=sorted(unknown)
        )
    gens = [symbols.get(name, sympy.Symbol(name)) for name in order]
    # sympy has no multivariate factoring over GF(p): factor over Q, then reduce
    _, factors = sympy.factor_list(expr, *gens)

    p = field_.characteristic
    collected: dict[tuple, int] = {}
    for factor, exponent in factors:
        poly = sympy.Poly(factor, *gens)
        if poly.total_degree() == 1 and poly.coeff_monomial(1) == 0:
            coeffs = [sympy.Rational(poly.coeff_monomial(g)) for g in gens]
            pieces = [(tuple(coeffs), 1)]
        elif p and poly.is_homogeneous:
            pieces = _split_linear_mod_p(poly, p)
        else:
            raise ValidationError(
                "Defining polynomial must factor into homogeneous linear forms",
                field_name="factor",
                field_value=factor,
            )
        for coeffs, count in pieces:
            key = _normalized_mod_p(coeffs, p) if p else tuple(coeffs)
            collected[key] = collected.get(key, 0) + count * int(exponent)

    forms = [[field_.convert(c) for c in key] for key in collected]
    mults = list(collected.values())
    if not forms:
        raise ValidationError("Constant polynomial has no hyperplanes", field_name="polynomial", field_value=text)
    try:
        return MultiArrangement.new(field_, forms, mults, tuple(order), name="poly")
    except ArrangementError:
        logger.error(f"Polynomial {text!r} does not define a valid arrangement")
        raise


def arrangement_to_dict(arrangement: MultiArrangement) -> dict[str, Any]:
    field_ = arrangement.field
    return {
        "field": field_.name,
        "variables": list(arrangement.variables),
        "hyperplanes": [
            {
                "label": label,
                "form": [field_.format(c) for c in form],
                "multiplicity": m,
            }
            for label, form, m in zip(arrangement.labels, arrangement.forms, arrangement.multiplicities)
        ],
    }


def format_json(data: dict[str, Any]) -> str:
    """Deterministic JSON text with the report schema version."""
    if "schema_version" not in data:
        data = {"schema_version": REPORT_SCHEMA_VERSION, **data}
    return json.dumps(data, indent=2, ensure_ascii=False)


def read_json_file(file_path: Path) -> dict[str, Any]:
    """Read and parse a JSON report.

    Raises:
        FileNotFoundError: If file doesn't exist
        json.JSONDecodeError: If file contains invalid JSON
    """
    if not file_path.exists():
        raise FileNotFoundError(f"JSON file not found: {file_path}")

    logger.debug(f"Reading JSON file: {file_path}")

    with open(file_path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_json_file(data: dict[str, Any], file_path: Path) -> None:
    """Write a report, creating parent directories."""
    file_path.parent.mkdir(parents=True, exist_ok=True)

    with open(file_path, "w", encoding="utf-8") as f:
        f.write(format_json(data) + "\n")

    logger.debug(f"✓ Wrote JSON file: {file_path}")
