"""Named parameterized arrangement families.

Every builder takes its parameters as field elements (``"p/q"`` strings are
accepted) and returns a validated :class:`MultiArrangement`.

Requires Python 3.10+
"""

import logging
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Any, Callable, Sequence

from .arrangement import MultiArrangement
from .constants import FAMILY_NAMES
from .exceptions import ValidationError
from .graphs import graphic_arrangement
from .linalg import Field, determinant, rows_to_matrix

logger = logging.getLogger(__name__)

# Ziegler's 9 lines are the edges of K_{3,3} on six triple points a..f
ZIEGLER_EDGES = (
    ("a", "b"),
    ("c", "d"),
    ("b", "e"),
    ("a", "f"),
    ("a", "c"),
    ("c", "e"),
    ("e", "f"),
    ("b", "d"),
    ("d", "f"),
)
ZIEGLER_TRIPLES = ("145", "138", "256", "289", "367", "479")
ZIEGLER_GRID = range(-3, 4)


def _field(field_: Field | None) -> Field:
    return field_ or Field(0)


def boolean(num_vars: int = 3, multiplicities: Sequence[int] | None = None, field_: Field | None = None):
    if num_vars < 1:
        raise ValidationError("Boolean arrangement needs at least one variable")
    forms = [[1 if i == j else 0 for j in range(num_vars)] for i in range(num_vars)]
    return MultiArrangement.new(_field(field_), forms, multiplicities, name="boolean")


def braid(num_vars: int = 3, multiplicities: Sequence[int] | None = None, field_: Field | None = None):
    """Essential braid arrangement: x_i and x_i - x_j in ``num_vars`` variables."""
    forms = []
    for i in range(num_vars):
        forms.append([1 if k == i else 0 for k in range(num_vars)])
    for i, j in combinations(range(num_vars), 2):
        row = [0] * num_vars
        row[i], row[j] = 1, -1
        forms.append(row)
    return MultiArrangement.new(_field(field_), forms, multiplicities, name="braid")


def x3(t: Any = 2, n: int = 1, field_: Field | None = None) -> MultiArrangement:
    """x^n y^n z^n (x - t y)(x + z)(y + z)."""
    field_ = _field(field_)
    t = field_.convert(t)
    if not t or t == field_.one:
        raise ValidationError("X3 needs t outside {0, 1}", field_name="t", field_value=field_.format(t))
    forms = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, -t, 0], [1, 0, 1], [0, 1, 1]]
    return MultiArrangement.new(field_, forms, [n, n, n, 1, 1, 1], name="x3")


def pencils(
    alpha: Any = 2,
    beta: Any = -2,
    multiplicities: Sequence[int] | None = (3, 3, 3, 1, 1, 3),
    field_: Field | None = None,
) -> MultiArrangement:
    """x y z (x - alpha z)(x - beta z)(y - z): two triple points on the line z."""
    field_ = _field(field_)
    a, b = field_.convert(alpha), field_.convert(beta)
    if a == b or not a or not b or a == field_.one or b == field_.one:
        raise ValidationError(
            "Pencil parameters must be distinct and outside {0, 1}",
            field_name="alpha,beta",
            field_value=f"{field_.format(a)},{field_.format(b)}",
        )
    forms = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, -a], [1, 0, -b], [0, 1, -1]]
    return MultiArrangement.new(field_, forms, multiplicities, name="pencils")


def cycle3(alpha: Any = 2, beta: Any = -2, n: int = 3, field_: Field | None = None) -> MultiArrangement:
    """x^n y^n z^n (x - alpha y)(x - beta y)(y - z)(x - z)."""
    field_ = _field(field_)
    a, b = field_.convert(alpha), field_.convert(beta)
    if a == b or not a or not b or a == field_.one or b == field_.one:
        raise ValidationError(
            "Cycle parameters must be distinct and outside {0, 1}",
            field_name="alpha,beta",
            field_value=f"{field_.format(a)},{field_.format(b)}",
        )
    forms = [
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
        [1, -a, 0],
        [1, -b, 0],
        [0, 1, -1],
        [1, 0, -1],
    ]
    return MultiArrangement.new(field_, forms, [n, n, n, 1, 1, 1, 1], name="cycle3")


def xrt(r: int = 3, t: Any = -1, field_: Field | None = None) -> MultiArrangement:
    """x0 * prod(x_i^2 - x0^2) * (x1 - x2)...(x_{r-1} - x_r)(x_r - t x1).

    Hyperplane 0 is V(x0).
    """
    field_ = _field(field_)
    if r < 3:
        raise ValidationError("The twisted family needs r >= 3", field_name="r", field_value=r)
    t = field_.convert(t)
    if not t:
        raise ValidationError("The twisted family needs t != 0", field_name="t", field_value=0)
    size = r + 1
    forms = [[1] + [0] * r]
    for i in range(1, size):
        for sign in (-1, 1):
            row = [0] * size
            row[i], row[0] = 1, sign
            forms.append(row)
    for i in range(1, r):
        row = [0] * size
        row[i], row[i + 1] = 1, -1
        forms.append(row)
    closing = [0] * size
    closing[r], closing[1] = 1, -t
    forms.append(closing)
    return MultiArrangement.new(
        field_, forms, variables=[f"x{i}" for i in range(size)], name=f"A_{r},{field_.format(t)}"
    )


def art(r: int = 3, t: Any = 2, field_: Field | None = None) -> MultiArrangement:
    """Ziegler restriction of the twisted family to V(x0)."""
    return xrt(r, t, field_).ziegler_restriction(0)


def generic(num_lines: int = 4, rank: int = 3, field_: Field | None = None) -> MultiArrangement:
    """Generic arrangement: rows (1, i, i^2, ...) of a Vandermonde matrix."""
    field_ = _field(field_)
    if num_lines < rank:
        raise ValidationError("A generic arrangement needs at least rank forms")
    if field_.characteristic and num_lines > field_.characteristic:
        raise ValidationError(
            "Not enough distinct nodes in the prime field",
            field_name="num_lines",
            field_value=num_lines,
            expected=f"<= {field_.characteristic}",
        )
    forms = [[i**k for k in range(rank)] for i in range(num_lines)]
    return MultiArrangement.new(field_, forms, name="generic")


def wheel(spokes: int = 4, multiplicities: Sequence[int] | None = None, field_: Field | None = None):
    """Graphic arrangement of a wheel: hub 0, rim 1..spokes."""
    edges = [(0, i) for i in range(1, spokes + 1)]
    edges += [(i, i % spokes + 1) for i in range(1, spokes + 1)]
    return graphic_arrangement(edges, multiplicities, field=field_)


def cycle_chord(multiplicities: Sequence[int] | None = None, field_: Field | None = None):
    """x y z (x - y)(y - z): a 4-cycle with a chord, one vertex at the origin."""
    forms = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, -1, 0], [0, 1, -1]]
    return MultiArrangement.new(_field(field_), forms, multiplicities, name="cycle_chord")


def triangle_path(multiplicities: Sequence[int] | None = None, field_: Field | None = None):
    """x y z w (x - y)(y - z)(z - w): three triangles glued along a path."""
    forms = [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [1, -1, 0, 0],
        [0, 1, -1, 0],
        [0, 0, 1, -1],
    ]
    return MultiArrangement.new(_field(field_), forms, multiplicities, name="triangle_path")


# ---------------------------------------------------------------------------
# Ziegler pair
# ---------------------------------------------------------------------------


def _cross(p: Sequence, q: Sequence) -> list:
    return [
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    ]


def _lines_through(points: dict[str, tuple]) -> list[list]:
    return [_cross(points[u], points[v]) for u, v in ZIEGLER_EDGES]


def on_common_conic(points: Sequence[Sequence], field_: Field) -> bool:
    """Six points lie on a conic iff their Veronese matrix is singular."""
    rows = [
        [x * x, y * y, z * z, x * y, x * z, y * z]
        for x, y, z in (tuple(field_.convert(c) for c in p) for p in points)
    ]
    return not determinant(rows_to_matrix(rows, 6, field_.domain))


def _has_ziegler_lattice(arrangement: MultiArrangement) -> bool:
    profile = arrangement.lattice.profile()
    return len(profile) == 4 and profile[2] == (2,) * 18 + (3,) * 6


def _try_points(points: dict[str, tuple], field_: Field) -> MultiArrangement | None:
    forms = _lines_through(points)
    if any(not any(f) for f in forms):
        return None
    try:
        candidate = MultiArrangement.new(field_, forms, name="ziegler")
    except ValidationError:
        return None
    return candidate if _has_ziegler_lattice(candidate) else None


def ziegler_pair(conic: bool = True, field_: Field | None = None) -> MultiArrangement:
    """Nine lines with six triple points {145,138,256,289,367,479}.

    The conic realization puts the triple points on y z = x^2 and is found by
    scanning small integer parameters; the other realization moves one point
    off that conic.
    """
    field_ = _field(field_)
    names = ("a", "b", "c", "d", "e", "f")
    for values in permutations(ZIEGLER_GRID, 6):
        points = {n: (p, p * p, 1) for n, p in zip(names, values)}
        if conic:
            found = _try_points(points, field_)
            if found is not None:
                logger.debug(f"Conic Ziegler realization at parameters {values}")
                return found
            continue
        for shift in range(1, 6):
            moved = dict(points)
            p = values[-1]
            moved["f"] = (p, p * p + shift, 1)
            if on_common_conic(list(moved.values()), field_):
                continue
            found = _try_points(moved, field_)
            if found is not None:
                logger.debug(f"Non-conic Ziegler realization at {values}, shift {shift}")
                return found
    raise ValidationError("No Ziegler realization found in the search grid")


def triple_points(arrangement: MultiArrangement) -> list[tuple]:
    """Intersection points of the triple flats, as projective coordinates."""
    points = []
    for flat in arrangement.lattice.triple_flats():
        i, j = flat.sorted_indices[:2]
        points.append(tuple(_cross(arrangement.forms[i], arrangement.forms[j])))
    return points


# ---------------------------------------------------------------------------
# Registry used by the CLI and moduli sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    """Builder plus the names of its field-valued and integer parameters."""

    name: str
    builder: Callable[..., MultiArrangement]
    field_params: tuple[str, ...] = ()
    int_params: tuple[str, ...] = ()
    mult_param: str | None = None
    description: str = ""


def _graphic_from_text(edges: str = "1-2,2-3,1-3", multiplicities=None, field_=None):
    pairs = []
    for token in edges.split(","):
        if "-" not in token:
            raise ValidationError("Edges are written as u-v", field_name="edges", field_value=token)
        u, v = token.split("-", 1)
        pairs.append((int(u), int(v)))
    return graphic_arrangement(pairs, multiplicities, field=field_)


FAMILIES: dict[str, FamilySpec] = {
    "boolean": FamilySpec("boolean", boolean, int_params=("l",), description="x1 ... xl"),
    "braid": FamilySpec("braid", braid, int_params=("l",), description="x_i and x_i - x_j"),
    "x3": FamilySpec(
        "x3", x3, field_params=("t",), mult_param="n", description="x^n y^n z^n (x-ty)(x+z)(y+z)"
    ),
    "pencils": FamilySpec(
        "pencils",
        pencils,
        field_params=("alpha", "beta"),
        description="x^3 y^3 z^3 (x-alpha z)(x-beta z)(y-z)^3",
    ),
    "cycle3": FamilySpec(
        "cycle3",
        cycle3,
        field_params=("alpha", "beta"),
        mult_param="n",
        description="x^n y^n z^n (x-alpha y)(x-beta y)(y-z)(x-z)",
    ),
    "xrt": FamilySpec("xrt", xrt, field_params=("t",), int_params=("r",), description="A_{r,t}"),
    "art": FamilySpec(
        "art", art, field_params=("t",), int_params=("r",), description="Ziegler restriction of A_{r,t}"
    ),
    "generic": FamilySpec(
        "generic", generic, int_params=("lines", "rank"), description="generic arrangement"
    ),
    "wheel": FamilySpec("wheel", wheel, int_params=("spokes",), description="wheel graph"),
    "ziegler": FamilySpec(
        "ziegler", ziegler_pair, int_params=("conic",), description="9 lines, 6 triple points"
    ),
    "chord": FamilySpec("chord", cycle_chord, description="x y z (x-y)(y-z)"),
    "graphic": FamilySpec("graphic", _graphic_from_text, description="edges=1-2,2-3,..."),
}

_ARGUMENT_NAMES = {
    "l": "num_vars",
    "lines": "num_lines",
    "rank": "rank",
    "spokes": "spokes",
    "r": "r",
    "conic": "conic",
    "t": "t",
    "alpha": "alpha",
    "beta": "beta",
    "n": "n",
    "edges": "edges",
}


def build_family(
    name: str,
    params: dict[str, str] | None = None,
    mults: dict[str, str] | None = None,
    field_: Field | None = None,
) -> MultiArrangement:
    """Build a registered family from string parameters.

    Args:
        name: Family name (see ``FAMILY_NAMES``)
        params: Parameter strings; field parameters accept ``p/q``
        mults: Either the family's multiplicity parameter (``n=2``) or an
            explicit vector (``m=3,3,3,1,1,3``)
        field_: Field for all coefficients

    Raises:
        ValidationError: Unknown family or parameter
    """
    if name not in FAMILIES:
        raise ValidationError(
            "Unknown family", field_name="family", field_value=name, expected=", ".join(FAMILY_NAMES)
        )
    spec = FAMILIES[name]
    field_ = _field(field_)
    kwargs: dict[str, Any] = {"field_": field_}
    for key, raw in (params or {}).items():
        if key in spec.field_params:
            kwargs[_ARGUMENT_NAMES[key]] = field_.convert(raw)
        elif key in spec.int_params:
            try:
                kwargs[_ARGUMENT_NAMES[key]] = int(raw)
            except ValueError as e:
                raise ValidationError("Integer parameter expected", field_name=key, field_value=raw) from e
        elif key == "edges" and name == "graphic":
            kwargs["edges"] = raw
        else:
            raise ValidationError("Unknown family parameter", field_name=key, field_value=raw)

    vector = None
    for key, raw in (mults or {}).items():
        if key == "m":
            vector = [int(v) for v in raw.split(",")]
        elif spec.mult_param and key == spec.mult_param:
            kwargs["n"] = int(raw)
        else:
            raise ValidationError("Unknown multiplicity parameter", field_name=key, field_value=raw)

    if "conic" in kwargs:
        kwargs["conic"] = bool(kwargs["conic"])
    arrangement = spec.builder(**kwargs)
    if vector is not None:
        arrangement = arrangement.with_multiplicities(vector)
    logger.info(f"Built family {name}: {arrangement.size} hyperplanes in {arrangement.num_vars} variables")
    return arrangement
