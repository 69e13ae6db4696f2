"""Pytest configuration and shared fixtures for arrangement tests.

This module provides common fixtures and test utilities used across
all test modules.

Requires Python 3.10+
"""

import tempfile
from pathlib import Path
from typing import Generator

import pytest

from arr_utils.arrangement import MultiArrangement
from arr_utils.families import boolean, braid, cycle_chord, pencils, x3
from arr_utils.linalg import Field

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Provide a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as temp_path:
        yield Path(temp_path)


@pytest.fixture
def data_dir() -> Path:
    """Directory of checked-in arrangement files."""
    return DATA_DIR


@pytest.fixture
def q() -> Field:
    return Field(0)


@pytest.fixture
def x3_simple() -> MultiArrangement:
    """xyz(x - 2y)(x + z)(y + z): three triple points, not free."""
    return x3(t=2, n=1)


@pytest.fixture
def boolean3() -> MultiArrangement:
    return boolean(3)


@pytest.fixture
def braid3() -> MultiArrangement:
    """A3 in essential coordinates: x, y, z, x - y, x - z, y - z."""
    return braid(3)


@pytest.fixture
def chord() -> MultiArrangement:
    """Graphic arrangement of a 4-cycle with a chord: xyz(x - y)(y - z)."""
    return cycle_chord()


@pytest.fixture
def cycle_arrangement() -> MultiArrangement:
    """x^3 y^3 z^3 (x - 2y)(x + 2y)(y - z)(x - z): TF2 with a 6-cycle, free."""
    return MultiArrangement.new(
        "Q",
        [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, -2, 0], [1, 2, 0], [0, 1, -1], [1, 0, -1]],
        [3, 3, 3, 1, 1, 1, 1],
        name="cycle",
    )


@pytest.fixture
def pencil_free() -> MultiArrangement:
    """x^3 y^3 z^3 (x - 2z)(x + 2z)(y - z)^3: free since alpha = -beta."""
    return pencils(2, -2)


@pytest.fixture
def pencil_not_free() -> MultiArrangement:
    """x^3 y^3 z^3 (x - 2z)(x - 3z)(y - z)^3: not free."""
    return pencils(2, 3)


def write_arrangement_file(path: Path, content: str) -> Path:
    """Create an arrangement file with given content."""
    path.write_text(content, encoding="utf-8")
    return path
