import dataclasses
import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from thuelab.packing import Domain, PackingConfiguration, gen_hexagonal, gen_square
from thuelab.tessellation import build_diagram

SQRT3 = math.sqrt(3.0)
HEX_HEIGHT = 6 * SQRT3  # torus height fitting six hexagonal rows


@pytest.fixture(scope="session")
def hex_torus():
    return gen_hexagonal(Domain("torus", 12.0, HEX_HEIGHT))


@pytest.fixture(scope="session")
def square_torus():
    return gen_square(Domain("torus", 12.0, 12.0))


@pytest.fixture(scope="session")
def hex_minus_one(hex_torus):
    centers = hex_torus.centers[:14] + hex_torus.centers[15:]
    return dataclasses.replace(hex_torus, centers=centers)


@pytest.fixture(scope="session")
def removed_center(hex_torus):
    return hex_torus.centers[14]


@pytest.fixture(scope="session")
def hex_diagram(hex_torus):
    return build_diagram(hex_torus)


@pytest.fixture(scope="session")
def square_diagram(square_torus):
    return build_diagram(square_torus)


@pytest.fixture(scope="session")
def loose_square_torus():
    """Square grid with slack (spacing 2.4), so perturbation can move points."""
    w = 12.0
    spacing = 2.4
    n = round(w / spacing)
    pts = [(i * spacing, j * spacing) for j in range(n) for i in range(n)]
    return PackingConfiguration(Domain("torus", w, w), tuple(pts))
