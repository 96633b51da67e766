"""
Shared fixtures: the bundled facts and the two bundled q-expansion fixtures
of X_Delta(26), Delta = {+-1, +-5}
"""
from pathlib import Path

import pytest

from xdelta.config import PACKAGE_DIR
from xdelta.facts import load_facts
from xdelta.qseries import CuspFormBasis, FixtureIndex, load_fixture
from xdelta.zmod import DeltaSubgroup, Level

DATA_DIR = PACKAGE_DIR / "data"
FIXTURES_DIR = PACKAGE_DIR / "fixtures"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

LEVEL_26 = Level(26)
DELTA_26 = DeltaSubgroup.from_pm(LEVEL_26, (1, 5))

QUADRIC_26 = "x*w - y*z + z^2"
CUBIC_26 = (
    "x^2*z - x*y^2 - x*z^2 + 2*y^2*z - 2*y*z^2 + y*z*w - y*w^2 + z^3 - 2*z^2*w + z*w^2"
)


@pytest.fixture(scope="session")
def bundle():
    return load_facts(DATA_DIR)


@pytest.fixture(scope="session")
def fixtures():
    return FixtureIndex.scan(FIXTURES_DIR)


@pytest.fixture(scope="session")
def basis_26() -> CuspFormBasis:
    return load_fixture(FIXTURES_DIR / "N26_delta1-5-21-25q10.txt")


@pytest.fixture(scope="session")
def verified_basis_26() -> CuspFormBasis:
    """The same basis through q^64, past the Sturm bound for cubic relations"""
    return load_fixture(FIXTURES_DIR / "N26_delta1-5-21-25q64.txt")
