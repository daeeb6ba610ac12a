import random
from pathlib import Path

import pytest

from string_orientation.formal_groups import FormalGroupBuilder
from string_orientation.lib.rings import INTEGERS, RATIONALS
from string_orientation.modular_forms import ModularFormsRing

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture
def forms():
    return ModularFormsRing(16)


@pytest.fixture
def additive_q():
    return FormalGroupBuilder(RATIONALS, 6).standard("additive")


@pytest.fixture
def multiplicative_z():
    return FormalGroupBuilder(INTEGERS, 6).standard("multiplicative")


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR
