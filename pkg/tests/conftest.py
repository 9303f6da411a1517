from __future__ import annotations

import random
from pathlib import Path

import pytest

from hurwitz_components.groups import construct_group

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def q8_path() -> Path:
    return DATA_DIR / "q8.json"


@pytest.fixture(scope="session")
def q8(q8_path):
    return construct_group(f"cayley:{q8_path}")


@pytest.fixture()
def rng() -> random.Random:
    return random.Random(20260819)
