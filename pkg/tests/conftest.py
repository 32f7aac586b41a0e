import sys
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from markov_infodesign.game_core import load_game_file  # noqa: E402

FIXTURES = Path(str(resources.files("markov_infodesign").joinpath("fixtures")))


def fixture_path(name: str) -> Path:
    return FIXTURES / name


@pytest.fixture
def load_fixture():
    return lambda name: load_game_file(FIXTURES / f"{name}.game")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
