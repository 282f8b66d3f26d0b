import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from posetinfo import Distribution, JointTable, Poset, chain  # noqa: E402

DATA = Path(__file__).parent / "data"

TRANSACTIONS = [[2], [2], [4, 5], [1, 2, 4, 5], [1, 2, 4, 5], [3], [1, 2, 4, 5], [4, 5],
                [1, 2, 4, 5], [2]]

VECTORS = ([(0, 1)] * 3 + [(1, 0)] + [(1, 1)] * 4 + [(1, 2)] * 3 + [(2, 1)] * 10
           + [(3, 3)] * 4)

JOINT_ROWS = [[0.01, 0.30, 0.10, 0.02], [0.10, 0.13, 0.14, 0.20]]


@pytest.fixture
def diamond():
    return Poset(["⊥", "x1", "x2", "x3"],
                 [("⊥", "x1"), ("⊥", "x2"), ("x1", "x3"), ("x2", "x3")])


@pytest.fixture
def phat(diamond):
    return Distribution(diamond, {"⊥": 0.1, "x1": 0.3, "x2": 0.2, "x3": 0.4})


@pytest.fixture
def chain4():
    return chain(4)


@pytest.fixture
def joint_table(chain4):
    return JointTable(chain4, ["0", "1"], JOINT_ROWS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
