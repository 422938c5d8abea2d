import numpy as np
import pytest

import zcore
from zcore.scoring import ScoreConfig


@pytest.fixture(scope="session")
def warm_engine():
    """Compile the scoring kernels once so timed tests measure the loop."""
    mat = np.random.default_rng(0).standard_normal((64, 4)).astype(np.float32)
    zcore.score_dataset(mat, ScoreConfig(iterations=32, seed=0, workers=1))
    zcore.score_dataset(mat, ScoreConfig(iterations=32, seed=0, sample_dims=1,
                                         neighbors=0, enable_redundancy=False))
    return True


def random_matrix(n, m, seed=0):
    return np.random.default_rng(seed).standard_normal((n, m)).astype(np.float32)


@pytest.fixture
def tiny_matrix():
    return random_matrix(50, 6, seed=1)
