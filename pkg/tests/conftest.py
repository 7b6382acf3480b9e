import numpy as np
import pytest

from gestrec.config import PipelineConfig
from gestrec.synth import builtin_scripts, generate_dataset


@pytest.fixture(scope="session")
def tiny_sequences():
    """3 classes x 3 subjects x 2 trials, enough for LOOCV plumbing tests."""
    return generate_dataset(builtin_scripts()[:3], subjects=3, trials=2, seed=7)


@pytest.fixture(scope="session")
def tiny_config():
    """Small, fast network settings for pipeline tests."""
    return PipelineConfig(lstm_hidden=8, fc_out=8, head=(12, 8), dropout=0.1,
                          learning_rate=0.01, epochs=3, batch_size=16,
                          fine_gestures=(3, 4))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random rotation via quaternion sampling (independent of the
    package's Euler code)."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])
