import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from surrokit.signals import Signal, epoch_from_array


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def ar2_signal(rng):
    """960-sample AR(2) path with a 10 Hz resonance at 32 Hz sampling."""
    from oracles import ar2_path

    a1 = 2 * 0.92 * np.cos(2 * np.pi * 10.0 / 32.0)
    a2 = -(0.92**2)
    return Signal(ar2_path(a1, a2, 10.0, 960, rng), 32.0)


@pytest.fixture
def small_epoch(rng):
    data = rng.standard_normal((4, 128)) * 5.0
    return epoch_from_array(data, 32.0, "Wake")
