import numpy as np
import pytest

from dppcluster import build_artifacts


@pytest.fixture(scope="session")
def blob_data():
    """Two tight, far-separated Gaussian blobs with their labels."""
    rng = np.random.default_rng(42)
    a = rng.normal(0.0, 0.3, size=(50, 2))
    b = rng.normal(8.0, 0.3, size=(50, 2))
    x = np.vstack([a, b])
    truth = np.repeat([0, 1], 50)
    return x, truth


@pytest.fixture(scope="session")
def small_kernel_artifacts():
    """Kernel artifacts for a fixed 5-point dataset (enumeration-sized)."""
    rng = np.random.default_rng(3)
    return build_artifacts(rng.normal(size=(5, 2)))
