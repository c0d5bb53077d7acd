import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fracgs.spectral import SpectralGrid


@pytest.fixture(scope="session")
def grid1d():
    return SpectralGrid(1, 256, 40.0)


@pytest.fixture(scope="session")
def grid3d():
    # smallest legal 3-D grid; enough for fibering/projection properties
    return SpectralGrid(3, 16, 10.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260809)


def smooth_field(grid: SpectralGrid, rng, width: float = 1.5) -> np.ndarray:
    """Generic smooth random field: spectrally filtered white noise."""
    noise = rng.standard_normal(grid.shape())
    coeff = grid.fft(noise)
    coeff *= np.exp(-width * width * grid.k2)
    out = grid.ifft(coeff)
    return out / np.max(np.abs(out))


def radial_bumps(grid: SpectralGrid, rng, positive: bool = True) -> np.ndarray:
    """Random radial field: two Gaussian shells of random width/amplitude."""
    r = grid.radius()
    w = grid.L / 10.0 + (grid.L / 4.0 - grid.L / 10.0) * rng.random(2)
    a = 0.3 + rng.random(2)
    out = a[0] * np.exp(-(r * r) / (2 * w[0] ** 2)) + a[1] * np.exp(-(r * r) / (2 * w[1] ** 2))
    if not positive:
        out -= a[1] * np.exp(-(r * r) / (w[1] ** 2))
    return out
