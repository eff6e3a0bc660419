import numpy as np
import pytest

from rotconv.grid import Grid, PhysicalField, SpectralField, forward_transform


def random_band_limited(grid, seed, kmin=1, kmax=6, rng=None):
    """Seeded real random field restricted to kmin <= max|k_i| <= kmax,
    with the horizontal-mean sector removed."""
    if rng is None:
        rng = np.random.default_rng(seed)
    F = forward_transform(PhysicalField(grid, rng.standard_normal(grid.shape)))
    kx, ky, kz = grid.wavenumbers()
    kmag = np.maximum(np.maximum(np.abs(kx), np.abs(ky)), np.abs(kz))
    band = (kmag >= kmin) & (kmag <= kmax)
    c = np.where(band, F.coeffs, 0.0)
    c[0, 0, :] = 0.0
    return SpectralField(grid, c)


@pytest.fixture
def grid32():
    return Grid(32, 32, 32)


@pytest.fixture
def grid16():
    return Grid(16, 16, 16)
