import numpy as np
import pytest

from ergomap.pgm import write_pgm
from ergomap.synthimage import synthetic_coin


@pytest.fixture
def rng():
    return np.random.default_rng(20250811)


@pytest.fixture(scope="session")
def coin_pgm(tmp_path_factory):
    """Synthetic grayscale test image on disk (binary PGM, 64x64)."""
    path = tmp_path_factory.mktemp("images") / "coin.pgm"
    write_pgm(synthetic_coin(64), path, maxval=255)
    return path


def interior_lattice(n, dim):
    """Uniform lattice over [0,1]^dim including the endpoints."""
    g = np.linspace(0.0, 1.0, n)
    if dim == 1:
        return g
    return np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
