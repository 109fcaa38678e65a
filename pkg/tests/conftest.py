import numpy as np
import pytest

from oldroyd2d.fields import ScalarField, SymTensorField
from oldroyd2d.grid import Grid
from oldroyd2d.initial_data import random_scalar, random_state


@pytest.fixture
def grid16():
    return Grid(16)


@pytest.fixture
def grid32():
    return Grid(32)


@pytest.fixture
def grid64():
    return Grid(64)


def field_from(grid, fn):
    """Sample fn(x, y) on the grid."""
    return ScalarField.from_physical(grid, fn(grid.x, grid.y))


def rand_scalar(grid, seed, band=(1, 8)):
    return random_scalar(grid, band, [seed])


def rand_state(grid, seed, band=(1, 8), **kw):
    return random_state(grid, band, [seed], **kw)


def rand_tensor(grid, seed, band=(1, 8)):
    return SymTensorField(
        random_scalar(grid, band, [seed, 11], zero_mean=False),
        random_scalar(grid, band, [seed, 12], zero_mean=False),
        random_scalar(grid, band, [seed, 13], zero_mean=False),
    )


def rel_err(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)
