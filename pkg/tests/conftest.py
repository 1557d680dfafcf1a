import pytest

from components.correlations import CountingModel
from utils.config import DARK_RATIO, P_PAIR


@pytest.fixture
def counting():
    """Read-out detectors of the interference runs (p_dark / eta = 0.017)."""
    return CountingModel.from_ratio(DARK_RATIO)


@pytest.fixture
def p_pair():
    return P_PAIR


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / 'results'
    path.mkdir()
    return str(path)
