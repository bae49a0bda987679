import numpy as np
import pytest

from curvspace.curve import PiecewiseCurve


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def segment():
    def make(length: float) -> PiecewiseCurve:
        return PiecewiseCurve.from_pairs([(0.0, length)])

    return make


@pytest.fixture
def settings_file(tmp_path):
    def write(text: str):
        path = tmp_path / "settings.yml"
        path.write_text(text, encoding="utf-8")
        return path

    return write
