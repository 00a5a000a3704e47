import numpy as np
import pytest

from holegreen import study
from holegreen.geometry import HoleShape, PerforationConfig


@pytest.fixture(scope="session")
def scenes():
    """Preset scenes, built once (collocation hole kernels are the slow part)."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = study.build_scene(study.PRESETS[name]())
        return cache[name]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def ball_config(n, eps=0.1, center=None, radius=1.0, hole=None):
    return PerforationConfig(n=n, outer_center=tuple(center or (0.0,) * n), outer_radius=radius,
                             hole=hole or HoleShape.ball(), epsilon=eps)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance PASS/FAIL lines, which are otherwise captured."""
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
