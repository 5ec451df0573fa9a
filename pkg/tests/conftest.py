import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from chbergman import BallPoint

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def random_ball_points(rng, n, max_radius=0.9):
    out = []
    for _ in range(n):
        v = rng.standard_normal(4)
        v *= max_radius * rng.random() ** 0.25 / np.linalg.norm(v)
        out.append(BallPoint(complex(v[0], v[1]), complex(v[2], v[3])))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
