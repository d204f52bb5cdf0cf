import numpy as np
import pytest
from hypothesis import settings

from trspec import ModelSpec

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

REFERENCE_MODELS = {
    "n2_typical_1": ([[-2, 3], [-1, -1]], [0.5, -0.1], "Stable"),
    "n2_typical_2": ([[-5, 2], [-4, -1]], [-0.5, -0.1], "Stable"),
    "n2_hyperbolic_1": ([[3, 8], [-3, -7]], [0.1, -0.1], "HyperbolicInstability"),
    "n2_hyperbolic_2": ([[-7, 4], [-5, 2]], [-0.1, 0.0], "HyperbolicInstability"),
    "n2_eventually_constant": ([[1, 2], [4, 1]], [-0.1, -0.2], "UnstableReaction"),
    "n3_hyperbolic": ([[-6, 2, -9], [4, -10, -5], [8, 10, 2]], [0.1, -0.1, 0.5], "HyperbolicInstability"),
    "n3_turing_1": ([[-1, 2, -4], [-2, -2, 2], [-6, -7, -8]], [0.1, -0.1, 0.2], "TuringPattern"),
    "n3_turing_2": ([[-8, 2, -9], [-5, -3, -10], [9, -9, -1]], [0.1, -0.2, 0.2], "TuringPattern"),
    "n3_turing_3": ([[-3, 2, -4], [-5, -5, 2], [-5, -5, 1]], [-0.1, -0.2, 0.2], "TuringPattern"),
}

TURING_MODEL = ([[-8, 2, -9], [-5, -3, -10], [9, -9, -1]], [0.1, -0.2, 0.2])
HYPERBOLIC_MODEL = ([[-6, 2, -9], [4, -10, -5], [8, 10, 2]], [0.1, -0.2, 0.5])


def make(B, v, L=1.0):
    return ModelSpec.create(v, B, L)


def random_spec(rng, N, d=1, scale=5.0, vscale=1.0):
    return ModelSpec.create(rng.uniform(-vscale, vscale, (N, d)), rng.uniform(-scale, scale, (N, N)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA = []


@pytest.fixture
def criterion():
    def record(number, name, passed, detail=""):
        _CRITERIA.append((number, name, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_CRITERIA):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:2d}. {name}  {detail}")
