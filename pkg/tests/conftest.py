import math

import numpy as np
import pytest
from hypothesis import strategies as st

from ecodyn.equilibria import enumerate_equilibria
from ecodyn.model import PARAM_NAMES, ModelParams
from ecodyn.presets import PRESET_PARAMS

# observed range of each parameter over S1-S4
RANGES = {
    name: (min(getattr(P, name) for P in PRESET_PARAMS.values()),
           max(getattr(P, name) for P in PRESET_PARAMS.values()))
    for name in PARAM_NAMES
}


def random_params(rng: np.random.Generator) -> ModelParams:
    vals = {n: math.exp(rng.uniform(math.log(lo), math.log(hi))) for n, (lo, hi) in RANGES.items()}
    return ModelParams(**vals)


def random_param_sets(n: int, seed: int) -> list[ModelParams]:
    rng = np.random.default_rng(seed)
    return [random_params(rng) for _ in range(n)]


@st.composite
def model_params(draw):
    vals = {}
    for n, (lo, hi) in RANGES.items():
        vals[n] = math.exp(draw(st.floats(math.log(lo), math.log(hi))))
    return ModelParams(**vals)


@pytest.fixture(scope="session")
def sweep():
    """1000 random parameter sets with their equilibria."""
    return [(P, enumerate_equilibria(P)) for P in random_param_sets(1000, seed=20240917)]


@pytest.fixture(params=sorted(PRESET_PARAMS))
def preset(request):
    return request.param, PRESET_PARAMS[request.param]


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if not acceptance_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_log.summary_lines():
        terminalreporter.write_line(line)
