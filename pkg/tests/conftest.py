import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from onebit_mimo import config_from_dict  # noqa: E402
from onebit_mimo.scenario import NetworkScenario, build_scenario  # noqa: E402


@pytest.fixture(scope="session")
def default_config():
    return config_from_dict({})


@pytest.fixture(scope="session")
def default_scenario(default_config):
    """Four cells, M=128, K=8, P_t = 10 dB."""
    return build_scenario(default_config, P_t=10.0)


@pytest.fixture
def tiny_scenario():
    """L=1, K=2, M=8, rho_p=1, unit attenuation, P_t/sigma2 = 10."""
    return NetworkScenario.from_beta(np.ones((1, 1, 2)), M=8, P_t=10.0, sigma2=1.0, rho_p=1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS, key=str):
        terminalreporter.write_line(mod.RESULTS[key])
