import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from circlespray.inertia import make_inertia  # noqa: E402
from circlespray.spectral import make_field_from_modes  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def helmholtz():
    return make_inertia(128, "helmholtz")


@pytest.fixture
def cos1():
    return make_field_from_modes(128, [(1, 1.0, 0.0)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
