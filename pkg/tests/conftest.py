import os

import numpy as np
import pytest

from couette_lab.grid import make_grid


def pytest_collection_modifyitems(config, items):
    if os.environ.get("RUN_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="long-running; set RUN_SLOW=1 to enable")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def small_grid():
    return make_grid(2.0 * np.pi, 16, 24)


@pytest.fixture
def mode_grid():
    """Minimal-x grid for y-profile (single wavenumber) work."""
    return make_grid(2.0 * np.pi, 8, 64)
