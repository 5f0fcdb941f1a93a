import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qfslice.discreteness import OracleBudget
from qfslice.raster import SliceSpec, render

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def np_matrix(m):
    """Independent numpy copy of a MoebiusMatrix."""
    return np.array([[m.a, m.b], [m.c, m.d]], dtype=complex)


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1.0)


@pytest.fixture(scope="session")
def grid_25():
    return render(SliceSpec(2.5, 2.5 + 0j, 6.0, 256, OracleBudget(), "plus"))


@pytest.fixture(scope="session")
def grid_8():
    return render(SliceSpec(8.0, 16 + 0j, 32.0, 512, OracleBudget(), "plus"))


@pytest.fixture(scope="session")
def grid_maskit():
    return render(SliceSpec(2.0, 2 + 0j, 4.0, 512, OracleBudget(), "plus"))
