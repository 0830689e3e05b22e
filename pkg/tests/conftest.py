import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from wlil.nodes_basis import NodeSystem

settings.register_profile(
    "wlil", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("wlil")


@st.composite
def hybrid_systems(draw, n_min=1, n_max=6):
    n = draw(st.integers(n_min, n_max))
    gaps = draw(st.lists(st.floats(0.25, 1.25), min_size=n, max_size=n))
    return NodeSystem.hybrid(np.cumsum(gaps))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
