import numpy as np
import pytest

from deltabolt.grid import Distribution, GridSpec


@pytest.fixture
def two_node_pair():
    """h = 0.25 grid carrying two unit point masses on exact nodes."""
    g = GridSpec(n=17, v_max=2.0)
    vals = np.zeros((17, 17, 17))
    ia, ib = (10, 6, 9), (5, 10, 7)
    vals[ia] = 1.0 / g.cell_volume
    vals[ib] = 1.0 / g.cell_volume
    va = np.array([0.5, -0.5, 0.25])
    vb = np.array([-0.75, 0.5, -0.25])
    return Distribution(g, vals), va, vb
