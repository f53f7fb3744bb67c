import numpy as np
import pytest

import infoloss as il
from infoloss import kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # JIT compilation happens here, outside any timed test region.
    kernels.warmup()


@pytest.fixture(scope="session")
def demo_joint():
    """The 2x2 demonstration joint used throughout."""
    return il.JointXY(np.array([[0.4, 0.1], [0.1, 0.4]]))


@pytest.fixture(scope="session")
def lab_model():
    """Fixed 4x3x4 model for the sampling-lab criteria."""
    return il.FullModel(
        il.FiniteDist(np.array([0.3, 0.3, 0.2, 0.2])),
        il.CondDist(np.array([
            [0.34, 0.33, 0.33],
            [0.30, 0.40, 0.30],
            [0.25, 0.35, 0.40],
            [0.40, 0.30, 0.30],
        ])),
        il.CondDist(np.array([
            [0.85, 0.05, 0.05, 0.05],
            [0.05, 0.85, 0.05, 0.05],
            [0.05, 0.05, 0.85, 0.05],
            [0.05, 0.05, 0.05, 0.85],
        ])),
    )
