import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from curvradii import geometry as geo


@pytest.fixture
def euclid2():
    return geo.euclidean(2)


@pytest.fixture
def euclid3():
    return geo.euclidean(3)


@pytest.fixture
def sphere():
    return geo.sphere2()


@pytest.fixture
def hyperbolic():
    return geo.hyperbolic2()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def unit_circle_curve(radius=1.0, center=(0.0, 0.0), n=629, t0=-math.pi,
                      t1=math.pi):
    """Circle samples with (radius, 0) offset an interior node (t = 0)."""
    t = np.linspace(t0, t1, n)
    pts = np.stack([center[0] + radius * np.cos(t),
                    center[1] + radius * np.sin(t)], axis=1)
    return geo.SampledCurve(t, pts)
