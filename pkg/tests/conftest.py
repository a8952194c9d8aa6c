import numpy as np
import pytest

from subcurv import build_example, parse_metric_expression

SPHERE2 = """
dim = 2
coords = (theta, phi)
domain = ((0, pi), (0, 2*pi))
g = [[1, 0], [0, sin(theta)^2]]
"""

# unit 3-sphere in hyperspherical coordinates
SPHERE3 = """
coords = (a, b, c)
domain = ((0, pi), (0, pi), (0, 2*pi))
g = [[1, 0, 0], [0, sin(a)^2, 0], [0, 0, sin(a)^2*sin(b)^2]]
"""


@pytest.fixture(scope="session")
def sphere2():
    return parse_metric_expression(SPHERE2)


@pytest.fixture(scope="session")
def sphere3():
    return parse_metric_expression(SPHERE3)


@pytest.fixture(scope="session")
def hopf():
    return build_example("hopf").spec


@pytest.fixture(scope="session")
def warped():
    return build_example("warped_interval_s1").spec


@pytest.fixture(scope="session")
def kk():
    return build_example("kaluza_klein_generic").spec


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
