import numpy as np
import pytest

from vdbtherm.model import SystemSpec, build_system


@pytest.fixture(scope="session")
def paper_spec():
    return SystemSpec()


@pytest.fixture(scope="session")
def paper_system(paper_spec):
    return build_system(paper_spec)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)


def random_spec(rng):
    """A non-degenerate random system for property runs."""
    tau = rng.uniform(0.8, 2.5)
    phi = rng.uniform(0.08, 0.42) if rng.random() < 0.5 else rng.uniform(0.58, 0.92)
    v = rng.uniform(0.5, 6.0, size=3)
    while np.min(np.abs(np.subtract.outer(v, v)[np.triu_indices(3, 1)])) < 0.1:
        v = rng.uniform(0.5, 6.0, size=3)
    return SystemSpec(tau=tau, phi=phi, potentials=tuple(v))
