import numpy as np
import pytest

from spinforge.designs import design_registry, simulate_design
from spinforge.params import default_params
from spinforge.propagator import DEFAULT_STEP, DrivePropagator


@pytest.fixture(scope="session")
def params():
    return default_params()


@pytest.fixture(scope="session")
def registry(params):
    return design_registry(params)


class SimCache:
    """Memoizes the expensive end-to-end simulations across test modules."""

    def __init__(self, params, registry):
        self.params = params
        self.registry = registry
        self._designs = {}
        self._raw = {}

    def design(self, tag, step=DEFAULT_STEP):
        key = (tag, step)
        if key not in self._designs:
            self._designs[key] = simulate_design(tag, self.params, step=step)
        return self._designs[key]

    def raw_unitary(self, tag, step=DEFAULT_STEP):
        """Undressed propagator of one registry design's drive."""
        key = (tag, step)
        if key not in self._raw:
            drive = self.registry[tag].drive
            prop = DrivePropagator(self.params, drive, step=step)
            self._raw[key] = prop.unitary()
        return self._raw[key]


@pytest.fixture(scope="session")
def sim(params, registry):
    return SimCache(params, registry)


def assert_unitary(u, tol=1e-9):
    u = np.asarray(getattr(u, "entries", u))
    assert np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol
