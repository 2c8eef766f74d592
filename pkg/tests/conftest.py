import types
import warnings

import numpy as np
import pytest
from hypothesis import strategies as st

from thermoelastic.errors import OrderAmbiguous
from thermoelastic.hyperbolic import find_hyperbolic_directions
from thermoelastic.media import Moduli, check_distinct_eigenvalues, check_positivity


def admissible(m):
    """(A1-2) and (A3) hold."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return check_positivity(m).ok and check_distinct_eigenvalues(m).ok


def catalog_or_none(m):
    """Hyperbolic catalog, or None when a vanishing order cannot be resolved (near-degenerate gap)."""
    try:
        return find_hyperbolic_directions(m)
    except OrderAmbiguous:
        return None


def random_generic(rng):
    """Generic anisotropic medium with moduli of order one; retried until admissible."""
    while True:
        m = Moduli(
            tau1=rng.uniform(0.5, 6), tau2=rng.uniform(0.5, 6), lam=rng.uniform(-0.5, 2.5),
            sigma1=rng.uniform(-0.6, 0.6), sigma2=rng.uniform(-0.6, 0.6), mu=rng.uniform(0.5, 3),
            gamma=rng.uniform(0.2, 2), kappa=rng.uniform(0.2, 2),
        )
        if admissible(m):
            return m


def random_admissible(rng):
    """Mix of generic, cubic, rhombic and exceptional media."""
    kind = rng.integers(4)
    while True:
        mu = rng.uniform(0.5, 3)
        lam = rng.uniform(-0.4, 2) * mu
        if kind == 0:
            return random_generic(rng)
        if kind == 1:
            m = Moduli.cubic(rng.uniform(0.3, 6), lam, mu)
        elif kind == 2:
            m = Moduli.rhombic(rng.uniform(0.3, 8), rng.uniform(0.3, 8), lam, mu)
        else:
            m = Moduli.exceptional(rng.uniform(-0.6, 3) * mu, mu)
        if admissible(m):
            return m


def decoupled(m):
    """Stand-in for ``m`` with gamma = 0, which Moduli itself rejects."""
    fields = {k: getattr(m, k) for k in ("tau1", "tau2", "lam", "sigma1", "sigma2", "mu", "kappa")}
    return types.SimpleNamespace(gamma=0.0, **fields)


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)


moduli_values = st.floats(min_value=0.3, max_value=6.0, allow_nan=False)


@st.composite
def generic_media(draw):
    m = Moduli(
        tau1=draw(moduli_values), tau2=draw(moduli_values),
        lam=draw(st.floats(-0.5, 2.5)), sigma1=draw(st.floats(-0.6, 0.6)),
        sigma2=draw(st.floats(-0.6, 0.6)), mu=draw(st.floats(0.5, 3.0)),
    )
    return m
