"""Shared random-object builders for the test suite.

Plain functions, not fixtures: every test owns its seed so failures
reproduce standalone.
"""

import numpy as np

from noisypair import dynamics, entanglement


def random_density_matrix(rng, dim: int = 4) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_state(rng) -> np.ndarray:
    c = rng.normal(size=4) + 1j * rng.normal(size=4)
    return c / np.linalg.norm(c)


def random_channel_amplitude(rng) -> complex:
    # sqrt-uniform modulus spreads samples evenly over the unit disk
    return complex(np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))


def random_channel_pair(rng) -> dynamics.ChannelPair:
    return dynamics.ChannelPair(
        random_channel_amplitude(rng), random_channel_amplitude(rng)
    )


def random_noe_state(rng) -> entanglement.NOEMixedState:
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return entanglement.NOEMixedState(
        b=m[0, 0].real,
        c=m[1, 1].real,
        d=m[2, 2].real,
        z=m[0, 1],
        e=m[0, 2],
        f=m[1, 2],
    )
