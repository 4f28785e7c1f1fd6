"""Shared instance builders for the test suite.

All randomized tests use fixed seeds recorded here so the suite is
reproducible run to run.
"""

import functools

import numpy as np
import pytest

from clickgbs import gaussian


def make_state(seed, modes, *, displaced=False, loss=None, max_squeeze=1.0):
    """Seeded physical instance: squeezed inputs (r <= max_squeeze) through a
    Haar interferometer, optional displacement (|gamma| <= 1 per mode) and
    optional loss."""
    rng = np.random.default_rng(seed)
    parts = [gaussian.squeezed(rng.uniform(0.3, max_squeeze)) for _ in range(modes)]
    state = functools.reduce(gaussian.tensor, parts)
    if modes > 1:
        state = gaussian.apply_unitary(state, gaussian.haar_unitary(modes, seed + 10_000))
    if displaced:
        offsets = rng.uniform(-0.7, 0.7, size=2 * modes)
        state = gaussian.GaussianState(state.cov, state.mean + offsets)
    if loss is not None:
        state = gaussian.loss_channel(state, loss)
    return state


def random_spd(seed, dim):
    """Well-conditioned random symmetric positive definite matrix."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((dim, dim))
    return raw @ raw.T + dim * np.eye(dim)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
