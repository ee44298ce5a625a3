"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

import csphere as cs


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def qpsk():
    return cs.make_psk(4)


@pytest.fixture
def qam16():
    return cs.make_rect_qam(16)


def random_complex_matrix(rng, m, n, scale=1.0):
    return scale * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))


def all_detector_configs(**kwargs):
    """Every variant x ordering combination."""
    return [
        cs.DetectorConfig(variant=v, ordering=o, **kwargs)
        for v in ("plain-sd", "se-sd", "csd", "c-csd")
        for o in ("natural", "pinv", "pac-full", "pac-modified")
    ]
