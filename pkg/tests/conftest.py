"""Shared fixtures: frozen oracle values and random quasi-unitary transforms."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.stats import unitary_group

from photonic.mode_core import ModeTransform, compose_all, phase_shift, two_mode, two_mode_squeezer

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ORACLES = json.loads((Path(__file__).parent / "oracles" / "values.json").read_text())


@pytest.fixture(scope="session")
def oracles() -> dict:
    return ORACLES


def random_passive(rng: np.random.Generator, M: int) -> ModeTransform:
    if M == 1:
        return phase_shift(rng.uniform(-math.pi, math.pi), 0, 1)
    return ModeTransform(unitary_group.rvs(M, random_state=rng))


def random_active(rng: np.random.Generator, M: int, max_zeta: float = 0.8) -> ModeTransform:
    """Passive, squeezer and phase layers; a single mode gets a one-mode squeezer."""
    if M == 1:
        r = rng.uniform(-max_zeta, max_zeta)
        phi = rng.uniform(-math.pi, math.pi)
        return ModeTransform(np.array([[math.cosh(r)]]), np.array([[math.sinh(r) * np.exp(1j * phi)]]))
    parts = [random_passive(rng, M)]
    for _ in range(2):
        i, j = rng.choice(M, size=2, replace=False)
        parts.append(two_mode((int(i), int(j)), M, two_mode_squeezer(rng.uniform(-max_zeta, max_zeta))))
        parts.append(phase_shift(rng.uniform(-math.pi, math.pi), int(rng.integers(M)), M))
        parts.append(random_passive(rng, M))
    return compose_all(parts)


def random_transform(rng: np.random.Generator, M: int) -> ModeTransform:
    return random_passive(rng, M) if rng.random() < 0.5 else random_active(rng, M)
