"""Shared reference systems for the test suite.

The reference mirror is a 1 pg oscillator at Omega_m = 2*pi*100 kHz with
gamma = 2*pi*10 Hz, probed by 1 mW at 1550 nm against a 100 mW reference:
backaction-to-damping ratio ~0.685, n_bar ~2.53 at k_B*T = 3*hbar*Omega_m.
"""

import math

import pytest

from mirrorspec import Bath, MechanicalOscillator, OpticalSetup

OMEGA_M = 2.0 * math.pi * 1e5
GAMMA = 2.0 * math.pi * 10.0
MASS = 1e-12
OMEGA0 = 2.0 * math.pi * 299792458.0 / 1.55e-6
T_3QUANTA = 1.4397729e-5  # k_B*T = 3*hbar*Omega_m


@pytest.fixture
def osc():
    return MechanicalOscillator(mass=MASS, omega_m=OMEGA_M, gamma=GAMMA)


@pytest.fixture
def opt():
    return OpticalSetup(
        omega0=OMEGA0, p_in=1e-3, p_ref=0.1, delta=8.0 * OMEGA_M, eta=1.0
    )


@pytest.fixture
def bath():
    return Bath(temperature=T_3QUANTA)


@pytest.fixture
def cold():
    return Bath(temperature=0.0)
