"""Shared fixtures: the standard experimental parameter set used throughout
(6 GHz resonator, 1.2 GHz qubit splitting, 30/50 ohm impedances) expressed in
internal units where omega_r = 1.
"""

import numpy as np
import pytest

from dscqed import environment as env
from dscqed import rabi

OMEGA_R_GHZ = 6.0
DELTA = 0.2          # delta / omega_r
Z_R = 30.0
Z_T = 50.0


def kappa_internal(kappa_mhz: float) -> float:
    """kappa (angular, omega_r units) for a quoted kappa/2pi in MHz."""
    return kappa_mhz * 1e-3 / OMEGA_R_GHZ


def inductive_spectrum(kappa_mhz: float) -> env.EnvSpectrum:
    """Circuit-derived inductive spectrum at the requested loss rate."""
    kap = kappa_internal(kappa_mhz)
    l_c = env.inductance_for_kappa(kap, Z_R, Z_T, 1.0)
    circ = env.CircuitParams(Z_R=Z_R, Z_T=Z_T,
                             C_R=env.resonator_capacitance(Z_R, 1.0),
                             L_c=l_c, rw_coupling="inductive")
    return env.circuit_to_spectrum(circ)


def capacitive_spectrum(kappa_mhz: float) -> env.EnvSpectrum:
    """Circuit-derived capacitive spectrum at the requested loss rate."""
    kap = kappa_internal(kappa_mhz)
    c_r = env.resonator_capacitance(Z_R, 1.0)
    c_c = env.capacitance_for_kappa(kap, Z_R, Z_T, 1.0, C_R=c_r)
    circ = env.CircuitParams(Z_R=Z_R, Z_T=Z_T, C_R=c_r, C_c=c_c,
                             rw_coupling="capacitive")
    return env.circuit_to_spectrum(circ)


def paper_modes(spec: env.EnvSpectrum, dim: int = 3) -> env.EnvSpectrum:
    """Attach the standard 4-mode grid (5, 10, 15, 20 GHz at 5 GHz spacing)."""
    freqs = np.array([5.0, 10.0, 15.0, 20.0]) / OMEGA_R_GHZ
    return env.discretize_modes(spec.xi0, spec.omega_cutoff, spec.rw_coupling,
                                freqs, mode_spacing=5.0 / OMEGA_R_GHZ, mode_dim=dim)


@pytest.fixture
def model30():
    return rabi.ModelParams(1.0, DELTA, 1.0, resonator_dim=30)


@pytest.fixture
def rng():
    return np.random.RandomState(20260810)
