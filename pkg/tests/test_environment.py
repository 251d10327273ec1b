import math

import numpy as np
import pytest

from conftest import Z_R, Z_T, capacitive_spectrum, inductive_spectrum, kappa_internal
from dscqed import environment as env
from dscqed.errors import DomainError


def test_kappa_zero_coupling():
    assert env.kappa(0.0, 1.0, 1.0) == 0.0


def test_kappa_wide_cutoff_limit():
    # far below the cutoff the rate approaches 2 pi xi0^2 omega_r
    val = env.kappa(0.1, 1e9, 1.0)
    assert val == pytest.approx(2.0 * math.pi * 0.01, rel=1e-12)


def test_xi0_round_trip():
    for kap_mhz in (1.0, 40.0, 1000.0):
        kap = kappa_internal(kap_mhz)
        for wc in (0.05, 1.0, 20.0):
            xi0 = env.xi0_from_kappa(kap, wc, 1.0)
            assert env.kappa(xi0, wc, 1.0) == pytest.approx(kap, rel=1e-12)


def test_xi0_zero_kappa():
    assert env.xi0_from_kappa(0.0, 1.0, 1.0) == 0.0


def test_xi0_monotone_in_kappa():
    vals = [env.xi0_from_kappa(k, 2.0, 1.0) for k in (1e-4, 1e-3, 1e-2)]
    assert vals[0] < vals[1] < vals[2]


def test_circuit_inductive_formulas():
    circ = env.CircuitParams(Z_R=30.0, Z_T=50.0, C_R=1e-12, L_c=2e-9,
                             rw_coupling="inductive")
    spec = env.circuit_to_spectrum(circ)
    assert spec.xi0 == pytest.approx(math.sqrt(30.0 / (2 * math.pi * 50.0)), rel=1e-14)
    assert spec.omega_cutoff == pytest.approx(50.0 / 2e-9, rel=1e-14)
    # doubling the coupling inductance halves the cutoff
    spec2 = env.circuit_to_spectrum(
        env.CircuitParams(Z_R=30.0, Z_T=50.0, C_R=1e-12, L_c=4e-9,
                          rw_coupling="inductive"))
    assert spec2.omega_cutoff == pytest.approx(spec.omega_cutoff / 2, rel=1e-14)


def test_circuit_capacitive_weak_coupling_limit():
    c_r = 1e-12
    xi0s, cutoffs = [], []
    for c_c in (1e-15, 1e-16, 1e-17):
        spec = env.circuit_to_spectrum(
            env.CircuitParams(Z_R=30.0, Z_T=50.0, C_R=c_r, C_c=c_c,
                              rw_coupling="capacitive"))
        xi0s.append(spec.xi0)
        cutoffs.append(spec.omega_cutoff)
    assert xi0s[0] > xi0s[1] > xi0s[2]
    assert cutoffs[0] < cutoffs[1] < cutoffs[2]


def test_circuit_requires_matching_element():
    with pytest.raises(DomainError):
        env.CircuitParams(Z_R=30.0, Z_T=50.0, C_R=1e-12, L_c=1e-9, C_c=1e-15,
                          rw_coupling="inductive")
    with pytest.raises(DomainError):
        env.CircuitParams(Z_R=30.0, Z_T=50.0, C_R=1e-12, C_c=1e-15,
                          rw_coupling="inductive")


def test_design_curve_monotonicity():
    # loss rate decreasing in L_c (inductive), increasing in C_c (capacitive),
    # across four decades of the element value
    omega_r = 2 * math.pi * 6e9
    c_r = env.resonator_capacitance(30.0, omega_r)
    kappas_l = []
    for l_c in np.geomspace(1e-10, 1e-6, 17):
        spec = env.circuit_to_spectrum(
            env.CircuitParams(Z_R=30.0, Z_T=50.0, C_R=c_r, L_c=l_c,
                              rw_coupling="inductive"))
        kappas_l.append(env.kappa(spec.xi0, spec.omega_cutoff, omega_r))
    assert all(b < a for a, b in zip(kappas_l, kappas_l[1:]))
    kappas_c = []
    for c_c in np.geomspace(1e-18, 1e-14, 17):
        spec = env.circuit_to_spectrum(
            env.CircuitParams(Z_R=30.0, Z_T=50.0, C_R=c_r, C_c=c_c,
                              rw_coupling="capacitive"))
        kappas_c.append(env.kappa(spec.xi0, spec.omega_cutoff, omega_r))
    assert all(b > a for a, b in zip(kappas_c, kappas_c[1:]))


def test_element_inversion_round_trip():
    omega_r = 1.0
    for kap_mhz in (1.0, 40.0, 1000.0):
        kap = kappa_internal(kap_mhz)
        l_c = env.inductance_for_kappa(kap, Z_R, Z_T, omega_r)
        spec = env.circuit_to_spectrum(
            env.CircuitParams(Z_R=Z_R, Z_T=Z_T,
                              C_R=env.resonator_capacitance(Z_R, omega_r),
                              L_c=l_c, rw_coupling="inductive"))
        assert env.kappa(spec.xi0, spec.omega_cutoff, omega_r) == pytest.approx(
            kap, rel=1e-12)
        c_r = env.resonator_capacitance(Z_R, omega_r)
        c_c = env.capacitance_for_kappa(kap, Z_R, Z_T, omega_r, C_R=c_r)
        specc = env.circuit_to_spectrum(
            env.CircuitParams(Z_R=Z_R, Z_T=Z_T, C_R=c_r, C_c=c_c,
                              rw_coupling="capacitive"))
        assert env.kappa(specc.xi0, specc.omega_cutoff, omega_r) == pytest.approx(
            kap, rel=1e-12)


def test_discretize_standard_grid():
    spec = inductive_spectrum(40.0)
    freqs = np.array([5.0, 10.0, 15.0, 20.0]) / 6.0
    out = env.discretize_modes(spec.xi0, spec.omega_cutoff, "inductive",
                               freqs, mode_spacing=5.0 / 6.0)
    assert len(out.modes) == 4
    for m, w in zip(out.modes, freqs):
        expected = spec.xi0 ** 2 * w / (1 + (w / spec.omega_cutoff) ** 2) * (5.0 / 6.0)
        assert m.xi ** 2 == pytest.approx(expected, rel=1e-12)


def test_discretize_zero_coupling():
    out = env.discretize_modes(0.0, 1.0, "inductive", [0.5, 1.0], mode_spacing=0.5)
    assert all(m.xi == 0.0 for m in out.modes)


def test_discretize_tail_decreases():
    # far above the cutoff, xi_k^2 ~ wc^2/w falls off
    out = env.discretize_modes(0.3, 0.1, "inductive",
                               np.linspace(10.0, 100.0, 10), mode_spacing=1.0)
    xs = [m.xi for m in out.modes]
    assert all(b < a for a, b in zip(xs, xs[1:]))


def test_golden_rule_self_consistency():
    # summing pi xi_k^2 against a narrow window at omega_r recovers kappa / 2
    spec = inductive_spectrum(40.0)
    kap = kappa_internal(40.0)
    spacing = 1.0 / 200.0     # omega_r / 200, below the omega_r/100 requirement
    freqs = np.arange(spacing, 3.0, spacing)
    out = env.discretize_modes(spec.xi0, spec.omega_cutoff, "inductive",
                               freqs, mode_spacing=spacing)
    sigma = 0.02
    weights = np.exp(-0.5 * ((freqs - 1.0) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    total = sum(math.pi * m.xi ** 2 * w for m, w in zip(out.modes, weights))
    assert total == pytest.approx(kap / 2.0, rel=0.05)


def test_spin_boson_density():
    xi0, wc = 0.3, 2.0
    # ohmic slope at small frequency
    lo = env.spin_boson_J(1.0, xi0, wc, 1e-6) / 1e-6
    assert lo == pytest.approx(16 * math.pi * xi0 ** 2, rel=1e-4)
    # vanishes for imaginary displacement
    assert env.spin_boson_J(1.0j, xi0, wc, 1.0) == 0.0
    # peaks at the cutoff
    ws = np.linspace(0.1, 10.0, 991)
    vals = env.spin_boson_J(1.0, xi0, wc, ws)
    assert ws[int(np.argmax(vals))] == pytest.approx(wc, abs=0.02)


def test_capacitive_spectrum_helper_consistency():
    spec = capacitive_spectrum(1000.0)
    assert env.kappa(spec.xi0, spec.omega_cutoff, 1.0) == pytest.approx(
        kappa_internal(1000.0), rel=1e-12)
