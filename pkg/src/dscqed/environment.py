"""Waveguide coupling spectrum: circuit-element conversion, bare loss rate,
mode discretization, and the effective two-level (spin-boson) spectral density.

The coupling weight per unit angular frequency is

    xi^2(w) = xi0^2 * w / (1 + (w / w_cutoff)^2),

and the bare-resonator golden-rule loss rate is kappa = 2*pi*xi^2(omega_r).
Discrete modes carry xi_k^2 = xi^2(w_k) * dw, with the continuum measure
replaced by an explicit mode spacing so few-mode truncations are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .rabi import CAPACITIVE, COUPLING_KINDS, INDUCTIVE


@dataclass(frozen=True)
class CircuitParams:
    """Lumped-element description of the resonator-waveguide port (SI units)."""

    Z_R: float                  # resonator impedance, ohm
    Z_T: float                  # waveguide impedance, ohm
    C_R: float                  # resonator capacitance, farad
    L_c: float | None = None    # coupling inductance, henry
    C_c: float | None = None    # coupling capacitance, farad
    rw_coupling: str = INDUCTIVE

    def __post_init__(self):
        if self.rw_coupling not in COUPLING_KINDS:
            raise DomainError(f"unknown coupling kind {self.rw_coupling!r}")
        if (self.L_c is None) == (self.C_c is None):
            raise DomainError("exactly one of L_c / C_c must be given")
        if self.rw_coupling == INDUCTIVE and self.L_c is None:
            raise DomainError("inductive coupling requires L_c")
        if self.rw_coupling == CAPACITIVE and self.C_c is None:
            raise DomainError("capacitive coupling requires C_c")
        for label, v in (("Z_R", self.Z_R), ("Z_T", self.Z_T), ("C_R", self.C_R),
                         ("L_c", self.L_c), ("C_c", self.C_c)):
            if v is not None and v <= 0:
                raise DomainError(f"{label} must be positive, got {v}")


@dataclass(frozen=True)
class Mode:
    """One discretized waveguide mode (angular frequency, coupling, Fock dim)."""

    omega: float
    xi: float
    dim: int = 3

    def __post_init__(self):
        if self.omega <= 0:
            raise DomainError(f"mode frequency must be positive, got {self.omega}")
        if self.xi < 0:
            raise DomainError(f"mode coupling must be nonnegative, got {self.xi}")
        if self.dim < 2:
            raise DomainError(f"mode dim must be >= 2, got {self.dim}")


@dataclass(frozen=True)
class EnvSpectrum:
    """Coupling-spectrum parameters plus an optional discrete mode list."""

    xi0: float
    omega_cutoff: float
    rw_coupling: str = INDUCTIVE
    modes: tuple[Mode, ...] = ()

    def __post_init__(self):
        if self.xi0 < 0:
            raise DomainError(f"xi0 must be nonnegative, got {self.xi0}")
        if self.omega_cutoff <= 0:
            raise DomainError(f"omega_cutoff must be positive, got {self.omega_cutoff}")
        if self.rw_coupling not in COUPLING_KINDS:
            raise DomainError(f"unknown coupling kind {self.rw_coupling!r}")
        omegas = [m.omega for m in self.modes]
        if any(b <= a for a, b in zip(omegas, omegas[1:])):
            raise DomainError("mode frequencies must be strictly increasing")


def coupling_density(xi0: float, omega_cutoff: float, omega) -> np.ndarray:
    """xi^2(w): squared coupling weight per unit angular frequency."""
    w = np.asarray(omega, dtype=float)
    return xi0 ** 2 * w / (1.0 + (w / omega_cutoff) ** 2)


def kappa(xi0: float, omega_cutoff: float, omega_r: float) -> float:
    """Golden-rule loss rate 2*pi*xi^2(omega_r) of a bare resonator photon."""
    if omega_r <= 0 or omega_cutoff <= 0:
        raise DomainError("omega_r and omega_cutoff must be positive")
    if xi0 < 0:
        raise DomainError("xi0 must be nonnegative")
    return float(2.0 * math.pi * coupling_density(xi0, omega_cutoff, omega_r))


def xi0_from_kappa(kappa_val: float, omega_cutoff: float, omega_r: float) -> float:
    """Invert the golden-rule relation for the coupling amplitude."""
    if kappa_val < 0:
        raise DomainError(f"kappa must be nonnegative, got {kappa_val}")
    if omega_r <= 0 or omega_cutoff <= 0:
        raise DomainError("omega_r and omega_cutoff must be positive")
    return math.sqrt(kappa_val * (1.0 + (omega_r / omega_cutoff) ** 2)
                     / (2.0 * math.pi * omega_r))


def resonator_capacitance(Z_R: float, omega_r: float) -> float:
    """LC-resonator capacitance consistent with (omega_r, Z_R)."""
    if Z_R <= 0 or omega_r <= 0:
        raise DomainError("Z_R and omega_r must be positive")
    return 1.0 / (Z_R * omega_r)


def circuit_to_spectrum(circ: CircuitParams) -> EnvSpectrum:
    """Map lumped elements to (xi0, omega_cutoff); no discrete modes attached.

    Inductive port:   xi0 = sqrt(Z_R / (2 pi Z_T)),  w_cutoff = Z_T / L_c.
    Capacitive port:  with C'_c = C_c C_R / (C_c + C_R),
                      xi0 = sqrt(Z_T C'_c^2 / (2 pi Z_R C_R^2)),
                      w_cutoff = 1 / (Z_T C'_c).
    """
    if circ.rw_coupling == INDUCTIVE:
        xi0 = math.sqrt(circ.Z_R / (2.0 * math.pi * circ.Z_T))
        omega_cutoff = circ.Z_T / circ.L_c
    else:
        c_eff = circ.C_c * circ.C_R / (circ.C_c + circ.C_R)
        xi0 = math.sqrt(circ.Z_T * c_eff ** 2 / (2.0 * math.pi * circ.Z_R * circ.C_R ** 2))
        omega_cutoff = 1.0 / (circ.Z_T * c_eff)
    return EnvSpectrum(xi0=xi0, omega_cutoff=omega_cutoff, rw_coupling=circ.rw_coupling)


def inductance_for_kappa(kappa_val: float, Z_R: float, Z_T: float, omega_r: float) -> float:
    """Coupling inductance that realizes a requested loss rate (inductive port)."""
    xi0sq = Z_R / (2.0 * math.pi * Z_T)
    ratio = 2.0 * math.pi * xi0sq * omega_r / kappa_val - 1.0
    if ratio <= 0:
        raise DomainError(
            f"kappa {kappa_val} exceeds the inductive-port maximum {2*math.pi*xi0sq*omega_r}")
    omega_cutoff = omega_r / math.sqrt(ratio)
    return Z_T / omega_cutoff


def capacitance_for_kappa(kappa_val: float, Z_R: float, Z_T: float, omega_r: float,
                          C_R: float | None = None) -> float:
    """Coupling capacitance that realizes a requested loss rate (capacitive port)."""
    if C_R is None:
        C_R = resonator_capacitance(Z_R, omega_r)
    rho = Z_T / Z_R
    k_norm = kappa_val / omega_r
    denom = rho * (1.0 - k_norm * rho)
    if denom <= 0 or k_norm >= 1.0 / rho:
        raise DomainError(
            f"kappa {kappa_val} exceeds the capacitive-port maximum {omega_r / rho}")
    u = math.sqrt(k_norm / denom)        # u = C'_c / C_R
    if u >= 1.0:
        raise DomainError("requested kappa needs C'_c >= C_R, unreachable")
    c_eff = u * C_R
    return c_eff * C_R / (C_R - c_eff)


def discretize_modes(xi0: float, omega_cutoff: float, rw_coupling: str,
                     mode_frequencies, mode_spacing: float | None = None,
                     mode_dim: int = 3) -> EnvSpectrum:
    """Replace the continuum by modes at the given angular frequencies.

    xi_k^2 = xi^2(w_k) * dw.  When no spacing is supplied, the local spacing
    of the frequency grid is used (one-sided at the ends).
    """
    freqs = np.asarray(mode_frequencies, dtype=float)
    if freqs.ndim != 1 or freqs.size == 0:
        raise DomainError("mode_frequencies must be a nonempty 1-d sequence")
    if np.any(freqs <= 0) or np.any(np.diff(freqs) <= 0):
        raise DomainError("mode frequencies must be positive and strictly increasing")
    if mode_spacing is not None:
        if mode_spacing <= 0:
            raise DomainError("mode_spacing must be positive")
        spacings = np.full_like(freqs, float(mode_spacing))
    elif freqs.size == 1:
        raise DomainError("a single mode needs an explicit mode_spacing")
    else:
        spacings = np.gradient(freqs)
    xi_k = np.sqrt(coupling_density(xi0, omega_cutoff, freqs) * spacings)
    modes = tuple(Mode(float(w), float(x), mode_dim) for w, x in zip(freqs, xi_k))
    return EnvSpectrum(xi0=xi0, omega_cutoff=omega_cutoff,
                       rw_coupling=rw_coupling, modes=modes)


def spin_boson_J(alpha: complex, xi0: float, omega_cutoff: float, omega) -> np.ndarray:
    """Ohmic spectral density 16 pi Re[alpha]^2 xi0^2 w / (1 + (w/w_c)^2)."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise DomainError("omega must be nonnegative")
    out = 16.0 * math.pi * np.real(alpha) ** 2 * coupling_density(xi0, omega_cutoff, w)
    return out if out.shape else float(out)
