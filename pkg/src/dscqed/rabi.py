"""Qubit-resonator Hamiltonian, its displaced-cat approximate eigenstates in
the deep-strong-coupling regime, and transition amplitudes between them.

Qubit basis convention: sigma_z eigenstates |up> = (1, 0), |down> = (0, 1),
sigma_x = [[0, 1], [1, 0]].  Subsystem order is (qubit, resonator) throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hilbert
from .errors import DimensionError, DomainError, LabelError
from .hilbert import Operator, Space, StateVector

INDUCTIVE = "inductive"
CAPACITIVE = "capacitive"
COUPLING_KINDS = (INDUCTIVE, CAPACITIVE)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

QUBIT = "qubit"
RESONATOR = "resonator"
LAGUERRE_MAX_N = 50


@dataclass(frozen=True)
class ModelParams:
    """Qubit-resonator parameters in angular-frequency units (hbar = 1)."""

    omega_r: float
    delta: float
    g: float
    qr_coupling: str = INDUCTIVE
    resonator_dim: int = 30

    def __post_init__(self):
        if self.omega_r <= 0:
            raise DomainError(f"omega_r must be positive, got {self.omega_r}")
        if self.delta <= 0:
            raise DomainError(f"delta must be positive, got {self.delta}")
        if self.g < 0:
            raise DomainError(f"g must be nonnegative, got {self.g}")
        if self.resonator_dim < 2:
            raise DimensionError(f"resonator_dim must be >= 2, got {self.resonator_dim}")
        if self.qr_coupling not in COUPLING_KINDS:
            raise DomainError(f"unknown coupling kind {self.qr_coupling!r}")

    @property
    def alpha0(self) -> float:
        """Bare displacement g / omega_r of the decoupled-qubit limit."""
        return self.g / self.omega_r


def pauli_ops(name: str = QUBIT) -> tuple[Operator, Operator, Operator]:
    sp = Space.single(name, 2)
    return (Operator(sp, SIGMA_X, hermitian=True),
            Operator(sp, SIGMA_Y, hermitian=True),
            Operator(sp, SIGMA_Z, hermitian=True))


def quadrature(dim: int, kind: str, name: str = RESONATOR) -> Operator:
    """Resonator quadrature the environment couples to: a+a^dag or (a-a^dag)/i."""
    a, adag = hilbert.ladder_ops(dim, name)
    if kind == INDUCTIVE:
        return Operator(a.space, a.matrix + adag.matrix, hermitian=True)
    if kind == CAPACITIVE:
        return Operator(a.space, -1j * (a.matrix - adag.matrix), hermitian=True)
    raise DomainError(f"unknown coupling kind {kind!r}")


def build_rabi(params: ModelParams) -> Operator:
    """Quantum Rabi Hamiltonian on (qubit tensor resonator)."""
    dim = params.resonator_dim
    sx, _, sz = pauli_ops()
    iq = hilbert.identity(2, QUBIT)
    ir = hilbert.identity(dim, RESONATOR)
    n = hilbert.number_op(dim, RESONATOR)
    x = quadrature(dim, params.qr_coupling)
    h = (params.omega_r * hilbert.tensor([iq, n]).matrix
         + 0.5 * params.delta * hilbert.tensor([sx, ir]).matrix
         + params.g * hilbert.tensor([sz, x]).matrix)
    return Operator(hilbert.tensor([iq, ir]).space, h, hermitian=True)


def laguerre(n: int, x: float) -> float:
    """Laguerre polynomial L_n(x) by the three-term forward recurrence."""
    if n < 0:
        raise DomainError(f"Laguerre order must be nonnegative, got {n}")
    if n > LAGUERRE_MAX_N:
        raise DomainError(f"Laguerre order {n} exceeds stability bound {LAGUERRE_MAX_N}")
    if n == 0:
        return 1.0
    prev, cur = 1.0, 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def approx_eigenstate(n: int, sign: int, alpha: complex, resonator_dim: int) -> StateVector:
    """Displaced-Fock cat (|up> D(-alpha)|n> +/- |down> D(alpha)|n>)/sqrt(2)."""
    if sign not in (+1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    if not 0 <= n < resonator_dim:
        raise DimensionError(f"Fock index {n} outside truncation {resonator_dim}")
    d = hilbert.displacement_op(alpha, resonator_dim, RESONATOR)
    up = np.kron([1.0, 0.0], d.dagger().matrix[:, n])   # D(-alpha)|n>
    dn = np.kron([0.0, 1.0], d.matrix[:, n])
    space = Space(((QUBIT, 2), (RESONATOR, resonator_dim)))
    return StateVector.normalized(space, (up + sign * dn) / np.sqrt(2.0))


def approx_eigenenergy(n: int, sign: int, params: ModelParams) -> float:
    """First-order energy n w_r - g^2/w_r +/- (Delta/2) e^{-2 a^2} L_n(4 a^2)."""
    if sign not in (+1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    a2 = params.alpha0 ** 2
    splitting = 0.5 * params.delta * np.exp(-2.0 * a2) * laguerre(n, 4.0 * a2)
    return n * params.omega_r - params.g ** 2 / params.omega_r + sign * splitting


def transition_amplitude(bra: StateVector, x: Operator, ket: StateVector) -> complex:
    """Matrix element <bra| X |ket>."""
    if bra.space != x.space or ket.space != x.space:
        raise LabelError("bra, operator, and ket must share one space")
    return complex(np.vdot(bra.amplitudes, x.matrix @ ket.amplitudes))


def parity_op(resonator_dim: int) -> Operator:
    """sigma_x tensor exp(i pi n): commutes with both Rabi coupling types."""
    sx, _, _ = pauli_ops()
    return hilbert.tensor([sx, hilbert.parity_op(resonator_dim, RESONATOR)])
