"""Dense linear algebra on truncated Fock spaces.

Values are plain numpy arrays wrapped with a labeled tensor-product space so
that partial traces and Kronecker products stay index-safe.  Everything is in
natural units (hbar = 1, energies as angular frequencies) and immutable after
construction, so instances can be shared freely across parallel workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, HermiticityError, LabelError

HERM_ATOL = 1e-12
TRACE_ATOL = 1e-10
EIG_FLOOR = -1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Space:
    """Ordered tensor product of named finite-dimensional subsystems."""

    subsystems: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [n for n, _ in self.subsystems]
        if len(set(names)) != len(names):
            raise LabelError(f"duplicate subsystem names in {names}")
        for n, d in self.subsystems:
            if d < 1:
                raise DimensionError(f"subsystem {n!r} has dimension {d}")
        object.__setattr__(self, "subsystems", tuple((str(n), int(d)) for n, d in self.subsystems))

    @staticmethod
    def single(name: str, dim: int) -> "Space":
        return Space(((name, dim),))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.subsystems)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise LabelError(f"unknown subsystem {name!r}; have {self.names}") from None

    def joined(self, other: "Space") -> "Space":
        overlap = set(self.names) & set(other.names)
        if overlap:
            raise LabelError(f"subsystem name collision: {sorted(overlap)}")
        return Space(self.subsystems + other.subsystems)


@dataclass(frozen=True)
class Operator:
    """Dense square operator on a labeled space."""

    space: Space
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator matrix must be square, got {m.shape}")
        if m.shape[0] != self.space.dim:
            raise DimensionError(
                f"matrix dim {m.shape[0]} does not match space dim {self.space.dim}")
        if self.hermitian:
            defect = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
            if defect > HERM_ATOL:
                raise HermiticityError(f"hermitian flag set but defect {defect:.3e}")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T, hermitian=self.hermitian)

    def __add__(self, other: "Operator") -> "Operator":
        self._check_space(other)
        return Operator(self.space, self.matrix + other.matrix,
                        hermitian=self.hermitian and other.hermitian)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_space(other)
        return Operator(self.space, self.matrix - other.matrix,
                        hermitian=self.hermitian and other.hermitian)

    def __mul__(self, scalar) -> "Operator":
        herm = self.hermitian and (np.imag(scalar) == 0)
        return Operator(self.space, self.matrix * scalar, hermitian=bool(herm))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check_space(other)
            return Operator(self.space, self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            if other.space != self.space:
                raise LabelError("operator and state live on different spaces")
            return np.asarray(self.matrix @ other.amplitudes)
        return NotImplemented

    def _check_space(self, other: "Operator"):
        if other.space != self.space:
            raise LabelError("operators live on different spaces")


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state on a labeled space."""

    space: Space
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if v.shape[0] != self.space.dim:
            raise DimensionError(
                f"vector dim {v.shape[0]} does not match space dim {self.space.dim}")
        n = np.linalg.norm(v)
        if abs(n - 1.0) > 1e-12:
            raise DimensionError(f"state not normalized: |v| = {n!r}")
        object.__setattr__(self, "amplitudes", _readonly(v))

    @staticmethod
    def normalized(space: Space, amplitudes) -> "StateVector":
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if n == 0:
            raise DimensionError("cannot normalize the zero vector")
        return StateVector(space, v / n)

    def density_matrix(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(self.space, np.outer(v, v.conj()))

    def overlap(self, other: "StateVector") -> complex:
        if other.space != self.space:
            raise LabelError("states live on different spaces")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace positive-semidefinite operator on a labeled space."""

    space: Space
    matrix: np.ndarray
    _validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != self.space.dim:
            raise DimensionError(f"density matrix shape {m.shape} vs space dim {self.space.dim}")
        if self._validate:
            tr = np.trace(m)
            if abs(tr - 1.0) > TRACE_ATOL:
                raise DimensionError(f"trace {tr} is not 1")
            defect = np.max(np.abs(m - m.conj().T))
            if defect > HERM_ATOL:
                raise HermiticityError(f"density matrix hermiticity defect {defect:.3e}")
            lo = np.linalg.eigvalsh(m)[0]
            if lo < EIG_FLOOR:
                raise DimensionError(f"negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def expectation(self, op: Operator) -> complex:
        if op.space != self.space:
            raise LabelError("operator and state live on different spaces")
        return complex(np.trace(op.matrix @ self.matrix))


# ---------------------------------------------------------------------------
# constructors

def identity(dim: int, name: str = "mode") -> Operator:
    return Operator(Space.single(name, dim), np.eye(dim), hermitian=True)


def ladder_ops(dim: int, name: str = "mode") -> tuple[Operator, Operator]:
    """Truncated annihilation/creation pair with a|n> = sqrt(n)|n-1>."""
    if dim < 2:
        raise DimensionError(f"ladder operators need dim >= 2, got {dim}")
    a = np.zeros((dim, dim), dtype=complex)
    ns = np.arange(1, dim)
    a[ns - 1, ns] = np.sqrt(ns)
    space = Space.single(name, dim)
    return Operator(space, a), Operator(space, a.conj().T)


def number_op(dim: int, name: str = "mode") -> Operator:
    return Operator(Space.single(name, dim), np.diag(np.arange(dim, dtype=float)),
                    hermitian=True)


def parity_op(dim: int, name: str = "mode") -> Operator:
    """Photon-number parity exp(i*pi*n), diagonal and exact on the truncation."""
    return Operator(Space.single(name, dim),
                    np.diag((-1.0) ** np.arange(dim)), hermitian=True)


def fock_state(n: int, dim: int, name: str = "mode") -> StateVector:
    if not 0 <= n < dim:
        raise DimensionError(f"Fock index {n} outside truncation {dim}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return StateVector(Space.single(name, dim), v)


def displacement_op(alpha: complex, dim: int, name: str = "mode") -> Operator:
    """exp(alpha a^dag - alpha* a) on the truncated space.

    Computed by scaling-and-squaring matrix exponential of the anti-hermitian
    generator; unitary to ~1e-10 for |alpha| <= 2 once dim >= 30.
    """
    from scipy.linalg import expm

    a, adag = ladder_ops(dim, name)
    gen = alpha * adag.matrix - np.conj(alpha) * a.matrix
    return Operator(a.space, expm(gen))


def coherent_state(alpha: complex, dim: int, name: str = "mode") -> StateVector:
    """Truncated coherent state, renormalized on the truncation.

    Accurate (a|alpha> = alpha|alpha> to ~1e-8) once dim exceeds roughly
    |alpha|^2 + 6|alpha| + 10.
    """
    amp = np.zeros(dim, dtype=complex)
    amp[0] = 1.0
    for k in range(1, dim):
        amp[k] = amp[k - 1] * alpha / math.sqrt(k)
    return StateVector.normalized(Space.single(name, dim), amp)


# ---------------------------------------------------------------------------
# composition

def tensor(factors: Sequence[Operator | StateVector]):
    """Kronecker product of operators or of state vectors, labels concatenated."""
    if not factors:
        raise DimensionError("tensor of zero factors")
    if all(isinstance(f, Operator) for f in factors):
        space = reduce(lambda s, f: s.joined(f.space), factors[1:], factors[0].space)
        mat = reduce(np.kron, (f.matrix for f in factors))
        herm = all(f.hermitian for f in factors)
        return Operator(space, mat, hermitian=herm)
    if all(isinstance(f, StateVector) for f in factors):
        space = reduce(lambda s, f: s.joined(f.space), factors[1:], factors[0].space)
        vec = reduce(np.kron, (f.amplitudes for f in factors))
        return StateVector(space, vec)
    raise DimensionError("tensor factors must be all operators or all states")


def partial_trace(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Trace out every subsystem not named in `keep` (original order retained)."""
    keep = list(keep)
    for name in keep:
        rho.space.axis(name)  # raises LabelError on unknown names
    names = rho.space.names
    dims = rho.space.dims
    keep_axes = [i for i, n in enumerate(names) if n in keep]
    n_sub = len(dims)
    t = rho.matrix.reshape(dims + dims)
    # contract traced-out row/column axis pairs one at a time
    for ax in sorted((i for i in range(n_sub) if i not in keep_axes), reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + t.ndim // 2)
    kept_dims = tuple(dims[i] for i in keep_axes)
    d = int(np.prod(kept_dims, dtype=np.int64)) if kept_dims else 1
    new_space = Space(tuple(rho.space.subsystems[i] for i in keep_axes)) if kept_dims \
        else Space.single("scalar", 1)
    return DensityMatrix(new_space, t.reshape(d, d))


def hermitian_eig(op: Operator) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns.

    Requires the hermitian flag; raises HermiticityError otherwise.
    """
    if not op.hermitian:
        raise HermiticityError("hermitian_eig requires an operator with the hermitian flag")
    vals, vecs = np.linalg.eigh(op.matrix)
    return vals, vecs


def expectation(op: Operator, state: StateVector) -> complex:
    if op.space != state.space:
        raise LabelError("operator and state live on different spaces")
    return complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))
