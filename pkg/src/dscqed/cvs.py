"""Coherent variational ground state of the qubit-resonator-waveguide system.

The ansatz displaces the resonator and every waveguide mode oppositely in the
two qubit branches.  Eliminating the mode amplitudes reduces the problem to
two unknowns: the resonator displacement alpha and the total waveguide photon
number S, closed through the bath response sums

    f1(x) = sum_k xi_k^2 / (x + w_k),    f2(x) = sum_k xi_k^2 / (x + w_k)^2,

evaluated either over discrete modes, by adaptive quadrature of the continuum
spectrum, or by closed forms.  The printed closed form for f1 circulates with
a dimensionally inhomogeneous denominator (x^2 + w_c); the variant implemented
here, with denominator x^2 + w_c^2, is the one that matches the quadrature of
the defining integral (cross-checked in the test suite).

When the coupling is strong enough the S equation loses its finite root (the
Ohmic-localization runaway): the energy infimum then sits at S -> infinity and
the solver returns the decohered boundary solution with coherence exactly 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import hilbert
from .environment import EnvSpectrum
from .errors import DomainError, SolverError
from .rabi import CAPACITIVE, INDUCTIVE, ModelParams, approx_eigenstate

DISCRETE_SUM = "discrete_sum"
CONTINUUM_CLOSED_FORM = "continuum_closed_form"
CONTINUUM_QUADRATURE = "continuum_quadrature"
F_MODES = (DISCRETE_SUM, CONTINUUM_CLOSED_FORM, CONTINUUM_QUADRATURE)

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 200
S_ESCAPE = 150.0


@dataclass(frozen=True)
class CvsProblem:
    model: ModelParams
    env: EnvSpectrum
    f_mode: str = CONTINUUM_QUADRATURE

    def __post_init__(self):
        if self.f_mode not in F_MODES:
            raise DomainError(f"unknown f_mode {self.f_mode!r}; choose from {F_MODES}")
        if self.f_mode == DISCRETE_SUM and not self.env.modes:
            raise DomainError("discrete_sum needs a nonempty mode list")


@dataclass(frozen=True)
class CvsSolution:
    alpha_bar: float
    S_bar: float
    coherence_C: float
    energy: float
    iterations: int
    residual: float
    localized: bool = False


# ---------------------------------------------------------------------------
# bath response sums

def _f_discrete(x: float, env: EnvSpectrum, power: int) -> float:
    acc = 0.0
    for m in env.modes:
        acc += m.xi ** 2 / (x + m.omega) ** power
    return acc


def _f_quadrature(x: float, xi0: float, wc: float, power: int) -> float:
    if xi0 == 0.0:
        return 0.0
    if x == 0.0 and power >= 2:
        return math.inf

    def integrand(w):
        return xi0 ** 2 * w / (1.0 + (w / wc) ** 2) / (x + w) ** power

    lo, _ = quad(integrand, 0.0, wc, epsabs=1e-15, epsrel=1e-13, limit=400)
    hi, _ = quad(integrand, wc, np.inf, epsabs=1e-15, epsrel=1e-13, limit=400)
    return lo + hi


def _f1_closed(x: float, xi0: float, wc: float) -> float:
    if xi0 == 0.0:
        return 0.0
    if x == 0.0:
        return math.pi * xi0 ** 2 * wc / 2.0
    u = x * x + wc * wc
    return xi0 ** 2 * wc * wc * (-x * math.log(wc / x) + math.pi * wc / 2.0) / u


def _f2_closed(x: float, xi0: float, wc: float) -> float:
    if xi0 == 0.0:
        return 0.0
    if x == 0.0:
        return math.inf
    u = x * x + wc * wc
    l = math.log(x / wc)
    return xi0 ** 2 * wc * wc * (-1.0 / u
                                 + (x * x - wc * wc) * l / u ** 2
                                 + math.pi * wc * x / u ** 2)


def _f3_closed(x: float, xi0: float, wc: float) -> float:
    # f3 = -f2'/2, from differentiating the f2 closed form
    if xi0 == 0.0:
        return 0.0
    if x == 0.0:
        return math.inf
    u = x * x + wc * wc
    l = math.log(x / wc)
    d = (2.0 * x / u ** 2
         + 2.0 * x * l / u ** 2
         + (x * x - wc * wc) / (x * u ** 2)
         - 4.0 * x * (x * x - wc * wc) * l / u ** 3
         + math.pi * wc / u ** 2
         - 4.0 * math.pi * wc * x * x / u ** 3)
    return -0.5 * xi0 ** 2 * wc * wc * d


def _f(x: float, problem: CvsProblem, power: int) -> float:
    if x < 0:
        raise DomainError(f"bath response argument must be nonnegative, got {x}")
    env = problem.env
    if problem.f_mode == DISCRETE_SUM:
        return _f_discrete(x, env, power)
    if problem.f_mode == CONTINUUM_QUADRATURE:
        return _f_quadrature(x, env.xi0, env.omega_cutoff, power)
    if power == 1:
        return _f1_closed(x, env.xi0, env.omega_cutoff)
    if power == 2:
        return _f2_closed(x, env.xi0, env.omega_cutoff)
    return _f3_closed(x, env.xi0, env.omega_cutoff)


def f1(x: float, problem: CvsProblem) -> float:
    """Bath response sum_k xi_k^2 / (x + w_k)."""
    return _f(x, problem, 1)


def f2(x: float, problem: CvsProblem) -> float:
    """Bath response sum_k xi_k^2 / (x + w_k)^2.  Diverges at x=0 in the continuum."""
    return _f(x, problem, 2)


def f3(x: float, problem: CvsProblem) -> float:
    """Bath response sum_k xi_k^2 / (x + w_k)^3 (used by the solver Jacobian)."""
    return _f(x, problem, 3)


# ---------------------------------------------------------------------------
# energy functional on the (alpha, S) manifold

def _same_type(problem: CvsProblem) -> bool:
    """True when the waveguide couples to the same quadrature as the qubit."""
    return problem.env.rw_coupling == problem.model.qr_coupling


def beta_k(alpha: complex, S: float, problem: CvsProblem) -> np.ndarray:
    """Mode amplitudes eliminated at fixed (alpha, S); needs discrete modes."""
    if not problem.env.modes:
        raise DomainError("beta_k needs an environment with discrete modes")
    m = problem.model
    x = m.delta * math.exp(-2.0 * (abs(alpha) ** 2 + S))
    omegas = np.array([mode.omega for mode in problem.env.modes])
    xis = np.array([mode.xi for mode in problem.env.modes])
    if _same_type(problem):
        return np.asarray(-2.0 * xis * np.real(alpha) / (omegas + x), dtype=complex)
    return np.asarray(-2.0j * xis * np.imag(alpha) / (omegas + x), dtype=complex)


def cvs_energy(alpha: complex, S: float, problem: CvsProblem) -> float:
    """Variational energy with the mode amplitudes eliminated at (alpha, S).

    The eliminated amplitudes are re-substituted into the full expectation
    value, so at xi0 = 0 this reduces to the closed-model energy
    w_r |alpha|^2 - g (alpha + alpha*) - (Delta/2) exp(-2 |alpha|^2).
    """
    if S < 0:
        raise DomainError(f"S must be nonnegative, got {S}")
    m = problem.model
    x = m.delta * math.exp(-2.0 * (abs(alpha) ** 2 + S))
    f1v = f1(x, problem)
    f2v = f2(x, problem) if not (math.isinf(S)) else 0.0
    if _same_type(problem):
        amp2 = (2.0 * np.real(alpha)) ** 2
    else:
        amp2 = (2.0 * np.imag(alpha)) ** 2
    if math.isinf(S):
        bath = -amp2 * f1v
        tail = 0.0
    else:
        bath = -amp2 * (f1v + x * f2v)
        tail = 0.5 * m.delta * math.exp(-2.0 * (abs(alpha) ** 2 + amp2 * f2v))
    return float(m.omega_r * abs(alpha) ** 2 - 2.0 * m.g * np.real(alpha) + bath - tail)


def cvs_energy_gradient(alpha: float, S: float, problem: CvsProblem) -> tuple[float, float]:
    """Analytic (dE/dalpha, dE/dS) of cvs_energy for real alpha."""
    m = problem.model
    a = float(alpha)
    x = m.delta * math.exp(-2.0 * (a * a + S))
    f1v, f2v, f3v = f1(x, problem), f2(x, problem), f3(x, problem)
    same = _same_type(problem)
    if not same:
        # real alpha leaves the eliminated amplitudes at zero
        de_da = 2.0 * m.omega_r * a - 2.0 * m.g \
            + 2.0 * a * m.delta * math.exp(-2.0 * a * a)
        return de_da, 0.0
    p = 4.0 * a * a * f2v                               # actual waveguide photon number
    e_tail = m.delta * math.exp(-2.0 * (a * a + p))
    gv = f1v + x * f2v
    x_a = -4.0 * a * x
    x_s = -2.0 * x
    g_prime = -2.0 * x * f3v
    p_a = 8.0 * a * f2v + 4.0 * a * a * (-2.0 * f3v) * x_a
    p_s = 4.0 * a * a * (-2.0 * f3v) * x_s
    de_da = (2.0 * m.omega_r * a - 2.0 * m.g
             - 8.0 * a * gv - 4.0 * a * a * g_prime * x_a
             + e_tail * (2.0 * a + p_a))
    de_ds = -4.0 * a * a * g_prime * x_s + e_tail * p_s
    return de_da, de_ds


# ---------------------------------------------------------------------------
# stationary-point solvers

def _closed_root(model: ModelParams) -> tuple[float, int, float]:
    """Positive root of (w_r + Delta e^{-2 a^2}) a = g (closed model)."""
    if model.g == 0.0:
        return 0.0, 0, 0.0

    def eq(a):
        return (model.omega_r + model.delta * math.exp(-2.0 * a * a)) * a - model.g

    hi = model.g / model.omega_r
    if eq(hi) < 0:        # guard against rounding at the bracket edge
        hi *= 1.0 + 1e-12
    root, info = brentq(eq, 0.0, hi, xtol=1e-15, rtol=8.9e-16, full_output=True)
    return float(root), int(info.iterations), abs(eq(root))


def solve_capacitive(problem: CvsProblem) -> CvsSolution:
    """Stationary state when the waveguide couples to the orthogonal quadrature.

    The mode amplitudes vanish identically, so the result equals the closed
    model regardless of the coupling spectrum (the ansatz cannot register this
    coupling type; a documented limitation).
    """
    if problem.env.rw_coupling != CAPACITIVE:
        raise DomainError("solve_capacitive expects a capacitive environment")
    alpha, iters, res = _closed_root(problem.model)
    energy = cvs_energy(alpha, 0.0, problem)
    return CvsSolution(alpha_bar=alpha, S_bar=0.0, coherence_C=1.0,
                       energy=energy, iterations=iters, residual=res)


def _residuals(a: float, S: float, problem: CvsProblem) -> tuple[float, float, float]:
    m = problem.model
    x = m.delta * math.exp(-2.0 * (a * a + S))
    r1 = (m.omega_r + x) * a - m.g - 4.0 * a * f1(x, problem)
    r2 = 4.0 * a * a * f2(x, problem) - S
    return r1, r2, x


def _jacobian(a: float, S: float, x: float, problem: CvsProblem) -> np.ndarray:
    f1v, f2v, f3v = f1(x, problem), f2(x, problem), f3(x, problem)
    x_a = -4.0 * a * x
    x_s = -2.0 * x
    j11 = problem.model.omega_r + x + a * x_a - 4.0 * f1v + 4.0 * a * f2v * x_a
    j12 = a * x_s + 4.0 * a * f2v * x_s
    j21 = 8.0 * a * f2v - 8.0 * a * a * f3v * x_a
    j22 = -8.0 * a * a * f3v * x_s - 1.0
    return np.array([[j11, j12], [j21, j22]])


def _alpha_max(problem: CvsProblem) -> float:
    m = problem.model
    f1_0 = f1(0.0, problem)
    if m.omega_r <= 4.0 * f1_0:
        raise SolverError(
            f"bath renormalization 4*f1(0) = {4*f1_0} exceeds omega_r; "
            "the variational energy is unbounded at this coupling")
    return m.g / (m.omega_r - 4.0 * f1_0)


def _localized_solution(problem: CvsProblem, iterations: int) -> CvsSolution:
    """Boundary minimizer S -> infinity (coherence exactly zero)."""
    a = _alpha_max(problem)
    m = problem.model
    r1 = m.omega_r * a - m.g - 4.0 * a * f1(0.0, problem)
    return CvsSolution(alpha_bar=a, S_bar=math.inf, coherence_C=0.0,
                       energy=cvs_energy(a, math.inf, problem),
                       iterations=iterations, residual=abs(r1), localized=True)


def _scan_for_root(problem: CvsProblem) -> tuple[float, float] | None:
    """Locate the smallest finite root of the S self-consistency equation."""
    a_hi = _alpha_max(problem) + 1.0

    def alpha_of_s(S):
        def q(a):
            r1, _, _ = _residuals(a, S, problem)
            return r1
        return brentq(q, 1e-14, a_hi, xtol=1e-15, rtol=8.9e-16)

    def h(S):
        a = alpha_of_s(S)
        _, r2, _ = _residuals(a, S, problem)
        return r2

    grid = np.concatenate([[0.0], np.logspace(-10, math.log10(S_ESCAPE), 200)])
    prev_s, prev_h = grid[0], h(grid[0])
    if prev_h <= 0.0:
        return alpha_of_s(0.0), 0.0
    for s in grid[1:]:
        cur_h = h(s)
        if prev_h > 0.0 and cur_h <= 0.0:
            s_root = brentq(h, prev_s, s, xtol=1e-15)
            return alpha_of_s(s_root), s_root
        prev_s, prev_h = s, cur_h
    return None


def solve_inductive(problem: CvsProblem) -> CvsSolution:
    """Stationary state when the waveguide couples to the same quadrature.

    Damped Newton on the two residuals, started from the weak-coupling guess
    (g/(w_r+Delta), 0); a bracketing scan backs it up near the localization
    runaway, and competing stationary points are settled by comparing
    energies (ties go to the finite-S root).
    """
    if problem.env.rw_coupling != INDUCTIVE:
        raise DomainError("solve_inductive expects an inductive environment")
    m = problem.model
    if m.g == 0.0:
        return CvsSolution(alpha_bar=0.0, S_bar=0.0, coherence_C=1.0,
                           energy=cvs_energy(0.0, 0.0, problem),
                           iterations=0, residual=0.0)
    bath_off = problem.env.xi0 == 0.0 and all(mo.xi == 0.0 for mo in problem.env.modes)
    if bath_off:
        alpha, iters, res = _closed_root(m)
        return CvsSolution(alpha_bar=alpha, S_bar=0.0, coherence_C=1.0,
                           energy=cvs_energy(alpha, 0.0, problem),
                           iterations=iters, residual=res)

    a, s = m.g / (m.omega_r + m.delta), 0.0
    iters = 0
    converged = False
    for iters in range(1, NEWTON_MAX_ITER + 1):
        r1, r2, x = _residuals(a, s, problem)
        rnorm = max(abs(r1), abs(r2))
        if rnorm < NEWTON_TOL:
            converged = True
            break
        if s > S_ESCAPE:
            break
        jac = _jacobian(a, s, x, problem)
        try:
            step = np.linalg.solve(jac, -np.array([r1, r2]))
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        improved = False
        while lam >= 1e-6:
            a_n = a + lam * step[0]
            s_n = max(s + lam * step[1], 0.0)
            if a_n > 0.0:
                r1n, r2n, _ = _residuals(a_n, s_n, problem)
                if max(abs(r1n), abs(r2n)) < rnorm:
                    a, s = a_n, s_n
                    improved = True
                    break
            lam *= 0.5
        if not improved:
            break

    if not converged:
        found = _scan_for_root(problem)
        if found is None:
            return _localized_solution(problem, iters)
        a, s = found
        for extra in range(40):
            r1, r2, x = _residuals(a, s, problem)
            if max(abs(r1), abs(r2)) < NEWTON_TOL:
                converged = True
                break
            jac = _jacobian(a, s, x, problem)
            try:
                step = np.linalg.solve(jac, -np.array([r1, r2]))
            except np.linalg.LinAlgError:
                break
            a, s = a + step[0], max(s + step[1], 0.0)
            iters += 1
        if not converged:
            r1, r2, _ = _residuals(a, s, problem)
            raise SolverError("stationary equations did not converge",
                              last_iterate=(a, s), residual=max(abs(r1), abs(r2)))

    r1, r2, _ = _residuals(a, s, problem)
    root = CvsSolution(alpha_bar=a, S_bar=s, coherence_C=math.exp(-2.0 * s),
                       energy=cvs_energy(a, s, problem),
                       iterations=iters, residual=max(abs(r1), abs(r2)))
    # variational tie-break against the decohered boundary branch
    try:
        boundary = _localized_solution(problem, iters)
    except SolverError:
        return root
    if boundary.energy < root.energy - 1e-12:
        return boundary
    return root


def solve(problem: CvsProblem) -> CvsSolution:
    """Dispatch on the relative coupling type.

    Only the quadrature of the waveguide coupling relative to the qubit one
    matters: same type behaves like the inductive-inductive case, orthogonal
    type like the inductive-capacitive case.
    """
    if _same_type(problem):
        if problem.env.rw_coupling == INDUCTIVE:
            return solve_inductive(problem)
        flipped = CvsProblem(
            model=ModelParams(problem.model.omega_r, problem.model.delta,
                              problem.model.g, INDUCTIVE, problem.model.resonator_dim),
            env=EnvSpectrum(problem.env.xi0, problem.env.omega_cutoff,
                            INDUCTIVE, problem.env.modes),
            f_mode=problem.f_mode)
        return solve_inductive(flipped)
    if problem.env.rw_coupling == CAPACITIVE:
        return solve_capacitive(problem)
    flipped = CvsProblem(
        model=ModelParams(problem.model.omega_r, problem.model.delta,
                          problem.model.g, INDUCTIVE, problem.model.resonator_dim),
        env=EnvSpectrum(problem.env.xi0, problem.env.omega_cutoff,
                        CAPACITIVE, problem.env.modes),
        f_mode=problem.f_mode)
    return solve_capacitive(flipped)


# ---------------------------------------------------------------------------
# reduced state

def build_zts(alpha_bar: complex, coherence_C: float, resonator_dim: int) -> hilbert.DensityMatrix:
    """Rank-<=2 reduced qubit-resonator state of the variational ground state.

    (1+C)/2 on the displaced-cat ground doublet's lower state, (1-C)/2 on the
    upper one; purity is (1 + C^2)/2 exactly.
    """
    if not 0.0 <= coherence_C <= 1.0:
        raise DomainError(f"coherence must lie in [0, 1], got {coherence_C}")
    lo = approx_eigenstate(0, -1, alpha_bar, resonator_dim)
    hi = approx_eigenstate(0, +1, alpha_bar, resonator_dim)
    w_lo = 0.5 * (1.0 + coherence_C)
    w_hi = 0.5 * (1.0 - coherence_C)
    mat = (w_lo * np.outer(lo.amplitudes, lo.amplitudes.conj())
           + w_hi * np.outer(hi.amplitudes, hi.amplitudes.conj()))
    return hilbert.DensityMatrix(lo.space, mat)
