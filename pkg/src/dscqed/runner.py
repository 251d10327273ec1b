"""Execute configured points and sweeps; persist results as deterministic CSV.

Each sweep point is independent and pure, so points can run on a bounded
worker pool; rows are always emitted in input order (sweep index, then
backend) and floats are written with a fixed 17-significant-digit format so
identical configs reproduce byte-identical files.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import cvs as cvs_mod
from . import diag as diag_mod
from . import environment as env_mod
from . import metrology
from .config import RunConfig, config_echo
from .errors import ConfigError, DscqedError
from .rabi import CAPACITIVE, INDUCTIVE, ModelParams

CSV_COLUMNS = ("g_ghz", "kappa_mhz", "backend", "n_virtual", "purity",
               "coherence_C", "energy", "mp", "theta_opt", "phi_opt",
               "fraction_0plus", "fraction_1minus", "fraction_1plus",
               "solver_iterations", "wall_time_ms", "error")


@dataclass
class ResultRow:
    g_ghz: float
    kappa_mhz: float
    backend: str
    n_virtual: float | None = None
    purity: float | None = None
    coherence_C: float | None = None
    energy: float | None = None
    mp: float | None = None
    theta_opt: float | None = None
    phi_opt: float | None = None
    fraction_0plus: float | None = None
    fraction_1minus: float | None = None
    fraction_1plus: float | None = None
    solver_iterations: int | None = None
    wall_time_ms: float | None = None
    error: str = ""


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return f"{v:.16e}"


@dataclass(frozen=True)
class ResolvedEnv:
    """Continuum spectrum parameters in internal units, plus the public labels."""

    xi0: float
    omega_cutoff: float       # units of omega_r
    kappa_mhz: float
    rw_coupling: str


def resolve_environment(cfg: RunConfig, kappa_mhz: float | None = None) -> ResolvedEnv:
    """Derive (xi0, omega_cutoff) from either parameterization.

    In circuit mode a kappa override inverts the coupling element through the
    golden-rule relation; in plain mode it rescales xi0 at fixed cutoff.
    """
    omega_r_int = 1.0
    if cfg.env_mode == "kappa":
        k_mhz = cfg.kappa_mhz if kappa_mhz is None else kappa_mhz
        kappa_int = k_mhz * 1e-3 / cfg.omega_r_ghz
        wc_int = cfg.omega_cutoff_ghz / cfg.omega_r_ghz
        xi0 = env_mod.xi0_from_kappa(kappa_int, wc_int, omega_r_int)
        return ResolvedEnv(xi0, wc_int, k_mhz, cfg.rw_coupling)

    z_r, z_t = cfg.Z_R_ohm, cfg.Z_T_ohm
    omega_r_si = 2.0 * math.pi * cfg.omega_r_ghz * 1e9
    c_r = (cfg.C_R_pF * 1e-12 if cfg.C_R_pF is not None
           else env_mod.resonator_capacitance(z_r, omega_r_si))
    if kappa_mhz is None:
        if cfg.rw_coupling == INDUCTIVE:
            if cfg.L_c_nH is None:
                raise ConfigError("circuit mode needs L_c_nH (or a kappa sweep)")
            element = {"L_c": cfg.L_c_nH * 1e-9}
        else:
            if cfg.C_c_fF is None:
                raise ConfigError("circuit mode needs C_c_fF (or a kappa sweep)")
            element = {"C_c": cfg.C_c_fF * 1e-15}
        circ = env_mod.CircuitParams(Z_R=z_r, Z_T=z_t, C_R=c_r,
                                     rw_coupling=cfg.rw_coupling, **element)
        spec = env_mod.circuit_to_spectrum(circ)
        wc_int = spec.omega_cutoff / omega_r_si
        kappa_int = env_mod.kappa(spec.xi0, wc_int, omega_r_int)
        return ResolvedEnv(spec.xi0, wc_int, kappa_int * cfg.omega_r_ghz * 1e3,
                           cfg.rw_coupling)

    kappa_int = kappa_mhz * 1e-3 / cfg.omega_r_ghz
    if cfg.rw_coupling == INDUCTIVE:
        l_c = env_mod.inductance_for_kappa(kappa_int * omega_r_si, z_r, z_t, omega_r_si)
        circ = env_mod.CircuitParams(Z_R=z_r, Z_T=z_t, C_R=c_r, L_c=l_c,
                                     rw_coupling=INDUCTIVE)
    else:
        c_c = env_mod.capacitance_for_kappa(kappa_int * omega_r_si, z_r, z_t,
                                            omega_r_si, C_R=c_r)
        circ = env_mod.CircuitParams(Z_R=z_r, Z_T=z_t, C_R=c_r, C_c=c_c,
                                     rw_coupling=CAPACITIVE)
    spec = env_mod.circuit_to_spectrum(circ)
    return ResolvedEnv(spec.xi0, spec.omega_cutoff / omega_r_si, kappa_mhz,
                       cfg.rw_coupling)


def _internal_mode_grid(cfg: RunConfig) -> tuple[np.ndarray, float | None]:
    freqs = np.asarray(cfg.mode_freqs_ghz, dtype=float) / cfg.omega_r_ghz
    spacing = (cfg.mode_spacing_ghz / cfg.omega_r_ghz
               if cfg.mode_spacing_ghz is not None else None)
    return freqs, spacing


def _env_spectrum(cfg: RunConfig, res: ResolvedEnv, with_modes: bool,
                  mode_dims: tuple[int, ...] | None = None) -> env_mod.EnvSpectrum:
    if not with_modes:
        return env_mod.EnvSpectrum(xi0=res.xi0, omega_cutoff=res.omega_cutoff,
                                   rw_coupling=res.rw_coupling)
    freqs, spacing = _internal_mode_grid(cfg)
    spec = env_mod.discretize_modes(res.xi0, res.omega_cutoff, res.rw_coupling,
                                    freqs, spacing)
    if mode_dims is not None:
        spec = env_mod.EnvSpectrum(
            xi0=spec.xi0, omega_cutoff=spec.omega_cutoff, rw_coupling=spec.rw_coupling,
            modes=tuple(env_mod.Mode(m.omega, m.xi, d)
                        for m, d in zip(spec.modes, mode_dims)))
    return spec


def _model(cfg: RunConfig, g_ghz: float, resonator_dim: int) -> ModelParams:
    return ModelParams(omega_r=1.0, delta=cfg.delta_ghz / cfg.omega_r_ghz,
                       g=g_ghz / cfg.omega_r_ghz, qr_coupling=cfg.qr_coupling,
                       resonator_dim=resonator_dim)


def _cvs_row(cfg: RunConfig, g_ghz: float, res: ResolvedEnv) -> ResultRow:
    t0 = time.perf_counter()
    model = _model(cfg, g_ghz, cfg.cvs_resonator_dim)
    spec = _env_spectrum(cfg, res, with_modes=cfg.f_mode == "discrete_sum")
    problem = cvs_mod.CvsProblem(model=model, env=spec, f_mode=cfg.f_mode)
    sol = cvs_mod.solve(problem)
    row = ResultRow(g_ghz=g_ghz, kappa_mhz=res.kappa_mhz, backend="cvs",
                    solver_iterations=sol.iterations)
    want = set(cfg.outputs)
    if "n_virtual" in want:
        row.n_virtual = sol.alpha_bar ** 2
    if "purity" in want:
        row.purity = 0.5 * (1.0 + sol.coherence_C ** 2)
    if "coherence_C" in want:
        row.coherence_C = sol.coherence_C
    if "energy" in want:
        row.energy = sol.energy
    zts = None
    if "fractions" in want or "mp" in want:
        zts = cvs_mod.build_zts(sol.alpha_bar, sol.coherence_C, cfg.cvs_resonator_dim)
    if "fractions" in want:
        fr = diag_mod.exact_fractions(zts, model)
        row.fraction_0plus = fr[(0, +1)]
        row.fraction_1minus = fr[(1, -1)]
        row.fraction_1plus = fr[(1, +1)]
    if "mp" in want:
        report = metrology.optimize_axis(zts)
        row.mp = report.mp
        row.theta_opt = report.axis.theta
        row.phi_opt = report.axis.phi
    if "wall_time_ms" in want:
        row.wall_time_ms = (time.perf_counter() - t0) * 1e3
    return row


def _diag_row(cfg: RunConfig, g_ghz: float, res: ResolvedEnv) -> ResultRow:
    t0 = time.perf_counter()
    model = _model(cfg, g_ghz, cfg.resonator_dim)
    spec = _env_spectrum(cfg, res, with_modes=True, mode_dims=cfg.mode_dims)
    trunc = diag_mod.TruncationSpec(cfg.resonator_dim, cfg.mode_dims)
    report = diag_mod.ground_report(model, spec, trunc)
    row = ResultRow(g_ghz=g_ghz, kappa_mhz=res.kappa_mhz, backend="diag")
    want = set(cfg.outputs)
    rho = report.rho_qr
    if "n_virtual" in want:
        n_res = np.diag(np.arange(cfg.resonator_dim, dtype=float))
        qr = rho.matrix.reshape(2, cfg.resonator_dim, 2, cfg.resonator_dim)
        rho_res = np.einsum("aiaj->ij", qr)
        row.n_virtual = float(np.real(np.trace(rho_res @ n_res)))
    if "purity" in want:
        row.purity = rho.purity()
    if "energy" in want:
        row.energy = report.energy
    if "fractions" in want:
        row.fraction_0plus = report.fractions[(0, +1)]
        row.fraction_1minus = report.fractions[(1, -1)]
        row.fraction_1plus = report.fractions[(1, +1)]
    if "mp" in want:
        mrep = metrology.optimize_axis(rho)
        row.mp = mrep.mp
        row.theta_opt = mrep.axis.theta
        row.phi_opt = mrep.axis.phi
    if "wall_time_ms" in want:
        row.wall_time_ms = (time.perf_counter() - t0) * 1e3
    return row


def run_point(cfg: RunConfig, g_ghz: float | None = None,
              kappa_mhz: float | None = None) -> list[ResultRow]:
    """Execute one parameter point for the selected backend(s).

    Failures are isolated into the row's error column so a sweep survives
    non-convergent corners.
    """
    g = cfg.g_ghz if g_ghz is None else g_ghz
    if g is None:
        raise ConfigError("no g value available for this point")
    backends = ("cvs", "diag") if cfg.backend == "both" else (cfg.backend,)
    rows = []
    try:
        res = resolve_environment(cfg, kappa_mhz)
    except DscqedError as exc:
        for b in backends:
            rows.append(ResultRow(g_ghz=g, kappa_mhz=kappa_mhz if kappa_mhz is not None
                                  else (cfg.kappa_mhz or math.nan),
                                  backend=b, error=f"environment: {exc}"))
        return rows
    for b in backends:
        try:
            rows.append(_cvs_row(cfg, g, res) if b == "cvs" else _diag_row(cfg, g, res))
        except Exception as exc:   # per-row isolation, never abort a sweep
            rows.append(ResultRow(g_ghz=g, kappa_mhz=res.kappa_mhz, backend=b,
                                  error=f"{type(exc).__name__}: {exc}"))
    return rows


def sweep_values(cfg: RunConfig) -> np.ndarray:
    if cfg.sweep_variable is None:
        raise ConfigError("configuration has no [sweep] section")
    if cfg.sweep_scale == "log":
        return np.geomspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_points)
    return np.linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_points)


def run_sweep(cfg: RunConfig, jobs: int = 1) -> tuple[str, int]:
    """Run the configured sweep; returns (csv_text, number_of_error_rows)."""
    values = sweep_values(cfg)
    if cfg.sweep_variable == "kappa":
        tasks = [dict(kappa_mhz=float(v)) for v in values]
    else:
        tasks = [dict(g_ghz=float(v)) for v in values]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda kw: run_point(cfg, **kw), tasks))
    else:
        results = [run_point(cfg, **kw) for kw in tasks]
    rows = [row for point in results for row in point]
    n_err = sum(1 for r in rows if r.error)
    return format_csv(rows, cfg), n_err


def format_csv(rows, cfg: RunConfig, extra_comments: Sequence[str] = ()) -> str:
    lines = [f"# {line}" for line in config_echo(cfg)]
    lines += [f"# {line}" for line in extra_comments]
    lines.append(",".join(CSV_COLUMNS))
    for r in rows:
        lines.append(",".join(_fmt(getattr(r, c)) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def wigner_csv(cfg: RunConfig) -> str:
    """Wigner field of the configured post-measurement state as x,p,W rows."""
    res = resolve_environment(cfg)
    if cfg.backend == "diag":
        model = _model(cfg, cfg.g_ghz, cfg.resonator_dim)
        spec = _env_spectrum(cfg, res, with_modes=True, mode_dims=cfg.mode_dims)
        trunc = diag_mod.TruncationSpec(cfg.resonator_dim, cfg.mode_dims)
        state = diag_mod.ground_report(model, spec, trunc).rho_qr
        alpha_scale = model.alpha0
    else:
        model = _model(cfg, cfg.g_ghz, cfg.cvs_resonator_dim)
        spec = _env_spectrum(cfg, res, with_modes=cfg.f_mode == "discrete_sum")
        sol = cvs_mod.solve(cvs_mod.CvsProblem(model=model, env=spec, f_mode=cfg.f_mode))
        state = cvs_mod.build_zts(sol.alpha_bar, sol.coherence_C, cfg.cvs_resonator_dim)
        alpha_scale = abs(sol.alpha_bar)
    axis = metrology.MeasurementAxis.folded(cfg.wigner_axis_theta_rad,
                                            cfg.wigner_axis_phi_rad)
    outcomes = metrology.qubit_measure(state, axis)
    prob, post = outcomes[0] if cfg.wigner_outcome == +1 else outcomes[1]
    half = cfg.wigner_halfwidth if cfg.wigner_halfwidth is not None \
        else alpha_scale + 3.0
    grid = np.linspace(-half, half, cfg.wigner_grid_points)
    w = metrology.wigner_grid(post, grid, grid)
    lines = [f"# {line}" for line in config_echo(cfg)]
    lines.append(f"# outcome_probability = {_fmt(prob)}")
    lines.append("x,p,W")
    for i, p in enumerate(grid):
        for j, x in enumerate(grid):
            lines.append(f"{_fmt(float(x))},{_fmt(float(p))},{_fmt(float(w[i, j]))}")
    return "\n".join(lines) + "\n"


def circuit_csv(cfg: RunConfig) -> str:
    """Element-value table of (xi0, omega_cutoff, kappa), for design curves."""
    if cfg.env_mode != "circuit":
        raise ConfigError("circuit table needs the circuit environment keys")
    omega_r_si = 2.0 * math.pi * cfg.omega_r_ghz * 1e9
    c_r = (cfg.C_R_pF * 1e-12 if cfg.C_R_pF is not None
           else env_mod.resonator_capacitance(cfg.Z_R_ohm, omega_r_si))
    inductive = cfg.rw_coupling == INDUCTIVE
    if cfg.circuit_element_start is None or cfg.circuit_element_stop is None:
        start, stop = (0.1, 1000.0)   # nH or fF, four decades
    else:
        start, stop = cfg.circuit_element_start, cfg.circuit_element_stop
    values = np.geomspace(start, stop, cfg.circuit_points)
    unit = 1e-9 if inductive else 1e-15
    header = "L_c_nH" if inductive else "C_c_fF"
    lines = [f"# {line}" for line in config_echo(cfg)]
    lines.append(f"{header},xi0,omega_cutoff_ghz,kappa_mhz")
    for v in values:
        kwargs = {"L_c": v * unit} if inductive else {"C_c": v * unit}
        circ = env_mod.CircuitParams(Z_R=cfg.Z_R_ohm, Z_T=cfg.Z_T_ohm, C_R=c_r,
                                     rw_coupling=cfg.rw_coupling, **kwargs)
        spec = env_mod.circuit_to_spectrum(circ)
        kappa_si = env_mod.kappa(spec.xi0, spec.omega_cutoff, omega_r_si)
        lines.append(",".join(_fmt(x) for x in (
            float(v), spec.xi0, spec.omega_cutoff / (2.0 * math.pi * 1e9),
            kappa_si / (2.0 * math.pi * 1e6))))
    return "\n".join(lines) + "\n"
