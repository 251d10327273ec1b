"""Run configuration: flat key=value files with section headers.

Public units are experiment-friendly (GHz for frequency/2pi, MHz for loss
rate/2pi, ohm, nH, fF); all internal math runs in angular-frequency units with
the resonator frequency scaled to 1.  Unknown keys are rejected with line
numbers so typos cannot silently change a run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

from .errors import ConfigError
from .rabi import CAPACITIVE, COUPLING_KINDS, INDUCTIVE

BACKENDS = ("cvs", "diag", "both")
F_MODES = ("continuum_quadrature", "continuum_closed_form", "discrete_sum")
SWEEP_VARIABLES = ("kappa", "g")
SWEEP_SCALES = ("log", "linear")
OUTPUT_KEYS = ("n_virtual", "purity", "coherence_C", "energy", "mp",
               "fractions", "wall_time_ms")
DEFAULT_OUTPUTS = ("n_virtual", "purity", "coherence_C", "energy", "mp", "fractions")

_SCHEMA = {
    "model": {"omega_r_ghz", "delta_ghz", "g_ghz", "qr_coupling"},
    "environment": {"rw_coupling", "kappa_mhz", "omega_cutoff_ghz",
                    "Z_R_ohm", "Z_T_ohm", "C_R_pF", "L_c_nH", "C_c_fF"},
    "truncation": {"resonator_dim", "mode_dims", "mode_freqs_ghz",
                   "mode_spacing_ghz", "cvs_resonator_dim"},
    "sweep": {"variable", "start", "stop", "points", "scale"},
    "run": {"backend", "f_mode", "outputs"},
    "wigner": {"axis_theta_rad", "axis_phi_rad", "outcome",
               "halfwidth", "grid_points"},
    "circuit": {"element_start", "element_stop", "points"},
}


@dataclass(frozen=True)
class RunConfig:
    # model
    omega_r_ghz: float
    delta_ghz: float
    g_ghz: float | None
    qr_coupling: str
    # environment (exactly one parameterization)
    rw_coupling: str
    kappa_mhz: float | None = None
    omega_cutoff_ghz: float | None = None
    Z_R_ohm: float | None = None
    Z_T_ohm: float | None = None
    C_R_pF: float | None = None
    L_c_nH: float | None = None
    C_c_fF: float | None = None
    # truncation
    resonator_dim: int = 14
    mode_dims: tuple[int, ...] = (3, 3, 3, 3)
    mode_freqs_ghz: tuple[float, ...] = (5.0, 10.0, 15.0, 20.0)
    mode_spacing_ghz: float | None = None
    cvs_resonator_dim: int = 30
    # sweep
    sweep_variable: str | None = None
    sweep_start: float | None = None
    sweep_stop: float | None = None
    sweep_points: int | None = None
    sweep_scale: str = "log"
    # run
    backend: str = "cvs"
    f_mode: str = "continuum_quadrature"
    outputs: tuple[str, ...] = DEFAULT_OUTPUTS
    # wigner rendering
    wigner_axis_theta_rad: float = math.pi / 2.0
    wigner_axis_phi_rad: float = 0.0
    wigner_outcome: int = -1
    wigner_halfwidth: float | None = None
    wigner_grid_points: int = 201
    # circuit table
    circuit_element_start: float | None = None
    circuit_element_stop: float | None = None
    circuit_points: int = 81

    @property
    def env_mode(self) -> str:
        return "kappa" if self.omega_cutoff_ghz is not None else "circuit"


def _parse_scalar(raw: str, line: int, kind=float):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"cannot parse {raw!r} as {kind.__name__}", line) from None


def _parse_tuple(raw: str, line: int, kind=float) -> tuple:
    try:
        return tuple(kind(tok.strip()) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"cannot parse list {raw!r}", line) from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    entries: dict[tuple[str, str], tuple[str, int]] = {}
    section = None
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        stripped = rawline.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected key = value, got {stripped!r}", lineno)
        if section is None:
            raise ConfigError("key outside any [section]", lineno)
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _SCHEMA[section]:
            raise ConfigError(f"unknown key {key!r} in section [{section}]", lineno)
        if (section, key) in entries:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        entries[(section, key)] = (value, lineno)

    def take(section, key, default=None, kind=float, required=False):
        if (section, key) in entries:
            value, lineno = entries.pop((section, key))
            if kind is str:
                return value, lineno
            if kind in (int, float):
                return _parse_scalar(value, lineno, kind), lineno
            return kind(value, lineno), lineno
        if required:
            raise ConfigError(f"missing required key {key!r} in section [{section}]")
        return default, None

    omega_r, _ = take("model", "omega_r_ghz", required=True)
    delta, dline = take("model", "delta_ghz", required=True)
    g, _ = take("model", "g_ghz")
    qr, qline = take("model", "qr_coupling", default=INDUCTIVE, kind=str)

    rw, rwline = take("environment", "rw_coupling", kind=str, required=True)
    kappa, kline = take("environment", "kappa_mhz")
    cutoff, _ = take("environment", "omega_cutoff_ghz")
    z_r, _ = take("environment", "Z_R_ohm")
    z_t, _ = take("environment", "Z_T_ohm")
    c_r, _ = take("environment", "C_R_pF")
    l_c, lcline = take("environment", "L_c_nH")
    c_c, ccline = take("environment", "C_c_fF")

    resonator_dim, _ = take("truncation", "resonator_dim", default=(14), kind=int)
    mode_dims, _ = take("truncation", "mode_dims",
                        default=((3, 3, 3, 3)),
                        kind=lambda v, ln: _parse_tuple(v, ln, int))
    mode_freqs, _ = take("truncation", "mode_freqs_ghz",
                         default=((5.0, 10.0, 15.0, 20.0)),
                         kind=lambda v, ln: _parse_tuple(v, ln, float))
    mode_spacing, _ = take("truncation", "mode_spacing_ghz")
    cvs_dim, _ = take("truncation", "cvs_resonator_dim", default=(30), kind=int)

    sweep_var, svline = take("sweep", "variable", kind=str)
    sweep_start, _ = take("sweep", "start")
    sweep_stop, _ = take("sweep", "stop")
    sweep_points, _ = take("sweep", "points", kind=int)
    sweep_scale, ssline = take("sweep", "scale", default=("log"), kind=str)

    backend, bline = take("run", "backend", default=("cvs"), kind=str)
    f_mode, fline = take("run", "f_mode", default=("continuum_quadrature"), kind=str)
    outputs, oline = take("run", "outputs", default=(DEFAULT_OUTPUTS),
                          kind=lambda v, ln: _parse_tuple(v, ln, str))

    w_theta, _ = take("wigner", "axis_theta_rad", default=(math.pi / 2.0))
    w_phi, _ = take("wigner", "axis_phi_rad", default=(0.0))
    w_outcome, _ = take("wigner", "outcome", default=(-1), kind=int)
    w_half, _ = take("wigner", "halfwidth")
    w_points, _ = take("wigner", "grid_points", default=(201), kind=int)

    ce_start, _ = take("circuit", "element_start")
    ce_stop, _ = take("circuit", "element_stop")
    ce_points, _ = take("circuit", "points", default=(81), kind=int)

    if entries:
        (sec, key), (_, lineno) = next(iter(entries.items()))
        raise ConfigError(f"unhandled key {key!r} in section [{sec}]", lineno)

    # semantic validation -------------------------------------------------
    if omega_r <= 0:
        raise ConfigError(f"omega_r_ghz must be positive, got {omega_r}")
    if delta <= 0:
        raise ConfigError(f"delta_ghz must be positive, got {delta}", dline)
    if g is not None and g < 0:
        raise ConfigError(f"g_ghz must be nonnegative, got {g}")
    if qr not in COUPLING_KINDS:
        raise ConfigError(f"qr_coupling must be one of {COUPLING_KINDS}", qline)
    if rw not in COUPLING_KINDS:
        raise ConfigError(f"rw_coupling must be one of {COUPLING_KINDS}", rwline)

    circuit_keys = [v for v in (z_r, z_t, l_c, c_c, c_r) if v is not None]
    if kappa is not None and (l_c is not None or c_c is not None):
        raise ConfigError("conflicting environment parameterizations: "
                          "kappa_mhz and a circuit element are both present", kline)
    if cutoff is not None and circuit_keys:
        raise ConfigError("conflicting environment parameterizations: "
                          "omega_cutoff_ghz and circuit keys are both present")
    if cutoff is None:
        if z_r is None or z_t is None:
            raise ConfigError("environment needs either kappa_mhz + omega_cutoff_ghz "
                              "or circuit keys Z_R_ohm, Z_T_ohm with L_c_nH / C_c_fF")
        if rw == INDUCTIVE and c_c is not None:
            raise ConfigError("inductive rw_coupling takes L_c_nH, not C_c_fF", ccline)
        if rw == CAPACITIVE and l_c is not None:
            raise ConfigError("capacitive rw_coupling takes C_c_fF, not L_c_nH", lcline)
    else:
        if kappa is None and sweep_var != "kappa":
            raise ConfigError("kappa_mhz is required unless sweeping kappa")
        if kappa is not None and kappa < 0:
            raise ConfigError(f"kappa_mhz must be nonnegative, got {kappa}", kline)
        if cutoff <= 0:
            raise ConfigError(f"omega_cutoff_ghz must be positive, got {cutoff}")

    if sweep_var is not None:
        if sweep_var not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep variable must be one of {SWEEP_VARIABLES}", svline)
        if sweep_start is None or sweep_stop is None or sweep_points is None:
            raise ConfigError("sweep needs start, stop, and points")
        if sweep_start <= 0 or sweep_stop <= 0 or sweep_stop < sweep_start:
            raise ConfigError("sweep range must be positive and increasing")
        if sweep_points < 2:
            raise ConfigError("sweep needs at least 2 points")
        if sweep_scale not in SWEEP_SCALES:
            raise ConfigError(f"sweep scale must be one of {SWEEP_SCALES}", ssline)
    if g is None and sweep_var != "g":
        raise ConfigError("g_ghz is required unless sweeping g")

    if backend not in BACKENDS:
        raise ConfigError(f"backend must be one of {BACKENDS}", bline)
    if f_mode not in F_MODES:
        raise ConfigError(f"f_mode must be one of {F_MODES}", fline)
    for key in outputs:
        if key not in OUTPUT_KEYS:
            raise ConfigError(f"unknown output {key!r}; choose from {OUTPUT_KEYS}", oline)
    if resonator_dim < 2 or cvs_dim < 2 or any(d < 2 for d in mode_dims):
        raise ConfigError("all truncation dimensions must be >= 2")
    if len(mode_dims) != len(mode_freqs):
        raise ConfigError(f"{len(mode_dims)} mode_dims for {len(mode_freqs)} mode_freqs_ghz")
    if any(f <= 0 for f in mode_freqs) or any(b <= a for a, b in zip(mode_freqs, mode_freqs[1:])):
        raise ConfigError("mode_freqs_ghz must be positive and strictly increasing")
    if w_outcome not in (+1, -1):
        raise ConfigError(f"wigner outcome must be +1 or -1, got {w_outcome}")

    return RunConfig(
        omega_r_ghz=omega_r, delta_ghz=delta, g_ghz=g, qr_coupling=qr,
        rw_coupling=rw, kappa_mhz=kappa, omega_cutoff_ghz=cutoff,
        Z_R_ohm=z_r, Z_T_ohm=z_t, C_R_pF=c_r, L_c_nH=l_c, C_c_fF=c_c,
        resonator_dim=resonator_dim, mode_dims=mode_dims,
        mode_freqs_ghz=mode_freqs, mode_spacing_ghz=mode_spacing,
        cvs_resonator_dim=cvs_dim,
        sweep_variable=sweep_var, sweep_start=sweep_start, sweep_stop=sweep_stop,
        sweep_points=sweep_points, sweep_scale=sweep_scale,
        backend=backend, f_mode=f_mode, outputs=tuple(outputs),
        wigner_axis_theta_rad=w_theta, wigner_axis_phi_rad=w_phi,
        wigner_outcome=w_outcome, wigner_halfwidth=w_half,
        wigner_grid_points=w_points,
        circuit_element_start=ce_start, circuit_element_stop=ce_stop,
        circuit_points=ce_points,
    )


_SECTION_FIELDS = {
    "model": (("omega_r_ghz", "omega_r_ghz"), ("delta_ghz", "delta_ghz"),
              ("g_ghz", "g_ghz"), ("qr_coupling", "qr_coupling")),
    "environment": (("rw_coupling", "rw_coupling"), ("kappa_mhz", "kappa_mhz"),
                    ("omega_cutoff_ghz", "omega_cutoff_ghz"), ("Z_R_ohm", "Z_R_ohm"),
                    ("Z_T_ohm", "Z_T_ohm"), ("C_R_pF", "C_R_pF"),
                    ("L_c_nH", "L_c_nH"), ("C_c_fF", "C_c_fF")),
    "truncation": (("resonator_dim", "resonator_dim"), ("mode_dims", "mode_dims"),
                   ("mode_freqs_ghz", "mode_freqs_ghz"),
                   ("mode_spacing_ghz", "mode_spacing_ghz"),
                   ("cvs_resonator_dim", "cvs_resonator_dim")),
    "sweep": (("variable", "sweep_variable"), ("start", "sweep_start"),
              ("stop", "sweep_stop"), ("points", "sweep_points"),
              ("scale", "sweep_scale")),
    "run": (("backend", "backend"), ("f_mode", "f_mode"), ("outputs", "outputs")),
    "wigner": (("axis_theta_rad", "wigner_axis_theta_rad"),
               ("axis_phi_rad", "wigner_axis_phi_rad"),
               ("outcome", "wigner_outcome"), ("halfwidth", "wigner_halfwidth"),
               ("grid_points", "wigner_grid_points")),
    "circuit": (("element_start", "circuit_element_start"),
                ("element_stop", "circuit_element_stop"),
                ("points", "circuit_points")),
}


def _format_value(v) -> str:
    if isinstance(v, tuple):
        return ",".join(_format_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_config(cfg: RunConfig) -> str:
    """Round-trip inverse of parse_config (parse(serialize(c)) == c)."""
    lines = []
    for section, pairs in _SECTION_FIELDS.items():
        body = []
        for key, attr in pairs:
            v = getattr(cfg, attr)
            if v is None:
                continue
            body.append(f"{key} = {_format_value(v)}")
        if body:
            lines.append(f"[{section}]")
            lines.extend(body)
            lines.append("")
    return "\n".join(lines)


def config_echo(cfg: RunConfig) -> list[str]:
    """Sorted key=value lines of every set field, for CSV comment headers."""
    out = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        out.append(f"{f.name} = {_format_value(v)}")
    return sorted(out)
