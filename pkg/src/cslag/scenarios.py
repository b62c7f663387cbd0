"""Benchmark scenarios: 1D step advection, 2D guiding-center rotation and
the 4D drift-kinetic instability run.

Each run writes diagnostics.csv (one row per diagnostic interval, columns
fixed by cslag.diagnostics.CSV_COLUMNS), snapshots in the flat-binary
format of cslag.mesh, and metadata.txt echoing the fully resolved
configuration.  Runs are deterministic: initial conditions are closed-form
and reductions use fixed traversal orders, so identical configs reproduce
identical outputs bit for bit.

Configuration files are flat ``key = value`` text with INI-style sections;
see parse_config for the recognized keys and defaults.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields as dc_fields
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .fields import AdvectionField4D, build_advection_field, d_natural, d_periodic, face_average
from .flux import CflViolation, Scheme, sweep_batch
from .limiters import LimiterConfig, LimiterKind
from .mesh import Boundary, Field4D, Grid4D, build_grid1d, write_snapshot
from .quasineutrality import QNSolver, ion_density, make_equilibrium, tanh_profile
from .timestepping import StepControl, compute_dt, flux_sum_stage, predictor_corrector_step

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "parse_config",
    "RunResult",
    "run_scenario",
    "run_step1d",
    "run_guiding_center_2d",
    "run_drift_kinetic_4d",
]

SCENARIO_KINDS = ("step1d", "guiding_center_2d", "drift_kinetic_4d")


class ConfigError(ValueError):
    """Invalid or inconsistent scenario configuration."""


@dataclass
class ScenarioConfig:
    """Fully resolved run configuration (one flat record; see parse_config)."""

    kind: str = "step1d"
    scheme: Scheme = Scheme.PSM
    limiter: LimiterConfig = field(default_factory=LimiterConfig.none)
    cfl: float = 0.8
    dt_max: float = 0.0            # 0 disables the cap
    n_steps: int = 400
    diag_every: int = 1
    snapshot_every: int = 0        # 0: first/last only
    output_dir: str = "out"
    seed: int = 0
    threads: int = 1
    tv_dx_prefactor: bool = True
    # step1d
    n_cells: int = 80
    x_min: float = 0.0
    x_max: float = 1.0
    displacement: float = 0.2      # cells per iteration
    step_fraction: float = 0.25
    step_center: float = 0.5
    # shared cylindrical geometry (2D and 4D)
    nr: int = 32
    ntheta: int = 64
    r_min: float = 0.1
    r_max: float = 14.5
    b_z: float = 1.0
    # guiding_center_2d
    rotation_rate: float = 0.05    # angular velocity of the rigid E x B rotation
    blob_r: float = 7.3
    blob_theta: float = 0.0
    blob_width: float = 1.5
    # drift_kinetic_4d
    nz: int = 8
    nv: int = 8
    l_z: float = 1506.76
    v_max: float = 7.32
    q_i: float = 1.0
    m_i: float = 1.0
    e: float = 1.0
    kappa: float = 1.0
    kappa_n0: float = 0.055
    delta_r_n0: float = 2.9
    kappa_t: float = 0.27586
    delta_r_t: float = 1.45
    perturbation_eps: float = 1e-8
    perturbation_m: int = 16
    perturbation_n: int = 1
    envelope_width: float = 2.9
    entropy_floor_rel: float = 1e-30

    def __post_init__(self) -> None:
        if self.kind not in SCENARIO_KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}")
        if not 0.0 < self.cfl < 1.0:
            raise ConfigError(f"cfl must lie in (0,1), got {self.cfl}")
        if self.n_steps < 1 or self.diag_every < 1:
            raise ConfigError("n_steps and diag_every must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        for name in ("n_cells", "nr", "ntheta", "nz", "nv"):
            if getattr(self, name) < 4:
                raise ConfigError(f"{name} must be at least 4 (stencil width)")
        if not -1.0 <= self.displacement <= 1.0:
            raise ConfigError("displacement must lie in [-1, 1] (CFL contract)")


_SECTIONED_KEYS = {
    "scenario": ("kind", "scheme", "limiter", "limiter_c", "limiter_k",
                 "literal_paper_mode", "cfl", "dt_max", "n_steps",
                 "diag_every", "snapshot_every", "seed", "threads",
                 "tv_dx_prefactor"),
    "grid": ("n_cells", "x_min", "x_max", "nr", "ntheta", "nz", "nv",
             "r_min", "r_max", "l_z", "v_max"),
    "physics": ("b_z", "q_i", "m_i", "e", "kappa", "kappa_n0", "delta_r_n0",
                "kappa_t", "delta_r_t", "rotation_rate", "displacement"),
    "initial": ("step_fraction", "step_center", "blob_r", "blob_theta",
                "blob_width", "perturbation_eps", "perturbation_m",
                "perturbation_n", "envelope_width", "entropy_floor_rel"),
    "output": ("output_dir",),
}


def parse_config(path: str | Path) -> ScenarioConfig:
    """Read a sectioned key=value file into a ScenarioConfig."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    text = Path(path).read_text()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    kwargs: dict = {}
    limiter_kind = LimiterKind.NONE
    limiter_c, limiter_k, literal = 2.0, 5.0, False
    known = {f.name: f.type for f in dc_fields(ScenarioConfig)}
    for section in parser.sections():
        if section not in _SECTIONED_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SECTIONED_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            try:
                if key == "scheme":
                    kwargs["scheme"] = Scheme.parse(raw)
                elif key == "limiter":
                    limiter_kind = LimiterKind.parse(raw)
                elif key == "limiter_c":
                    limiter_c = float(raw)
                elif key == "limiter_k":
                    limiter_k = float(raw)
                elif key == "literal_paper_mode":
                    literal = _parse_bool(raw)
                elif key == "kind":
                    kwargs["kind"] = raw.strip().lower()
                elif key in ("tv_dx_prefactor",):
                    kwargs[key] = _parse_bool(raw)
                else:
                    anno = str(known[key])
                    kwargs[key] = int(raw) if "int" in anno else (
                        raw if "str" in anno else float(raw))
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from exc
    try:
        kwargs["limiter"] = LimiterConfig(limiter_kind, c=limiter_c,
                                          k=limiter_k,
                                          literal_paper_mode=literal)
        return ScenarioConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_bool(raw: str) -> bool:
    val = raw.strip().lower()
    if val in ("1", "true", "yes", "on"):
        return True
    if val in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def config_lines(cfg: ScenarioConfig) -> list[str]:
    """The resolved configuration as key = value lines (metadata echo)."""
    lines = []
    for f in dc_fields(ScenarioConfig):
        val = getattr(cfg, f.name)
        if isinstance(val, Scheme):
            val = val.value
        elif isinstance(val, LimiterConfig):
            lines.append(f"limiter = {val.kind.value}")
            lines.append(f"limiter_c = {val.c!r}")
            lines.append(f"limiter_k = {val.k!r}")
            lines.append(f"literal_paper_mode = {val.literal_paper_mode}")
            continue
        lines.append(f"{f.name} = {val!r}" if isinstance(val, float)
                     else f"{f.name} = {val}")
    return lines


@dataclass
class RunResult:
    config: ScenarioConfig
    records: list[diag.DiagnosticsRecord]
    final_values: np.ndarray
    output_dir: Path
    diagnostics_path: Path
    completed_steps: int


def _prepare_output(cfg: ScenarioConfig) -> tuple[Path, diag.DiagnosticsWriter]:
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "metadata.txt").write_text("\n".join(config_lines(cfg)) + "\n")
    return outdir, diag.DiagnosticsWriter(outdir / "diagnostics.csv")


def _want_snapshot(cfg: ScenarioConfig, step: int) -> bool:
    if step in (0, cfg.n_steps):
        return True
    return cfg.snapshot_every > 0 and step % cfg.snapshot_every == 0


def _entropy_sum(values: np.ndarray, weights, floor: float) -> float:
    clipped = np.maximum(values, floor)
    return -float(np.sum(clipped * np.log(clipped) * weights))


# ---------------------------------------------------------------------------
# 1D step benchmark
# ---------------------------------------------------------------------------


def run_step1d(cfg: ScenarioConfig) -> RunResult:
    """Constant advection of a step profile on a periodic grid.

    The displacement per iteration is prescribed directly (cells per step),
    the classic oscillation benchmark for every scheme/limiter pairing.
    """
    grid = build_grid1d(cfg.x_min, cfg.x_max, cfg.n_cells, Boundary.PERIODIC)
    outdir, writer = _prepare_output(cfg)

    centers = grid.cell_centers()
    half_width = 0.5 * cfg.step_fraction * grid.length
    center = cfg.x_min + cfg.step_center * grid.length
    offset = np.abs(centers - center)
    offset = np.minimum(offset, grid.length - offset)   # periodic distance
    values = np.where(offset < half_width, 1.0, 0.0)

    beta = np.full(grid.n_faces, cfg.displacement)
    dt = abs(cfg.displacement) * grid.dx if cfg.displacement else grid.dx
    records: list[diag.DiagnosticsRecord] = []

    def record(step: int, t: float, vals: np.ndarray) -> None:
        floor = cfg.entropy_floor_rel * max(float(np.abs(vals).max()), 1e-300)
        l2 = grid.dx * float(np.sum(vals**2))
        tv = diag.tv_norm_1d(vals, grid.dx, grid.boundary,
                             cfg.tv_dx_prefactor)
        rec = diag.DiagnosticsRecord(
            step=step, time=t, mass=diag.mass_1d(vals, grid.dx), l2=l2,
            entropy=_entropy_sum(vals, grid.dx, floor), tv=tv,
            e_kin=0.0, e_pot=0.0, e_tot=0.0,
            q_factor=diag.quality_factor(l2, tv))
        records.append(rec)
        writer.append(rec)

    record(0, 0.0, values)
    if _want_snapshot(cfg, 0):
        write_snapshot(outdir / "profile_000000", values, [grid], ("x",), 0.0, 0)
    for step in range(1, cfg.n_steps + 1):
        values, _ = sweep_batch(values, beta, grid.boundary, grid.dx,
                                cfg.scheme, cfg.limiter)
        if step % cfg.diag_every == 0 or step == cfg.n_steps:
            record(step, step * dt, values)
        if _want_snapshot(cfg, step):
            write_snapshot(outdir / f"profile_{step:06d}", values, [grid],
                           ("x",), step * dt, step)
    return RunResult(cfg, records, values, outdir,
                     outdir / "diagnostics.csv", cfg.n_steps)


# ---------------------------------------------------------------------------
# 2D guiding-center rotation
# ---------------------------------------------------------------------------


def run_guiding_center_2d(cfg: ScenarioConfig) -> RunResult:
    """Gaussian blob advected in the (r, theta) plane by a static potential.

    The default potential 0.5 * rotation_rate * B * r^2 produces a rigid
    E x B rotation (angular velocity = rotation_rate everywhere, zero radial
    drift), so the blob returns to its start after 2 pi / rotation_rate.
    """
    r_grid = build_grid1d(cfg.r_min, cfg.r_max, cfg.nr, Boundary.NATURAL)
    theta_grid = build_grid1d(0.0, 2.0 * math.pi, cfg.ntheta, Boundary.PERIODIC)
    outdir, writer = _prepare_output(cfg)

    r = r_grid.cell_centers()
    theta = theta_grid.cell_centers()
    phi = 0.5 * cfg.rotation_rate * cfg.b_z * r[:, None] ** 2 \
        * np.ones_like(theta)[None, :]
    v_r = -d_periodic(phi, theta_grid.dx, axis=1) / (r[:, None] * cfg.b_z)
    omega = d_natural(phi, r_grid.dx, axis=0) / (r[:, None] * cfg.b_z)

    # closed annulus walls, as in the 4D scenario
    face_vr = face_average(v_r, 0, Boundary.NATURAL, edge="zero")
    face_om = face_average(omega, 1, Boundary.PERIODIC)
    face_velocities = [face_vr, face_om]
    grids = [r_grid, theta_grid]

    x0 = cfg.blob_r * math.cos(cfg.blob_theta)
    y0 = cfg.blob_r * math.sin(cfg.blob_theta)
    xx = r[:, None] * np.cos(theta)[None, :]
    yy = r[:, None] * np.sin(theta)[None, :]
    values = np.exp(-((xx - x0) ** 2 + (yy - y0) ** 2)
                    / (2.0 * cfg.blob_width ** 2))

    control = StepControl(cfg.cfl, cfg.dt_max or None)
    records: list[diag.DiagnosticsRecord] = []
    cell_area = r_grid.dx * theta_grid.dx
    r_w = r[:, None]

    def record(step: int, t: float, vals: np.ndarray) -> None:
        floor = cfg.entropy_floor_rel * max(float(np.abs(vals).max()), 1e-300)
        l2 = cell_area * float(np.sum(vals**2 * r_w))
        tv = diag.tv_norm_plane(vals, r_grid.dx, theta_grid.dx)
        rec = diag.DiagnosticsRecord(
            step=step, time=t, mass=cell_area * float(np.sum(vals)), l2=l2,
            entropy=_entropy_sum(vals, cell_area * r_w, floor), tv=tv,
            e_kin=0.0, e_pot=0.0, e_tot=0.0,
            q_factor=diag.quality_factor(l2, tv))
        records.append(rec)
        writer.append(rec)

    record(0, 0.0, values)
    if _want_snapshot(cfg, 0):
        write_snapshot(outdir / "plane_000000", values, grids, ("r", "theta"),
                       0.0, 0)
    t = 0.0
    for step in range(1, cfg.n_steps + 1):
        dt = compute_dt([v_r, omega], grids, control)
        # static potential: the corrector is a plain full-step flux sum
        values = flux_sum_stage(values, grids, face_velocities, dt,
                                cfg.scheme, cfg.limiter)
        t += dt
        if step % cfg.diag_every == 0 or step == cfg.n_steps:
            record(step, t, values)
        if _want_snapshot(cfg, step):
            write_snapshot(outdir / f"plane_{step:06d}", values, grids,
                           ("r", "theta"), t, step)
    return RunResult(cfg, records, values, outdir,
                     outdir / "diagnostics.csv", cfg.n_steps)


# ---------------------------------------------------------------------------
# 4D drift-kinetic instability benchmark
# ---------------------------------------------------------------------------


def make_drift_kinetic_setup(cfg: ScenarioConfig):
    """(grid, profiles, qn solver, initial Field4D) for the 4D scenario."""
    grid = Grid4D(
        r=build_grid1d(cfg.r_min, cfg.r_max, cfg.nr, Boundary.NATURAL),
        theta=build_grid1d(0.0, 2.0 * math.pi, cfg.ntheta, Boundary.PERIODIC),
        z=build_grid1d(0.0, cfg.l_z, cfg.nz, Boundary.PERIODIC),
        v=build_grid1d(-cfg.v_max, cfg.v_max, cfg.nv, Boundary.NATURAL),
    )
    r_peak = 0.5 * (cfg.r_min + cfg.r_max)
    profiles = make_equilibrium(
        grid,
        n0_fn=tanh_profile(cfg.kappa_n0, cfg.delta_r_n0, r_peak),
        t_e_fn=tanh_profile(cfg.kappa_t, cfg.delta_r_t, r_peak),
        t_i_fn=tanh_profile(cfg.kappa_t, cfg.delta_r_t, r_peak),
        b_z=cfg.b_z, q_i=cfg.q_i, m_i=cfg.m_i, e=cfg.e, kappa=cfg.kappa)
    solver = QNSolver(profiles)

    r = grid.r.cell_centers()
    theta = grid.theta.cell_centers()
    z = grid.z.cell_centers()
    envelope = np.exp(-(r - r_peak) ** 2 / (2.0 * cfg.envelope_width ** 2))
    pert = cfg.perturbation_eps * envelope[:, None, None] * np.cos(
        cfg.perturbation_m * theta[None, :, None]
        + 2.0 * math.pi * cfg.perturbation_n * z[None, None, :] / cfg.l_z)
    f0 = Field4D(grid, profiles.f_eq[:, None, None, :] * (1.0 + pert[..., None]))
    return grid, profiles, solver, f0


def run_drift_kinetic_4d(cfg: ScenarioConfig) -> RunResult:
    """Self-consistent Vlasov / quasi-neutrality run with RK2 stepping.

    Aborts with CflViolation (recorded in metadata.txt) if a step breaks the
    displacement contract; compute_dt makes that unreachable unless dt_max
    is misused.
    """
    grid, profiles, solver, fld = make_drift_kinetic_setup(cfg)
    outdir, writer = _prepare_output(cfg)
    control = StepControl(cfg.cfl, cfg.dt_max or None)

    def field_solver(state: Field4D) -> AdvectionField4D:
        phi = solver.solve(ion_density(state))
        return build_advection_field(grid, phi, profiles.b_z,
                                     profiles.q_over_m)

    records: list[diag.DiagnosticsRecord] = []
    iz, iv = grid.z.n_cells // 2, grid.v.n_cells // 2

    def record(step: int, t: float, state: Field4D, phi: np.ndarray) -> None:
        floor = cfg.entropy_floor_rel * max(float(np.abs(state.values).max()),
                                            1e-300)
        n_i = ion_density(state)
        e_kin, e_pot, _ = diag.energies(state, profiles.f_eq, phi, n_i,
                                        profiles.n0, profiles.m_i, profiles.e)
        l2 = diag.l2_norm(state)
        tv = diag.tv_norm_plane(state.values[:, :, iz, iv], grid.r.dx,
                                grid.theta.dx)
        rec = diag.DiagnosticsRecord(
            step=step, time=t, mass=diag.mass_4d(state), l2=l2,
            entropy=diag.entropy(state, floor), tv=tv,
            e_kin=e_kin, e_pot=e_pot, e_tot=0.0,
            q_factor=diag.quality_factor(l2, tv))
        records.append(rec)
        writer.append(rec)

    def snapshot(step: int, t: float, state: Field4D) -> None:
        write_snapshot(outdir / f"plane_rtheta_{step:06d}",
                       state.values[:, :, iz, iv], [grid.r, grid.theta],
                       ("r", "theta"), t, step)

    t = 0.0
    phi0 = solver.solve(ion_density(fld))
    record(0, 0.0, fld, phi0.values)
    snapshot(0, 0.0, fld)
    step = 0
    try:
        for step in range(1, cfg.n_steps + 1):
            adv = field_solver(fld)
            dt = compute_dt([adv.v_r, adv.omega, adv.v_z, adv.a_v],
                            grid.axes, control)
            fld = predictor_corrector_step(fld, field_solver, cfg.scheme,
                                           cfg.limiter, dt, adv_start=adv)
            t += dt
            if step % cfg.diag_every == 0 or step == cfg.n_steps:
                phi = solver.solve(ion_density(fld))
                record(step, t, fld, phi.values)
            if _want_snapshot(cfg, step):
                snapshot(step, t, fld)
    except CflViolation as exc:
        with open(outdir / "metadata.txt", "a") as fh:
            fh.write(f"aborted_step = {step}\nabort_reason = {exc}\n")
        raise
    return RunResult(cfg, records, fld.values, outdir,
                     outdir / "diagnostics.csv", cfg.n_steps)


_RUNNERS = {
    "step1d": run_step1d,
    "guiding_center_2d": run_guiding_center_2d,
    "drift_kinetic_4d": run_drift_kinetic_4d,
}


def run_scenario(cfg: ScenarioConfig) -> RunResult:
    return _RUNNERS[cfg.kind](cfg)
