"""Run orchestration: build a case from its config, step it, write dumps."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import CaseConfig, config_digest
from .errors import ConfigError, LagfluxError
from .euler import PerfectGasEos, total_energy
from .grid import BoundaryCondition, CartesianGrid, CellField, build_grid
from .io import write_diagnostics, write_field_csv, write_table
from .lagremap import lagremap_step
from .multimat import MaterialSet, fill_regions, run_rider_kothe
from .scheme import (
    SchemeParams,
    SolverState,
    StepDiagnostics,
    TimeControls,
    Workspace,
    check_stage,
    next_dt,
    heun_step,
    initial_state,
    primitive_fields,
)

THREADS_ENV = "LAGFLUX_THREADS"


class SolverFailure(LagfluxError):
    """A run aborted mid-way; ``diagnostics`` points at the serialised history."""

    def __init__(self, cause: Exception, diagnostics: Path | None, failure_file: Path | None):
        super().__init__(str(cause))
        self.cause = cause
        self.diagnostics = diagnostics
        self.failure_file = failure_file


@dataclass
class Case:
    """Ready-to-run objects for one config."""

    config: CaseConfig
    grid: CartesianGrid
    bc: BoundaryCondition
    eos: PerfectGasEos | MaterialSet
    field: CellField | None
    params: SchemeParams
    controls: TimeControls


@dataclass
class RunResult:
    config: CaseConfig
    state: SolverState | None
    dumps: list[Path] = field(default_factory=list)
    diagnostics: Path | None = None
    truncated: bool = False
    advection: object = None


def resolve_threads(cfg: CaseConfig, explicit: int | None = None) -> int:
    """Thread count: explicit flag, then ``LAGFLUX_THREADS``, then the config."""
    if explicit is not None:
        n = explicit
    elif os.environ.get(THREADS_ENV):
        try:
            n = int(os.environ[THREADS_ENV])
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer") from None
    else:
        n = cfg.threads
    if n < 1:
        raise ConfigError(f"thread count must be >= 1, got {n}")
    return n


def density_wave_average(grid: CartesianGrid, t: float, amplitude: float, rho0: float, u: float) -> np.ndarray:
    """Exact cell averages of ``rho0 + amplitude sin(2 pi (x - u t) / L)``, shaped ``(ny, nx)``."""
    L = grid.nx * grid.dx
    k = 2.0 * math.pi / L
    e = grid.x_edges - grid.origin[0] - u * t
    avg = rho0 - amplitude * (np.cos(k * e[1:]) - np.cos(k * e[:-1])) / (k * grid.dx)
    return np.broadcast_to(avg, (grid.ny, grid.nx)).copy()


def initial_field(cfg: CaseConfig, grid: CartesianGrid, eos) -> CellField:
    if cfg.initial_kind == "regions":
        materials = eos if isinstance(eos, MaterialSet) else None
        return fill_regions(grid, cfg.regions, materials, eos_gamma=cfg.gamma)
    if cfg.initial_kind == "density_wave":
        amp, rho0, u, v, p = (cfg.param(k) for k in ("amplitude", "rho0", "u", "v", "p"))
        rho = density_wave_average(grid, 0.0, amp, rho0, u)
        values = np.stack([rho, rho * u, rho * v, total_energy(rho, u, v, p, cfg.gamma)])
        return CellField.from_interior(grid, values)
    raise ConfigError(f"initial kind {cfg.initial_kind!r} has no hydrodynamic field")


def build_case(cfg: CaseConfig, threads: int | None = None) -> Case:
    grid = build_grid(cfg)
    eos = MaterialSet(cfg.material_gammas) if cfg.material_gammas else PerfectGasEos(cfg.gamma)
    field0 = initial_field(cfg, grid, eos) if cfg.solver != "advect2d" else None
    params = SchemeParams(cfg.beta, cfg.order, cfg.corrector, resolve_threads(cfg, threads))
    controls = TimeControls(cfg.cfl, cfg.t_final, cfg.max_steps)
    return Case(cfg, grid, cfg.boundary, eos, field0, params, controls)


def dump_schedule(cfg: CaseConfig) -> list[float]:
    """Sorted stop times: configured dump times, ``dump_every`` multiples, ``t_final``."""
    times = set(cfg.dump_times) | {cfg.t_final}
    if cfg.dump_every:
        k = 1
        while k * cfg.dump_every < cfg.t_final:
            times.add(k * cfg.dump_every)
            k += 1
    return sorted(t for t in times if 0.0 <= t <= cfg.t_final)


def lagremap_cfl_step(state: SolverState, case: Case, t_stop: float) -> SolverState:
    """One Lagrange + remap step with the CFL time step."""
    dt, landing = next_dt(state, case.eos, case.controls, t_stop)
    step = state.step + 1
    new, flux = lagremap_step(state.field, dt, case.eos, case.bc, order=case.config.remap_order, beta=case.config.beta)
    min_rho, min_p = check_stage(new, case.eos, "remap", step, dt)
    time = landing if landing is not None else state.time + dt
    outflow = state.boundary_outflow + dt * (flux[:, -1] - flux[:, 0])
    history = state.history + [StepDiagnostics(step, time, dt, min_rho, min_p)]
    return SolverState(new, time, step, history, outflow)


def _dump_name(cfg: CaseConfig, k: int, t: float) -> str:
    return f"{cfg.name}_{k:04d}_t{t:.6f}.csv"


def _fail(exc: Exception, out: Path, cfg: CaseConfig, history) -> SolverFailure:
    diag = write_diagnostics(out / f"{cfg.name}_diagnostics.csv", history)
    ff = out / f"{cfg.name}_failure.txt"
    ff.write_text(f"{type(exc).__name__}: {exc}\n")
    return SolverFailure(exc, diag, ff)


def run_case(cfg: CaseConfig, out_dir: str | Path, threads: int | None = None) -> RunResult:
    """Run ``cfg`` to ``t_final`` writing dumps and a diagnostics CSV into ``out_dir``.

    Raises :class:`SolverFailure` after serialising the history if any
    stage fails.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    case = build_case(cfg, threads)
    if cfg.solver == "advect2d":
        return _run_advection(case, out)

    digest = config_digest(cfg)
    result = RunResult(cfg, None)
    try:
        state = initial_state(case.field, case.eos)
    except LagfluxError as exc:
        raise _fail(exc, out, cfg, []) from exc
    ws = Workspace.for_field(state.field)
    for k, target in enumerate(dump_schedule(cfg)):
        try:
            while state.time < target and state.step < cfg.max_steps:
                if cfg.solver == "lagremap1d":
                    state = lagremap_cfl_step(state, case, target)
                else:
                    state = heun_step(state, case.grid, case.bc, case.eos, case.params, case.controls,
                                      t_stop=target, workspace=ws)
        except LagfluxError as exc:
            raise _fail(exc, out, cfg, state.history) from exc
        if state.time < target:
            result.truncated = True
            path = write_field_csv(out / _dump_name(cfg, k, state.time), case.grid,
                                   primitive_fields(state.field, case.eos), digest, state.time)
            result.dumps.append(path)
            break
        path = write_field_csv(out / _dump_name(cfg, k, target), case.grid,
                               primitive_fields(state.field, case.eos), digest, target)
        result.dumps.append(path)
    result.state = state
    result.diagnostics = write_diagnostics(out / f"{cfg.name}_diagnostics.csv", state.history)
    return result


def _run_advection(case: Case, out: Path) -> RunResult:
    cfg = case.config
    digest = config_digest(cfg)
    times = dump_schedule(cfg)
    run = run_rider_kothe(
        period=cfg.period, t_final=cfg.t_final, cfl=cfg.cfl, beta=cfg.beta, snapshot_times=times,
        center=cfg.param("center"), radius=cfg.param("radius"), grid=case.grid, max_steps=cfg.max_steps,
    )
    result = RunResult(cfg, None, advection=run)
    X, Y = case.grid.meshgrid()
    for k, t in enumerate(times):
        if t in run.snapshots:
            table = np.stack([X.ravel(), Y.ravel(), run.snapshots[t].ravel()], axis=1)
            result.dumps.append(write_table(out / _dump_name(cfg, k, t), ["x", "y", "z"], table, digest, t))
    result.truncated = run.times[-1] < cfg.t_final
    if result.truncated:
        table = np.stack([X.ravel(), Y.ravel(), run.z.ravel()], axis=1)
        result.dumps.append(write_table(out / _dump_name(cfg, len(times), run.times[-1]), ["x", "y", "z"],
                                        table, digest, run.times[-1]))
    path = out / f"{cfg.name}_diagnostics.csv"
    with open(path, "w") as fh:
        fh.write("step,time,total_z,min_z,max_z\n")
        for i, t in enumerate(run.times):
            fh.write(f"{i},{t!r},{run.totals[i]!r},{run.z_min[i]!r},{run.z_max[i]!r}\n")
    result.diagnostics = path
    return result
