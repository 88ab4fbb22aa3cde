"""The Lagrange-flux finite-volume scheme.

Edge fluxes combine upwinded convective transport with the contact
pressure and velocity from the Lagrangian HLL solver:

    Phi_l = (U_l)_A (u_A . nu_A) + (pi_l)_A . nu_A

where ``u_A . nu_A`` is the contact velocity and the pressure part uses
the contact pressure.  Time integration is Heun's two-stage method on
limited MUSCL traces of the primitive variables: a forward-Euler
predictor, fresh fluxes on the predicted field, and a final update with
the average of both flux sets.

Fluxes are computed into per-edge arrays before cell updates, so results
are bitwise independent of the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, PositivityError
from .euler import PerfectGasEos, PrimitiveState, check_physical, pressure, total_energy
from .grid import ENERGY, MOM_X, MOM_Y, N_HYDRO, RHO, BoundaryCondition, CartesianGrid, CellField, apply_boundary
from .multimat import mass_fraction_fluxes
from .reconstruct import limited_traces
from .riemann import hll_contact, lagrangian_hll


@dataclass(frozen=True)
class SchemeParams:
    """Discretisation switches.

    ``order=1`` uses piecewise-constant traces; ``corrector=False`` drops
    the second Heun stage (forward Euler).
    """

    beta: float = 1.5
    order: int = 2
    corrector: bool = True
    threads: int = 1

    def __post_init__(self):
        if not (1.0 <= self.beta <= 2.0):
            raise ConfigError(f"beta must lie in [1, 2], got {self.beta}")
        if self.order not in (1, 2):
            raise ConfigError(f"order must be 1 or 2, got {self.order}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")


@dataclass(frozen=True)
class TimeControls:
    cfl: float = 0.25
    t_final: float = 1.0
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not (0.0 < self.cfl < 1.0):
            raise ConfigError(f"cfl must lie in (0, 1), got {self.cfl}")
        if not (self.t_final >= 0.0):
            raise ConfigError(f"t_final must be non-negative, got {self.t_final}")
        if self.max_steps < 0:
            raise ConfigError("max_steps must be non-negative")


class EdgeFlux(NamedTuple):
    mass: np.ndarray | float
    mom_x: np.ndarray | float
    mom_y: np.ndarray | float
    energy: np.ndarray | float


@dataclass(frozen=True)
class StepDiagnostics:
    step: int
    time: float
    dt: float
    min_rho: float
    min_p: float


@dataclass
class SolverState:
    """Field, clock and per-step diagnostics of a run.

    ``boundary_outflow`` is the time integral of the net flux of every
    component out of the domain, so ``totals(t) + boundary_outflow(t)``
    stays equal to the initial totals.
    """

    field: CellField
    time: float = 0.0
    step: int = 0
    history: list[StepDiagnostics] = dc_field(default_factory=list)
    boundary_outflow: np.ndarray | None = None

    def __post_init__(self):
        if self.boundary_outflow is None:
            self.boundary_outflow = np.zeros(self.field.n_components)


# --------------------------------------------------------------------------
# edge fluxes


def edge_flux(W_minus: PrimitiveState, W_plus: PrimitiveState, normal, eos: PerfectGasEos) -> EdgeFlux:
    """Lagrange-flux numerical flux between two traces across ``normal``.

    The convected state is taken from the upwind side of the contact
    velocity (the mean of both sides when it vanishes).
    """
    check_physical(W_minus.rho, W_minus.p, "minus trace")
    check_physical(W_plus.rho, W_plus.p, "plus trace")
    nx, ny = normal
    p_star, u_star = lagrangian_hll(W_minus, W_plus, normal, eos)
    g = eos.gamma
    Um = (W_minus.rho, W_minus.rho * W_minus.u, W_minus.rho * W_minus.v,
          total_energy(W_minus.rho, W_minus.u, W_minus.v, W_minus.p, g))
    Up = (W_plus.rho, W_plus.rho * W_plus.u, W_plus.rho * W_plus.v,
          total_energy(W_plus.rho, W_plus.u, W_plus.v, W_plus.p, g))
    UA = [np.where(u_star > 0.0, a, np.where(u_star < 0.0, b, 0.5 * (a + b))) for a, b in zip(Um, Up)]
    out = EdgeFlux(
        UA[0] * u_star,
        UA[1] * u_star + p_star * nx,
        UA[2] * u_star + p_star * ny,
        UA[3] * u_star + p_star * u_star,
    )
    if np.ndim(out.mass) == 0:
        return EdgeFlux(*(float(c) for c in out))
    return out


def _upwind(u_star, a, b):
    return np.where(u_star > 0.0, a, np.where(u_star < 0.0, b, 0.5 * (a + b)))


def line_fluxes(lines: np.ndarray, ghost: int, eos, beta: float, order: int, normal: int, out: np.ndarray) -> None:
    """Fluxes on every interior edge of a bundle of grid lines.

    ``lines`` is ``(n_components, n_lines, cells + 2*ghost)`` with the
    sweep along the last axis; ``normal`` is the momentum component
    along the sweep.  Writes ``(n_components, n_lines, cells + 1)`` into
    ``out``.
    """
    tangential = MOM_Y if normal == MOM_X else MOM_X
    n_mat = eos.n_materials
    rho = lines[RHO]
    un = lines[normal] / rho
    ut = lines[tangential] / rho
    if n_mat:
        y = lines[N_HYDRO:] / rho
        gamma_cell = eos.gamma_from_fractions(y)
    else:
        gamma_cell = eos.gamma
    p = pressure(rho, lines[normal], lines[tangential], lines[ENERGY], gamma_cell)
    check_physical(rho, p, "cell")

    rho_m, rho_p = limited_traces(rho, ghost, beta, order)
    un_m, un_p = limited_traces(un, ghost, beta, order)
    ut_m, ut_p = limited_traces(ut, ghost, beta, order)
    p_m, p_p = limited_traces(p, ghost, beta, order)
    if n_mat:
        y_m, y_p = zip(*(limited_traces(yk, ghost, beta, order) for yk in y))
        y_m = np.array(y_m)
        y_p = np.array(y_p)
        y_m /= y_m.sum(axis=0)
        y_p /= y_p.sum(axis=0)
        g_m = eos.gamma_from_fractions(y_m)
        g_p = eos.gamma_from_fractions(y_p)
    else:
        g_m = g_p = eos.gamma
    axis = "x" if normal == MOM_X else "y"
    check_physical(rho_m, p_m, "minus trace", axis=axis)
    check_physical(rho_p, p_p, "plus trace", axis=axis)

    c_m = np.sqrt(g_m * p_m / rho_m)
    c_p = np.sqrt(g_p * p_p / rho_p)
    p_star, u_star = hll_contact(rho_m, un_m, p_m, c_m, rho_p, un_p, p_p, c_p)

    rho_a = _upwind(u_star, rho_m, rho_p)
    mn_a = _upwind(u_star, rho_m * un_m, rho_p * un_p)
    mt_a = _upwind(u_star, rho_m * ut_m, rho_p * ut_p)
    e_a = _upwind(
        u_star,
        total_energy(rho_m, un_m, ut_m, p_m, g_m),
        total_energy(rho_p, un_p, ut_p, p_p, g_p),
    )
    out[RHO] = rho_a * u_star
    out[normal] = mn_a * u_star + p_star
    out[tangential] = mt_a * u_star
    out[ENERGY] = e_a * u_star + p_star * u_star
    if n_mat:
        out[N_HYDRO:] = mass_fraction_fluxes(out[RHO], np.where(u_star > 0.0, y_m, y_p))


# --------------------------------------------------------------------------
# workers

_EXECUTORS: dict[int, ThreadPoolExecutor] = {}


def _executor(threads: int) -> ThreadPoolExecutor:
    if threads not in _EXECUTORS:
        _EXECUTORS[threads] = ThreadPoolExecutor(max_workers=threads, thread_name_prefix="lagflux")
    return _EXECUTORS[threads]


def _bands(n: int, threads: int) -> list[slice]:
    k = max(1, min(threads, n))
    bounds = np.linspace(0, n, k + 1).round().astype(int)
    return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _parallel(fn, n: int, threads: int) -> None:
    bands = _bands(n, threads)
    if len(bands) == 1:
        fn(bands[0])
        return
    # list() re-raises worker exceptions
    list(_executor(threads).map(fn, bands))


@dataclass
class Workspace:
    """Reusable flux and predictor storage for one grid."""

    fx: np.ndarray
    fy: np.ndarray | None
    predictor: CellField

    @classmethod
    def for_field(cls, field: CellField) -> "Workspace":
        g = field.grid
        nc = field.n_components
        fx = np.empty((nc, g.ny, g.nx + 1))
        fy = np.empty((nc, g.ny + 1, g.nx)) if g.dim == 2 else None
        return cls(fx, fy, CellField(g, np.zeros_like(field.data)))

    def matches(self, field: CellField) -> bool:
        return self.predictor.data.shape == field.data.shape and self.predictor.grid == field.grid


def compute_fluxes(field: CellField, eos, params: SchemeParams, fx: np.ndarray, fy: np.ndarray | None) -> None:
    """Fill x- (and y-) edge flux arrays from a ghost-filled field."""
    g = field.grid
    U = field.data
    xl = U[:, g.gy : g.gy + g.ny, :]

    def do_x(b):
        line_fluxes(xl[:, b], g.gx, eos, params.beta, params.order, MOM_X, fx[:, b])

    _parallel(do_x, g.ny, params.threads)
    if g.dim == 2:
        yl = np.swapaxes(U[:, :, g.gx : g.gx + g.nx], 1, 2)
        fyT = np.swapaxes(fy, 1, 2)

        def do_y(b):
            line_fluxes(yl[:, b], g.gy, eos, params.beta, params.order, MOM_Y, fyT[:, b])

        _parallel(do_y, g.nx, params.threads)


def _update(U0: CellField, fx, fy, dt: float, out: CellField, threads: int) -> None:
    """``out = U0 - dt * div(F)`` on interior cells, banded over rows."""
    g = U0.grid
    src = U0.interior
    dst = out.interior

    def do(b):
        r = (fx[:, b, 1:] - fx[:, b, :-1]) / g.dx
        if fy is not None:
            r = r + (fy[:, b.start + 1 : b.stop + 1, :] - fy[:, b.start : b.stop, :]) / g.dy
        dst[:, b] = src[:, b] - dt * r

    _parallel(do, g.ny, threads)


def _boundary_rate(fx, fy, grid: CartesianGrid) -> np.ndarray:
    """Net outflow rate through the domain boundary, per component."""
    edge_y = grid.dy if grid.dim == 2 else 1.0
    rate = (fx[:, :, -1] - fx[:, :, 0]).sum(axis=1) * edge_y
    if fy is not None:
        rate = rate + (fy[:, -1, :] - fy[:, 0, :]).sum(axis=1) * grid.dx
    return rate


def _cell_pressure(field: CellField, eos) -> np.ndarray:
    U = field.interior
    gamma = eos.gamma_from_fractions(U[N_HYDRO:] / U[RHO]) if eos.n_materials else eos.gamma
    return pressure(U[RHO], U[MOM_X], U[MOM_Y], U[ENERGY], gamma)


def check_stage(field: CellField, eos, stage: str, step: int, dt: float) -> tuple[float, float]:
    U = field.interior
    rho = U[RHO]
    with np.errstate(all="ignore"):
        p = _cell_pressure(field, eos)
    bad = ~(rho > 0.0) | ~(p > 0.0)
    if np.any(bad):
        j, i = np.unravel_index(int(np.argmax(bad)), bad.shape)
        raise PositivityError(
            f"non-physical cell after {stage}",
            cell=(int(i), int(j)) if field.grid.dim == 2 else int(i),
            step=step,
            dt=dt,
            rho=float(rho[j, i]),
            p=float(p[j, i]),
        )
    return float(rho.min()), float(p.min())


# --------------------------------------------------------------------------
# time stepping


def max_signal_rate(field: CellField, eos) -> float:
    """``max over cells of sum_d (|u_d| + c) / dx_d``."""
    g = field.grid
    U = field.interior
    rho = U[RHO]
    p = _cell_pressure(field, eos)
    check_physical(rho, p, "cell")
    gamma = eos.gamma_from_fractions(U[N_HYDRO:] / rho) if eos.n_materials else eos.gamma
    c = np.sqrt(gamma * p / rho)
    rate = (np.abs(U[MOM_X] / rho) + c) / g.dx
    if g.dim == 2:
        rate = rate + (np.abs(U[MOM_Y] / rho) + c) / g.dy
    return float(rate.max())


def next_dt(state: SolverState, eos, controls: TimeControls, t_stop: float | None = None):
    """Time step and, when clipped, the exact time it lands on."""
    if state.field.grid.n_cells == 0:
        raise ConfigError("empty grid")
    dt = controls.cfl / max_signal_rate(state.field, eos)
    target = controls.t_final if t_stop is None else min(t_stop, controls.t_final)
    if state.time + dt >= target:
        return target - state.time, target
    return dt, None


def compute_dt(state: SolverState, grid: CartesianGrid, eos, controls: TimeControls, t_stop: float | None = None) -> float:
    """CFL time step, clipped so the clock does not pass ``t_final`` (or ``t_stop``)."""
    return next_dt(state, eos, controls, t_stop)[0]


def euler_stage(
    field: CellField,
    dt: float,
    grid: CartesianGrid,
    bc: BoundaryCondition,
    eos,
    params: SchemeParams,
    out: CellField | None = None,
    step: int = 0,
) -> CellField:
    """Forward-Euler update ``U - dt/|K| sum_A |A| Phi_A`` of the interior.

    Fills the ghosts of ``field`` first.  Ghosts of the result are left
    untouched.
    """
    ws = Workspace.for_field(field)
    apply_boundary(field, bc)
    compute_fluxes(field, eos, params, ws.fx, ws.fy)
    out = out if out is not None else CellField(grid, field.data.copy())
    _update(field, ws.fx, ws.fy, dt, out, params.threads)
    check_stage(out, eos, "predictor", step, dt)
    return out


def heun_step(
    state: SolverState,
    grid: CartesianGrid,
    bc: BoundaryCondition,
    eos,
    params: SchemeParams,
    controls: TimeControls,
    dt: float | None = None,
    t_stop: float | None = None,
    workspace: Workspace | None = None,
) -> SolverState:
    """Advance ``state`` by one Heun step and return the new state.

    Without an explicit ``dt`` the CFL step is used, clipped at
    ``t_final`` / ``t_stop``.
    """
    landing = None
    if dt is None:
        dt, landing = next_dt(state, eos, controls, t_stop)
    ws = workspace if workspace is not None and workspace.matches(state.field) else Workspace.for_field(state.field)
    step = state.step + 1
    U0 = state.field
    apply_boundary(U0, bc)
    compute_fluxes(U0, eos, params, ws.fx, ws.fy)

    if params.corrector:
        pred = ws.predictor
        _update(U0, ws.fx, ws.fy, dt, pred, params.threads)
        check_stage(pred, eos, "predictor", step, dt)
        apply_boundary(pred, bc)
        fx0 = ws.fx.copy()
        fy0 = ws.fy.copy() if ws.fy is not None else None
        compute_fluxes(pred, eos, params, ws.fx, ws.fy)
        fx = 0.5 * (fx0 + ws.fx)
        fy = 0.5 * (fy0 + ws.fy) if fy0 is not None else None
    else:
        fx, fy = ws.fx, ws.fy

    new = CellField(grid, U0.data.copy())
    _update(U0, fx, fy, dt, new, params.threads)
    min_rho, min_p = check_stage(new, eos, "corrector" if params.corrector else "update", step, dt)

    time = landing if landing is not None else state.time + dt
    outflow = state.boundary_outflow + dt * _boundary_rate(fx, fy, grid)
    history = state.history + [StepDiagnostics(step, time, dt, min_rho, min_p)]
    return SolverState(new, time, step, history, outflow)


def initial_state(field: CellField, eos) -> SolverState:
    """Wrap an initial field, validating it."""
    check_stage(field, eos, "initial condition", 0, 0.0)
    return SolverState(field)


def advance(
    state: SolverState,
    grid: CartesianGrid,
    bc: BoundaryCondition,
    eos,
    params: SchemeParams,
    controls: TimeControls,
    t_stop: float | None = None,
    max_steps: int | None = None,
) -> SolverState:
    """Take Heun steps until ``t_stop`` (default ``t_final``) or the step cap."""
    target = controls.t_final if t_stop is None else min(t_stop, controls.t_final)
    cap = controls.max_steps if max_steps is None else max_steps
    ws = Workspace.for_field(state.field)
    while state.time < target and state.step < cap:
        state = heun_step(state, grid, bc, eos, params, controls, t_stop=target, workspace=ws)
    return state


def primitive_fields(field: CellField, eos) -> dict[str, np.ndarray]:
    """Interior primitive variables and specific internal energy, shaped ``(ny, nx)``."""
    U = field.interior
    rho = U[RHO]
    p = _cell_pressure(field, eos)
    out = {
        "rho": rho.copy(),
        "u": U[MOM_X] / rho,
        "v": U[MOM_Y] / rho,
        "p": p,
    }
    gamma = eos.gamma_from_fractions(U[N_HYDRO:] / rho) if eos.n_materials else eos.gamma
    out["e_internal"] = p / ((gamma - 1.0) * rho)
    for k in range(eos.n_materials):
        out[f"y{k + 1}"] = U[N_HYDRO + k] / rho
    return out


def run_lagflux(field: CellField, bc: BoundaryCondition, eos, params: SchemeParams, controls: TimeControls) -> SolverState:
    """Convenience wrapper: validate ``field`` and advance it to ``t_final``."""
    return advance(initial_state(field, eos), field.grid, bc, eos, params, controls)
