"""One-dimensional Lagrange + remap reference solver in flux form.

A step is

1. a Lagrange step: cells move with the contact velocities of the
   Lagrangian HLL solver, keep their mass, and exchange momentum and
   energy through the contact pressure;
2. backward convection onto the original cell, which rescales density
   by the volume ratio and keeps velocity and specific total energy;
3. forward convection on the Eulerian mesh with upwind edge states and
   the contact velocities as transport speeds.

The time-step is first order; second-order time accuracy lives in the
Lagrange-flux scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, StepTooLargeError
from .euler import PerfectGasEos, check_physical, pressure
from .grid import ENERGY, MOM_X, MOM_Y, N_HYDRO, RHO, BoundaryCondition, CellField, apply_boundary
from .reconstruct import limited_traces
from .riemann import hll_contact


@dataclass
class LagrangianCellGeometry:
    """Cell volumes after the Lagrange step and per-edge contact data."""

    volumes: np.ndarray
    edge_velocity: np.ndarray
    edge_pressure: np.ndarray


@dataclass
class LagrangianField:
    """Specific quantities carried by the moved cells."""

    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    E: np.ndarray


def _line(field: CellField) -> np.ndarray:
    g = field.grid
    if g.dim != 1:
        raise ConfigError("the Lagrange-remap reference solver is 1D only")
    if field.n_materials:
        raise ConfigError("the Lagrange-remap reference solver handles a single gas")
    return field.data[:, 0, :]


def edge_contact(field: CellField, eos: PerfectGasEos, bc: BoundaryCondition):
    """First-order contact ``(p*, u*)`` on all ``nx + 1`` edges."""
    apply_boundary(field, bc)
    g = field.grid
    U = _line(field)
    rho = U[RHO]
    p = pressure(rho, U[MOM_X], U[MOM_Y], U[ENERGY], eos.gamma)
    check_physical(rho, p, "cell")
    u = U[MOM_X] / rho
    c = np.sqrt(eos.gamma * p / rho)
    lo = slice(g.gx - 1, g.gx + g.nx)
    hi = slice(g.gx, g.gx + g.nx + 1)
    return hll_contact(rho[lo], u[lo], p[lo], c[lo], rho[hi], u[hi], p[hi], c[hi])


def lagrange_step_1d(field: CellField, dt: float, eos: PerfectGasEos, bc: BoundaryCondition | None = None):
    """Move every cell for ``dt``; returns ``(LagrangianField, LagrangianCellGeometry)``."""
    bc = bc or BoundaryCondition()
    g = field.grid
    p_star, u_star = edge_contact(field, eos, bc)
    volumes = g.dx + dt * (u_star[1:] - u_star[:-1])
    if np.any(~(volumes > 0.0)):
        i = int(np.argmax(~(volumes > 0.0)))
        raise StepTooLargeError(f"Lagrangian volume of cell {i} is non-positive for dt={dt}")
    U = _line(field)[:, g.gx : g.gx + g.nx]
    mass = U[RHO] * g.dx
    pu = p_star * u_star
    u_lag = (U[MOM_X] * g.dx - dt * (p_star[1:] - p_star[:-1])) / mass
    E_lag = (U[ENERGY] * g.dx - dt * (pu[1:] - pu[:-1])) / mass
    lag = LagrangianField(mass / volumes, u_lag, U[MOM_Y] / U[RHO], E_lag)
    return lag, LagrangianCellGeometry(volumes, u_star, p_star)


def backward_convection(lag: LagrangianField, geom: LagrangianCellGeometry, dx: float) -> LagrangianField:
    """Return the moved cells to their Eulerian position.

    Mass is kept, so density scales with ``|K^L| / |K|``; velocity and
    specific total energy are passed through unchanged.
    """
    return LagrangianField((geom.volumes / dx) * lag.rho, lag.u, lag.v, lag.E)


def _remap_edges(Ustar: CellField, u_star: np.ndarray, eos: PerfectGasEos, bc, order: int, beta: float) -> np.ndarray:
    """Upwind convective fluxes ``U_A u*`` on every edge."""
    g = Ustar.grid
    apply_boundary(Ustar, bc)
    U = _line(Ustar)
    if order == 1:
        lo, hi = limited_traces(U, g.gx, beta, 1)
    else:
        rho = U[RHO]
        u = U[MOM_X] / rho
        v = U[MOM_Y] / rho
        p = pressure(rho, U[MOM_X], U[MOM_Y], U[ENERGY], eos.gamma)
        check_physical(rho, p, "remap cell")
        tr = [limited_traces(q, g.gx, beta) for q in (rho, u, v, p)]
        lo_w = [t[0] for t in tr]
        hi_w = [t[1] for t in tr]
        check_physical(lo_w[0], lo_w[3], "remap trace")
        check_physical(hi_w[0], hi_w[3], "remap trace")

        def cons(r, uu, vv, pp):
            return np.stack([r, r * uu, r * vv, pp / (eos.gamma - 1.0) + 0.5 * r * (uu * uu + vv * vv)])

        lo, hi = cons(*lo_w), cons(*hi_w)
    UA = np.where(u_star > 0.0, lo, np.where(u_star < 0.0, hi, 0.5 * (lo + hi)))
    return UA * u_star


def _star_field(grid, rho, u, v, E) -> CellField:
    star = CellField.zeros(grid, N_HYDRO)
    s = star.data[:, 0, grid.gx : grid.gx + grid.nx]
    s[RHO] = rho
    s[MOM_X] = rho * u
    s[MOM_Y] = rho * v
    s[ENERGY] = rho * E
    return star


def remap_flux_step_1d(
    lag: LagrangianField,
    geom: LagrangianCellGeometry,
    dt: float,
    grid,
    eos: PerfectGasEos,
    bc: BoundaryCondition | None = None,
    order: int = 1,
    beta: float = 1.5,
) -> CellField:
    """Backward then forward convection; returns the Eulerian field at the new time."""
    return _remap(lag, geom, dt, grid, eos, bc or BoundaryCondition(), order, beta)[0]


def _remap(lag, geom, dt, grid, eos, bc, order, beta):
    if np.any(np.abs(geom.edge_velocity) * dt > grid.dx):
        raise StepTooLargeError(f"convection CFL exceeds 1 for dt={dt}")
    back = backward_convection(lag, geom, grid.dx)
    star = _star_field(grid, back.rho, back.u, back.v, back.E)
    conv = _remap_edges(star, geom.edge_velocity, eos, bc, order, beta)
    out = star.copy()
    s = out.data[:, 0, grid.gx : grid.gx + grid.nx]
    s -= (dt / grid.dx) * (conv[:, 1:] - conv[:, :-1])
    return out, conv


def pressure_fluxes(geom: LagrangianCellGeometry) -> np.ndarray:
    """Pressure part ``(0, p*, 0, p* u*)`` of the edge flux."""
    z = np.zeros_like(geom.edge_pressure)
    return np.stack([z, geom.edge_pressure, z, geom.edge_pressure * geom.edge_velocity])


def lagremap_step(field: CellField, dt: float, eos: PerfectGasEos, bc: BoundaryCondition | None = None,
                  order: int = 1, beta: float = 1.5):
    """One Lagrange + remap step; returns ``(field, total edge flux)``.

    The total edge flux is the sum of pressure and convective fluxes, so
    ``U^{n+1} = U^n - dt/dx * diff(flux)`` up to round-off.
    """
    bc = bc or BoundaryCondition()
    lag, geom = lagrange_step_1d(field, dt, eos, bc)
    out, conv = _remap(lag, geom, dt, field.grid, eos, bc, order, beta)
    return out, pressure_fluxes(geom) + conv


def lagremap_step_1d(field: CellField, dt: float, eos: PerfectGasEos, bc: BoundaryCondition | None = None,
                     order: int = 1, beta: float = 1.5) -> CellField:
    """Composition of :func:`lagrange_step_1d` and :func:`remap_flux_step_1d`."""
    return lagremap_step(field, dt, eos, bc, order, beta)[0]


def lagremap_flux_balance(field: CellField, dt: float, eos: PerfectGasEos, bc: BoundaryCondition | None = None,
                          order: int = 1, beta: float = 1.5) -> CellField:
    """Same step written directly as one conservative flux balance.

    ``U^{n+1} = U^n - dt/|K| sum_A (pi_A . nu + U*_A u*_A)`` with
    ``|K| U* = |K| U^n - dt sum_A pi_A . nu`` formed in conserved
    variables; an independent arithmetic path to the composed step.
    """
    bc = bc or BoundaryCondition()
    g = field.grid
    p_star, u_star = edge_contact(field, eos, bc)
    geom = LagrangianCellGeometry(g.dx + dt * (u_star[1:] - u_star[:-1]), u_star, p_star)
    if np.any(~(geom.volumes > 0.0)):
        raise StepTooLargeError(f"a Lagrangian volume is non-positive for dt={dt}")
    pf = pressure_fluxes(geom)
    U = _line(field)[:, g.gx : g.gx + g.nx]
    ustar_vals = U - (dt / g.dx) * (pf[:, 1:] - pf[:, :-1])
    star = CellField.zeros(g, N_HYDRO)
    star.data[:, 0, g.gx : g.gx + g.nx] = ustar_vals
    conv = _remap_edges(star, u_star, eos, bc, order, beta)
    total = pf + conv
    out = field.copy()
    out.data[:, 0, g.gx : g.gx + g.nx] = U - (dt / g.dx) * (total[:, 1:] - total[:, :-1])
    return out
