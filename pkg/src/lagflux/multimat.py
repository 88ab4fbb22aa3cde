"""Multimaterial transport through Eulerian edge mass fluxes.

Each material carries a partial density ``rho*y_k`` advected with the
hydrodynamic mass flux.  Mixed cells use one velocity and one pressure
with an energy-consistent effective adiabatic index.  Also provides the
Rider-Kothe single-vortex passive-scalar benchmark and the triple-point
initial data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, StepTooLargeError
from .euler import total_energy
from .grid import CartesianGrid, CellField, N_HYDRO
from .reconstruct import limited_traces


@dataclass(frozen=True)
class MaterialSet:
    """Adiabatic indices of the materials, in component order."""

    gammas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        if not self.gammas:
            raise ConfigError("a material set needs at least one material")
        for g in self.gammas:
            if not (1.0 < g <= 3.0):
                raise ConfigError(f"material gamma must lie in (1, 3], got {g}")

    @property
    def n_materials(self) -> int:
        return len(self.gammas)

    @property
    def gamma(self) -> float:
        """Index of the first material; used only where a single value is needed."""
        return self.gammas[0]

    def gamma_from_fractions(self, fractions):
        """Effective index of cells with mass fractions ``fractions[k]``."""
        return mixed_cell_gamma(self, fractions)


def mixed_cell_gamma(materials: MaterialSet, fractions):
    """Effective gamma from ``1/(g - 1) = sum_k y_k / (g_k - 1)``.

    A pure cell returns its material's gamma exactly.
    """
    fractions = [np.asarray(y, dtype=float) for y in fractions]
    if len(fractions) != materials.n_materials:
        raise ValueError(f"expected {materials.n_materials} fractions, got {len(fractions)}")
    inv = sum(y / (g - 1.0) for y, g in zip(fractions, materials.gammas))
    gamma = 1.0 + 1.0 / inv
    # pure cells: avoid the round trip through 1/(1/(g-1))
    for y, g in zip(fractions, materials.gammas):
        gamma = np.where(y == 1.0, g, gamma)
    return gamma if np.ndim(gamma) else float(gamma)


def mass_fraction_fluxes(mass_flux, upwind_fractions):
    """Per-material mass fluxes ``mass_flux * y_k`` with ``y_k`` from the upwind side.

    The fractions are renormalised so the material fluxes sum to the
    total mass flux.
    """
    y = np.asarray(upwind_fractions, dtype=float)
    total = y.sum(axis=0)
    return np.asarray(mass_flux) * (y / total)


# --------------------------------------------------------------------------
# passive scalar advection


def rider_kothe_streamfunction(x, y):
    return np.sin(np.pi * x) ** 2 * np.sin(np.pi * y) ** 2 / np.pi


def rider_kothe_velocity(x, y, t: float, period: float = 12.0):
    """Single-vortex velocity on the unit square, reversed at ``t = period/2``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    scale = math.cos(math.pi * t / period)
    u = -np.sin(np.pi * x) ** 2 * np.sin(2.0 * np.pi * y) * scale
    v = np.sin(2.0 * np.pi * x) * np.sin(np.pi * y) ** 2 * scale
    return u, v


def rider_kothe_edge_velocity(grid: CartesianGrid, t: float, period: float = 12.0):
    """Normal edge velocities from stream-function differences at cell corners.

    x-edge velocities come shaped ``(ny, nx+1)`` and y-edge velocities
    ``(ny+1, nx)``.  The discrete divergence vanishes to round-off and the
    wall-normal velocities are exactly zero.
    """
    xe, ye = grid.x_edges, grid.y_edges
    X, Y = np.meshgrid(xe, ye)
    psi = rider_kothe_streamfunction(X, Y) * math.cos(math.pi * t / period)
    u = -(psi[1:, :] - psi[:-1, :]) / grid.dy
    v = (psi[:, 1:] - psi[:, :-1]) / grid.dx
    u[:, 0] = u[:, -1] = 0.0
    v[0, :] = v[-1, :] = 0.0
    return u, v


def disk_indicator(grid: CartesianGrid, center=(0.5, 0.75), radius=0.15, samples: int = 4):
    """Cell-averaged indicator of a disk, by sub-cell point sampling."""
    offs = (np.arange(samples) + 0.5) / samples
    X = grid.x_edges[:-1, None] + offs[None, :] * grid.dx
    Y = grid.y_edges[:-1, None] + offs[None, :] * grid.dy
    xs = X.reshape(-1)
    ys = Y.reshape(-1)
    XX, YY = np.meshgrid(xs, ys)
    inside = ((XX - center[0]) ** 2 + (YY - center[1]) ** 2 <= radius**2).astype(float)
    return inside.reshape(grid.ny, samples, grid.nx, samples).mean(axis=(1, 3))


def _pad(z: np.ndarray, g: int, periodic: bool) -> np.ndarray:
    return np.pad(z, g, mode="wrap" if periodic else "edge")


def _scalar_rhs(z, u, v, grid: CartesianGrid, beta: float, periodic: bool):
    g = 2
    zp = _pad(z, g, periodic)
    lo, hi = limited_traces(zp[g:-g, :], g, beta)
    fx = u * np.where(u > 0.0, lo, hi)
    lo, hi = limited_traces(zp[:, g:-g].T, g, beta)
    fy = v * np.where(v > 0.0, lo.T, hi.T)
    return (fx[:, 1:] - fx[:, :-1]) / grid.dx + (fy[1:, :] - fy[:-1, :]) / grid.dy


def advection_dt(u, v, grid: CartesianGrid, cfl: float) -> float:
    rate = np.max(
        np.maximum(np.abs(u[:, 1:]), np.abs(u[:, :-1])) / grid.dx
        + np.maximum(np.abs(v[1:, :]), np.abs(v[:-1, :])) / grid.dy
    )
    return math.inf if rate == 0.0 else cfl / rate


def advect_scalar_2d(
    z: np.ndarray,
    velocity,
    dt: float,
    grid: CartesianGrid,
    t: float = 0.0,
    beta: float = 1.5,
    periodic: bool = False,
) -> np.ndarray:
    """One Heun step of conservative, limited upwind advection of ``z``.

    ``velocity`` is a pair of edge-velocity arrays or a callable of time
    returning one.  Closed domains need zero wall-normal velocity.
    """
    vel = velocity if callable(velocity) else (lambda _t: velocity)
    u0, v0 = vel(t)
    u1, v1 = vel(t + dt)
    for u, v in ((u0, v0), (u1, v1)):
        if dt > advection_dt(u, v, grid, 1.0):
            raise StepTooLargeError(f"advection CFL exceeds 1 for dt={dt}")
    r0 = _scalar_rhs(z, u0, v0, grid, beta, periodic)
    z1 = z - dt * r0
    r1 = _scalar_rhs(z1, u1, v1, grid, beta, periodic)
    return z - dt * (0.5 * (r0 + r1))


@dataclass
class AdvectionRun:
    z0: np.ndarray
    z: np.ndarray
    times: list[float]
    totals: list[float]
    z_min: list[float]
    z_max: list[float]
    snapshots: dict[float, np.ndarray]

    @property
    def l1_error(self) -> float:
        return float(np.abs(self.z - self.z0).mean())


def run_rider_kothe(
    n: int = 128,
    period: float = 12.0,
    t_final: float | None = None,
    cfl: float = 0.25,
    beta: float = 1.5,
    snapshot_times: Sequence[float] = (),
    center: tuple[float, float] = (0.5, 0.75),
    radius: float = 0.15,
    grid: CartesianGrid | None = None,
    max_steps: int | None = None,
) -> AdvectionRun:
    """Forward-backward single-vortex advection of a disk on an ``n x n`` grid.

    ``grid`` overrides ``n``.  The run stops early after ``max_steps``
    steps; ``times[-1]`` then tells where.
    """
    grid = grid or CartesianGrid.uniform((0.0, 1.0), n, (0.0, 1.0), n, dim=2)
    t_final = period if t_final is None else t_final
    z0 = disk_indicator(grid, center, radius)
    z = z0.copy()
    # |cos| <= 1, so the t=0 bound holds for all times
    dt_nominal = advection_dt(*rider_kothe_edge_velocity(grid, 0.0, period), grid, cfl)
    t = 0.0
    steps = 0
    cap = math.inf if max_steps is None else max_steps
    targets = sorted({float(s) for s in snapshot_times if 0.0 < s <= t_final} | {t_final})
    run = AdvectionRun(z0, z, [0.0], [float(z.sum())], [float(z.min())], [float(z.max())], {})
    if 0.0 in snapshot_times:
        run.snapshots[0.0] = z0.copy()
    vel = lambda tt: rider_kothe_edge_velocity(grid, tt, period)  # noqa: E731
    for target in targets:
        while t < target and steps < cap:
            dt = min(dt_nominal, target - t)
            z = advect_scalar_2d(z, vel, dt, grid, t=t, beta=beta)
            t = target if dt == target - t else t + dt
            steps += 1
            run.times.append(t)
            run.totals.append(float(z.sum()))
            run.z_min.append(float(z.min()))
            run.z_max.append(float(z.max()))
        if t < target:
            break
        if target in snapshot_times:
            run.snapshots[target] = z.copy()
    run.z = z
    return run


# --------------------------------------------------------------------------
# triple point

@dataclass(frozen=True)
class Region:
    """Axis-aligned box ``[x0, x1] x [y0, y1]`` with a uniform primitive state."""

    x: tuple[float, float]
    y: tuple[float, float]
    rho: float
    u: float
    v: float
    p: float
    material: int = 0

    @property
    def area(self) -> float:
        return (self.x[1] - self.x[0]) * (self.y[1] - self.y[0])

    def contains(self, X, Y):
        return (X >= self.x[0]) & (X < self.x[1]) & (Y >= self.y[0]) & (Y < self.y[1])


TRIPLE_POINT_REGIONS = (
    Region((0.0, 1.0), (0.0, 3.0), 1.0, 0.0, 0.0, 1.0, 0),
    Region((1.0, 7.0), (1.5, 3.0), 0.125, 0.0, 0.0, 0.1, 1),
    Region((1.0, 7.0), (0.0, 1.5), 1.0, 0.0, 0.0, 0.1, 2),
)
TRIPLE_POINT_GAMMAS = (1.5, 1.4, 1.5)


def fill_regions(grid: CartesianGrid, regions: Sequence[Region], materials: MaterialSet | None, eos_gamma=None) -> CellField:
    """Initial field from non-overlapping regions covering the domain.

    Cells are assigned by their centre.  The domain's upper edges belong
    to the regions touching them.
    """
    X, Y = grid.meshgrid()
    x_hi = grid.origin[0] + grid.nx * grid.dx
    y_hi = grid.origin[1] + grid.ny * grid.dy
    count = np.zeros(X.shape, dtype=int)
    n_mat = materials.n_materials if materials is not None else 0
    values = np.zeros((N_HYDRO + n_mat,) + X.shape)
    for r in regions:
        # close the box on the domain boundary
        x1 = math.inf if r.x[1] >= x_hi else r.x[1]
        y1 = math.inf if r.y[1] >= y_hi else r.y[1]
        if grid.dim == 1:
            m = (X >= r.x[0]) & (X < x1)
        else:
            m = (X >= r.x[0]) & (X < x1) & (Y >= r.y[0]) & (Y < y1)
        count += m
        if materials is not None:
            if not (0 <= r.material < n_mat):
                raise ConfigError(f"region material {r.material} out of range")
            gamma = materials.gammas[r.material]
        else:
            gamma = eos_gamma
        values[0][m] = r.rho
        values[1][m] = r.rho * r.u
        values[2][m] = r.rho * r.v
        values[3][m] = total_energy(r.rho, r.u, r.v, r.p, gamma)
        if materials is not None:
            values[N_HYDRO + r.material][m] = r.rho
    if np.any(count > 1):
        raise ConfigError("initial regions overlap")
    if np.any(count == 0):
        raise ConfigError("initial regions do not cover the domain")
    return CellField.from_interior(grid, values)


def setup_triple_point(config=None):
    """Triple-point grid, initial field and material set.

    ``config`` may override mesh counts, regions and gammas; without it
    the defaults use a 256 x 110 mesh on (0, 7) x (0, 3).
    """
    if config is None:
        grid = CartesianGrid.uniform((0.0, 7.0), 256, (0.0, 3.0), 110, dim=2)
        regions, gammas = TRIPLE_POINT_REGIONS, TRIPLE_POINT_GAMMAS
    else:
        from .grid import build_grid

        grid = build_grid(config)
        regions = config.regions or TRIPLE_POINT_REGIONS
        gammas = config.material_gammas or TRIPLE_POINT_GAMMAS
    materials = MaterialSet(gammas)
    return grid, fill_regions(grid, regions, materials), materials
