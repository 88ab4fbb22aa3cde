"""Uniform Cartesian meshes, ghosted cell storage and boundary conditions."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Literal

import numpy as np

from .errors import ConfigError

BoundaryKind = Literal["transmissive", "reflective", "periodic"]
BOUNDARY_KINDS = ("transmissive", "reflective", "periodic")

# component layout of a CellField
RHO, MOM_X, MOM_Y, ENERGY = 0, 1, 2, 3
N_HYDRO = 4


@dataclass(frozen=True)
class CartesianGrid:
    """Uniform mesh of ``nx * ny`` cells.

    In 1D ``ny == 1`` and no ghost layers are stored along y.
    """

    nx: int
    ny: int
    dx: float
    dy: float
    origin: tuple[float, float] = (0.0, 0.0)
    dim: int = 1
    ghost_width: int = 2

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ConfigError(f"dim must be 1 or 2, got {self.dim}")
        if self.nx < 1 or self.ny < 1:
            raise ConfigError(f"cell counts must be >= 1, got nx={self.nx}, ny={self.ny}")
        if self.dim == 1 and self.ny != 1:
            raise ConfigError("a 1D grid has ny == 1")
        if not (self.dx > 0 and self.dy > 0):
            raise ConfigError(f"cell sizes must be positive, got dx={self.dx}, dy={self.dy}")
        if self.ghost_width < 2:
            raise ConfigError("ghost_width must be >= 2")

    @classmethod
    def uniform(cls, x_range, nx, y_range=(0.0, 1.0), ny=1, dim=None, ghost_width=2):
        if dim is None:
            dim = 1 if ny == 1 else 2
        x0, x1 = map(float, x_range)
        y0, y1 = map(float, y_range)
        if not (x1 > x0 and y1 > y0):
            raise ConfigError(f"domain extents must be positive, got x={x_range}, y={y_range}")
        if nx < 1 or ny < 1:
            raise ConfigError(f"cell counts must be >= 1, got nx={nx}, ny={ny}")
        return cls(int(nx), int(ny), (x1 - x0) / nx, (y1 - y0) / ny, (x0, y0), dim, ghost_width)

    @property
    def gx(self) -> int:
        return self.ghost_width

    @property
    def gy(self) -> int:
        return self.ghost_width if self.dim == 2 else 0

    @property
    def shape(self) -> tuple[int, int]:
        """Storage shape ``(rows, columns)`` including ghosts."""
        return (self.ny + 2 * self.gy, self.nx + 2 * self.gx)

    @property
    def interior(self) -> tuple[slice, slice]:
        return (slice(self.gy, self.gy + self.ny), slice(self.gx, self.gx + self.nx))

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy if self.dim == 2 else self.dx

    @property
    def x_centers(self) -> np.ndarray:
        return self.origin[0] + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y_centers(self) -> np.ndarray:
        return self.origin[1] + (np.arange(self.ny) + 0.5) * self.dy

    @property
    def x_edges(self) -> np.ndarray:
        return self.origin[0] + np.arange(self.nx + 1) * self.dx

    @property
    def y_edges(self) -> np.ndarray:
        return self.origin[1] + np.arange(self.ny + 1) * self.dy

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinates shaped ``(ny, nx)``."""
        return np.meshgrid(self.x_centers, self.y_centers)


def build_grid(config) -> CartesianGrid:
    """Grid for a :class:`~lagflux.config.CaseConfig`."""
    return CartesianGrid.uniform(
        config.x_range, config.nx, config.y_range, config.ny if config.dim == 2 else 1, dim=config.dim
    )


@dataclass
class CellField:
    """Per-cell conserved data, one contiguous plane per component.

    ``data`` has shape ``(n_components, rows, columns)`` with ghosts.
    Components are ``rho, rho*u, rho*v, rho*E`` followed by one partial
    density ``rho*y_k`` per material.
    """

    grid: CartesianGrid
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3 or self.data.shape[1:] != self.grid.shape:
            raise ValueError(f"data shape {self.data.shape} does not match grid storage {self.grid.shape}")
        if self.data.shape[0] < N_HYDRO:
            raise ValueError("a CellField needs at least 4 components")

    @classmethod
    def zeros(cls, grid: CartesianGrid, n_components: int = N_HYDRO) -> "CellField":
        return cls(grid, np.zeros((n_components,) + grid.shape))

    @classmethod
    def from_interior(cls, grid: CartesianGrid, values: np.ndarray) -> "CellField":
        """Wrap interior values shaped ``(n_components, ny, nx)``; ghosts are zero."""
        values = np.asarray(values, dtype=float)
        f = cls.zeros(grid, values.shape[0])
        f.interior[...] = values.reshape((values.shape[0], grid.ny, grid.nx))
        return f

    @property
    def n_components(self) -> int:
        return self.data.shape[0]

    @property
    def n_materials(self) -> int:
        return self.n_components - N_HYDRO

    @property
    def interior(self) -> np.ndarray:
        return self.data[(slice(None),) + self.grid.interior]

    def copy(self) -> "CellField":
        return CellField(self.grid, self.data.copy())

    def totals(self) -> np.ndarray:
        """Discrete integral of every component over interior cells."""
        return self.interior.sum(axis=(1, 2)) * self.grid.cell_volume


@dataclass(frozen=True)
class BoundaryCondition:
    x_low: BoundaryKind = "transmissive"
    x_high: BoundaryKind = "transmissive"
    y_low: BoundaryKind = "transmissive"
    y_high: BoundaryKind = "transmissive"

    def __post_init__(self):
        for side in ("x_low", "x_high", "y_low", "y_high"):
            kind = getattr(self, side)
            if kind not in BOUNDARY_KINDS:
                raise ConfigError(f"unknown boundary kind {kind!r} for {side}")
        if (self.x_low == "periodic") != (self.x_high == "periodic"):
            raise ConfigError("periodic boundaries must be paired on x_low and x_high")
        if (self.y_low == "periodic") != (self.y_high == "periodic"):
            raise ConfigError("periodic boundaries must be paired on y_low and y_high")

    @classmethod
    def all(cls, kind: BoundaryKind) -> "BoundaryCondition":
        return cls(kind, kind, kind, kind)


def _fill_axis(a: np.ndarray, axis: int, g: int, n: int, low: str, high: str, normal_comp: int) -> None:
    """Fill ``g`` ghost layers on both ends of ``axis`` of ``a`` (component axis 0)."""

    def sl(i):
        idx = [slice(None)] * a.ndim
        idx[axis] = i
        return tuple(idx)

    for k in range(g):
        lo_ghost, hi_ghost = g - 1 - k, g + n + k
        if low == "periodic":
            a[sl(lo_ghost)] = a[sl(n + lo_ghost)]
            a[sl(hi_ghost)] = a[sl(hi_ghost - n)]
            continue
        if low == "transmissive":
            a[sl(lo_ghost)] = a[sl(g)]
        else:
            a[sl(lo_ghost)] = a[sl(g + k)]
            a[(normal_comp,) + sl(lo_ghost)[1:]] *= -1.0
        if high == "transmissive":
            a[sl(hi_ghost)] = a[sl(g + n - 1)]
        else:
            a[sl(hi_ghost)] = a[sl(g + n - 1 - k)]
            a[(normal_comp,) + sl(hi_ghost)[1:]] *= -1.0


def apply_boundary(field: CellField, bc: BoundaryCondition) -> CellField:
    """Fill ghost cells in place and return ``field``.

    x ghosts are filled first over every row, then y ghosts over every
    column, so corner ghosts are defined too.
    """
    g = field.grid
    _fill_axis(field.data, 2, g.gx, g.nx, bc.x_low, bc.x_high, MOM_X)
    if g.dim == 2:
        _fill_axis(field.data, 1, g.gy, g.ny, bc.y_low, bc.y_high, MOM_Y)
    return field
