"""State algebra for the compressible Euler equations with a perfect gas.

Every function accepts scalars or numpy arrays of matching shape and is
pure.  One-dimensional states use the two-dimensional types with the
second velocity component set to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidStateError

__all__ = [
    "ConservedState",
    "PrimitiveState",
    "PerfectGasEos",
    "primitive_from_conserved",
    "conserved_from_primitive",
    "sound_speed",
    "physical_flux",
]


class ConservedState(NamedTuple):
    """Conserved variables ``(rho, rho*u, rho*v, rho*E)``."""

    rho: np.ndarray | float
    mom_x: np.ndarray | float
    mom_y: np.ndarray | float
    energy: np.ndarray | float

    def as_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(*map(np.asarray, self)))


class PrimitiveState(NamedTuple):
    """Primitive variables ``(rho, u, v, p)``."""

    rho: np.ndarray | float
    u: np.ndarray | float
    v: np.ndarray | float
    p: np.ndarray | float


@dataclass(frozen=True)
class PerfectGasEos:
    """Perfect gas ``p = (gamma - 1) rho e`` with ``gamma`` in (1, 3]."""

    gamma: float = 1.4

    def __post_init__(self):
        if not (1.0 < self.gamma <= 3.0):
            raise ValueError(f"gamma must lie in (1, 3], got {self.gamma}")

    # duck-typed hooks used by the flux kernels; a MaterialSet provides the same
    @property
    def n_materials(self) -> int:
        return 0

    def gamma_from_fractions(self, fractions):
        return self.gamma


def _first_bad(mask) -> dict:
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return {}
    idx = np.unravel_index(int(np.argmax(mask)), mask.shape)
    return {"cell": tuple(int(i) for i in idx) if len(idx) > 1 else int(idx[0])}


def check_physical(rho, p, what: str = "state", **context) -> None:
    """Raise :class:`InvalidStateError` unless ``rho > 0`` and ``p > 0`` everywhere.

    NaNs count as non-physical.
    """
    bad_rho = ~(np.asarray(rho) > 0.0)
    if np.any(bad_rho):
        ctx = {**_first_bad(bad_rho), **context}
        raise InvalidStateError(f"non-positive density in {what}", **ctx)
    bad_p = ~(np.asarray(p) > 0.0)
    if np.any(bad_p):
        ctx = {**_first_bad(bad_p), **context}
        raise InvalidStateError(f"non-positive pressure in {what}", **ctx)


def pressure(rho, mom_x, mom_y, energy, gamma):
    """Raw EOS pressure, no validation."""
    return (gamma - 1.0) * (energy - 0.5 * (mom_x * mom_x + mom_y * mom_y) / rho)


def total_energy(rho, u, v, p, gamma):
    """Raw total energy density, no validation."""
    return p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v)


def primitive_from_conserved(U: ConservedState, eos: PerfectGasEos) -> PrimitiveState:
    rho = np.asarray(U.rho, dtype=float)
    if np.any(~(rho > 0.0)):
        raise InvalidStateError("non-positive density", **_first_bad(~(rho > 0.0)))
    p = pressure(rho, U.mom_x, U.mom_y, U.energy, eos.gamma)
    check_physical(rho, p)
    return PrimitiveState(U.rho, U.mom_x / rho, U.mom_y / rho, p)


def conserved_from_primitive(W: PrimitiveState, eos: PerfectGasEos) -> ConservedState:
    check_physical(W.rho, W.p)
    return ConservedState(
        W.rho, W.rho * W.u, W.rho * W.v, total_energy(W.rho, W.u, W.v, W.p, eos.gamma)
    )


def sound_speed(W: PrimitiveState, eos: PerfectGasEos):
    """Speed of sound ``sqrt(gamma p / rho)``."""
    check_physical(W.rho, W.p)
    return np.sqrt(eos.gamma * W.p / W.rho)


def physical_flux(W: PrimitiveState, normal, eos: PerfectGasEos) -> np.ndarray:
    """Exact Euler flux through a face of unit normal ``normal``.

    Returns an array whose leading axis holds (mass, x-momentum,
    y-momentum, energy).
    """
    check_physical(W.rho, W.p)
    nx, ny = normal
    un = W.u * nx + W.v * ny
    E = total_energy(W.rho, W.u, W.v, W.p, eos.gamma)
    return np.stack(
        np.broadcast_arrays(
            W.rho * un,
            W.rho * W.u * un + W.p * nx,
            W.rho * W.v * un + W.p * ny,
            (E + W.p) * un,
        )
    ).astype(float)
