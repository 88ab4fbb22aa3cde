"""MUSCL reconstruction of primitive variables with the Sweby limiter."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from .euler import PerfectGasEos, PrimitiveState, check_physical, pressure
from .grid import CellField, MOM_X, MOM_Y, RHO, ENERGY

Direction = Literal["x", "y"]


@dataclass(frozen=True)
class LimiterParams:
    """Sweby limiter coefficient; ``beta = 1`` is minmod, ``beta = 2`` superbee."""

    beta: float = 1.5

    def __post_init__(self):
        if not (1.0 <= self.beta <= 2.0):
            raise ValueError(f"beta must lie in [1, 2], got {self.beta}")


class EdgeStates(NamedTuple):
    """Traces on each side of every edge: ``minus`` from the low-side cell."""

    minus: PrimitiveState
    plus: PrimitiveState


def sweby_limiter(a, b, beta: float):
    """Sweby's limited slope ``phi(a, b)``.

    Zero when ``a*b <= 0``, otherwise
    ``sign(a) * max(min(|a|, beta|b|), min(beta|a|, |b|))``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    abs_a, abs_b = np.abs(a), np.abs(b)
    mag = np.maximum(np.minimum(abs_a, beta * abs_b), np.minimum(beta * abs_a, abs_b))
    out = np.where(a * b > 0.0, np.sign(a) * mag, 0.0)
    return out if out.ndim else float(out)


def limited_slopes(q: np.ndarray, beta: float) -> np.ndarray:
    """Limited undivided slopes along the last axis.

    The result has the same shape as ``q``; the first and last cells,
    which lack a neighbour, get zero slope.
    """
    s = np.zeros_like(q)
    d = np.diff(q, axis=-1)
    s[..., 1:-1] = sweby_limiter(d[..., 1:], d[..., :-1], beta)
    return s


def limited_traces(q: np.ndarray, ghost: int, beta: float, order: int = 2):
    """Edge traces along the last axis of ghosted line data.

    ``q[..., ghost:-ghost]`` are interior cells.  Returns ``(minus, plus)``
    with one entry per interior edge (``n + 1`` of them): ``minus`` is the
    right-face value of the low-side cell, ``plus`` the left-face value of
    the high-side cell.  ``order=1`` gives piecewise-constant traces.
    """
    n = q.shape[-1] - 2 * ghost
    lo = q[..., ghost - 1 : ghost + n]
    hi = q[..., ghost : ghost + n + 1]
    if order == 1:
        return lo, hi
    s = limited_slopes(q, beta)
    return lo + 0.5 * s[..., ghost - 1 : ghost + n], hi - 0.5 * s[..., ghost : ghost + n + 1]


def muscl_edge_states(
    field: CellField,
    eos: PerfectGasEos,
    params: LimiterParams,
    direction: Direction = "x",
    order: int = 2,
) -> EdgeStates:
    """Limited primitive traces on every interior edge of ``direction``.

    Expects ghost cells to be filled.  x-edges come shaped ``(ny, nx+1)``
    and y-edges ``(ny+1, nx)``.
    """
    g = field.grid
    U = field.data
    if direction == "x":
        lines = U[:, g.gy : g.gy + g.ny, :]
        ghost = g.gx
    elif direction == "y":
        if g.dim != 2:
            raise ValueError("a 1D field has no y-edges")
        lines = np.swapaxes(U[:, :, g.gx : g.gx + g.nx], 1, 2)
        ghost = g.gy
    else:
        raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")

    rho = lines[RHO]
    p = pressure(rho, lines[MOM_X], lines[MOM_Y], lines[ENERGY], eos.gamma)
    check_physical(rho, p, "cell", direction=direction)
    prims = (rho, lines[MOM_X] / rho, lines[MOM_Y] / rho, p)
    traces = [limited_traces(q, ghost, params.beta, order) for q in prims]
    minus = PrimitiveState(*(t[0] for t in traces))
    plus = PrimitiveState(*(t[1] for t in traces))
    check_physical(minus.rho, minus.p, "minus trace", direction=direction)
    check_physical(plus.rho, plus.p, "plus trace", direction=direction)
    if direction == "y":
        minus = PrimitiveState(*(a.T for a in minus))
        plus = PrimitiveState(*(a.T for a in plus))
    return EdgeStates(minus, plus)
