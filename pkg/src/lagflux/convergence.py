"""Mesh-convergence studies of shock tubes against the exact solution."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import CaseConfig
from .errors import ConfigError
from .euler import PerfectGasEos, PrimitiveState
from .oracle import exact_profile
from .runner import build_case
from .scheme import advance, initial_state, primitive_fields


@dataclass(frozen=True)
class ErrorRow:
    n: int
    l1_rho: float
    l1_u: float
    l1_p: float
    order: float | None


def observed_order(e_coarse: float, e_fine: float, n_coarse: int, n_fine: int) -> float:
    """``log(e_coarse / e_fine) / log(n_fine / n_coarse)``; 0 for equal meshes."""
    if n_coarse == n_fine:
        return 0.0
    return math.log(e_coarse / e_fine) / math.log(n_fine / n_coarse)


def shock_tube_errors(cfg: CaseConfig, n: int) -> tuple[float, float, float]:
    """L1 errors of rho, u and p at ``t_final`` on an ``n``-cell mesh."""
    if not cfg.is_shock_tube:
        raise ConfigError(f"case {cfg.name!r} has no exact solution")
    c = build_case(cfg.replace(nx=n, dump_times=()))
    state = advance(initial_state(c.field, c.eos), c.grid, c.bc, c.eos, c.params, c.controls)
    prim = primitive_fields(state.field, c.eos)
    (rl, ul, pl), (rr, ur, pr) = cfg.left_state, cfg.right_state
    ex = exact_profile(PrimitiveState(rl, ul, 0.0, pl), PrimitiveState(rr, ur, 0.0, pr), PerfectGasEos(cfg.gamma), c.grid.x_centers,
                       cfg.t_final, x0=cfg.x_discontinuity)
    dx = c.grid.dx
    pairs = ((prim["rho"], ex.rho), (prim["u"], ex.u), (prim["p"], ex.p))
    return tuple(float(np.sum(np.abs(num[0] - exact)) * dx) for num, exact in pairs)


def convergence_study(cfg: CaseConfig, meshes) -> list[ErrorRow]:
    rows: list[ErrorRow] = []
    for n in meshes:
        e = shock_tube_errors(cfg, int(n))
        order = None if not rows else observed_order(rows[-1].l1_rho, e[0], rows[-1].n, int(n))
        rows.append(ErrorRow(int(n), *e, order))
    return rows


def rows_csv(rows: list[ErrorRow]) -> str:
    lines = ["N,L1_rho,L1_u,L1_p,order"]
    for r in rows:
        order = "" if r.order is None else f"{r.order:.6g}"
        lines.append(f"{r.n},{r.l1_rho:.17g},{r.l1_u:.17g},{r.l1_p:.17g},{order}")
    return "\n".join(lines) + "\n"
