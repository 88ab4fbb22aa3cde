"""Shared helpers for the test suite."""

from __future__ import annotations

import json
import math
import time
from pathlib import Path

import numpy as np

from lagflux.config import parse_case
from lagflux.euler import PerfectGasEos, PrimitiveState
from lagflux.oracle import exact_profile, exact_riemann
from lagflux.runner import build_case
from lagflux.scheme import advance, initial_state, primitive_fields

BASELINES = json.loads((Path(__file__).parent / "baselines.json").read_text())


def run_preset(name: str, **overrides):
    """Run a preset (with config overrides) to ``t_final``; returns ``(case, state, wall seconds)``."""
    cfg = parse_case(name)
    if overrides:
        cfg = cfg.replace(**overrides)
    case = build_case(cfg)
    t0 = time.perf_counter()
    state = advance(initial_state(case.field, case.eos), case.grid, case.bc, case.eos, case.params, case.controls)
    return case, state, time.perf_counter() - t0


def tube_states(cfg):
    (rl, ul, pl), (rr, ur, pr) = cfg.left_state, cfg.right_state
    return PrimitiveState(rl, ul, 0.0, pl), PrimitiveState(rr, ur, 0.0, pr)


def exact_at_centers(case):
    cfg = case.config
    W_L, W_R = tube_states(cfg)
    return exact_profile(W_L, W_R, PerfectGasEos(cfg.gamma), case.grid.x_centers, cfg.t_final, x0=cfg.x_discontinuity)


def l1_rho(case, state) -> float:
    ex = exact_at_centers(case)
    return float(np.abs(state.field.interior[0, 0] - ex.rho).sum() * case.grid.dx)


def wave_positions(case):
    """Exact head/tail/contact/shock positions at ``t_final``."""
    cfg = case.config
    W_L, W_R = tube_states(cfg)
    sol = exact_riemann(W_L, W_R, PerfectGasEos(cfg.gamma))
    x0, t = cfg.x_discontinuity, cfg.t_final
    return sol, {
        "left": tuple(x0 + s * t for s in sol.left_speeds),
        "contact": x0 + sol.u_star * t,
        "right": tuple(x0 + s * t for s in sol.right_speeds),
    }


def prim(case, state):
    return {k: v[0] for k, v in primitive_fields(state.field, case.eos).items()}


# --------------------------------------------------------------------------
# straight-line scalar reference for one forward-Euler stage in 1D


def _phi(a: float, b: float, beta: float) -> float:
    if a * b <= 0.0:
        return 0.0
    s = 1.0 if a > 0 else -1.0
    a, b = abs(a), abs(b)
    return s * max(min(a, beta * b), min(beta * a, b))


def scalar_reference_stage(rho, u, p, gamma, dx, dt, beta):
    """One MUSCL + Lagrangian-HLL forward-Euler stage, transmissive ends, plain loops."""
    n = len(rho)
    g = 2
    R = [rho[0]] * g + list(rho) + [rho[-1]] * g
    U = [u[0]] * g + list(u) + [u[-1]] * g
    P = [p[0]] * g + list(p) + [p[-1]] * g
    m = n + 2 * g

    def slopes(q):
        s = [0.0] * m
        for i in range(1, m - 1):
            s[i] = _phi(q[i] - q[i - 1], q[i + 1] - q[i], beta)
        return s

    sr, su, sp = slopes(R), slopes(U), slopes(P)
    flux = []
    for e in range(n + 1):
        i, j = g - 1 + e, g + e  # cells left and right of edge e
        rl, ul, pl = R[i] + 0.5 * sr[i], U[i] + 0.5 * su[i], P[i] + 0.5 * sp[i]
        rr, ur, pr = R[j] - 0.5 * sr[j], U[j] - 0.5 * su[j], P[j] - 0.5 * sp[j]
        cl = math.sqrt(gamma * pl / rl)
        cr = math.sqrt(gamma * pr / rr)
        cm = max(cl, cr)
        ps = (rr * pl + rl * pr) / (rl + rr) - rl * rr / (rl + rr) * cm * (ur - ul)
        us = (rl * ul + rr * ur) / (rl + rr) - (pr - pl) / ((rl + rr) * cm)
        El = pl / (gamma - 1) + 0.5 * rl * ul * ul
        Er = pr / (gamma - 1) + 0.5 * rr * ur * ur
        if us > 0:
            A = (rl, rl * ul, El)
        elif us < 0:
            A = (rr, rr * ur, Er)
        else:
            A = (0.5 * (rl + rr), 0.5 * (rl * ul + rr * ur), 0.5 * (El + Er))
        flux.append((A[0] * us, A[1] * us + ps, A[2] * us + ps * us))
    out = []
    for k in range(n):
        r0 = rho[k]
        q = (r0, r0 * u[k], p[k] / (gamma - 1) + 0.5 * r0 * u[k] * u[k])
        out.append(tuple(q[c] - dt / dx * (flux[k + 1][c] - flux[k][c]) for c in range(3)))
    return np.array(out).T
