"""Exact solution of the 1D Riemann problem for a perfect gas.

Used as a reference for error norms and the ``riemann-exact`` command.
The production time loop never imports this module.

The star pressure is the root of

    f(p; W_L) + f(p; W_R) + (u_R - u_L) = 0

where ``f`` is the shock (Rankine-Hugoniot) branch for ``p > p_K`` and the
isentropic rarefaction branch otherwise; it is found by Newton iteration
started from the usual PVRS / two-rarefaction / two-shock guesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..errors import ConvergenceError, InvalidStateError, VacuumError
from ..euler import PerfectGasEos, PrimitiveState

WaveKind = Literal["shock", "rarefaction", "none"]

MAX_ITER = 100
REL_TOL = 1e-12


def _pressure_function(p, rho, pk, ck, g):
    """Value and derivative of the one-sided pressure function at ``p``."""
    if p > pk:
        a = 2.0 / ((g + 1.0) * rho)
        b = (g - 1.0) / (g + 1.0) * pk
        q = math.sqrt(a / (p + b))
        return (p - pk) * q, q * (1.0 - 0.5 * (p - pk) / (b + p))
    ratio = p / pk
    f = 2.0 * ck / (g - 1.0) * (ratio ** ((g - 1.0) / (2.0 * g)) - 1.0)
    df = ratio ** (-(g + 1.0) / (2.0 * g)) / (rho * ck)
    return f, df


def pressure_function(p: float, W_L: PrimitiveState, W_R: PrimitiveState, gamma: float) -> float:
    """Residual ``f_L(p) + f_R(p) + u_R - u_L`` whose root is the star pressure."""
    c_l = math.sqrt(gamma * W_L.p / W_L.rho)
    c_r = math.sqrt(gamma * W_R.p / W_R.rho)
    f_l, _ = _pressure_function(p, W_L.rho, W_L.p, c_l, gamma)
    f_r, _ = _pressure_function(p, W_R.rho, W_R.p, c_r, gamma)
    return f_l + f_r + (W_R.u - W_L.u)


def _initial_guess(rl, ul, pl, cl, rr, ur, pr, cr, g):
    p_pv = 0.5 * (pl + pr) - 0.125 * (ur - ul) * (rl + rr) * (cl + cr)
    p_pv = max(p_pv, 0.0)
    p_min, p_max = min(pl, pr), max(pl, pr)
    if p_max / p_min <= 2.0 and p_min <= p_pv <= p_max:
        return p_pv
    if p_pv < p_min:
        z = (g - 1.0) / (2.0 * g)
        num = cl + cr - 0.5 * (g - 1.0) * (ur - ul)
        den = cl / pl**z + cr / pr**z
        return (num / den) ** (1.0 / z)
    gl = math.sqrt(2.0 / ((g + 1.0) * rl) / (p_pv + (g - 1.0) / (g + 1.0) * pl))
    gr = math.sqrt(2.0 / ((g + 1.0) * rr) / (p_pv + (g - 1.0) / (g + 1.0) * pr))
    return (gl * pl + gr * pr - (ur - ul)) / (gl + gr)


@dataclass(frozen=True)
class ExactRiemannSolution:
    left: PrimitiveState
    right: PrimitiveState
    gamma: float
    p_star: float
    u_star: float
    rho_star_left: float
    rho_star_right: float
    left_wave: WaveKind
    right_wave: WaveKind
    left_speeds: tuple[float, float]
    """(head, tail) of the left rarefaction, or the shock speed twice."""
    right_speeds: tuple[float, float]
    """(tail, head) of the right rarefaction, or the shock speed twice."""
    iterations: int
    residual: float


def _classify(p_star, pk):
    if abs(p_star - pk) <= 1e-14 * pk:
        return "none"
    return "shock" if p_star > pk else "rarefaction"


def exact_riemann(W_L: PrimitiveState, W_R: PrimitiveState, eos: PerfectGasEos) -> ExactRiemannSolution:
    """Solve the Riemann problem between ``W_L`` and ``W_R`` (u is the normal velocity)."""
    g = eos.gamma
    rl, ul, pl = float(W_L.rho), float(W_L.u), float(W_L.p)
    rr, ur, pr = float(W_R.rho), float(W_R.u), float(W_R.p)
    if not (rl > 0 and pl > 0 and rr > 0 and pr > 0):
        raise InvalidStateError("exact Riemann solver needs positive density and pressure")
    cl, cr = math.sqrt(g * pl / rl), math.sqrt(g * pr / rr)
    if 2.0 / (g - 1.0) * (cl + cr) <= ur - ul:
        raise VacuumError("initial data generate vacuum (pressure positivity condition violated)")

    p = _initial_guess(rl, ul, pl, cl, rr, ur, pr, cr, g)
    p = max(p, 1e-14 * min(pl, pr))
    for it in range(1, MAX_ITER + 1):
        fl, dfl = _pressure_function(p, rl, pl, cl, g)
        fr, dfr = _pressure_function(p, rr, pr, cr, g)
        p_new = p - (fl + fr + ur - ul) / (dfl + dfr)
        if p_new <= 0.0:
            p_new = 0.1 * p
        change = abs(p_new - p) / p_new
        p = p_new
        if change <= REL_TOL:
            break
    else:
        raise ConvergenceError(f"star pressure did not converge in {MAX_ITER} iterations")

    fl, _ = _pressure_function(p, rl, pl, cl, g)
    fr, _ = _pressure_function(p, rr, pr, cr, g)
    residual = fl + fr + ur - ul
    u_star = 0.5 * (ul + ur) + 0.5 * (fr - fl)

    gm = (g - 1.0) / (g + 1.0)
    left_wave = _classify(p, pl)
    right_wave = _classify(p, pr)
    if left_wave == "shock":
        ratio = p / pl
        rho_sl = rl * (ratio + gm) / (gm * ratio + 1.0)
        s = ul - cl * math.sqrt((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g))
        left_speeds = (s, s)
    else:
        rho_sl = rl * (p / pl) ** (1.0 / g)
        c_sl = cl * (p / pl) ** ((g - 1.0) / (2.0 * g))
        left_speeds = (ul - cl, u_star - c_sl)
    if right_wave == "shock":
        ratio = p / pr
        rho_sr = rr * (ratio + gm) / (gm * ratio + 1.0)
        s = ur + cr * math.sqrt((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g))
        right_speeds = (s, s)
    else:
        rho_sr = rr * (p / pr) ** (1.0 / g)
        c_sr = cr * (p / pr) ** ((g - 1.0) / (2.0 * g))
        right_speeds = (u_star + c_sr, ur + cr)

    return ExactRiemannSolution(
        left=PrimitiveState(rl, ul, float(W_L.v), pl),
        right=PrimitiveState(rr, ur, float(W_R.v), pr),
        gamma=g,
        p_star=p,
        u_star=u_star,
        rho_star_left=rho_sl,
        rho_star_right=rho_sr,
        left_wave=left_wave,
        right_wave=right_wave,
        left_speeds=left_speeds,
        right_speeds=right_speeds,
        iterations=it,
        residual=residual,
    )


def sample_exact(sol: ExactRiemannSolution, xi) -> PrimitiveState:
    """Solution at similarity coordinate ``xi = (x - x0) / t``; vectorised over ``xi``."""
    xi = np.asarray(xi, dtype=float)
    g = sol.gamma
    L, R = sol.left, sol.right
    cl = math.sqrt(g * L.p / L.rho)
    cr = math.sqrt(g * R.p / R.rho)
    rho = np.empty_like(xi)
    u = np.empty_like(xi)
    p = np.empty_like(xi)

    left_of_contact = xi < sol.u_star
    # left side
    head, tail = sol.left_speeds
    m = left_of_contact & (xi < head)
    rho[m], u[m], p[m] = L.rho, L.u, L.p
    m = left_of_contact & (xi >= tail)
    rho[m], u[m], p[m] = sol.rho_star_left, sol.u_star, sol.p_star
    m = left_of_contact & (xi >= head) & (xi < tail)
    if np.any(m):
        base = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * cl) * (L.u - xi[m])
        rho[m] = L.rho * base ** (2.0 / (g - 1.0))
        u[m] = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * L.u + xi[m])
        p[m] = L.p * base ** (2.0 * g / (g - 1.0))
    # right side
    tail, head = sol.right_speeds
    right = ~left_of_contact
    m = right & (xi > head)
    rho[m], u[m], p[m] = R.rho, R.u, R.p
    m = right & (xi <= tail)
    rho[m], u[m], p[m] = sol.rho_star_right, sol.u_star, sol.p_star
    m = right & (xi > tail) & (xi <= head)
    if np.any(m):
        base = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * cr) * (R.u - xi[m])
        rho[m] = R.rho * base ** (2.0 / (g - 1.0))
        u[m] = 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * R.u + xi[m])
        p[m] = R.p * base ** (2.0 * g / (g - 1.0))

    v = np.where(left_of_contact, L.v, R.v)
    if xi.ndim == 0:
        return PrimitiveState(float(rho), float(u), float(v), float(p))
    return PrimitiveState(rho, u, v, p)


def exact_profile(W_L, W_R, eos, x, t, x0=0.5) -> PrimitiveState:
    """Exact solution at positions ``x`` and time ``t`` for a jump at ``x0``."""
    sol = exact_riemann(W_L, W_R, eos)
    x = np.asarray(x, dtype=float)
    if t <= 0.0:
        left = x < x0
        return PrimitiveState(
            np.where(left, sol.left.rho, sol.right.rho),
            np.where(left, sol.left.u, sol.right.u),
            np.where(left, sol.left.v, sol.right.v),
            np.where(left, sol.left.p, sol.right.p),
        )
    return sample_exact(sol, (x - x0) / t)
