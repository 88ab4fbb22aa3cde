"""Lagrangian HLL solver for the contact pressure and velocity at a face."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .euler import PerfectGasEos, PrimitiveState, check_physical


class ContactSolution(NamedTuple):
    p_star: np.ndarray | float
    u_star: np.ndarray | float


def hll_contact(rho_l, un_l, p_l, c_l, rho_r, un_r, p_r, c_r):
    """Contact ``(p*, u*)`` from normal-velocity data; no validation.

    A single wave speed ``max(c_l, c_r)`` is used on both sides.
    """
    inv_sum = 1.0 / (rho_l + rho_r)
    c = np.maximum(c_l, c_r)
    p_star = (rho_r * p_l + rho_l * p_r) * inv_sum - rho_l * rho_r * inv_sum * c * (un_r - un_l)
    u_star = (rho_l * un_l + rho_r * un_r) * inv_sum - inv_sum * (p_r - p_l) / c
    return p_star, u_star


def lagrangian_hll(
    W_L: PrimitiveState, W_R: PrimitiveState, normal, eos: PerfectGasEos
) -> ContactSolution:
    """Contact pressure and normal contact velocity between two states.

    ``normal`` points from the left state to the right state; only the
    velocity components along it enter the solution.
    """
    check_physical(W_L.rho, W_L.p, "left state")
    check_physical(W_R.rho, W_R.p, "right state")
    nx, ny = normal
    un_l = W_L.u * nx + W_L.v * ny
    un_r = W_R.u * nx + W_R.v * ny
    c_l = np.sqrt(eos.gamma * W_L.p / W_L.rho)
    c_r = np.sqrt(eos.gamma * W_R.p / W_R.rho)
    p_star, u_star = hll_contact(W_L.rho, un_l, W_L.p, c_l, W_R.rho, un_r, W_R.p, c_r)
    return ContactSolution(p_star, u_star)
