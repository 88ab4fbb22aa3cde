import math

import numpy as np
import pytest
from scipy.optimize import brentq

from lagflux.errors import VacuumError
from lagflux.euler import PerfectGasEos, PrimitiveState
from lagflux.oracle import exact_profile, exact_riemann, pressure_function, sample_exact

EOS = PerfectGasEos(1.4)
SOD = (PrimitiveState(1.0, 0.0, 0.0, 1.0), PrimitiveState(0.125, 0.0, 0.0, 0.1))

CASES = {
    "sod": SOD,
    "double_rarefaction": (PrimitiveState(1.0, -2.0, 0.0, 0.4), PrimitiveState(1.0, 2.0, 0.0, 0.4)),
    "sonic_rarefaction": (PrimitiveState(5.0, 0.0, 0.0, 5.0), PrimitiveState(0.125, 0.0, 0.0, 0.1)),
    "shock_shock": (PrimitiveState(1.0, 5.0, 0.0, 1.0), PrimitiveState(1.0, -5.0, 0.0, 0.01)),
    "strong_left": (PrimitiveState(1.0, 0.0, 0.0, 1000.0), PrimitiveState(1.0, 0.0, 0.0, 0.01)),
}


def test_sod_star_values():
    sol = exact_riemann(*SOD, EOS)
    assert sol.p_star == pytest.approx(0.30313, abs=1e-4)
    assert sol.u_star == pytest.approx(0.92745, abs=1e-4)
    assert (sol.left_wave, sol.right_wave) == ("rarefaction", "shock")


@pytest.mark.parametrize("name", sorted(CASES))
def test_against_bracketing_root(name):
    # an independent root finder on the same pressure function
    L, R = CASES[name]
    sol = exact_riemann(L, R, EOS)
    root = brentq(lambda p: pressure_function(p, L, R, 1.4), 1e-12, 1e5, xtol=1e-15, rtol=1e-14)
    assert sol.p_star == pytest.approx(root, rel=1e-10)
    assert abs(sol.residual) < 1e-12


def test_equal_states_degenerate():
    W = PrimitiveState(0.7, 0.3, 0.0, 2.0)
    sol = exact_riemann(W, W, EOS)
    assert sol.p_star == pytest.approx(2.0, rel=1e-12) and sol.u_star == pytest.approx(0.3, rel=1e-12)


def test_double_rarefaction_symmetry():
    L, R = CASES["double_rarefaction"]
    sol = exact_riemann(L, R, EOS)
    assert sol.p_star < 0.4
    assert sol.u_star == pytest.approx(0.0, abs=1e-14)
    x = np.linspace(0.0, 1.0, 201)
    prof = exact_profile(L, R, EOS, x, 0.15)
    assert np.allclose(prof.rho, prof.rho[::-1], atol=1e-12)
    assert np.allclose(prof.u, -prof.u[::-1], atol=1e-12)


def test_sampling_regions():
    sol = exact_riemann(*SOD, EOS)
    far_left = sample_exact(sol, -10.0)
    assert (far_left.rho, far_left.u, far_left.p) == (1.0, 0.0, 1.0)
    shock = sol.right_speeds[1]
    mid = sample_exact(sol, 0.5 * (sol.u_star + shock))
    assert (float(mid.rho), float(mid.u), float(mid.p)) == pytest.approx((sol.rho_star_right, sol.u_star, sol.p_star))


def test_sonic_point_inside_transonic_fan():
    L, R = CASES["sonic_rarefaction"]
    sol = exact_riemann(L, R, EOS)
    head, tail = sol.left_speeds
    assert head < 0.0 < tail
    W = sample_exact(sol, 0.0)
    c = math.sqrt(1.4 * float(W.p) / float(W.rho))
    assert float(W.u) == pytest.approx(c, rel=1e-12)


def test_published_star_values():
    # Toro, Riemann Solvers and Numerical Methods, Table 4.3
    sol = exact_riemann(*CASES["strong_left"], EOS)
    assert sol.p_star == pytest.approx(460.894, rel=1e-5)
    assert sol.u_star == pytest.approx(19.5975, rel=1e-5)


def test_vacuum_generation():
    with pytest.raises(VacuumError):
        exact_riemann(PrimitiveState(1.0, -10.0, 0.0, 0.4), PrimitiveState(1.0, 10.0, 0.0, 0.4), EOS)
