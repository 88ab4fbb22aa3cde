import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lagflux.euler import PerfectGasEos, PrimitiveState
from lagflux.riemann import lagrangian_hll

EOS = PerfectGasEos(1.4)
X = (1.0, 0.0)


def test_sod_contact():
    sol = lagrangian_hll(PrimitiveState(1.0, 0, 0, 1.0), PrimitiveState(0.125, 0, 0, 0.1), X, EOS)
    assert sol.p_star == pytest.approx(0.225 / 1.125, rel=1e-15)
    assert sol.u_star == pytest.approx(0.9 / (1.125 * math.sqrt(1.4)), rel=1e-15)
    assert sol.u_star == pytest.approx(0.67612, abs=1e-5)


def test_symmetric_impact():
    sol = lagrangian_hll(PrimitiveState(1.0, 1.0, 0, 1.0), PrimitiveState(1.0, -1.0, 0, 1.0), X, EOS)
    assert sol.u_star == 0.0
    assert sol.p_star == pytest.approx(1 + math.sqrt(1.4), rel=1e-15)


states = st.tuples(st.floats(1e-3, 1e3), st.floats(-50, 50), st.floats(-50, 50), st.floats(1e-3, 1e3))


@given(states)
def test_equal_states(s):
    W = PrimitiveState(*s)
    sol = lagrangian_hll(W, W, X, EOS)
    assert sol.p_star == pytest.approx(W.p, rel=1e-13)
    assert sol.u_star == pytest.approx(W.u, rel=1e-13, abs=1e-13)


@given(states, states)
def test_mirror_symmetry(a, b):
    # swapping sides and flipping velocities flips u* and keeps p*
    L, R = PrimitiveState(*a), PrimitiveState(*b)
    s1 = lagrangian_hll(L, R, X, EOS)
    s2 = lagrangian_hll(R._replace(u=-R.u), L._replace(u=-L.u), X, EOS)
    assert s2.p_star == pytest.approx(s1.p_star, rel=1e-12, abs=1e-12 * (L.p + R.p))
    assert s2.u_star == pytest.approx(-s1.u_star, rel=1e-12, abs=1e-12 * (1 + abs(s1.u_star)))


@given(states, states, st.floats(0, 2 * math.pi))
def test_rotation_invariance(a, b, theta):
    c, s = math.cos(theta), math.sin(theta)
    L, R = PrimitiveState(*a), PrimitiveState(*b)
    direct = lagrangian_hll(L, R, (c, s), EOS)

    def rot(W):
        return W._replace(u=W.u * c + W.v * s, v=-W.u * s + W.v * c)

    ref = lagrangian_hll(rot(L), rot(R), X, EOS)
    assert direct.p_star == pytest.approx(ref.p_star, rel=1e-9, abs=1e-9)
    assert direct.u_star == pytest.approx(ref.u_star, rel=1e-9, abs=1e-9)


def test_vectorised():
    n = 5
    L = PrimitiveState(np.ones(n), np.zeros(n), np.zeros(n), np.ones(n))
    R = PrimitiveState(np.full(n, 0.125), np.zeros(n), np.zeros(n), np.full(n, 0.1))
    sol = lagrangian_hll(L, R, X, EOS)
    assert np.all(sol.p_star == pytest.approx(0.2))
