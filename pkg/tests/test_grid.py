import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lagflux.errors import ConfigError
from lagflux.grid import MOM_X, MOM_Y, BoundaryCondition, CartesianGrid, CellField, apply_boundary


def test_spacing():
    assert CartesianGrid.uniform((0.0, 1.0), 100).dx == pytest.approx(0.01)
    g = CartesianGrid.uniform((0.0, 7.0), 2048, (0.0, 3.0), 878)
    assert g.dim == 2
    assert (g.dx, g.dy) == pytest.approx((7 / 2048, 3 / 878))


@pytest.mark.parametrize("nx", [0, -3])
def test_degenerate_mesh(nx):
    with pytest.raises(ConfigError):
        CartesianGrid.uniform((0.0, 1.0), nx)


def test_shapes_and_totals():
    g = CartesianGrid.uniform((0.0, 2.0), 8, (0.0, 1.0), 4)
    f = CellField.zeros(g)
    assert f.data.shape == (4, 4 + 4, 8 + 4)
    f.interior[0] = 3.0
    assert f.totals()[0] == pytest.approx(3.0 * 2.0)
    g1 = CartesianGrid.uniform((0.0, 1.0), 10)
    assert (g1.gy, CellField.zeros(g1).data.shape) == (0, (4, 1, 14))


def _random_field(g, seed=0):
    rng = np.random.default_rng(seed)
    U = rng.uniform(1.0, 2.0, (4, g.ny, g.nx))
    return CellField.from_interior(g, U)


@pytest.mark.parametrize("kind", ["transmissive", "reflective", "periodic"])
def test_uniform_field_ghosts(kind):
    g = CartesianGrid.uniform((0.0, 1.0), 6, (0.0, 1.0), 5)
    f = CellField.from_interior(g, np.broadcast_to(np.array([1.0, 0.0, 0.0, 2.5])[:, None, None], (4, 5, 6)).copy())
    apply_boundary(f, BoundaryCondition.all(kind))
    assert np.all(f.data == np.array([1.0, 0.0, 0.0, 2.5])[:, None, None])


def test_reflective_mirrors_normal_momentum():
    g = CartesianGrid.uniform((0.0, 1.0), 6)
    f = _random_field(g)
    f.interior[MOM_X] = 0.7
    apply_boundary(f, BoundaryCondition.all("reflective"))
    G = g.gx
    row = f.data[:, 0]
    for k in range(G):
        assert row[MOM_X, G - 1 - k] == -row[MOM_X, G + k]
        assert row[0, G - 1 - k] == row[0, G + k]
        assert row[3, G - 1 - k] == row[3, G + k]
        assert row[MOM_X, G + g.nx + k] == -row[MOM_X, G + g.nx - 1 - k]


def test_reflective_y_walls():
    g = CartesianGrid.uniform((0.0, 1.0), 4, (0.0, 1.0), 5)
    f = _random_field(g, 3)
    apply_boundary(f, BoundaryCondition.all("reflective"))
    G = g.gy
    assert np.array_equal(f.data[MOM_Y, G - 1, G:-G], -f.data[MOM_Y, G, G:-G])
    assert np.array_equal(f.data[MOM_X, G - 1, G:-G], f.data[MOM_X, G, G:-G])


def test_periodic_wrap():
    g = CartesianGrid.uniform((0.0, 1.0), 7)
    f = _random_field(g)
    apply_boundary(f, BoundaryCondition.all("periodic"))
    G = g.gx
    assert np.array_equal(f.data[:, 0, G - 1], f.data[:, 0, G + g.nx - 1])
    assert np.array_equal(f.data[:, 0, G + g.nx], f.data[:, 0, G])


def test_transmissive_copies_edge_cell():
    g = CartesianGrid.uniform((0.0, 1.0), 5)
    f = _random_field(g)
    apply_boundary(f, BoundaryCondition())
    assert np.array_equal(f.data[:, 0, 0], f.data[:, 0, 2])
    assert np.array_equal(f.data[:, 0, -1], f.data[:, 0, -3])


def test_unpaired_periodic_rejected():
    with pytest.raises(ConfigError):
        BoundaryCondition("periodic", "transmissive")
    with pytest.raises(ConfigError):
        BoundaryCondition("sticky")


@given(st.sampled_from(["transmissive", "reflective", "periodic"]), st.integers(1, 6), st.integers(1, 6))
def test_boundary_fill_leaves_interior(kind, nx, ny):
    g = CartesianGrid.uniform((0.0, 1.0), nx, (0.0, 1.0), ny, dim=2)
    f = _random_field(g, nx * 10 + ny)
    before = f.interior.copy()
    apply_boundary(f, BoundaryCondition.all(kind))
    assert np.array_equal(f.interior, before)
    assert np.all(np.isfinite(f.data))
