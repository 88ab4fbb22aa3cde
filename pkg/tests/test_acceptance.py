"""End-to-end acceptance criteria; a PASS/FAIL line per criterion is printed at the end of the run."""

import math

import numpy as np
import pytest
from support import BASELINES, l1_rho, prim, run_preset, wave_positions

from lagflux.bench import scaling_sweep
from lagflux.config import parse_case
from lagflux.euler import PerfectGasEos, PrimitiveState, physical_flux
from lagflux.grid import BoundaryCondition, CartesianGrid, CellField
from lagflux.io import file_digest
from lagflux.lagremap import lagremap_step_1d
from lagflux.multimat import run_rider_kothe
from lagflux.oracle import exact_riemann, pressure_function
from lagflux.runner import build_case, density_wave_average, run_case
from lagflux.scheme import SchemeParams, TimeControls, advance, edge_flux, euler_stage, initial_state

REGRESSION_RTOL = 1e-4


@pytest.mark.criterion(1, "Sod: L1(rho) at N=400 <= 0.5 x N=100, each run < 5 s")
def test_sod_mesh_refinement(record_property):
    case100, s100, w100 = run_preset("sod", nx=100)
    case400, s400, w400 = run_preset("sod", nx=400)
    e100, e400 = l1_rho(case100, s100), l1_rho(case400, s400)
    record_property("detail", f"e100={e100:.4e} e400={e400:.4e} ratio={e400 / e100:.3f} wall={w100:.2f}s/{w400:.2f}s")
    assert s100.time == 0.23 and s400.time == 0.23
    assert e400 <= 0.5 * e100
    assert w100 < 5.0 and w400 < 5.0
    assert e100 == pytest.approx(BASELINES["sod_l1_rho"]["100"], rel=REGRESSION_RTOL)
    assert e400 == pytest.approx(BASELINES["sod_l1_rho"]["400"], rel=REGRESSION_RTOL)


def _wave_error(n, corrector):
    cfg = parse_case("density_wave").replace(nx=n, corrector=corrector)
    case = build_case(cfg)
    state = advance(initial_state(case.field, case.eos), case.grid, case.bc, case.eos, case.params, case.controls)
    exact = density_wave_average(case.grid, cfg.t_final, cfg.param("amplitude"), cfg.param("rho0"), cfg.param("u"))
    return float(np.abs(state.field.interior[0] - exact).sum() * case.grid.dx)


@pytest.mark.criterion(2, "smooth wave: L1 order >= 1.8 (Heun), 1.0 +- 0.2 without corrector")
def test_smooth_second_order(record_property):
    full = math.log2(_wave_error(100, True) / _wave_error(200, True))
    euler = math.log2(_wave_error(100, False) / _wave_error(200, False))
    record_property("detail", f"order heun={full:.3f} forward-euler={euler:.3f}")
    assert full >= 1.8
    assert abs(euler - 1.0) <= 0.2


@pytest.mark.criterion(3, "double rarefaction: rho > 0 and p > 0 in every cell of every step")
@pytest.mark.parametrize("n", [200, 2000])
def test_double_rarefaction_positivity(n, record_property):
    _, state, _ = run_preset("double_rarefaction", nx=n)
    min_rho = min(h.min_rho for h in state.history)
    min_p = min(h.min_p for h in state.history)
    record_property("detail", f"N={n}: min rho={min_rho:.3e} min p={min_p:.3e}")
    assert state.time == 0.16 and min_rho > 0.0 and min_p > 0.0


@pytest.mark.criterion(4, "sonic rarefaction: monotone fan, max jump <= 3 x mean variation")
def test_sonic_rarefaction_fan(record_property):
    case, state, _ = run_preset("sonic_rarefaction")
    _, pos = wave_positions(case)
    head, tail = pos["left"]
    x = case.grid.x_centers
    rho = prim(case, state)["rho"]
    inside = rho[(x > head) & (x < tail)]
    jumps = np.diff(inside)
    ratio = np.abs(jumps).max() / np.abs(jumps).mean()
    record_property("detail", f"{inside.size} fan cells, max/mean jump={ratio:.2f}")
    assert inside.size >= 10
    assert np.all(jumps <= 0.0)
    assert ratio <= 3.0


@pytest.mark.criterion(5, "shock-shock: positivity, plateau pressure deviation <= 0.05")
def test_shock_shock_plateau(record_property):
    case, state, _ = run_preset("shock_shock")
    assert min(h.min_rho for h in state.history) > 0 and min(h.min_p for h in state.history) > 0
    sol, pos = wave_positions(case)
    x = case.grid.x_centers
    margin = 5 * case.grid.dx
    lo = pos["left"][1] + margin
    hi = pos["right"][0] - margin
    p = prim(case, state)["p"][(x > lo) & (x < hi)]
    med = np.median(p)
    dev = float(np.abs(p - med).max() / med)
    record_property("detail", f"{p.size} plateau cells, max|p-med|/med={dev:.2e} (p*={sol.p_star:.4f})")
    assert p.size >= 20
    assert dev <= 0.05
    assert dev == pytest.approx(BASELINES["shock_shock_plateau_dev"], rel=1e-2)


def _relative(a, b, scale):
    return np.abs(a - b) / np.where(scale > 0, scale, 1.0)


@pytest.mark.criterion(6, "conservation: periodic invariants and shock-tube boundary balance to 1e-12")
def test_conservation_periodic_2d(record_property):
    g = CartesianGrid.uniform((0.0, 1.0), 48, (0.0, 1.0), 40)
    X, Y = g.meshgrid()
    rho = 1.0 + 0.3 * np.sin(2 * np.pi * X) * np.cos(2 * np.pi * Y)
    u, v, p = 0.5 + 0.2 * np.cos(2 * np.pi * Y), -0.3 + 0.1 * np.sin(2 * np.pi * X), 1.0 + 0.2 * np.sin(2 * np.pi * (X + Y))
    eos = PerfectGasEos(1.4)
    U = np.stack([rho, rho * u, rho * v, p / 0.4 + 0.5 * rho * (u * u + v * v)])
    field = CellField.from_interior(g, U)
    state = advance(initial_state(field, eos), g, BoundaryCondition.all("periodic"), eos, SchemeParams(),
                    TimeControls(0.25, 10.0, 120))
    T0, T1 = field.totals(), state.field.totals()
    scale = (np.abs(field.interior).sum(axis=(1, 2)) * g.cell_volume)
    err = float(_relative(T1, T0, scale).max())
    record_property("detail", f"periodic 2D {state.step} steps rel={err:.1e}")
    assert state.step >= 100
    assert err <= 1e-12


@pytest.mark.criterion(6, "conservation: periodic invariants and shock-tube boundary balance to 1e-12")
@pytest.mark.parametrize("name", ["sod", "shock_shock", "double_rarefaction"])
def test_conservation_shock_tube_balance(name, record_property):
    case, state, _ = run_preset(name)
    T0 = case.field.totals()
    T1 = state.field.totals() + state.boundary_outflow
    scale = np.maximum(np.abs(case.field.interior).sum(axis=(1, 2)), np.abs(state.field.interior).sum(axis=(1, 2)))
    err = float(_relative(T1, T0, scale * case.grid.cell_volume).max())
    record_property("detail", f"{name} rel={err:.1e}")
    assert err <= 1e-12


@pytest.mark.criterion(7, "flux consistency: edge_flux(U,U) = physical_flux(U) to 1e-14 relative")
def test_flux_consistency(record_property):
    rng = np.random.default_rng(20240611)
    n = 1000
    eos = PerfectGasEos(1.4)
    W = PrimitiveState(rng.uniform(1e-3, 10, n), rng.uniform(-10, 10, n), rng.uniform(-10, 10, n), rng.uniform(1e-3, 100, n))
    worst = 0.0
    for normal in ((1.0, 0.0), (0.0, 1.0)):
        got = np.stack(edge_flux(W, W, normal, eos))
        ref = physical_flux(W, normal, eos)
        scale = np.abs(ref).max(axis=0)
        worst = max(worst, float((np.abs(got - ref) / scale).max()))
    record_property("detail", f"max rel={worst:.1e}")
    assert worst <= 1e-14


@pytest.mark.criterion(8, "oracle: Sod p* = 0.30313, u* = 0.92745 (+-1e-4), residual < 1e-12")
def test_oracle_sod(record_property):
    W_L, W_R = PrimitiveState(1.0, 0.0, 0.0, 1.0), PrimitiveState(0.125, 0.0, 0.0, 0.1)
    sol = exact_riemann(W_L, W_R, PerfectGasEos(1.4))
    res = abs(pressure_function(sol.p_star, W_L, W_R, 1.4))
    record_property("detail", f"p*={sol.p_star:.6f} u*={sol.u_star:.6f} residual={res:.1e}")
    assert sol.p_star == pytest.approx(0.30313, abs=1e-4)
    assert sol.u_star == pytest.approx(0.92745, abs=1e-4)
    assert res < 1e-12


@pytest.mark.criterion(9, "cross-solver: lagremap vs forward-Euler lagflux difference drops >= 3.5x per dt halving")
def test_cross_solver_agreement(record_property):
    cfg = parse_case("sod")
    case = build_case(cfg)
    eos, bc, grid = case.eos, case.bc, case.grid
    params = SchemeParams(beta=cfg.beta, order=1, corrector=False)
    dt0 = 0.25 * grid.dx / math.sqrt(1.4)
    diffs = []
    for k in range(4):
        dt = dt0 / 2**k
        a = lagremap_step_1d(case.field.copy(), dt, eos, bc)
        b = euler_stage(case.field.copy(), dt, grid, bc, eos, params)
        diffs.append(float(np.abs(a.interior - b.interior).max()))
    ratios = [diffs[i] / diffs[i + 1] for i in range(3)]
    record_property("detail", "ratios=" + ",".join(f"{r:.3f}" for r in ratios))
    assert all(r >= 3.5 for r in ratios)


@pytest.mark.criterion(10, "determinism on 512x512 for 1, 2, 4 workers; scaling sweep reported")
def test_determinism_and_scaling(tmp_path, record_property):
    cfg = parse_case("sod2d").replace(max_steps=3)
    digests = []
    for n in (1, 2, 4):
        result = run_case(cfg, tmp_path / f"t{n}", threads=n)
        assert result.truncated and result.state.step == 3
        digests.append(file_digest(result.dumps[-1]))
    assert len(set(digests)) == 1
    reports = scaling_sweep(parse_case("sod2d"), [1, 2, 4], warmup_steps=1, measured_steps=10)
    record_property("detail", "MCUPs/speedup " + " ".join(f"{r.threads}:{r.mcups:.2f}/{r.speedup:.2f}" for r in reports))
    for r in reports:
        assert r.mcups == r.cells * r.steps / r.wall_seconds / 1e6
        assert r.speedup > 0


@pytest.mark.criterion(11, "Rider-Kothe 128^2: z in [0,1], integral of z conserved to 1e-12")
def test_rider_kothe(record_property):
    run = run_rider_kothe(128, period=12.0)
    totals = np.array(run.totals)
    drift = float(np.abs(totals - totals[0]).max() / totals[0])
    record_property("detail", f"{len(run.times) - 1} steps, drift={drift:.1e}, L1(z-z0)={run.l1_error:.5f}")
    assert run.times[-1] == 12.0
    assert min(run.z_min) >= 0.0 and max(run.z_max) <= 1.0
    assert drift <= 1e-12
    assert run.l1_error == pytest.approx(BASELINES["rider_kothe_l1"], rel=REGRESSION_RTOL)


@pytest.mark.criterion(12, "triple point 256x110 to T=3.3530: completes, positive, material masses to 1e-10")
def test_triple_point(record_property):
    case, state, wall = run_preset("triple_point", dump_times=())
    m0 = case.field.totals()[4:]
    m1 = state.field.totals()[4:]
    err = float((np.abs(m1 - m0) / m0).max())
    min_rho = min(h.min_rho for h in state.history)
    min_p = min(h.min_p for h in state.history)
    record_property("detail", f"{state.step} steps in {wall:.0f}s, material mass rel={err:.1e}, min p={min_p:.3e}")
    assert state.time == 3.353
    assert min_rho > 0 and min_p > 0
    assert err <= 1e-10
