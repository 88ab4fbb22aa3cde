"""Throughput (MCUPs) and thread-scaling measurements."""

from __future__ import annotations

import hashlib
import math
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .config import CaseConfig
from .errors import ConfigError, DeterminismError
from .runner import build_case
from .scheme import TimeControls, Workspace, heun_step, initial_state

#: Reference point quoted for context in report headers.  Hardware specific
#: (16-core AVX machine); never compared against.
REFERENCE_NOTE = "reference: Lagrange-flux 81.0 MCUPs, 31.1x scalability on 16 AVX cores (context only)"
VECTOR_NOTE = "numpy array kernels; SIMD use depends on the numpy build"
#: Rough last-level cache size used for the small-case warning.
LLC_BYTES = 32 * 2**20


@dataclass
class BenchReport:
    threads: int
    cells: int
    steps: int
    wall_seconds: float
    digest: str
    speedup: float = 1.0
    vector_note: str = VECTOR_NOTE
    flags: list[str] = field(default_factory=list)

    @property
    def mcups(self) -> float:
        return self.cells * self.steps / self.wall_seconds / 1e6


def mcups(cells: int, steps: int, wall_seconds: float) -> float:
    """Millions of cell updates per second."""
    return cells * steps / wall_seconds / 1e6


def _field_digest(data: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(data).tobytes()).hexdigest()


def _run_steps(case: CaseConfig, threads: int, warmup_steps: int, measured_steps: int):
    c = build_case(case, threads)
    if c.field is None:
        raise ConfigError("bench needs a hydrodynamic case")
    controls = TimeControls(c.controls.cfl, math.inf, c.controls.max_steps)
    state = initial_state(c.field, c.eos)
    ws = Workspace.for_field(state.field)
    for _ in range(warmup_steps):
        state = heun_step(state, c.grid, c.bc, c.eos, c.params, controls, workspace=ws)
    t0 = time.perf_counter()
    for _ in range(measured_steps):
        state = heun_step(state, c.grid, c.bc, c.eos, c.params, controls, workspace=ws)
    wall = time.perf_counter() - t0
    return c.grid.n_cells, wall, _field_digest(state.field.data)


def measure_mcups(
    case: CaseConfig,
    threads: int,
    warmup_steps: int = 5,
    measured_steps: int = 20,
    reference_digest: str | None = None,
) -> BenchReport:
    """Time ``measured_steps`` Heun steps after ``warmup_steps`` untimed ones.

    The final field is compared bit for bit with a single-thread run of
    the same steps (``reference_digest``, computed here when omitted);
    a mismatch raises :class:`DeterminismError`.
    """
    if case.solver != "lagflux":
        raise ConfigError("bench measures the lagflux solver only")
    if measured_steps < 10:
        raise ConfigError(f"measured_steps must be >= 10, got {measured_steps}")
    if warmup_steps < 0:
        raise ConfigError("warmup_steps must be >= 0")
    flags = []
    ncomp = 4 + len(case.material_gammas or ())
    # field, predictor, result and two edge-flux arrays
    nbytes = case.nx * case.ny * ncomp * 8 * 5
    if nbytes < LLC_BYTES:
        msg = f"case data (~{nbytes / 2**20:.1f} MiB) likely fits in cache; MCUPs will be optimistic"
        warnings.warn(msg, stacklevel=2)
        flags.append("fits-in-cache")
    cells, wall, digest = _run_steps(case, threads, warmup_steps, measured_steps)
    if reference_digest is None and threads != 1:
        reference_digest = _run_steps(case, 1, warmup_steps, measured_steps)[2]
    if reference_digest is not None and digest != reference_digest:
        raise DeterminismError(f"field after {warmup_steps + measured_steps} steps differs between 1 and {threads} threads")
    return BenchReport(threads, cells, measured_steps, wall, digest, flags=flags)


def scaling_sweep(case: CaseConfig, thread_list, warmup_steps: int = 5, measured_steps: int = 20) -> list[BenchReport]:
    """One report per thread count, speedups against a shared 1-thread baseline."""
    thread_list = [int(t) for t in thread_list]
    if not thread_list or min(thread_list) < 1:
        raise ConfigError("thread list must hold positive integers")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        base = measure_mcups(case, 1, warmup_steps, measured_steps)
    for w in caught:
        warnings.warn(w.message, stacklevel=2)
    reports = []
    for n in thread_list:
        if n == 1:
            r = replace(base, flags=list(base.flags))
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                r = measure_mcups(case, n, warmup_steps, measured_steps, reference_digest=base.digest)
        r.speedup = base.wall_seconds / r.wall_seconds
        reports.append(r)
    for prev, cur in zip(reports, reports[1:]):
        if cur.threads > prev.threads and cur.speedup < prev.speedup:
            cur.flags.append("non-monotone")
    for r in reports:
        if r.threads >= 4 and r.speedup < 1.5:
            r.flags.append("low-speedup")
            warnings.warn(f"speedup {r.speedup:.2f} at {r.threads} threads", stacklevel=2)
    return reports


def reports_csv(reports: list[BenchReport]) -> str:
    lines = [f"# {REFERENCE_NOTE}", "threads,mcups,speedup"]
    lines += [f"{r.threads},{r.mcups:.6g},{r.speedup:.6g}" for r in reports]
    return "\n".join(lines) + "\n"


def reports_table(reports: list[BenchReport]) -> str:
    head = f"{'threads':>7} {'cells':>9} {'steps':>5} {'wall[s]':>9} {'MCUPs':>8} {'speedup':>7}  flags"
    rows = [
        f"{r.threads:>7} {r.cells:>9} {r.steps:>5} {r.wall_seconds:>9.3f} {r.mcups:>8.3f} {r.speedup:>7.2f}  {','.join(r.flags)}"
        for r in reports
    ]
    return "\n".join([REFERENCE_NOTE, VECTOR_NOTE, head, *rows]) + "\n"
