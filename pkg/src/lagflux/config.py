"""Case configuration files.

A case is a TOML document with a few top-level keys and named sections::

    solver = "lagflux"          # lagflux | lagremap1d | advect2d
    dim = 1

    [mesh]
    x = [0.0, 1.0]
    nx = 100

    [physics]
    gamma = 1.4
    cfl = 0.25
    beta = 1.5

    [time]
    t_final = 0.23

    [boundary]
    x_low = "transmissive"

    [initial]
    kind = "regions"            # regions | density_wave | disk

    [[initial.region]]
    x = [0.0, 0.5]
    rho = 1.0
    p = 1.0

Shipped presets live in ``lagflux/presets`` and are ordinary case files.
See ``docs/case-format.md`` for the full key list.
"""

from __future__ import annotations

import dataclasses
import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import tomli
import tomli_w

from .errors import ConfigError
from .grid import BOUNDARY_KINDS, BoundaryCondition
from .multimat import Region

SOLVERS = ("lagflux", "lagremap1d", "advect2d")
INITIAL_KINDS = ("regions", "density_wave", "disk")
PRESETS = ("sod", "double_rarefaction", "sonic_rarefaction", "shock_shock",
           "triple_point", "rider_kothe", "density_wave", "sod2d")

_SCHEMA: dict[str, set[str]] = {
    "": {"name", "solver", "dim"},
    "mesh": {"x", "y", "nx", "ny"},
    "physics": {"gamma", "cfl", "beta", "order", "corrector", "remap_order"},
    "time": {"t_final", "max_steps", "dump_times", "dump_every"},
    "boundary": {"x_low", "x_high", "y_low", "y_high"},
    "initial": {"kind", "region", "amplitude", "rho0", "u", "v", "p", "center", "radius"},
    "initial.region": {"x", "y", "rho", "u", "v", "p", "material"},
    "materials": {"gamma"},
    "advection": {"period"},
    "run": {"threads"},
}


@dataclass(frozen=True)
class CaseConfig:
    """Everything needed to reproduce one run."""

    name: str = "case"
    solver: str = "lagflux"
    dim: int = 1
    x_range: tuple[float, float] = (0.0, 1.0)
    y_range: tuple[float, float] = (0.0, 1.0)
    nx: int = 100
    ny: int = 1
    gamma: float = 1.4
    material_gammas: tuple[float, ...] | None = None
    cfl: float = 0.25
    beta: float = 1.5
    order: int = 2
    corrector: bool = True
    remap_order: int = 1
    t_final: float = 0.2
    max_steps: int = 10_000_000
    dump_times: tuple[float, ...] = ()
    dump_every: float | None = None
    boundary: BoundaryCondition = field(default_factory=BoundaryCondition)
    initial_kind: str = "regions"
    regions: tuple[Region, ...] = ()
    initial_params: tuple[tuple[str, Any], ...] = ()
    period: float = 12.0
    threads: int = 1

    def param(self, key: str, default=None):
        return dict(self.initial_params).get(key, default)

    def replace(self, **changes) -> "CaseConfig":
        return validate(dataclasses.replace(self, **changes))

    # two-state shock tubes --------------------------------------------------
    @property
    def left_state(self) -> tuple[float, float, float]:
        r = self._two_regions()[0]
        return (r.rho, r.u, r.p)

    @property
    def right_state(self) -> tuple[float, float, float]:
        r = self._two_regions()[1]
        return (r.rho, r.u, r.p)

    @property
    def x_discontinuity(self) -> float:
        return self._two_regions()[0].x[1]

    @property
    def is_shock_tube(self) -> bool:
        return self.dim == 1 and self.initial_kind == "regions" and len(self.regions) == 2 and not self.material_gammas

    def _two_regions(self):
        if not self.is_shock_tube:
            raise ConfigError(f"case {self.name!r} is not a two-state 1D shock tube")
        return sorted(self.regions, key=lambda r: r.x[0])


# ----------------------------------------------------------------------------
# parsing


def _line_map(text: str) -> dict[tuple, int]:
    """Map ``(section, key)`` and ``(section, index, key)`` to 1-based line numbers."""
    lines: dict[tuple, int] = {}
    section = ""
    counters: dict[str, int] = {}
    index = None
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        m = re.fullmatch(r"\[\[\s*([\w.]+)\s*\]\]", s)
        if m:
            section = m.group(1)
            counters[section] = counters.get(section, -1) + 1
            index = counters[section]
            lines.setdefault((section, index), no)
            continue
        m = re.fullmatch(r"\[\s*([\w.]+)\s*\]", s)
        if m:
            section, index = m.group(1), None
            lines.setdefault((section,), no)
            continue
        m = re.match(r"([\w-]+)\s*=", s)
        if m:
            key = (section, index, m.group(1)) if index is not None else (section, m.group(1))
            lines.setdefault(key, no)
    return lines


class _Reader:
    def __init__(self, data: dict, lines: dict, source: str | None):
        self.data = data
        self.lines = lines
        self.source = source

    def fail(self, msg: str, *key) -> None:
        line = self.lines.get(key)
        if line is None and key:
            line = self.lines.get(key[:1] if len(key) > 1 else key)
        raise ConfigError(msg, line=line, source=self.source)

    def check_keys(self, table: dict, section: str, index=None) -> None:
        allowed = _SCHEMA[section]
        for k in table:
            if k not in allowed:
                key = (section, index, k) if index is not None else (section, k)
                self.fail(f"unknown key {k!r} in [{section or 'top level'}]", *key)


def _num(r: _Reader, table: dict, section: str, key: str, default=None, kind=float, index=None):
    if key not in table:
        if default is None:
            where = (section, index, key) if index is not None else (section,)
            r.fail(f"missing required key {key!r} in [{section}]", *where)
        return default
    v = table[key]
    ok = isinstance(v, (int, float)) and not isinstance(v, bool)
    if kind is int:
        ok = isinstance(v, int) and not isinstance(v, bool)
    if not ok:
        r.fail(f"{section}.{key} must be a {kind.__name__}", *((section, index, key) if index is not None else (section, key)))
    return kind(v)


def _pair(r: _Reader, table, section, key, default, index=None):
    if key not in table:
        return default
    v = table[key]
    loc = (section, index, key) if index is not None else (section, key)
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in v)):
        r.fail(f"{section}.{key} must be a pair of numbers", *loc)
    return (float(v[0]), float(v[1]))


def _range_check(r: _Reader, ok: bool, msg: str, *key):
    if not ok:
        r.fail(msg, *key)


def from_dict(data: dict, source: str | None = None, lines: dict | None = None) -> CaseConfig:
    """Build and validate a :class:`CaseConfig` from parsed TOML data."""
    r = _Reader(data, lines or {}, source)
    top = {k: v for k, v in data.items() if not isinstance(v, dict)}
    r.check_keys(top, "")
    for sec, table in data.items():
        if isinstance(table, dict) and sec not in _SCHEMA:
            r.fail(f"unknown section [{sec}]", (sec,))
        if isinstance(table, dict):
            r.check_keys(table, sec)

    solver = data.get("solver", "lagflux")
    if solver not in SOLVERS:
        r.fail(f"solver must be one of {SOLVERS}, got {solver!r}", "", "solver")
    dim = _num(r, data, "", "dim", 1, int)
    _range_check(r, dim in (1, 2), f"dim must be 1 or 2, got {dim}", "", "dim")

    mesh = data.get("mesh", {})
    x_range = _pair(r, mesh, "mesh", "x", (0.0, 1.0))
    y_range = _pair(r, mesh, "mesh", "y", (0.0, 1.0))
    nx = _num(r, mesh, "mesh", "nx", None, int)
    ny = _num(r, mesh, "mesh", "ny", 1, int)
    _range_check(r, nx >= 1, f"mesh.nx must be >= 1, got {nx}", "mesh", "nx")
    _range_check(r, ny >= 1, f"mesh.ny must be >= 1, got {ny}", "mesh", "ny")
    _range_check(r, dim == 2 or ny == 1, "mesh.ny must be 1 for a 1D case", "mesh", "ny")
    _range_check(r, x_range[1] > x_range[0], "mesh.x must have positive extent", "mesh", "x")
    _range_check(r, y_range[1] > y_range[0], "mesh.y must have positive extent", "mesh", "y")

    phys = data.get("physics", {})
    gamma = _num(r, phys, "physics", "gamma", 1.4)
    _range_check(r, 1.0 < gamma <= 3.0, f"physics.gamma must lie in (1, 3], got {gamma}", "physics", "gamma")
    cfl = _num(r, phys, "physics", "cfl", 0.25)
    _range_check(r, 0.0 < cfl < 1.0, f"physics.cfl must lie in (0, 1), got {cfl}", "physics", "cfl")
    beta = _num(r, phys, "physics", "beta", 1.5)
    _range_check(r, 1.0 <= beta <= 2.0, f"physics.beta must lie in [1, 2], got {beta}", "physics", "beta")
    order = _num(r, phys, "physics", "order", 2, int)
    _range_check(r, order in (1, 2), f"physics.order must be 1 or 2, got {order}", "physics", "order")
    remap_order = _num(r, phys, "physics", "remap_order", 1, int)
    _range_check(r, remap_order in (1, 2), "physics.remap_order must be 1 or 2", "physics", "remap_order")
    corrector = phys.get("corrector", True)
    _range_check(r, isinstance(corrector, bool), "physics.corrector must be a boolean", "physics", "corrector")

    tm = data.get("time", {})
    t_final = _num(r, tm, "time", "t_final", None)
    _range_check(r, t_final >= 0.0, f"time.t_final must be >= 0, got {t_final}", "time", "t_final")
    max_steps = _num(r, tm, "time", "max_steps", 10_000_000, int)
    _range_check(r, max_steps >= 0, "time.max_steps must be >= 0", "time", "max_steps")
    dump_times = tm.get("dump_times", [])
    _range_check(
        r,
        isinstance(dump_times, list) and all(isinstance(t, (int, float)) and not isinstance(t, bool) and 0 <= t <= t_final for t in dump_times),
        "time.dump_times must be a list of times within [0, t_final]",
        "time", "dump_times",
    )
    dump_every = tm.get("dump_every")
    if dump_every is not None:
        dump_every = _num(r, tm, "time", "dump_every")
        _range_check(r, dump_every > 0.0, "time.dump_every must be positive", "time", "dump_every")

    bnd = data.get("boundary", {})
    kinds = {}
    for side in ("x_low", "x_high", "y_low", "y_high"):
        k = bnd.get(side, "transmissive")
        _range_check(r, k in BOUNDARY_KINDS, f"boundary.{side} must be one of {BOUNDARY_KINDS}", "boundary", side)
        kinds[side] = k
    try:
        boundary = BoundaryCondition(**kinds)
    except ConfigError as exc:
        r.fail(str(exc), "boundary")

    mats = data.get("materials")
    material_gammas = None
    if mats is not None:
        mg = mats.get("gamma")
        _range_check(
            r,
            isinstance(mg, list) and len(mg) >= 1 and all(isinstance(g, (int, float)) and 1.0 < g <= 3.0 for g in mg),
            "materials.gamma must be a non-empty list of values in (1, 3]",
            "materials", "gamma",
        )
        material_gammas = tuple(float(g) for g in mg)

    init = data.get("initial", {})
    kind = init.get("kind", "regions")
    _range_check(r, kind in INITIAL_KINDS, f"initial.kind must be one of {INITIAL_KINDS}", "initial", "kind")
    regions: list[Region] = []
    params: dict[str, Any] = {}
    if kind == "regions":
        raw = init.get("region", [])
        _range_check(r, isinstance(raw, list) and len(raw) > 0, "initial regions missing", "initial")
        for i, reg in enumerate(raw):
            r.check_keys(reg, "initial.region", i)
            sec = "initial.region"
            rho = _num(r, reg, sec, "rho", None, index=i)
            p = _num(r, reg, sec, "p", None, index=i)
            if not (rho > 0 and p > 0):
                r.fail("region rho and p must be positive", sec, i)
            mat = _num(r, reg, sec, "material", 1, int, index=i)
            n_mat = len(material_gammas) if material_gammas else 1
            if not (1 <= mat <= n_mat):
                r.fail(f"region material {mat} out of range 1..{n_mat}", sec, i, "material")
            regions.append(
                Region(
                    _pair(r, reg, sec, "x", x_range, i),
                    _pair(r, reg, sec, "y", y_range, i),
                    rho,
                    _num(r, reg, sec, "u", 0.0, index=i),
                    _num(r, reg, sec, "v", 0.0, index=i),
                    p,
                    mat - 1,
                )
            )
    elif kind == "density_wave":
        params = {
            "amplitude": _num(r, init, "initial", "amplitude", 0.2),
            "rho0": _num(r, init, "initial", "rho0", 1.0),
            "u": _num(r, init, "initial", "u", 1.0),
            "v": _num(r, init, "initial", "v", 0.0),
            "p": _num(r, init, "initial", "p", 1.0),
        }
        _range_check(r, params["rho0"] > abs(params["amplitude"]), "density wave must stay positive", "initial", "amplitude")
    else:
        params = {
            "center": _pair(r, init, "initial", "center", (0.5, 0.75)),
            "radius": _num(r, init, "initial", "radius", 0.15),
        }

    adv = data.get("advection", {})
    period = _num(r, adv, "advection", "period", 12.0)
    _range_check(r, period > 0, "advection.period must be positive", "advection", "period")
    threads = _num(r, data.get("run", {}), "run", "threads", 1, int)
    _range_check(r, threads >= 1, "run.threads must be >= 1", "run", "threads")

    name = data.get("name", Path(source).stem if source else "case")
    cfg = CaseConfig(
        name=str(name), solver=solver, dim=dim, x_range=x_range, y_range=y_range, nx=nx, ny=ny,
        gamma=gamma, material_gammas=material_gammas, cfl=cfl, beta=beta, order=order,
        corrector=corrector, remap_order=remap_order, t_final=t_final, max_steps=max_steps,
        dump_times=tuple(float(t) for t in dump_times), dump_every=dump_every, boundary=boundary,
        initial_kind=kind, regions=tuple(regions), initial_params=tuple(sorted(params.items())),
        period=period, threads=threads,
    )
    try:
        return validate(cfg)
    except ConfigError as exc:
        raise ConfigError(str(exc), source=source) from None


def validate(cfg: CaseConfig) -> CaseConfig:
    """Cross-field checks that do not depend on file layout."""
    if cfg.solver == "lagremap1d" and (cfg.dim != 1 or cfg.material_gammas):
        raise ConfigError("solver lagremap1d needs a 1D single-gas case")
    if cfg.solver == "advect2d" and (cfg.dim != 2 or cfg.initial_kind != "disk"):
        raise ConfigError("solver advect2d needs dim = 2 and initial.kind = 'disk'")
    if cfg.initial_kind == "disk" and cfg.solver != "advect2d":
        raise ConfigError("initial.kind 'disk' is only used by the advect2d solver")
    if cfg.solver != "advect2d" and cfg.initial_kind == "regions" and not cfg.regions:
        raise ConfigError("initial regions missing")
    for name, lo, hi, n in (("nx", *cfg.x_range, cfg.nx), ("ny", *cfg.y_range, cfg.ny)):
        if n < 1 or not hi > lo:
            raise ConfigError(f"invalid mesh extent or count for {name}")
    if cfg.dim == 1 and cfg.ny != 1:
        raise ConfigError("a 1D case has ny = 1")
    if not (1.0 <= cfg.beta <= 2.0):
        raise ConfigError(f"beta must lie in [1, 2], got {cfg.beta}")
    if not (0.0 < cfg.cfl < 1.0):
        raise ConfigError(f"cfl must lie in (0, 1), got {cfg.cfl}")
    if cfg.t_final < 0:
        raise ConfigError("t_final must be >= 0")
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    return cfg


def parse_text(text: str, source: str | None = None) -> CaseConfig:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"syntax error: {exc}", source=source) from None
    return from_dict(data, source, _line_map(text))


def preset_path(name: str):
    return resources.files("lagflux").joinpath("presets", f"{name}.toml")


def parse_case(path_or_preset: str | Path) -> CaseConfig:
    """Load a case file, or a shipped preset by name (``sod``, ``triple_point``, ...)."""
    p = Path(path_or_preset)
    if p.is_file():
        return parse_text(p.read_text(), str(p))
    name = p.stem if p.suffix == ".toml" and p.parent == Path(".") else str(path_or_preset)
    if name in PRESETS:
        return parse_text(preset_path(name).read_text(), f"{name}.toml")
    raise ConfigError(f"no such case file or preset: {path_or_preset}")


# ----------------------------------------------------------------------------
# serialisation


def to_dict(cfg: CaseConfig) -> dict:
    """Canonical TOML-ready form of ``cfg``."""
    d: dict[str, Any] = {"name": cfg.name, "solver": cfg.solver, "dim": cfg.dim}
    d["mesh"] = {"x": list(cfg.x_range), "nx": cfg.nx}
    if cfg.dim == 2:
        d["mesh"].update({"y": list(cfg.y_range), "ny": cfg.ny})
    else:
        d["mesh"]["y"] = list(cfg.y_range)
    d["physics"] = {
        "gamma": cfg.gamma, "cfl": cfg.cfl, "beta": cfg.beta, "order": cfg.order,
        "corrector": cfg.corrector, "remap_order": cfg.remap_order,
    }
    d["time"] = {"t_final": cfg.t_final, "max_steps": cfg.max_steps, "dump_times": list(cfg.dump_times)}
    if cfg.dump_every is not None:
        d["time"]["dump_every"] = cfg.dump_every
    b = cfg.boundary
    d["boundary"] = {"x_low": b.x_low, "x_high": b.x_high, "y_low": b.y_low, "y_high": b.y_high}
    if cfg.material_gammas:
        d["materials"] = {"gamma": list(cfg.material_gammas)}
    init: dict[str, Any] = {"kind": cfg.initial_kind}
    for k, v in cfg.initial_params:
        init[k] = list(v) if isinstance(v, tuple) else v
    if cfg.regions:
        init["region"] = [
            {"x": list(r.x), "y": list(r.y), "rho": r.rho, "u": r.u, "v": r.v, "p": r.p, "material": r.material + 1}
            for r in cfg.regions
        ]
    d["initial"] = init
    d["advection"] = {"period": cfg.period}
    d["run"] = {"threads": cfg.threads}
    return d


def dumps_case(cfg: CaseConfig) -> str:
    return tomli_w.dumps(to_dict(cfg))


def config_digest(cfg: CaseConfig) -> str:
    """SHA-256 of the canonical serialisation, thread count excluded."""
    d = to_dict(cfg)
    d.pop("run", None)
    return hashlib.sha256(tomli_w.dumps(d).encode()).hexdigest()
