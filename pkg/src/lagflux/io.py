"""CSV field dumps and diagnostics logs."""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path
from typing import Iterable

import numpy as np

from .grid import CartesianGrid


def dump_columns(grid: CartesianGrid, fields: dict[str, np.ndarray]) -> tuple[list[str], np.ndarray]:
    """Column names and a row-per-cell table, rows ordered x-fastest."""
    X, Y = grid.meshgrid()
    names = ["x"] if grid.dim == 1 else ["x", "y"]
    cols = [X] if grid.dim == 1 else [X, Y]
    for key in ("rho", "u", "v", "p", "e_internal"):
        if grid.dim == 1 and key == "v":
            continue
        names.append(key)
        cols.append(fields[key])
    k = 1
    while f"y{k}" in fields:
        names.append(f"y{k}")
        cols.append(fields[f"y{k}"])
        k += 1
    return names, np.stack([np.asarray(c).ravel() for c in cols], axis=1)


def write_field_csv(path: str | Path, grid: CartesianGrid, fields: dict[str, np.ndarray], digest: str, time: float) -> Path:
    """Write one dump; the first line records the config digest and time."""
    names, table = dump_columns(grid, fields)
    return write_table(path, names, table, digest, time)


def write_table(path: str | Path, names: list[str], table: np.ndarray, digest: str, time: float) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(f"# config_sha256={digest} time={time!r}\n" + ",".join(names) + "\n")
        np.savetxt(fh, table, fmt="%.17g", delimiter=",")
    return path


def read_field_csv(path: str | Path) -> tuple[dict[str, str], dict[str, np.ndarray]]:
    """Parse a dump back into ``(header metadata, columns)``."""
    with open(path) as fh:
        meta_line = fh.readline()
        names = fh.readline().strip().split(",")
        table = np.loadtxt(fh, delimiter=",", ndmin=2)
    meta = dict(item.split("=", 1) for item in meta_line.lstrip("# ").split())
    return meta, {n: table[:, i] for i, n in enumerate(names)}


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


DIAGNOSTIC_COLUMNS = ("step", "time", "dt", "min_rho", "min_p")


def write_diagnostics(path: str | Path, history: Iterable) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DIAGNOSTIC_COLUMNS)
        for h in history:
            w.writerow([h.step, repr(h.time), repr(h.dt), repr(h.min_rho), repr(h.min_p)])
    return path
