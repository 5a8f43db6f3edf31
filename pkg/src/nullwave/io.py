"""Deterministic CSV writers, snapshot binaries, and run manifests."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .grid import Field2D, Grid2D
from .state import EvolState

__all__ = ["write_csv", "write_snapshot", "read_snapshot", "RunManifest"]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(path: str, header, rows):
    """Fixed-format CSV so identical data gives identical bytes."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


_FIELDS = ("u", "ut", "v", "vt")


def write_snapshot(directory: str, index: int, state: EvolState) -> list:
    """Flat little-endian float64 binary plus a plain-text sidecar header."""
    os.makedirs(directory, exist_ok=True)
    g = state.grid
    stem = os.path.join(directory, f"snap_{index:06d}")
    data = np.concatenate([getattr(state, f).values.ravel() for f in _FIELDS])
    data.astype("<f8").tofile(stem + ".bin")
    with open(stem + ".txt", "w") as fh:
        fh.write(f"t = {_fmt(float(state.t))}\n")
        fh.write(f"nx = {g.nx}\nny = {g.ny}\n")
        fh.write(f"dx = {_fmt(g.dx)}\ndy = {_fmt(g.dy)}\n")
        fh.write(f"x0 = {_fmt(g.x0)}\ny0 = {_fmt(g.y0)}\n")
        fh.write(f"fields = {' '.join(_FIELDS)}\n")
        fh.write("byte_order = little-endian\ndtype = float64\n")
    return [stem + ".bin", stem + ".txt"]


def read_snapshot(stem: str) -> EvolState:
    meta = {}
    with open(stem + ".txt") as fh:
        for line in fh:
            k, _, v = line.partition("=")
            meta[k.strip()] = v.strip()
    g = Grid2D(int(meta["nx"]), int(meta["ny"]), float(meta["dx"]), float(meta["dy"]),
               float(meta["x0"]), float(meta["y0"]))
    raw = np.fromfile(stem + ".bin", dtype="<f8").reshape(4, g.nx, g.ny)
    fields = [Field2D(g, a.copy()) for a in raw]
    return EvolState(float(meta["t"]), *fields)


@dataclass
class RunManifest:
    """Record of one command invocation and everything it wrote."""

    command: str
    config_hash: str
    started: str = ""
    finished: str = ""
    wall_seconds: float = 0.0
    outputs: list = field(default_factory=list)
    acceptance: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    code_version: str = __version__

    def start(self):
        self.started = time.strftime("%Y-%m-%dT%H:%M:%S")
        self._t0 = time.perf_counter()
        return self

    def add(self, *paths):
        for p in paths:
            self.outputs.append({"path": os.path.abspath(p),
                                 "bytes": os.path.getsize(p)})

    def finish(self, out_dir: str) -> str:
        self.finished = time.strftime("%Y-%m-%dT%H:%M:%S")
        self.wall_seconds = time.perf_counter() - getattr(self, "_t0", time.perf_counter())
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "manifest.json")
        payload = {
            "command": self.command,
            "config_hash": self.config_hash,
            "code_version": self.code_version,
            "started": self.started,
            "finished": self.finished,
            "wall_seconds": self.wall_seconds,
            "outputs": self.outputs,
            "acceptance": self.acceptance,
            "notes": self.notes,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path
