"""Run configuration: INI-style sections, strict key validation, hashing.

Unknown sections or keys are errors, not warnings; error messages carry
the offending line number where it can be recovered from the file.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .evolve import SimConfig
from .nullforms import Couplings

__all__ = ["PicardConfig", "LoadedConfig", "load_config", "config_hash"]

_SCHEMA = {
    "grid": {"n", "half_width"},
    "data": {"profile", "epsilon", "width"},
    "couplings": {"p1", "p2"},
    "time": {"t_end", "cfl", "output_stride"},
    "diagnostics": {"delta", "snapshots", "fit_window", "interior_ball"},
    "picard": {"iterations", "dt", "delta", "epsilon"},
}
_REQUIRED = {
    "grid": {"n", "half_width"},
    "data": {"profile", "epsilon"},
    "couplings": {"p1", "p2"},
    "time": {"t_end"},
}


@dataclass
class PicardConfig:
    iterations: int
    dt: float
    delta: float
    epsilon: float


@dataclass
class LoadedConfig:
    sim: SimConfig
    picard: PicardConfig | None
    fit_window: tuple | None
    snapshots: bool
    interior_ball: float
    raw: dict
    hash: str
    path: str


def _find_line(path: str, token: str) -> int | None:
    try:
        with open(path) as fh:
            for i, line in enumerate(fh, start=1):
                s = line.strip()
                if s.startswith(token) or s.startswith(f"[{token}]"):
                    return i
    except OSError:
        pass
    return None


def _err(path: str, token: str, message: str):
    line = _find_line(path, token)
    where = f"{path}:{line}" if line else path
    raise ConfigError(f"{where}: {message}")


def _matrix(text: str, path: str, key: str) -> np.ndarray:
    rows = [r for r in text.splitlines() if r.strip()]
    try:
        m = np.array([[float(v) for v in r.split()] for r in rows])
    except ValueError:
        _err(path, key, f"{key} entries must be numbers")
    if m.shape != (3, 3):
        _err(path, key, f"{key} must have 3 rows of 3 numbers, got shape {m.shape}")
    return m


def load_config(path: str) -> LoadedConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            cp.read_file(fh, source=path)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except configparser.Error as exc:
        raise ConfigError(str(exc))

    for section in cp.sections():
        if section not in _SCHEMA:
            _err(path, section, f"unknown section [{section}]")
        for key in cp[section]:
            if key not in _SCHEMA[section]:
                _err(path, key, f"unknown key {key!r} in [{section}]")
    for section, keys in _REQUIRED.items():
        if section not in cp:
            raise ConfigError(f"{path}: missing section [{section}]")
        for key in keys:
            if key not in cp[section]:
                _err(path, section, f"missing key {key!r} in [{section}]")

    def get(section, key, cast, default=None):
        if key not in cp[section]:
            return default
        text = cp[section][key]
        try:
            return cast(text)
        except (TypeError, ValueError):
            _err(path, key, f"cannot parse {key!r} = {text!r}")

    p1 = _matrix(cp["couplings"]["p1"], path, "p1")
    p2 = _matrix(cp["couplings"]["p2"], path, "p2")
    t_end = get("time", "t_end", float)
    sim = SimConfig(
        n=get("grid", "n", int),
        half_width=get("grid", "half_width", float),
        profile=cp["data"]["profile"].strip(),
        epsilon=get("data", "epsilon", float),
        width=get("data", "width", float, 1.0),
        couplings=Couplings(p1, p2),
        t_end=t_end,
        cfl=get("time", "cfl", float, 0.5),
        output_stride=get("time", "output_stride", float, 1.0),
        delta=get("diagnostics", "delta", float, 0.1) if "diagnostics" in cp else 0.1,
    )

    fit_window = None
    snapshots = False
    interior_ball = 2.0
    if "diagnostics" in cp:
        if "fit_window" in cp["diagnostics"]:
            parts = cp["diagnostics"]["fit_window"].replace(",", " ").split()
            if len(parts) != 2:
                _err(path, "fit_window", "fit_window takes two numbers")
            fit_window = (float(parts[0]), float(parts[1]))
        snapshots = cp["diagnostics"].getboolean("snapshots", fallback=False)
        interior_ball = get("diagnostics", "interior_ball", float, 2.0)
    if fit_window is None:
        fit_window = (t_end / 4.0, t_end)

    pic = None
    if "picard" in cp:
        pic = PicardConfig(
            iterations=get("picard", "iterations", int, 6),
            dt=get("picard", "dt", float),
            delta=get("picard", "delta", float, 0.5),
            epsilon=get("picard", "epsilon", float, sim.epsilon),
        )
        if pic.dt is None:
            _err(path, "picard", "missing key 'dt' in [picard]")
        if pic.epsilon > pic.delta / 100.0 + 1e-15:
            _err(path, "picard",
                 f"contraction-regime config needs epsilon <= delta/100 "
                 f"({pic.epsilon} > {pic.delta / 100.0})")

    raw = {s: dict(cp[s]) for s in cp.sections()}
    return LoadedConfig(
        sim=sim, picard=pic, fit_window=fit_window, snapshots=snapshots,
        interior_ball=interior_ball, raw=raw, hash=config_hash(raw), path=path,
    )


def config_hash(raw: dict) -> str:
    blob = json.dumps(raw, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
