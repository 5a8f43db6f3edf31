"""First-order-in-time system state and stored trajectories."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError
from .grid import Field2D, Grid2D

__all__ = ["EvolState", "Trajectory"]


@dataclass
class EvolState:
    """(t, u, du/dt, v, dv/dt) on a shared grid."""

    t: float
    u: Field2D
    ut: Field2D
    v: Field2D
    vt: Field2D

    def __post_init__(self):
        g = self.u.grid
        if any(f.grid != g for f in (self.ut, self.v, self.vt)):
            raise GridMismatchError("state components live on different grids")

    @property
    def grid(self) -> Grid2D:
        return self.u.grid

    @staticmethod
    def zero(grid: Grid2D, t: float = 0.0) -> "EvolState":
        z = Field2D.zeros(grid)
        return EvolState(t, z.copy(), z.copy(), z.copy(), z.copy())

    def __sub__(self, other: "EvolState") -> "EvolState":
        return EvolState(self.t, self.u - other.u, self.ut - other.ut,
                         self.v - other.v, self.vt - other.vt)

    def __add__(self, other: "EvolState") -> "EvolState":
        return EvolState(self.t, self.u + other.u, self.ut + other.ut,
                         self.v + other.v, self.vt + other.vt)

    def scaled(self, c: float) -> "EvolState":
        return EvolState(self.t, c * self.u, c * self.ut, c * self.v, c * self.vt)


@dataclass
class Trajectory:
    """Time-ordered list of states on a common grid and uniform mesh."""

    states: list

    def __post_init__(self):
        if self.states:
            g = self.states[0].grid
            for s in self.states:
                if s.grid != g:
                    raise GridMismatchError("trajectory mixes grids")
            ts = self.times
            if np.any(np.diff(ts) <= 0):
                raise ValueError("trajectory times must be increasing")

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def grid(self) -> Grid2D:
        return self.states[0].grid

    @property
    def dt(self) -> float:
        ts = self.times
        return float(ts[1] - ts[0]) if len(ts) > 1 else 0.0

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i) -> EvolState:
        return self.states[i]

    def __sub__(self, other: "Trajectory") -> "Trajectory":
        if len(self) != len(other) or not np.allclose(self.times, other.times):
            raise ValueError("trajectories live on different time meshes")
        return Trajectory([a - b for a, b in zip(self.states, other.states)])

    def scaled(self, c: float) -> "Trajectory":
        return Trajectory([s.scaled(c) for s in self.states])

    @staticmethod
    def zero_like(other: "Trajectory") -> "Trajectory":
        g = other.grid
        return Trajectory([EvolState.zero(g, t=s.t) for s in other.states])
