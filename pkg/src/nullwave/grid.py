"""Uniform periodic 2D grids, scalar fields, derivative operators and region masks.

The convention throughout the package: ``values[i, j]`` is the sample at
``(x0 + i*dx, y0 + j*dy)``, axis 1 is the first spatial coordinate, axis 2
the second.  Spectral operators treat the domain as periodic; simulations
are sized so that nothing reaches the seam (no-wrap condition).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .errors import (
    EmptyRegionError,
    GridMismatchError,
    InvalidFieldError,
    UnsupportedOrderError,
)

__all__ = [
    "Grid2D",
    "Field2D",
    "RegionMask",
    "spatial_derivative",
    "l2_norm",
    "sup_norm",
    "weighted_data_norm",
    "fft_workers",
]


def fft_workers() -> int:
    """Worker count for FFT calls, capped by the NULLWAVE_THREADS env var."""
    cap = os.environ.get("NULLWAVE_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = max(1, min(n, int(cap)))
    return n


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid2D:
    """Uniform Cartesian grid, periodic for spectral purposes.

    nx, ny must be powers of two and at least 16 (spectral transforms
    assume this).  Node (i, j) sits at (x0 + i*dx, y0 + j*dy) exactly.
    """

    nx: int
    ny: int
    dx: float
    dy: float
    x0: float
    y0: float

    def __post_init__(self):
        if not (_is_pow2(self.nx) and _is_pow2(self.ny) and self.nx >= 16 and self.ny >= 16):
            raise ValueError("grid dimensions must be powers of two, >= 16")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("grid spacings must be positive")

    @staticmethod
    def square(n: int, half_width: float) -> "Grid2D":
        """n-by-n grid covering [-half_width, half_width) on both axes."""
        h = 2.0 * half_width / n
        return Grid2D(n, n, h, h, -half_width, -half_width)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def lx(self) -> float:
        return self.nx * self.dx

    @property
    def ly(self) -> float:
        return self.ny * self.dy


# Per-grid cached coordinate and wavenumber arrays.  Grid2D is frozen and
# hashable, so a plain dict works as a memo table.
_GRID_CACHE: dict = {}


def _cache(grid: Grid2D) -> dict:
    got = _GRID_CACHE.get(grid)
    if got is None:
        x = grid.x0 + grid.dx * np.arange(grid.nx)
        y = grid.y0 + grid.dy * np.arange(grid.ny)
        X, Y = np.meshgrid(x, y, indexing="ij")
        kx = 2.0 * np.pi * np.fft.fftfreq(grid.nx, d=grid.dx)
        ky = 2.0 * np.pi * np.fft.rfftfreq(grid.ny, d=grid.dy)
        KX, KY = np.meshgrid(kx, ky, indexing="ij")
        got = {
            "x": x,
            "y": y,
            "X": X,
            "Y": Y,
            "R": np.hypot(X, Y),
            "KX": KX,
            "KY": KY,
            "K2": KX**2 + KY**2,
        }
        _GRID_CACHE[grid] = got
    return got


def grid_coords(grid: Grid2D):
    """Meshgrid coordinate arrays (X, Y), 'ij' indexed."""
    c = _cache(grid)
    return c["X"], c["Y"]


def grid_radius(grid: Grid2D) -> np.ndarray:
    """|x| sampled at every node."""
    return _cache(grid)["R"]


def grid_wavenumbers(grid: Grid2D):
    """(KX, KY, K2) in the rfft2 layout."""
    c = _cache(grid)
    return c["KX"], c["KY"], c["K2"]


def rfft2(a: np.ndarray) -> np.ndarray:
    return sfft.rfft2(a, workers=fft_workers())


def irfft2(ahat: np.ndarray, shape) -> np.ndarray:
    return sfft.irfft2(ahat, s=shape, workers=fft_workers())


@dataclass
class Field2D:
    """Real scalar samples on a Grid2D.

    Construction validates finiteness; arithmetic requires identical grids.
    """

    grid: Grid2D
    values: np.ndarray
    _checked: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.nx, self.grid.ny):
            raise InvalidFieldError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.grid.nx}, {self.grid.ny})"
            )
        if not self._checked:
            if not np.all(np.isfinite(self.values)):
                raise InvalidFieldError("field contains non-finite samples")
            self._checked = True

    @staticmethod
    def zeros(grid: Grid2D) -> "Field2D":
        return Field2D(grid, np.zeros((grid.nx, grid.ny)), _checked=True)

    @staticmethod
    def from_function(grid: Grid2D, fn) -> "Field2D":
        X, Y = grid_coords(grid)
        return Field2D(grid, np.asarray(fn(X, Y), dtype=np.float64))

    def copy(self) -> "Field2D":
        return Field2D(self.grid, self.values.copy(), _checked=True)

    def _require_same_grid(self, other: "Field2D"):
        if self.grid != other.grid:
            raise GridMismatchError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, Field2D):
            self._require_same_grid(other)
            return Field2D(self.grid, self.values + other.values)
        return Field2D(self.grid, self.values + other)

    def __sub__(self, other):
        if isinstance(other, Field2D):
            self._require_same_grid(other)
            return Field2D(self.grid, self.values - other.values)
        return Field2D(self.grid, self.values - other)

    def __mul__(self, other):
        if isinstance(other, Field2D):
            self._require_same_grid(other)
            return Field2D(self.grid, self.values * other.values)
        return Field2D(self.grid, self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return Field2D(self.grid, -self.values, _checked=True)


@dataclass
class RegionMask:
    """Boolean node selection consistent with a geometric descriptor."""

    grid: Grid2D
    indicator: np.ndarray
    descriptor: str

    @staticmethod
    def all(grid: Grid2D) -> "RegionMask":
        return RegionMask(grid, np.ones((grid.nx, grid.ny), dtype=bool), "all")

    @staticmethod
    def ball(grid: Grid2D, radius: float) -> "RegionMask":
        r = grid_radius(grid)
        return RegionMask(grid, r <= radius, f"ball({radius})")

    @staticmethod
    def annulus(grid: Grid2D, r1: float, r2: float) -> "RegionMask":
        r = grid_radius(grid)
        return RegionMask(grid, (r >= r1) & (r <= r2), f"annulus({r1},{r2})")

    @staticmethod
    def interior_cone(grid: Grid2D, c: float, t: float) -> "RegionMask":
        """Nodes with r <= c*t, evaluated at the stated time."""
        r = grid_radius(grid)
        return RegionMask(grid, r <= c * t, f"interior-cone({c})@t={t}")

    @staticmethod
    def exterior_cone(grid: Grid2D, c: float, t: float) -> "RegionMask":
        r = grid_radius(grid)
        return RegionMask(grid, r >= c * t, f"exterior-cone({c})@t={t}")

    def count(self) -> int:
        return int(np.count_nonzero(self.indicator))


def _deriv_spectral(values: np.ndarray, grid: Grid2D, axis: int) -> np.ndarray:
    KX, KY, _ = grid_wavenumbers(grid)
    k = KX if axis == 1 else KY
    return irfft2(1j * k * rfft2(values), values.shape)


def _deriv_fd4(values: np.ndarray, grid: Grid2D, axis: int) -> np.ndarray:
    h = grid.dx if axis == 1 else grid.dy
    ax = 0 if axis == 1 else 1
    f1 = np.roll(values, -1, axis=ax)
    f2 = np.roll(values, -2, axis=ax)
    b1 = np.roll(values, 1, axis=ax)
    b2 = np.roll(values, 2, axis=ax)
    return (-f2 + 8.0 * f1 - 8.0 * b1 + b2) / (12.0 * h)


def deriv_values(values: np.ndarray, grid: Grid2D, axis: int, scheme: str = "spectral") -> np.ndarray:
    """Array-level derivative, shared by the solver hot loops."""
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    if scheme == "spectral":
        return _deriv_spectral(values, grid, axis)
    if scheme == "fd4":
        return _deriv_fd4(values, grid, axis)
    raise ValueError(f"unknown scheme {scheme!r}")


def laplacian_values(values: np.ndarray, grid: Grid2D) -> np.ndarray:
    _, _, K2 = grid_wavenumbers(grid)
    return irfft2(-K2 * rfft2(values), values.shape)


def spatial_derivative(f: Field2D, axis: int, scheme: str = "spectral") -> Field2D:
    """Discrete d/dx_axis of f.

    Spectral differentiation is exact for resolved trigonometric modes;
    fd4 is 4th-order centered with periodic wrap.
    """
    if not np.all(np.isfinite(f.values)):
        raise InvalidFieldError("derivative of non-finite field")
    return Field2D(f.grid, deriv_values(f.values, f.grid, axis, scheme), _checked=True)


def laplacian(f: Field2D) -> Field2D:
    return Field2D(f.grid, laplacian_values(f.values, f.grid), _checked=True)


def _masked(f: Field2D, mask: RegionMask | None):
    if mask is None:
        return f.values
    if mask.grid != f.grid:
        raise GridMismatchError("mask and field live on different grids")
    return f.values[mask.indicator]


def l2_norm(f: Field2D, mask: RegionMask | None = None) -> float:
    """Midpoint-rule L2 norm over the masked nodes."""
    v = _masked(f, mask)
    return float(np.sqrt(np.sum(v * v) * f.grid.cell_area))


def sup_norm(f: Field2D, mask: RegionMask | None = None) -> float:
    """Max of |f| over the masked nodes."""
    v = _masked(f, mask)
    if v.size == 0:
        raise EmptyRegionError(f"empty mask {getattr(mask, 'descriptor', '')!r}")
    return float(np.max(np.abs(v)))


def l1_norm(f: Field2D, mask: RegionMask | None = None) -> float:
    v = _masked(f, mask)
    return float(np.sum(np.abs(v)) * f.grid.cell_area)


def _grad_orders(values: np.ndarray, grid: Grid2D, kmax: int) -> list[list[np.ndarray]]:
    """All fd4 derivative combinations of order 0..kmax (with repetition)."""
    orders = [[values]]
    for _ in range(kmax):
        prev = orders[-1]
        nxt = []
        # derivatives of order k: apply d/dx1 to every order-(k-1) entry,
        # plus d/dx2 to the last one (pure x2 string); this enumerates the
        # distinct mixed derivatives exactly once.
        for a in prev:
            nxt.append(deriv_values(a, grid, 1, "fd4"))
        nxt.append(deriv_values(prev[-1], grid, 2, "fd4"))
        orders.append(nxt)
    return orders


def weighted_data_norm(u0: Field2D, u1: Field2D, v0: Field2D, v1: Field2D, K: int = 4) -> float:
    """Weighted initial-data size, truncated at derivative order K <= 4.

    Sums <|x|>^k-weighted fd4 gradients: L1-cap-L2 entries are realized as
    max(L1, L2); the Klein-Gordon entries carry one extra weight power and
    the velocity entries one more, matching the smallness condition shape.
    """
    if K > 4:
        raise UnsupportedOrderError("weighted data norms are capped at order 4")
    grid = u0.grid
    for f in (u1, v0, v1):
        if f.grid != grid:
            raise GridMismatchError("data fields live on different grids")
    r = grid_radius(grid)
    w = np.sqrt(1.0 + r * r)
    area = grid.cell_area

    def l1l2(a: np.ndarray) -> float:
        l1 = np.sum(np.abs(a)) * area
        l2 = np.sqrt(np.sum(a * a) * area)
        return float(max(l1, l2))

    def l2(a: np.ndarray) -> float:
        return float(np.sqrt(np.sum(a * a) * area))

    total = 0.0
    for name, f, base_pow, kind in (
        ("u0", u0, 0, "l1l2"),
        ("v0", v0, 1, "l2"),
        ("u1", u1, 1, "l1l2"),
        ("v1", v1, 2, "l2"),
    ):
        orders = _grad_orders(f.values, grid, K)
        for k, derivs in enumerate(orders):
            mag = np.zeros_like(f.values)
            for d in derivs:
                mag += np.abs(d)
            weighted = w ** (k + base_pow) * mag
            total += l1l2(weighted) if kind == "l1l2" else l2(weighted)
    return total
