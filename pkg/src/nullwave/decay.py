"""Region-restricted weighted sup norms and power-law fits.

A decay series is the per-snapshot sup over a mask of a weighted quantity;
rates are extracted by least squares on log-log axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnfittableError
from .grid import RegionMask, deriv_values, grid_radius, laplacian_values
from .nullforms import Couplings, Jet1, coupled_source
from .state import EvolState

__all__ = ["DecayFit", "TimeSeries", "weighted_sup_value", "weighted_sup_series", "fit_power_law"]


@dataclass
class TimeSeries:
    series_id: str
    t: np.ndarray
    values: np.ndarray


@dataclass
class DecayFit:
    series_id: str
    exponent: float
    amplitude: float
    t_lo: float
    t_hi: float
    rsq: float


def _quantity_values(state: EvolState, quantity: str, P: Couplings | None, scheme: str):
    g = state.grid
    if quantity == "v":
        return np.abs(state.v.values)
    if quantity == "u":
        return np.abs(state.u.values)
    if quantity == "du":
        d1 = deriv_values(state.u.values, g, 1, scheme)
        d2 = deriv_values(state.u.values, g, 2, scheme)
        return np.maximum(np.abs(state.ut.values), np.maximum(np.abs(d1), np.abs(d2)))
    if quantity == "ddu":
        if P is None:
            raise ValueError("ddu needs the couplings for the equation substitution")
        du = [state.ut.values] + [deriv_values(state.u.values, g, a, scheme) for a in (1, 2)]
        dv = [state.vt.values] + [deriv_values(state.v.values, g, a, scheme) for a in (1, 2)]
        f1 = coupled_source(P.P1, Jet1(state.u.values, *du), Jet1(state.v.values, *dv))
        utt = laplacian_values(state.u.values, g) + f1
        out = np.abs(utt)
        for a in (1, 2):
            out = np.maximum(out, np.abs(deriv_values(state.ut.values, g, a, scheme)))
            for b in range(a, 3):
                out = np.maximum(out, np.abs(deriv_values(du[a], g, b, scheme)))
        return out
    raise ValueError(f"unknown quantity {quantity!r}")


def _weight_values(state: EvolState, weight):
    if weight in (None, "none"):
        return 1.0
    t = state.t
    if weight == "t":
        return np.sqrt(1.0 + t * t)
    if weight == "t-half":
        return (1.0 + t * t) ** 0.25
    if isinstance(weight, tuple) and weight[0] == "cone":
        _, p, q = weight
        r = grid_radius(state.grid)
        return (1.0 + (t - r) ** 2) ** (0.5 * p) * (1.0 + t * t) ** (0.5 * q)
    raise ValueError(f"unknown weight {weight!r}")


def weighted_sup_value(state: EvolState, quantity: str, weight=None,
                       mask: RegionMask | None = None, P: Couplings | None = None,
                       scheme: str = "spectral") -> float:
    vals = _quantity_values(state, quantity, P, scheme) * _weight_values(state, weight)
    if mask is not None:
        vals = vals[mask.indicator]
    return float(np.max(vals))


def weighted_sup_series(snapshots, quantity: str, weight=None,
                        mask: RegionMask | None = None, P: Couplings | None = None,
                        series_id: str | None = None, scheme: str = "spectral") -> TimeSeries:
    """Per-snapshot weighted sup over the mask, as a time series."""
    ts, vals = [], []
    for s in snapshots:
        ts.append(s.t)
        vals.append(weighted_sup_value(s, quantity, weight, mask, P, scheme))
    name = series_id or f"{quantity}_sup"
    return TimeSeries(name, np.array(ts), np.array(vals))


def fit_power_law(series: TimeSeries, window: tuple[float, float]) -> DecayFit:
    """Least-squares slope of log(value) against log(t) on the window."""
    t_lo, t_hi = window
    if not t_lo < t_hi:
        raise ValueError("empty fit window")
    sel = (series.t >= t_lo) & (series.t <= t_hi) & (series.t > 0)
    t = series.t[sel]
    y = series.values[sel]
    if t.size < 8:
        raise UnfittableError(f"window [{t_lo}, {t_hi}] holds {t.size} < 8 samples")
    if np.any(y <= 0):
        raise UnfittableError("series is not strictly positive on the window")
    lt, ly = np.log(t), np.log(y)
    slope, intercept = np.polyfit(lt, ly, 1)
    resid = ly - (slope * lt + intercept)
    sstot = float(np.sum((ly - ly.mean()) ** 2))
    rsq = 1.0 if sstot == 0.0 else 1.0 - float(np.sum(resid**2)) / sstot
    return DecayFit(series.series_id, float(slope), float(np.exp(intercept)),
                    float(t_lo), float(t_hi), rsq)
