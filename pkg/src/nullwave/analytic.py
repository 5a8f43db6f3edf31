"""Closed-form spacetime test functions with exact derivatives.

Used by the identity corpus and the test suite: every operator identity in
the package is checked on functions whose derivatives are evaluated from
closed forms rather than differencing.  Two families cover everything we
need (sums are allowed): polynomials in (t, x1, x2) and linear-phase
sinusoids, both of which differentiate mechanically to any order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Polynomial", "PlaneWave", "SumFn", "PointJet2", "catalog", "point_jet2"]


class AnalyticFn:
    def eval(self, t, x1, x2, idx=(0, 0, 0)):
        """Value of the (it, i1, i2) mixed partial derivative."""
        raise NotImplementedError

    def __add__(self, other):
        return SumFn([self, other])


@dataclass
class Polynomial(AnalyticFn):
    """sum c * t^i * x1^j * x2^k over coeffs {(i, j, k): c}."""

    coeffs: dict

    def eval(self, t, x1, x2, idx=(0, 0, 0)):
        it, j1, j2 = idx
        t = np.asarray(t, dtype=float)
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        out = np.zeros(np.broadcast(t, x1, x2).shape)
        for (i, j, k), c in self.coeffs.items():
            if i < it or j < j1 or k < j2:
                continue
            fac = c
            for p, q in ((i, it), (j, j1), (k, j2)):
                for m in range(q):
                    fac *= p - m
            out = out + fac * t ** (i - it) * x1 ** (j - j1) * x2 ** (k - j2)
        return out


@dataclass
class PlaneWave(AnalyticFn):
    """amp * sin(a*t + b*x1 + c*x2 + phase)."""

    a: float
    b: float
    c: float
    amp: float = 1.0
    phase: float = 0.0

    def eval(self, t, x1, x2, idx=(0, 0, 0)):
        it, j1, j2 = idx
        n = it + j1 + j2
        coef = self.amp * self.a**it * self.b**j1 * self.c**j2
        theta = self.a * np.asarray(t, float) + self.b * np.asarray(x1, float) \
            + self.c * np.asarray(x2, float) + self.phase + n * np.pi / 2.0
        return coef * np.sin(theta)


@dataclass
class SumFn(AnalyticFn):
    terms: list = field(default_factory=list)

    def eval(self, t, x1, x2, idx=(0, 0, 0)):
        out = self.terms[0].eval(t, x1, x2, idx)
        for fn in self.terms[1:]:
            out = out + fn.eval(t, x1, x2, idx)
        return out


@dataclass
class PointJet2:
    """Exact derivatives of a scalar function at points, through order two."""

    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    w: np.ndarray
    wt: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    wtt: np.ndarray
    wt1: np.ndarray
    wt2: np.ndarray
    w11: np.ndarray
    w12: np.ndarray
    w22: np.ndarray

    def first(self):
        """(wt, w1, w2) triple, index order t, x1, x2."""
        return (self.wt, self.w1, self.w2)


def point_jet2(fn: AnalyticFn, t, x1, x2) -> PointJet2:
    e = fn.eval
    return PointJet2(
        t=np.asarray(t, float), x1=np.asarray(x1, float), x2=np.asarray(x2, float),
        w=e(t, x1, x2, (0, 0, 0)),
        wt=e(t, x1, x2, (1, 0, 0)),
        w1=e(t, x1, x2, (0, 1, 0)),
        w2=e(t, x1, x2, (0, 0, 1)),
        wtt=e(t, x1, x2, (2, 0, 0)),
        wt1=e(t, x1, x2, (1, 1, 0)),
        wt2=e(t, x1, x2, (1, 0, 1)),
        w11=e(t, x1, x2, (0, 2, 0)),
        w12=e(t, x1, x2, (0, 1, 1)),
        w22=e(t, x1, x2, (0, 0, 2)),
    )


def catalog() -> dict:
    """Standard corpus of smooth test functions for operator identities."""
    return {
        "quadratic-cone": Polynomial({(2, 0, 0): 1.0, (0, 2, 0): -1.0, (0, 0, 2): -1.0}),
        "mixed-cubic": Polynomial({
            (3, 0, 0): 1.0 / 6.0, (1, 1, 1): 1.0, (0, 2, 1): 1.0,
            (2, 0, 1): -1.0, (1, 2, 0): 0.5, (0, 0, 3): -1.0 / 3.0,
        }),
        "space-quartic": Polynomial({
            (0, 4, 0): 0.25, (0, 0, 4): -0.125, (0, 2, 2): 0.5,
            (2, 2, 0): -0.5, (1, 0, 2): 1.0,
        }),
        "standing": PlaneWave(1.0, 1.0, 0.0, amp=0.7, phase=0.3),
        "oblique": PlaneWave(0.6, -0.8, 0.5, amp=1.1, phase=-0.2),
        "null-ray": PlaneWave(1.0, -1.0, 0.0, amp=0.9),
        "mixture": SumFn([
            Polynomial({(2, 0, 0): 0.3, (0, 2, 0): 0.2, (1, 0, 1): -0.4, (0, 1, 0): 1.0}),
            PlaneWave(0.9, 0.4, -0.7, amp=0.5, phase=0.8),
        ]),
    }
