"""Symmetry vector fields of the flat cone and their exact operator identities.

The admissible set is translations, the rotation, and the two boosts; the
scaling field is tracked separately because it fails to commute with the
Klein-Gordon operator and is kept out of commuted strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .analytic import AnalyticFn, PointJet2
from .errors import OutOfDomainError
from .grid import Field2D, Grid2D, deriv_values, grid_coords, l2_norm, sup_norm
from .state import Trajectory

__all__ = [
    "VectorFieldId",
    "ADMISSIBLE",
    "TimeJetField",
    "apply_gamma",
    "apply_gamma_dt",
    "commutator_residual",
    "weighted_derivative_residual",
    "weighted_derivative_residual_jets",
    "wave_operator_decomposition_residual",
    "wave_decomposition_residual_jets",
    "jet2_from_timejet",
    "ks_ratio",
]


class VectorFieldId(Enum):
    Dt = "Dt"
    D1 = "D1"
    D2 = "D2"
    Omega12 = "Omega12"
    L1 = "L1"
    L2 = "L2"
    S = "S"


ADMISSIBLE = (
    VectorFieldId.Dt, VectorFieldId.D1, VectorFieldId.D2,
    VectorFieldId.Omega12, VectorFieldId.L1, VectorFieldId.L2,
)


def _coeffs(gid: VectorFieldId, t, x1, x2):
    """Coefficient triple (c^t, c^1, c^2) of the first-order operator."""
    zero = np.zeros_like(np.asarray(x1, float))
    one = np.ones_like(zero)
    if gid is VectorFieldId.Dt:
        return one, zero, zero
    if gid is VectorFieldId.D1:
        return zero, one, zero
    if gid is VectorFieldId.D2:
        return zero, zero, one
    if gid is VectorFieldId.Omega12:
        return zero, -np.asarray(x2, float), np.asarray(x1, float)
    if gid is VectorFieldId.L1:
        return np.asarray(x1, float), t * one, zero
    if gid is VectorFieldId.L2:
        return np.asarray(x2, float), zero, t * one
    if gid is VectorFieldId.S:
        return t * one, np.asarray(x1, float), np.asarray(x2, float)
    raise ValueError(gid)


# [A, B] expansions in the same basis; pairs not listed commute.
_COMM = {
    (VectorFieldId.D1, VectorFieldId.Omega12): [(1.0, VectorFieldId.D2)],
    (VectorFieldId.D2, VectorFieldId.Omega12): [(-1.0, VectorFieldId.D1)],
    (VectorFieldId.Dt, VectorFieldId.L1): [(1.0, VectorFieldId.D1)],
    (VectorFieldId.Dt, VectorFieldId.L2): [(1.0, VectorFieldId.D2)],
    (VectorFieldId.D1, VectorFieldId.L1): [(1.0, VectorFieldId.Dt)],
    (VectorFieldId.D2, VectorFieldId.L2): [(1.0, VectorFieldId.Dt)],
    (VectorFieldId.Omega12, VectorFieldId.L1): [(-1.0, VectorFieldId.L2)],
    (VectorFieldId.Omega12, VectorFieldId.L2): [(1.0, VectorFieldId.L1)],
    (VectorFieldId.L1, VectorFieldId.L2): [(1.0, VectorFieldId.Omega12)],
    (VectorFieldId.Dt, VectorFieldId.S): [(1.0, VectorFieldId.Dt)],
    (VectorFieldId.D1, VectorFieldId.S): [(1.0, VectorFieldId.D1)],
    (VectorFieldId.D2, VectorFieldId.S): [(1.0, VectorFieldId.D2)],
}


def commutator_expansion(gid_a: VectorFieldId, gid_b: VectorFieldId):
    if (gid_a, gid_b) in _COMM:
        return _COMM[(gid_a, gid_b)]
    if (gid_b, gid_a) in _COMM:
        return [(-c, g) for c, g in _COMM[(gid_b, gid_a)]]
    return []


@dataclass
class TimeJetField:
    """A field slice together with its first and second time derivatives.

    wtt_source records whether the second derivative came from substituting
    the evolution equation ("pde"), from differencing a stored slab
    ("slab"), or from a closed form ("exact").
    """

    grid: Grid2D
    t: float
    w: Field2D
    wt: Field2D
    wtt: Field2D | None = None
    wtt_source: str = "pde"


def _gamma_values(gid, w, wt, grid, t, scheme="spectral"):
    X, Y = grid_coords(grid)
    if gid is VectorFieldId.Dt:
        return wt.copy() if wt is not None else None
    d1 = deriv_values(w, grid, 1, scheme)
    d2 = deriv_values(w, grid, 2, scheme)
    if gid is VectorFieldId.D1:
        return d1
    if gid is VectorFieldId.D2:
        return d2
    if gid is VectorFieldId.Omega12:
        return X * d2 - Y * d1
    if gid is VectorFieldId.L1:
        return X * wt + t * d1
    if gid is VectorFieldId.L2:
        return Y * wt + t * d2
    if gid is VectorFieldId.S:
        return t * wt + X * d1 + Y * d2
    raise ValueError(gid)


def apply_gamma(gid: VectorFieldId, f: TimeJetField, scheme: str = "spectral") -> Field2D:
    """First-order vector field applied to the slice."""
    vals = _gamma_values(gid, f.w.values, f.wt.values, f.grid, f.t, scheme)
    return Field2D(f.grid, vals)


def apply_gamma_dt(gid: VectorFieldId, f: TimeJetField, scheme: str = "spectral") -> Field2D:
    """Time derivative of the Gamma-transformed slice, via commutators.

    d/dt commutes with translations and the rotation; for boosts it picks
    up the matching space derivative, for scaling an extra d/dt.
    """
    if f.wtt is None:
        raise ValueError("apply_gamma_dt needs the second time derivative")
    g = f.grid
    w, wt, wtt, t = f.w.values, f.wt.values, f.wtt.values, f.t
    if gid is VectorFieldId.Dt:
        return f.wtt.copy()
    if gid in (VectorFieldId.D1, VectorFieldId.D2):
        ax = 1 if gid is VectorFieldId.D1 else 2
        return Field2D(g, deriv_values(wt, g, ax, scheme))
    vals = _gamma_values(gid, wt, wtt, g, t, scheme)
    if gid in (VectorFieldId.L1, VectorFieldId.L2):
        ax = 1 if gid is VectorFieldId.L1 else 2
        vals = vals + deriv_values(w, g, ax, scheme)
    elif gid is VectorFieldId.S:
        vals = vals + wt
    return Field2D(g, vals)


def _apply_gamma_fn(gid, fn: AnalyticFn, t, x1, x2, idx=(0, 0, 0)):
    """Derivative (idx) of Gamma(fn) at points, all in closed form."""
    it, j1, j2 = idx
    ct, c1, c2 = _coeffs(gid, t, x1, x2)
    # product-rule expansion: coefficients are linear, so only first
    # derivatives of the coefficients survive
    base = (
        ct * fn.eval(t, x1, x2, (it + 1, j1, j2))
        + c1 * fn.eval(t, x1, x2, (it, j1 + 1, j2))
        + c2 * fn.eval(t, x1, x2, (it, j1, j2 + 1))
    )
    dc = _coeff_gradients(gid)
    out = base
    for nu, cnt in ((0, it), (1, j1), (2, j2)):
        if cnt == 0:
            continue
        for mu in range(3):
            if dc[nu][mu] == 0.0:
                continue
            shift = [it, j1, j2]
            shift[nu] -= 1
            shift[mu] += 1
            out = out + cnt * dc[nu][mu] * fn.eval(t, x1, x2, tuple(shift))
    return out


def _coeff_gradients(gid):
    dc = np.zeros((3, 3))
    if gid is VectorFieldId.Omega12:
        dc[2][1] = -1.0
        dc[1][2] = 1.0
    elif gid is VectorFieldId.L1:
        dc[1][0] = 1.0
        dc[0][1] = 1.0
    elif gid is VectorFieldId.L2:
        dc[2][0] = 1.0
        dc[0][2] = 1.0
    elif gid is VectorFieldId.S:
        dc[0][0] = dc[1][1] = dc[2][2] = 1.0
    return dc


def _box_fn(fn: AnalyticFn, t, x1, x2):
    return (-fn.eval(t, x1, x2, (2, 0, 0)) + fn.eval(t, x1, x2, (0, 2, 0))
            + fn.eval(t, x1, x2, (0, 0, 2)))


def commutator_residual(gid_a: VectorFieldId, gid_b: VectorFieldId | None,
                        fn: AnalyticFn, t, x1, x2) -> float:
    """Max-abs commutator defect on an analytic test function.

    With gid_b None this checks the d'Alembertian commutator: zero for the
    admissible fields, and Box(S w) - S(Box w) - 2 Box w for scaling.  With
    two ids it checks [A, B]w against the tabulated expansion.
    """
    if gid_b is None:
        box_gamma = (-_apply_gamma_fn(gid_a, fn, t, x1, x2, (2, 0, 0))
                     + _apply_gamma_fn(gid_a, fn, t, x1, x2, (0, 2, 0))
                     + _apply_gamma_fn(gid_a, fn, t, x1, x2, (0, 0, 2)))
        ct, c1, c2 = _coeffs(gid_a, t, x1, x2)
        gamma_box = (ct * (-fn.eval(t, x1, x2, (3, 0, 0)) + fn.eval(t, x1, x2, (1, 2, 0))
                           + fn.eval(t, x1, x2, (1, 0, 2)))
                     + c1 * (-fn.eval(t, x1, x2, (2, 1, 0)) + fn.eval(t, x1, x2, (0, 3, 0))
                             + fn.eval(t, x1, x2, (0, 1, 2)))
                     + c2 * (-fn.eval(t, x1, x2, (2, 0, 1)) + fn.eval(t, x1, x2, (0, 2, 1))
                             + fn.eval(t, x1, x2, (0, 0, 3))))
        res = box_gamma - gamma_box
        if gid_a is VectorFieldId.S:
            res = res - 2.0 * _box_fn(fn, t, x1, x2)
        return float(np.max(np.abs(res)))

    ab = _apply_gamma_fn(gid_a, _GammaOf(fn, gid_b), t, x1, x2)
    ba = _apply_gamma_fn(gid_b, _GammaOf(fn, gid_a), t, x1, x2)
    res = ab - ba
    for coef, gid in commutator_expansion(gid_a, gid_b):
        res = res - coef * _apply_gamma_fn(gid, fn, t, x1, x2)
    return float(np.max(np.abs(res)))


class _GammaOf(AnalyticFn):
    """Gamma applied to an analytic function, itself differentiable."""

    def __init__(self, fn, gid):
        self.fn = fn
        self.gid = gid

    def eval(self, t, x1, x2, idx=(0, 0, 0)):
        return _apply_gamma_fn(self.gid, self.fn, t, x1, x2, idx)


def weighted_derivative_residual_jets(j: PointJet2):
    """Defect of the cone-weighted derivative identities at points.

    res_t = (t^2 - r^2) wt - [t Sw - x^a L_a w]; the spatial versions use
    the boost/rotation completion.  All three vanish identically.
    """
    t, x1, x2 = j.t, j.x1, j.x2
    wt, w1, w2 = j.wt, j.w1, j.w2
    r2 = x1 * x1 + x2 * x2
    sw = t * wt + x1 * w1 + x2 * w2
    l1 = x1 * wt + t * w1
    l2 = x2 * wt + t * w2
    om = x1 * w2 - x2 * w1
    res_t = (t * t - r2) * wt - (t * sw - x1 * l1 - x2 * l2)
    res_1 = (t * t - r2) * w1 - (t * l1 - x1 * sw + x2 * om)
    res_2 = (t * t - r2) * w2 - (t * l2 - x2 * sw - x1 * om)
    return res_t, res_1, res_2


def weighted_derivative_residual(f: TimeJetField, scheme: str = "spectral"):
    """Grid version of the cone-weighted derivative identities."""
    g = f.grid
    X, Y = grid_coords(g)
    j = PointJet2(
        t=np.full_like(X, f.t), x1=X, x2=Y,
        w=f.w.values, wt=f.wt.values,
        w1=deriv_values(f.w.values, g, 1, scheme),
        w2=deriv_values(f.w.values, g, 2, scheme),
        wtt=None, wt1=None, wt2=None, w11=None, w12=None, w22=None,
    )
    res_t, res_1, res_2 = weighted_derivative_residual_jets(j)
    return Field2D(g, res_t), Field2D(g, res_1), Field2D(g, res_2)


def wave_decomposition_residual_jets(j: PointJet2):
    """Defect of the wave-operator rewriting through boosts, at points.

    The rewriting divides by t^2 and is used for t >= 1:
      -Box = ((t-r)(t+r)/t^2) dtt + 2(x^a/t^2) dt L_a - (1/t^2) L^a L_a
             + (2/t) dt - (x^a/t^2) d_a
    and is an exact identity (zero residual on exact jets).
    """
    t, x1, x2 = j.t, j.x1, j.x2
    if np.any(t < 1.0):
        raise OutOfDomainError("wave-operator decomposition requires t >= 1")
    r2 = x1 * x1 + x2 * x2
    lhs = j.wtt - (j.w11 + j.w22)

    dtl = {}
    ll = {}
    for a, (xa, wa, wta, waa) in enumerate(
        ((x1, j.w1, j.wt1, j.w11), (x2, j.w2, j.wt2, j.w22)), start=1
    ):
        dtl[a] = xa * j.wtt + wa + t * wta
        ll[a] = xa * xa * j.wtt + xa * wa + 2.0 * t * xa * wta + t * j.wt + t * t * waa

    rhs = ((t * t - r2) / t**2) * j.wtt \
        + (2.0 / t**2) * (x1 * dtl[1] + x2 * dtl[2]) \
        - (ll[1] + ll[2]) / t**2 \
        + (2.0 / t) * j.wt \
        - (x1 * j.w1 + x2 * j.w2) / t**2
    return lhs - rhs


def jet2_from_timejet(f: TimeJetField, scheme: str = "spectral") -> PointJet2:
    """Grid-differenced full second-order jet of a slice."""
    g = f.grid
    X, Y = grid_coords(g)
    w, wt = f.w.values, f.wt.values
    w1 = deriv_values(w, g, 1, scheme)
    w2 = deriv_values(w, g, 2, scheme)
    return PointJet2(
        t=np.full_like(X, f.t), x1=X, x2=Y, w=w, wt=wt, w1=w1, w2=w2,
        wtt=f.wtt.values if f.wtt is not None else None,
        wt1=deriv_values(wt, g, 1, scheme),
        wt2=deriv_values(wt, g, 2, scheme),
        w11=deriv_values(w1, g, 1, scheme),
        w12=deriv_values(w1, g, 2, scheme),
        w22=deriv_values(w2, g, 2, scheme),
    )


def wave_operator_decomposition_residual(f: TimeJetField, scheme: str = "spectral") -> Field2D:
    if f.t < 1.0:
        raise OutOfDomainError("wave-operator decomposition requires t >= 1")
    if f.wtt is None:
        raise ValueError("decomposition needs the second time derivative")
    j = jet2_from_timejet(f, scheme)
    return Field2D(f.grid, wave_decomposition_residual_jets(j))


def ks_ratio(traj: Trajectory, t: float, order: int = 1, component: str = "u") -> float:
    """Empirical dispersive sup-norm constant at reduced string order.

    Ratio of <t>^(1/2) sup |w(t)| to the largest L2 norm of the length
    <= order admissible strings over times up to 2t.  Zero trajectories
    give 0 by convention.
    """
    if order > 1:
        raise ValueError("string order is capped at 1")
    times = traj.times
    if times[-1] < 2.0 * t - 1e-9:
        raise ValueError(f"trajectory must cover [0, {2 * t}]")
    i_t = int(np.argmin(np.abs(times - t)))

    def fields(s):
        return (s.u, s.ut) if component == "u" else (s.v, s.vt)

    w, _ = fields(traj[i_t])
    numer = sup_norm(w) * np.sqrt(1.0 + traj[i_t].t ** 2) ** 0.5

    denom = 0.0
    for s in traj.states:
        if s.t > 2.0 * t + 1e-9:
            break
        w, wt = fields(s)
        denom = max(denom, l2_norm(w))
        if order >= 1:
            tj = TimeJetField(traj.grid, s.t, w, wt)
            for gid in ADMISSIBLE:
                denom = max(denom, l2_norm(apply_gamma(gid, tj)))
    if denom == 0.0:
        return 0.0
    return float(numer / denom)
