"""Energy functionals: flat, conformal, and exponentially weighted.

The weight is e^q with q a bounded primitive of <r - t>^(-3/2); its total
mass is computed by quadrature once (the bound matters, not its value).
Spacetime integrals of tangential derivatives accumulate by trapezoid over
stored slices.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .analytic import PointJet2
from .errors import NearOriginError
from .grid import Field2D, deriv_values, grid_coords, grid_radius, laplacian_values
from .nullforms import Couplings, Jet1, coupled_source
from .state import EvolState
from .vectorfields import ADMISSIBLE, TimeJetField, VectorFieldId, apply_gamma, apply_gamma_dt

__all__ = [
    "GhostWeight",
    "q_weight",
    "q_total",
    "energy",
    "weighted_energy",
    "conformal_energy",
    "EnergyReport",
    "initial_report",
    "ghost_energy_step",
    "ghost_identity_residual",
    "ghost_identity_residual_field",
    "gamma_energy_table",
    "ENERGY_CSV_COLUMNS",
]


def _integrand(s):
    return (1.0 + s * s) ** (-0.75)


class GhostWeight:
    """Cumulative integral of <s>^(-3/2), tabulated with cubic interpolation.

    The table covers |sigma| <= sigma_max on sinh-spaced nodes; outside the
    table the weight is clamped to its asymptotic constants 0 and q_total.
    Node values accumulate fixed-order Gauss panels from sigma = 0, so the
    reflection q(s) + q(-s) = q_total holds by construction.
    """

    def __init__(self, sigma_max: float = 1.0e4, dtheta: float = 0.005):
        self.sigma_max = sigma_max
        half = quad(_integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-13)[0]
        self.total = 2.0 * half
        theta = np.arange(0.0, np.arcsinh(sigma_max) + dtheta, dtheta)
        s_pos = np.sinh(theta)
        gl_x, gl_w = leggauss(12)
        a, b = s_pos[:-1], s_pos[1:]
        mid, rad = 0.5 * (a + b), 0.5 * (b - a)
        pts = mid[:, None] + rad[:, None] * gl_x[None, :]
        panels = rad * np.sum(gl_w[None, :] * _integrand(pts), axis=1)
        q_pos = half + np.concatenate([[0.0], np.cumsum(panels)])
        sigma = np.concatenate([-s_pos[:0:-1], s_pos])
        qvals = np.concatenate([self.total - q_pos[:0:-1], q_pos])
        self._spline = CubicSpline(sigma, qvals)

    def __call__(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        out = self._spline(np.clip(sigma, -self.sigma_max, self.sigma_max))
        out = np.where(sigma < -self.sigma_max, 0.0, out)
        out = np.where(sigma > self.sigma_max, self.total, out)
        return out if out.ndim else float(out)


_WEIGHT: GhostWeight | None = None


def _weight() -> GhostWeight:
    global _WEIGHT
    if _WEIGHT is None:
        _WEIGHT = GhostWeight()
    return _WEIGHT


def q_weight(sigma):
    """Ghost weight exponent q(sigma)."""
    return _weight()(sigma)


def q_total() -> float:
    """Total mass of the weight integrand (finite, computed by quadrature)."""
    return _weight().total


def _grad2(values, grid, scheme="spectral"):
    d1 = deriv_values(values, grid, 1, scheme)
    d2 = deriv_values(values, grid, 2, scheme)
    return d1, d2


def energy(m: float, w: Field2D, wt: Field2D, mask=None, scheme: str = "spectral") -> float:
    """Flat energy: integral of wt^2 + |grad w|^2 + m^2 w^2 over the mask."""
    g = w.grid
    d1, d2 = _grad2(w.values, g, scheme)
    dens = wt.values**2 + d1**2 + d2**2 + (m * m) * w.values**2
    if mask is not None:
        dens = dens[mask.indicator]
    return float(np.sum(dens) * g.cell_area)


def weighted_energy(m: float, w: Field2D, wt: Field2D, t: float, scheme: str = "spectral") -> float:
    """e^q-weighted energy of a slice at time t."""
    g = w.grid
    eq = np.exp(q_weight(grid_radius(g) - t))
    d1, d2 = _grad2(w.values, g, scheme)
    dens = eq * (wt.values**2 + d1**2 + d2**2 + (m * m) * w.values**2)
    return float(np.sum(dens) * g.cell_area)


_S, _OM, _L1, _L2 = (VectorFieldId.S, VectorFieldId.Omega12,
                     VectorFieldId.L1, VectorFieldId.L2)


def conformal_energy(f: TimeJetField, scheme: str = "spectral"):
    """Conformal energy pieces ||Sw + w||^2, ||Omega w||^2, sum ||L_a w||^2."""
    g = f.grid
    area = g.cell_area
    s = apply_gamma(_S, f, scheme).values + f.w.values
    om = apply_gamma(_OM, f, scheme).values
    l1 = apply_gamma(_L1, f, scheme).values
    l2 = apply_gamma(_L2, f, scheme).values
    parts = {
        "S": float(np.sum(s * s) * area),
        "Omega": float(np.sum(om * om) * area),
        "L": float(np.sum(l1 * l1 + l2 * l2) * area),
    }
    return parts["S"] + parts["Omega"] + parts["L"], parts


ENERGY_CSV_COLUMNS = (
    "t", "E_wave", "E_kg", "Econ_S", "Econ_Omega", "Econ_L",
    "Egst_inst", "Ighost_G", "Ighost_m", "Ighost_G_damped", "Ighost_m_damped",
)


@dataclass
class EnergyReport:
    """Snapshot energies plus running spacetime ghost integrals.

    Ighost_G sums the tangential-derivative integrals of both components,
    Ighost_m is the mass-term integral of the Klein-Gordon component; the
    damped variants drop the e^q factor and damp by <t>^(-delta).
    """

    t: float
    E_wave: float = 0.0
    E_kg: float = 0.0
    Econ_S: float = 0.0
    Econ_Omega: float = 0.0
    Econ_L: float = 0.0
    Egst_inst: float = 0.0
    Ighost_G: float = 0.0
    Ighost_m: float = 0.0
    Ighost_G_damped: float = 0.0
    Ighost_m_damped: float = 0.0
    delta: float = 0.1
    excluded_measure: float = 0.0
    _last: dict = field(default_factory=dict, repr=False, compare=False)

    def row(self):
        return [getattr(self, c) for c in ENERGY_CSV_COLUMNS]


def _ghost_slice_integrands(state: EvolState, delta: float, scheme: str = "spectral"):
    """Spatial integrals feeding the four running ghost integrals."""
    g = state.grid
    X, Y = grid_coords(g)
    r = grid_radius(g)
    r_min = 0.5 * min(g.dx, g.dy)
    ok = r >= r_min
    rs = np.where(ok, r, 1.0)
    sigma = r - state.t
    eq = np.exp(q_weight(sigma))
    cone = (1.0 + sigma * sigma) ** (-0.75)
    damp = (1.0 + state.t * state.t) ** (-0.5 * delta)
    area = g.cell_area

    g_sum = np.zeros_like(r)
    for w, wt in ((state.u, state.ut), (state.v, state.vt)):
        d1, d2 = _grad2(w.values, g, scheme)
        g1 = (X / rs) * wt.values + d1
        g2 = (Y / rs) * wt.values + d2
        g_sum += np.where(ok, g1 * g1 + g2 * g2, 0.0)
    v2 = np.where(ok, state.v.values**2, 0.0)

    return {
        "G": float(np.sum(eq * cone * g_sum) * area),
        "m": float(np.sum(eq * cone * v2) * area),
        "G_damped": damp * float(np.sum(cone * g_sum) * area),
        "m_damped": damp * float(np.sum(cone * v2) * area),
        "excluded": float(np.count_nonzero(~ok)) * area,
    }


def initial_report(state: EvolState, delta: float = 0.1, scheme: str = "spectral") -> EnergyReport:
    rep = EnergyReport(t=state.t, delta=delta)
    return _fill_snapshot(rep, state, scheme)


def _fill_snapshot(rep: EnergyReport, state: EvolState, scheme: str) -> EnergyReport:
    rep.t = state.t
    rep.E_wave = energy(0.0, state.u, state.ut, scheme=scheme)
    rep.E_kg = energy(1.0, state.v, state.vt, scheme=scheme)
    _, parts = conformal_energy(TimeJetField(state.grid, state.t, state.u, state.ut), scheme)
    rep.Econ_S, rep.Econ_Omega, rep.Econ_L = parts["S"], parts["Omega"], parts["L"]
    rep.Egst_inst = (weighted_energy(0.0, state.u, state.ut, state.t, scheme)
                     + weighted_energy(1.0, state.v, state.vt, state.t, scheme))
    rep._last = _ghost_slice_integrands(state, rep.delta, scheme)
    rep.excluded_measure = rep._last["excluded"]
    return rep


def ghost_energy_step(rep: EnergyReport, prev: EvolState, nxt: EvolState,
                      scheme: str = "spectral") -> EnergyReport:
    """Advance the report across one stored slab [prev.t, nxt.t]."""
    if not (nxt.t > prev.t):
        raise ValueError("slab states must be time-ordered")
    if abs(rep.t - prev.t) > 1e-12 * max(1.0, abs(prev.t)):
        raise ValueError("report is not aligned with the slab start")
    dt = nxt.t - prev.t
    last = rep._last if rep._last else _ghost_slice_integrands(prev, rep.delta, scheme)
    out = replace(rep)
    out = _fill_snapshot(out, nxt, scheme)
    cur = out._last
    out.Ighost_G = rep.Ighost_G + 0.5 * dt * (last["G"] + cur["G"])
    out.Ighost_m = rep.Ighost_m + 0.5 * dt * (last["m"] + cur["m"])
    out.Ighost_G_damped = rep.Ighost_G_damped + 0.5 * dt * (last["G_damped"] + cur["G_damped"])
    out.Ighost_m_damped = rep.Ighost_m_damped + 0.5 * dt * (last["m_damped"] + cur["m_damped"])
    return out


def ghost_identity_residual(j: PointJet2, m: float, r_min: float = 1e-8):
    """Pointwise defect of the weighted multiplier identity.

    With f recovered from the jet as wtt - Lap w + m^2 w, the combination
      (1/2) d/dt [e^q ((dw)^2 + m^2 w^2)] - div(e^q grad w wt)
      + (1/2) e^q <t-r>^(-3/2) (sum_a (G_a w)^2 + m^2 w^2) - e^q f wt
    vanishes identically; the return is its numerical value.
    """
    r = np.hypot(j.x1, j.x2)
    if np.any(r < r_min):
        raise NearOriginError(f"multiplier identity evaluated at r < {r_min}")
    sigma = r - j.t
    qv = q_weight(sigma)
    qp = (1.0 + sigma * sigma) ** (-0.75)
    eq = np.exp(qv)

    a_dens = j.wt**2 + j.w1**2 + j.w2**2 + m * m * j.w**2
    da_dt = 2.0 * (j.wt * j.wtt + j.w1 * j.wt1 + j.w2 * j.wt2 + m * m * j.w * j.wt)
    term_t = 0.5 * eq * (-qp * a_dens + da_dt)

    b1, b2 = j.w1 * j.wt, j.w2 * j.wt
    div_b = (qp * (j.x1 / r) * b1 + j.w11 * j.wt + j.w1 * j.wt1
             + qp * (j.x2 / r) * b2 + j.w22 * j.wt + j.w2 * j.wt2)
    term_x = eq * div_b

    g1 = (j.x1 / r) * j.wt + j.w1
    g2 = (j.x2 / r) * j.wt + j.w2
    term_good = 0.5 * eq * qp * (g1 * g1 + g2 * g2 + m * m * j.w**2)

    f = j.wtt - (j.w11 + j.w22) + m * m * j.w
    return term_t - term_x + term_good - eq * f * j.wt


def ghost_identity_residual_field(f: TimeJetField, m: float, scheme: str = "spectral") -> Field2D:
    """Grid version; nodes inside the excluded origin disc are zeroed."""
    from .vectorfields import jet2_from_timejet

    g = f.grid
    j = jet2_from_timejet(f, scheme)
    r = grid_radius(g)
    r_min = 0.5 * min(g.dx, g.dy)
    ok = r >= r_min
    safe = PointJet2(
        t=j.t, x1=np.where(ok, j.x1, 1.0), x2=j.x2,
        w=j.w, wt=j.wt, w1=j.w1, w2=j.w2, wtt=j.wtt,
        wt1=j.wt1, wt2=j.wt2, w11=j.w11, w12=j.w12, w22=j.w22,
    )
    res = ghost_identity_residual(safe, m, r_min=0.0)
    return Field2D(g, np.where(ok, res, 0.0), _checked=True)


def gamma_energy_table(state: EvolState, P: Couplings, scheme: str = "spectral") -> dict:
    """Flat energies of the state and its first admissible strings.

    Second time derivatives come from substituting the evolution equations,
    so the table is computable from a single snapshot.
    """
    g = state.grid
    du = [state.ut.values] + [deriv_values(state.u.values, g, a, scheme) for a in (1, 2)]
    dv = [state.vt.values] + [deriv_values(state.v.values, g, a, scheme) for a in (1, 2)]
    ju = Jet1(state.u.values, *du)
    jv = Jet1(state.v.values, *dv)
    f1 = coupled_source(P.P1, ju, jv)
    f2 = coupled_source(P.P2, ju, jv)
    utt = laplacian_values(state.u.values, g) + f1
    vtt = laplacian_values(state.v.values, g) - state.v.values + f2

    table = {}
    for comp, w, wt, wtt, m in (
        ("u", state.u, state.ut, utt, 0.0),
        ("v", state.v, state.vt, vtt, 1.0),
    ):
        tj = TimeJetField(g, state.t, w, wt, Field2D(g, wtt, _checked=True), "pde")
        table[(comp, "I")] = energy(m, w, wt, scheme=scheme)
        for gid in ADMISSIBLE:
            gw = apply_gamma(gid, tj, scheme)
            gwt = apply_gamma_dt(gid, tj, scheme)
            table[(comp, gid.value)] = energy(m, gw, gwt, scheme=scheme)
    return table
