"""Pointwise null forms, coupling contractions, tangential derivatives.

Everything here is algebra on first-derivative jets; entries may be scalars
or numpy arrays (all operations broadcast).  Index 0 is time, 1 and 2 the
spatial axes, with metric signature (-, +, +), so raising the time index
flips its sign.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import PointJet2
from .errors import InsufficientSlabError, NearOriginError
from .grid import Field2D, deriv_values

__all__ = [
    "Jet1",
    "Couplings",
    "q0",
    "q_ab",
    "coupled_source",
    "ghost_derivative",
    "divergence_form_residual",
    "divergence_residual_jets",
    "ghost_decomposition_residual",
    "measured_null_constants",
]


@dataclass
class Jet1:
    """Value and first derivatives (d/dt, d/dx1, d/dx2) at a point."""

    w: object
    dt_w: object
    d1_w: object
    d2_w: object

    def grad(self):
        return (self.dt_w, self.d1_w, self.d2_w)

    @staticmethod
    def from_jet2(j: PointJet2) -> "Jet1":
        return Jet1(j.w, j.wt, j.w1, j.w2)


@dataclass
class Couplings:
    """Constant 3x3 coupling matrices contracting the antisymmetric forms."""

    P1: np.ndarray
    P2: np.ndarray

    def __post_init__(self):
        self.P1 = np.asarray(self.P1, dtype=float)
        self.P2 = np.asarray(self.P2, dtype=float)
        for P in (self.P1, self.P2):
            if P.shape != (3, 3) or not np.all(np.isfinite(P)):
                raise ValueError("couplings must be finite 3x3 matrices")

    @staticmethod
    def zero() -> "Couplings":
        return Couplings(np.zeros((3, 3)), np.zeros((3, 3)))


def q0(ju: Jet1, jv: Jet1):
    """Lorentz-invariant product of gradients: -ut*vt + u1*v1 + u2*v2."""
    return -ju.dt_w * jv.dt_w + ju.d1_w * jv.d1_w + ju.d2_w * jv.d2_w


def q_ab(alpha: int, beta: int, ju: Jet1, jv: Jet1):
    """Antisymmetric bilinear form du_alpha dv_beta - dv_alpha du_beta."""
    du, dv = ju.grad(), jv.grad()
    return du[alpha] * dv[beta] - dv[alpha] * du[beta]


def coupled_source(P: np.ndarray, ju: Jet1, jv: Jet1):
    """Contraction sum P^{ab} q_ab; only the antisymmetric part of P acts."""
    P = np.asarray(P, dtype=float)
    du, dv = ju.grad(), jv.grad()
    out = 0.0
    for a in range(3):
        for b in range(a + 1, 3):
            c = P[a, b] - P[b, a]
            if c != 0.0:
                out = out + c * (du[a] * dv[b] - dv[a] * du[b])
    return out


def ghost_derivative(a: int, j: Jet1, x1, x2, r_min: float = 1e-8):
    """Tangential derivative (x_a/r) d/dt + d/dx_a; undefined near r = 0."""
    if a not in (1, 2):
        raise ValueError("a must be 1 or 2")
    r = np.hypot(np.asarray(x1, float), np.asarray(x2, float))
    if np.any(r < r_min):
        raise NearOriginError(f"ghost derivative evaluated at r < {r_min}")
    xa = x1 if a == 1 else x2
    da = j.d1_w if a == 1 else j.d2_w
    return (xa / r) * j.dt_w + da


def _dt_stencil(levels, j, dt, order):
    if order == 2:
        return (levels[j + 1] - levels[j - 1]) / (2.0 * dt)
    return (-levels[j + 2] + 8.0 * levels[j + 1] - 8.0 * levels[j - 1] + levels[j - 2]) / (12.0 * dt)


def divergence_form_residual(
    u_levels, v_levels, dt: float, alpha: int, beta: int,
    scheme: str = "spectral", order: int | None = None,
) -> Field2D:
    """Defect of the product-rule rewriting of q_ab as a pure divergence.

    u_levels, v_levels are equispaced time slices (odd count, centered);
    time derivatives use centered stencils of the given order (auto: 4 when
    nine levels are available, else 2).  The continuum residual is exactly
    zero, so the returned field measures the discrete product-rule defect
    and shrinks at stencil order.
    """
    n = len(u_levels)
    if n != len(v_levels) or n % 2 == 0:
        raise InsufficientSlabError("need matching odd-length level lists")
    if order is None:
        order = 4 if n >= 9 else 2
    halo = order // 2
    if n < 4 * halo + 1:
        raise InsufficientSlabError(f"order {order} differencing needs {4 * halo + 1} levels")
    grid = u_levels[0].grid
    mid = n // 2
    u = [f.values for f in u_levels]
    v = [f.values for f in v_levels]

    def d(levels, j, mu):
        if mu == 0:
            return _dt_stencil(levels, j, dt, order)
        return deriv_values(levels[j], grid, mu, scheme)

    def d_at(levels, mu, j):
        return d(levels, j, mu)

    # products p_mu(j) = (d_mu u)(j) * v(j) on the levels the outer stencil needs
    def outer(mu_outer, mu_inner):
        if mu_outer == 0:
            js = range(mid - halo, mid + halo + 1)
            prods = {j: d_at(u, mu_inner, j) * v[j] for j in js}
            series = [prods.get(j) for j in range(n)]
            return _dt_stencil(series, mid, dt, order)
        prod = d_at(u, mu_inner, mid) * v[mid]
        return deriv_values(prod, grid, mu_outer, scheme)

    du_mid = [d_at(u, mu, mid) for mu in range(3)]
    dv_mid = [d_at(v, mu, mid) for mu in range(3)]
    q = du_mid[alpha] * dv_mid[beta] - dv_mid[alpha] * du_mid[beta]
    divergence = outer(beta, alpha) - outer(alpha, beta)
    return Field2D(grid, q - divergence)


def divergence_residual_jets(ju: PointJet2, jv: PointJet2, alpha: int, beta: int):
    """Same residual with exact derivatives supplied: identically zero."""
    du = (ju.wt, ju.w1, ju.w2)
    dv = (jv.wt, jv.w1, jv.w2)
    dd = {
        (0, 0): ju.wtt, (0, 1): ju.wt1, (0, 2): ju.wt2,
        (1, 0): ju.wt1, (1, 1): ju.w11, (1, 2): ju.w12,
        (2, 0): ju.wt2, (2, 1): ju.w12, (2, 2): ju.w22,
    }
    q = du[alpha] * dv[beta] - dv[alpha] * du[beta]
    div = (dd[(beta, alpha)] * jv.w + du[alpha] * dv[beta]) \
        - (dd[(alpha, beta)] * jv.w + du[beta] * dv[alpha])
    return q - div


def ghost_decomposition_residual(ju: Jet1, jv: Jet1, x1, x2, r_min: float = 1e-8):
    """Exact rewriting of q0 and q_0b through tangential derivatives.

    Returns (res_q0, res_q0b) where res_q0b stacks b = 1, 2; both vanish
    identically for any finite jets away from the origin.
    """
    r = np.hypot(np.asarray(x1, float), np.asarray(x2, float))
    if np.any(r < r_min):
        raise NearOriginError(f"decomposition evaluated at r < {r_min}")
    gu = [ghost_derivative(a, ju, x1, x2, r_min) for a in (1, 2)]
    gv = [ghost_derivative(a, jv, x1, x2, r_min) for a in (1, 2)]
    xs = (np.asarray(x1, float), np.asarray(x2, float))

    rhs0 = 0.0
    for a in range(2):
        rhs0 = rhs0 + gu[a] * gv[a] - (xs[a] / r) * (gu[a] * jv.dt_w + gv[a] * ju.dt_w)
    res_q0 = q0(ju, jv) - rhs0

    res_b = []
    for b in (1, 2):
        rhs = ju.dt_w * gv[b - 1] - jv.dt_w * gu[b - 1]
        res_b.append(q_ab(0, b, ju, jv) - rhs)
    return res_q0, np.stack([np.asarray(r_, float) for r_ in res_b])


def measured_null_constants(ju: Jet1, jv: Jet1, t, x1, x2) -> dict:
    """Empirical constants for the weighted null-form bounds.

    The first two null-form estimates only hold with unspecified constants,
    so they are reported as sup of LHS/RHS rather than tested.  Gamma-norms
    are realized as the sum of |translations| + |rotation| + |boosts|.
    """
    t = np.asarray(t, float)
    x1 = np.asarray(x1, float)
    x2 = np.asarray(x2, float)
    wplus = np.sqrt(1.0 + (t + np.hypot(x1, x2)) ** 2)

    def gamma_abs(j: Jet1):
        om = x1 * j.d2_w - x2 * j.d1_w
        l1 = x1 * j.dt_w + t * j.d1_w
        l2 = x2 * j.dt_w + t * j.d2_w
        return (np.abs(j.dt_w) + np.abs(j.d1_w) + np.abs(j.d2_w)
                + np.abs(om) + np.abs(l1) + np.abs(l2))

    def scaling(j: Jet1):
        return t * j.dt_w + x1 * j.d1_w + x2 * j.d2_w

    def grad_abs(j: Jet1):
        return np.maximum(np.abs(j.dt_w), np.maximum(np.abs(j.d1_w), np.abs(j.d2_w)))

    gu, gv = gamma_abs(ju), gamma_abs(jv)
    tiny = 1e-300
    rhs_q0 = (np.abs(scaling(ju)) + gu) * gv / wplus
    ratio_q0 = np.abs(q0(ju, jv)) / (rhs_q0 + tiny)

    lhs_qab = 0.0
    for a in range(3):
        for b in range(a + 1, 3):
            lhs_qab = np.maximum(lhs_qab, np.abs(q_ab(a, b, ju, jv)))
    rhs_qab = (gv * grad_abs(ju) + gu * grad_abs(jv)) / wplus
    ratio_qab = np.abs(lhs_qab) / (rhs_qab + tiny)

    return {
        "q0_over_weighted_gamma": float(np.max(ratio_q0)),
        "qab_over_weighted_gamma": float(np.max(ratio_qab)),
    }
