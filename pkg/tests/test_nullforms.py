import numpy as np
import pytest
import sympy as sp

from nullwave import analytic
from nullwave.errors import InsufficientSlabError, NearOriginError
from nullwave.grid import Field2D, Grid2D, grid_coords
from nullwave.nullforms import (Jet1, coupled_source, divergence_form_residual,
                                divergence_residual_jets, ghost_decomposition_residual,
                                ghost_derivative, q_ab, q0)

RNG = np.random.default_rng(42)


def _rand_jet(n=None):
    shape = () if n is None else (n,)
    return Jet1(*(RNG.normal(size=shape) for _ in range(4)))


def test_q0_examples():
    jt = Jet1(0.0, 1.0, 0.0, 0.0)
    assert q0(jt, jt) == -1.0
    assert q0(Jet1(0, 0, 1, 0), Jet1(0, 0, 0, 1)) == 0.0
    c = 1.7  # travelling profile f(t - x1): dt = c, d1 = -c
    j = Jet1(0.0, c, -c, 0.0)
    assert q0(j, j) == pytest.approx(0.0, abs=1e-15)


def test_qab_examples():
    ju, jv = _rand_jet(), _rand_jet()
    for a in range(3):
        assert q_ab(a, a, ju, jv) == 0.0
    assert q_ab(0, 1, Jet1(0, 1, 0, 0), Jet1(0, 0, 1, 0)) == 1.0
    j1 = Jet1(0.0, 1.0, -1.0, 0.0)
    j2 = Jet1(0.0, 2.0, -2.0, 0.0)
    for a in range(3):
        for b in range(3):
            assert q_ab(a, b, j1, j2) == pytest.approx(0.0, abs=1e-15)


def test_qab_antisymmetry_and_bilinearity():
    for _ in range(50):
        ju, jv, jw = _rand_jet(), _rand_jet(), _rand_jet()
        a, b = RNG.integers(0, 3, size=2)
        assert q_ab(a, b, ju, jv) == pytest.approx(-q_ab(b, a, ju, jv), abs=1e-14)
        assert q_ab(a, b, ju, jv) == pytest.approx(-q_ab(a, b, jv, ju), abs=1e-14)
        c1, c2 = RNG.normal(size=2)
        mixed = Jet1(c1 * ju.w + c2 * jw.w, c1 * ju.dt_w + c2 * jw.dt_w,
                     c1 * ju.d1_w + c2 * jw.d1_w, c1 * ju.d2_w + c2 * jw.d2_w)
        want = c1 * q_ab(a, b, ju, jv) + c2 * q_ab(a, b, jw, jv)
        assert q_ab(a, b, mixed, jv) == pytest.approx(want, rel=1e-12, abs=1e-13)


def test_coupled_source_against_brute_force():
    assert coupled_source(np.eye(3), _rand_jet(), _rand_jet()) == 0.0
    P = np.zeros((3, 3))
    P[0, 1] = 1.0
    assert coupled_source(P, Jet1(0, 1, 0, 0), Jet1(0, 0, 1, 0)) == 1.0
    for _ in range(25):
        P = RNG.normal(size=(3, 3))
        ju, jv = _rand_jet(), _rand_jet()
        brute = sum(P[a, b] * q_ab(a, b, ju, jv) for a in range(3) for b in range(3))
        assert coupled_source(P, ju, jv) == pytest.approx(brute, rel=1e-12, abs=1e-14)


def test_ghost_derivative_examples():
    # w = t - r at a generic point: the outgoing direction is annihilated
    x1, x2 = 3.0, -4.0
    r = 5.0
    j = Jet1(0.0, 1.0, -x1 / r, -x2 / r)
    for a in (1, 2):
        assert ghost_derivative(a, j, x1, x2) == pytest.approx(0.0, abs=1e-15)
    assert ghost_derivative(1, Jet1(0, 1, 0, 0), 1.0, 0.0) == 1.0
    j = Jet1(0.0, 1.0, 3.0 / 5.0, 4.0 / 5.0)  # w = t + r at (3, 4)
    assert ghost_derivative(2, j, 3.0, 4.0) == pytest.approx(8.0 / 5.0, abs=1e-15)
    with pytest.raises(NearOriginError):
        ghost_derivative(1, j, 1e-12, 0.0)


def test_ghost_decomposition_random_jets():
    ju, jv = _rand_jet(200), _rand_jet(200)
    x1 = np.sign(RNG.normal(size=200)) * RNG.uniform(0.3, 5, 200)
    x2 = np.sign(RNG.normal(size=200)) * RNG.uniform(0.3, 5, 200)
    r0, rb = ghost_decomposition_residual(ju, jv, x1, x2)
    scale = np.max(np.abs(q0(ju, jv)))
    assert np.max(np.abs(r0)) < 1e-12 * scale
    assert np.max(np.abs(rb)) < 1e-12 * scale

    # outgoing-profile special case and zero jets
    x1, x2 = 1.0, 2.0
    r = np.hypot(x1, x2)
    ju = Jet1(0.0, 1.0, -x1 / r, -x2 / r)
    jv = _rand_jet()
    r0, rb = ghost_decomposition_residual(ju, jv, x1, x2)
    assert abs(r0) < 1e-14 and np.max(np.abs(rb)) < 1e-14
    z = Jet1(0.0, 0.0, 0.0, 0.0)
    r0, rb = ghost_decomposition_residual(z, z, 1.0, 1.0)
    assert r0 == 0.0 and np.all(rb == 0.0)


def test_ghost_decomposition_matches_symbolic_expansion():
    ut, u1, u2, vt, v1, v2, X, Y = sp.symbols("ut u1 u2 vt v1 v2 X Y", real=True)
    r = sp.sqrt(X**2 + Y**2)
    gu = [(X / r) * ut + u1, (Y / r) * ut + u2]
    gv = [(X / r) * vt + v1, (Y / r) * vt + v2]
    q0_sym = -ut * vt + u1 * v1 + u2 * v2
    rhs = sum(gu[a] * gv[a] - ([X, Y][a] / r) * (gu[a] * vt + gv[a] * ut) for a in range(2))
    assert sp.simplify(q0_sym - rhs) == 0
    for b in range(2):
        qb = ut * [v1, v2][b] - vt * [u1, u2][b]
        rhs_b = ut * gv[b] - vt * gu[b]
        assert sp.simplify(qb - rhs_b) == 0


def test_divergence_residual_exact_jets():
    cat = analytic.catalog()
    t = RNG.uniform(0, 3, 30)
    x1 = RNG.uniform(-3, 3, 30)
    x2 = RNG.uniform(-3, 3, 30)
    ju = analytic.point_jet2(cat["mixed-cubic"], t, x1, x2)
    jv = analytic.point_jet2(cat["standing"], t, x1, x2)
    for a in range(3):
        for b in range(3):
            res = divergence_residual_jets(ju, jv, a, b)
            assert np.max(np.abs(res)) < 1e-12


def _bump_pair(grid, t):
    X, Y = grid_coords(grid)
    u = np.exp(-((X - 0.4) ** 2 + (Y + 0.2) ** 2) / 8.0) * np.cos(1.2 * t - 0.7 * X + 0.4 * Y)
    v = np.exp(-((X + 0.3) ** 2 + (Y - 0.1) ** 2) / 8.0) * np.sin(0.9 * t + 0.5 * X - 0.8 * Y)
    return u, v


def test_divergence_residual_slab_convergence():
    maxres = []
    for n in (64, 128):
        g = Grid2D.square(n, 12.0)
        dt = 0.15 * 64.0 / n
        u = [Field2D(g, _bump_pair(g, 1.0 + (j - 4) * dt)[0]) for j in range(9)]
        v = [Field2D(g, _bump_pair(g, 1.0 + (j - 4) * dt)[1]) for j in range(9)]
        res = divergence_form_residual(u, v, dt, 0, 1, scheme="fd4")
        maxres.append(np.max(np.abs(res.values)))
    assert np.log2(maxres[0] / maxres[1]) >= 3.5

    g = Grid2D.square(32, 12.0)
    zero = [Field2D.zeros(g) for _ in range(9)]
    u = [Field2D(g, _bump_pair(g, 1.0 + 0.1 * j)[0]) for j in range(9)]
    res = divergence_form_residual(u, zero, 0.1, 0, 1)
    assert np.max(np.abs(res.values)) == 0.0
    with pytest.raises(InsufficientSlabError):
        divergence_form_residual(u[:3], zero[:3], 0.1, 0, 1)
