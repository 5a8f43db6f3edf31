import numpy as np
import pytest

from nullwave.errors import BlowUpError, ConfigError
from nullwave.evolve import SimConfig, make_initial_data, rhs, run, run_collect, step_rk4
from nullwave.grid import Field2D, Grid2D, grid_radius, sup_norm, weighted_data_norm
from nullwave.linear import KLEIN_GORDON, WAVE, propagate_free
from nullwave.nullforms import Couplings
from nullwave.state import EvolState

P_GENERIC = Couplings(
    np.array([[0.0, 1.0, 0.5], [-1.0, 0.0, -0.7], [-0.5, 0.7, 0.0]]),
    np.array([[0.0, -0.6, 1.0], [0.6, 0.0, 0.4], [-1.0, -0.4, 0.0]]),
)


def test_initial_data():
    g = Grid2D.square(64, 16.0)
    for f in make_initial_data("gaussian-bump", 0.0, g):
        assert sup_norm(f) == 0.0
    d1 = make_initial_data("gaussian-bump", 0.01, g)
    d2 = make_initial_data("gaussian-bump", 0.005, g)
    n1 = weighted_data_norm(*d1, K=2)
    n2 = weighted_data_norm(*d2, K=2)
    assert abs(n1 - 2 * n2) < 1e-12 * n1

    ring = make_initial_data("ring", 1.0, g)
    outside = grid_radius(g) > 6.0
    for f in ring:
        assert np.max(np.abs(f.values[outside])) < 1e-14

    two = make_initial_data("two-bump", 0.5, g)
    assert sup_norm(two[0]) > 0

    with pytest.raises(ConfigError):
        make_initial_data("unknown", 0.1, g)


def test_rhs_zero_and_decoupled():
    g = Grid2D.square(64, 16.0)
    z = EvolState.zero(g)
    d = rhs(z, P_GENERIC)
    for f in (d.u, d.ut, d.v, d.vt):
        assert sup_norm(f) == 0.0

    data = make_initial_data("gaussian-bump", 0.1, g)
    s = EvolState(0.0, *data)
    d0 = rhs(s, Couplings.zero())
    from nullwave.grid import laplacian
    assert sup_norm(d0.u - data[1]) == 0.0
    assert sup_norm(d0.ut - laplacian(data[0])) < 1e-12
    assert sup_norm(d0.vt - (laplacian(data[2]) - data[2])) < 1e-12


def test_rhs_single_mode_spectral():
    g = Grid2D.square(64, 16.0)
    k = 2 * np.pi * 3 / g.lx
    u = Field2D.from_function(g, lambda X, Y: np.sin(k * X))
    z = Field2D.zeros(g)
    s = EvolState(0.0, u, z, z.copy(), z.copy())
    d = rhs(s, Couplings.zero())
    want = -(k * k) * u.values
    assert np.max(np.abs(d.ut.values - want)) < 1e-12 * k * k


def test_step_rk4_zero_and_oscillator_order():
    g = Grid2D.square(16, 20.0)
    z = EvolState.zero(g)
    out = step_rk4(z, P_GENERIC, 0.5)
    assert out.t == 0.5 and sup_norm(out.u) == 0.0

    # spatially constant Klein-Gordon mode: v(t) = cos(t)
    errs = []
    for dt in (0.25, 0.125):
        ones = Field2D(g, np.ones((g.nx, g.ny)))
        s = EvolState(0.0, Field2D.zeros(g), Field2D.zeros(g), ones, Field2D.zeros(g))
        n = int(round(2.0 / dt))
        for _ in range(n):
            s = step_rk4(s, Couplings.zero(), dt)
        errs.append(abs(float(s.v.values[0, 0]) - np.cos(s.t)))
    assert errs[0] / errs[1] > 12.0  # fourth order: ~16x


def test_nonlinear_self_convergence():
    gaps = []
    base = dict(n=64, half_width=17.0, profile="gaussian-bump", epsilon=0.05,
                couplings=P_GENERIC, t_end=4.0, output_stride=4.0)
    finals = []
    for cfl in (0.5, 0.25, 0.125):
        cfg = SimConfig(cfl=cfl, **base)
        last = None
        for s in run(cfg):
            last = s
        finals.append(last)
    e1 = sup_norm(finals[0].u - finals[1].u)
    e2 = sup_norm(finals[1].u - finals[2].u)
    assert np.log2(e1 / e2) >= 3.5


def test_run_zero_data_and_no_wrap():
    cfg = SimConfig(n=64, half_width=17.0, profile="gaussian-bump", epsilon=0.0,
                    couplings=P_GENERIC, t_end=3.0, output_stride=1.0)
    traj = run_collect(cfg)
    assert all(sup_norm(s.u) == 0.0 and sup_norm(s.v) == 0.0 for s in traj.states)

    cfg = SimConfig(n=128, half_width=22.0, profile="gaussian-bump", epsilon=0.01,
                    couplings=P_GENERIC, t_end=10.0, output_stride=2.0)
    sup = 0.0
    boundary = 0.0
    for s in run(cfg):
        sup = max(sup, sup_norm(s.u), sup_norm(s.v))
        for f in (s.u, s.ut, s.v, s.vt):
            v = f.values
            boundary = max(boundary, np.max(np.abs(v[0, :])), np.max(np.abs(v[:, 0])))
    assert boundary < 1e-12 * sup


def test_run_decoupled_matches_free_flow():
    # At the default cfl the fourth-order phase error dominates (~1e-4
    # relative); the 1e-6 figure needs the integrator step pushed down.
    def gap(cfl):
        cfg = SimConfig(n=128, half_width=22.0, profile="gaussian-bump", epsilon=0.01,
                        couplings=Couplings.zero(), t_end=10.0, output_stride=10.0,
                        cfl=cfl)
        data = make_initial_data(cfg.profile, cfg.epsilon, cfg.grid)
        last = None
        for s in run(cfg, data):
            last = s
        wu, _ = propagate_free(WAVE, data[0], data[1], last.t)
        wv, _ = propagate_free(KLEIN_GORDON, data[2], data[3], last.t)
        return max(sup_norm(last.u - wu) / sup_norm(wu),
                   sup_norm(last.v - wv) / sup_norm(wv))

    assert gap(0.5) < 2e-3
    assert gap(0.05) < 1e-6


def test_perturbation_scaling_quadratic():
    def gap(eps):
        cfg = SimConfig(n=128, half_width=22.0, profile="gaussian-bump", epsilon=eps,
                        couplings=P_GENERIC, t_end=10.0, output_stride=10.0)
        data = make_initial_data(cfg.profile, eps, cfg.grid)
        last = None
        for s in run(cfg, data):
            last = s
        wu, _ = propagate_free(WAVE, data[0], data[1], last.t)
        wv, _ = propagate_free(KLEIN_GORDON, data[2], data[3], last.t)
        return max(sup_norm(last.u - wu), sup_norm(last.v - wv))

    exponent = np.log2(gap(0.02) / gap(0.01))
    assert 1.9 <= exponent <= 2.1


def test_blowup_detector():
    cfg = SimConfig(n=64, half_width=17.0, profile="gaussian-bump", epsilon=0.01,
                    couplings=P_GENERIC, t_end=4.0, output_stride=1.0,
                    blowup_factor=0.5)
    with pytest.raises(BlowUpError) as err:
        list(run(cfg))
    assert err.value.history


def test_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(n=64, half_width=10.0, profile="gaussian-bump", epsilon=0.01,
                  couplings=P_GENERIC, t_end=10.0)  # no-wrap violated
    with pytest.raises(ConfigError):
        SimConfig(n=64, half_width=30.0, profile="gaussian-bump", epsilon=0.01,
                  couplings=P_GENERIC, t_end=10.0, cfl=1.5)
    with pytest.raises(ConfigError):
        step_rk4(EvolState.zero(Grid2D.square(64, 10.0)), P_GENERIC, 10.0)
