import numpy as np
import pytest

from nullwave.energies import energy
from nullwave.errors import DomainExceededError, InvalidSourceError
from nullwave.evolve import make_initial_data
from nullwave.grid import Field2D, Grid2D
from nullwave.linear import (KLEIN_GORDON, WAVE, propagate_free,
                             propagate_sourced, representation_oracle)

RNG = np.random.default_rng(17)


def _grid(n=128, half=10.0):
    return Grid2D.square(n, half)


def test_identity_at_t0():
    g = _grid()
    w0 = Field2D(g, RNG.normal(size=(g.nx, g.ny)))
    w1 = Field2D.zeros(g)
    w, wt = propagate_free(KLEIN_GORDON, w0, w1, 0.0)
    assert np.max(np.abs(w.values - w0.values)) < 1e-13
    assert np.max(np.abs(wt.values)) < 1e-13


def test_zero_frequency_limit():
    g = _grid()
    c = 0.8
    w0 = Field2D.zeros(g)
    w1 = Field2D(g, np.full((g.nx, g.ny), c))
    w, wt = propagate_free(WAVE, w0, w1, 3.5)
    assert np.max(np.abs(w.values - c * 3.5)) < 1e-12
    assert np.max(np.abs(wt.values - c)) < 1e-12


def test_single_mode_closed_form():
    g = _grid()
    k = 2 * np.pi / g.lx
    om = np.sqrt(1.0 + k * k)
    w0 = Field2D.from_function(g, lambda X, Y: np.sin(k * X))
    w, wt = propagate_free(KLEIN_GORDON, w0, Field2D.zeros(g), 4.2)
    want = np.cos(4.2 * om) * w0.values
    assert np.max(np.abs(w.values - want)) < 1e-10


def test_group_property():
    g = _grid()
    w0 = Field2D(g, RNG.normal(size=(g.nx, g.ny)))
    w1 = Field2D(g, RNG.normal(size=(g.nx, g.ny)))
    for kind in (WAVE, KLEIN_GORDON):
        a, at = propagate_free(kind, w0, w1, 1.3)
        b, bt = propagate_free(kind, a, at, 2.4)
        c, ct = propagate_free(kind, w0, w1, 3.7)
        scale = np.max(np.abs(c.values))
        assert np.max(np.abs(b.values - c.values)) < 1e-11 * scale
        assert np.max(np.abs(bt.values - ct.values)) < 1e-11 * max(1.0, np.max(np.abs(ct.values)))


def test_time_reversal():
    g = _grid()
    w0 = Field2D(g, RNG.normal(size=(g.nx, g.ny)))
    w1 = Field2D(g, RNG.normal(size=(g.nx, g.ny)))
    w, wt = propagate_free(WAVE, w0, w1, 2.2)
    back, backt = propagate_free(WAVE, w, -1.0 * wt, 2.2)
    assert np.max(np.abs(back.values - w0.values)) < 1e-10
    assert np.max(np.abs(backt.values + w1.values)) < 1e-10


def test_free_energy_conservation():
    g = Grid2D.square(256, 30.0)
    u0, u1, _, _ = make_initial_data("gaussian-bump", 0.1, g)
    e0 = energy(0.0, u0, u1)
    w, wt = propagate_free(WAVE, u0, u1, 17.0)
    assert abs(energy(0.0, w, wt) - e0) / e0 < 1e-10


def test_sourced_zero_source_matches_free():
    g = _grid()
    w0 = Field2D(g, RNG.normal(size=(g.nx, g.ny)))
    w1 = Field2D(g, RNG.normal(size=(g.nx, g.ny)))
    traj = propagate_sourced(KLEIN_GORDON, w0, w1, None, 2.0, 0.1)
    w, wt = propagate_free(KLEIN_GORDON, w0, w1, 2.0)
    scale = max(1.0, np.max(np.abs(w.values)))
    assert np.max(np.abs(traj[-1][1].values - w.values)) < 1e-12 * scale
    assert np.max(np.abs(traj[-1][2].values - wt.values)) < 1e-12 * scale


def test_sourced_constant_source_closed_forms():
    g = _grid()
    z = Field2D.zeros(g)
    c = 0.3
    src = lambda t: Field2D(g, np.full((g.nx, g.ny), c))
    traj = propagate_sourced(WAVE, z, z, src, 2.0, 0.05)
    t, w, _ = traj[-1]
    assert np.max(np.abs(w.values - c * t * t / 2)) < 1e-12

    traj = propagate_sourced(KLEIN_GORDON, z, z, src, 2.0, 0.05)
    t, w, _ = traj[-1]
    assert np.max(np.abs(w.values - c * (1 - np.cos(t)))) < 1e-3


def test_sourced_second_order_in_dt():
    # oscillating source exercises the midpoint error; halving dt ~ 4x
    g = Grid2D.square(16, 8.0)
    z = Field2D.zeros(g)
    src = lambda t: Field2D(g, np.full((g.nx, g.ny), np.cos(3.0 * t)))
    # wave zero mode: w'' = cos(3t)  ->  w = (1 - cos(3t)) / 9
    errs = []
    for dt in (0.05, 0.025):
        traj = propagate_sourced(WAVE, z, z, src, 2.0, dt)
        t, w, _ = traj[-1]
        want = (1 - np.cos(3 * t)) / 9.0
        errs.append(np.max(np.abs(w.values - want)))
    assert errs[0] / errs[1] > 3.0


def test_invalid_source_reports_time():
    g = _grid(16)
    z = Field2D.zeros(g)

    def src(t):
        a = np.zeros((g.nx, g.ny))
        if t > 0.5:
            a[0, 0] = np.nan
        return a

    with pytest.raises(InvalidSourceError) as err:
        propagate_sourced(WAVE, z, z, src, 2.0, 0.25)
    assert err.value.t > 0.5


def test_oracle_constant_and_zero():
    g = _grid(128)
    ones = Field2D(g, np.ones((g.nx, g.ny)))
    assert abs(representation_oracle(ones, 3.0, (0.2, -0.4)) - 3.0) < 1e-10
    assert representation_oracle(Field2D.zeros(g), 3.0, (0.0, 0.0)) == 0.0
    with pytest.raises(DomainExceededError):
        representation_oracle(ones, 11.0, (0.0, 0.0))


def test_oracle_matches_propagator():
    g = Grid2D.square(512, 10.0)
    z = Field2D.zeros(g)
    bump = Field2D.from_function(g, lambda X, Y: np.exp(-((X - 0.5) ** 2 + Y**2)))
    t = 2.5
    w, _ = propagate_free(WAVE, z, bump, t)
    for _ in range(10):
        i = int(RNG.integers(g.nx // 2 - 64, g.nx // 2 + 64))
        j = int(RNG.integers(g.ny // 2 - 64, g.ny // 2 + 64))
        px, py = g.x0 + i * g.dx, g.y0 + j * g.dy
        oracle = representation_oracle(bump, t, (px, py))
        assert abs(oracle - w.values[i, j]) / abs(oracle) < 1e-3
