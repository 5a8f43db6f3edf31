"""Session fixtures for the expensive acceptance runs.

The headline simulation and the contraction study each run once per
session; their CSV outputs land in runs/ so the report scripts have real
inputs to chew on.
"""

import time
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def headline_run():
    from nullwave.cli import run_simulation
    from nullwave.config import load_config

    loaded = load_config(str(REPO / "configs" / "headline.ini"))
    out = REPO / "runs" / "headline"
    t0 = time.perf_counter()
    summary = run_simulation(loaded, str(out), progress=False)
    summary["elapsed"] = time.perf_counter() - t0
    summary["loaded"] = loaded
    summary["out"] = str(out)
    return summary


@pytest.fixture(scope="session")
def picard_run():
    from nullwave.config import load_config
    from nullwave.evolve import SimConfig, make_initial_data, run
    from nullwave.grid import sup_norm
    from nullwave.io import write_csv
    from nullwave.picard import apply_T, contraction_ratio, picard_iterate, zero_pair

    loaded = load_config(str(REPO / "configs" / "picard.ini"))
    cfg, pic = loaded.sim, loaded.picard
    g = cfg.grid
    data = make_initial_data(cfg.profile, pic.epsilon, g, cfg.width)

    t0 = time.perf_counter()
    res = picard_iterate(g, data, cfg.couplings, cfg.t_end, pic.dt,
                         pic.iterations, pic.delta)
    free = apply_T(zero_pair(g, cfg.t_end, pic.dt), cfg.couplings, data)
    ratio0 = contraction_ratio(free, zero_pair(g, cfg.t_end, pic.dt),
                               cfg.couplings, data, pic.delta)

    direct_cfg = SimConfig(n=cfg.n, half_width=cfg.half_width, profile=cfg.profile,
                           epsilon=pic.epsilon, couplings=cfg.couplings, t_end=cfg.t_end,
                           cfl=0.125, output_stride=cfg.t_end, width=cfg.width)
    last = None
    for s in run(direct_cfg, data):
        last = s
    conv = res.pairs[-1]
    rel_direct = max(sup_norm(conv[-1].u - last.u) / sup_norm(last.u),
                     sup_norm(conv[-1].v - last.v) / sup_norm(last.v))
    elapsed = time.perf_counter() - t0

    out = REPO / "runs" / "picard"
    write_csv(str(out / "picard_log.csv"),
              ("iter", "x_norm_value", "diff_norm", "ratio", "wall_time_s"),
              res.log_rows())
    return {"result": res, "ratio0": ratio0, "rel_direct": rel_direct,
            "elapsed": elapsed, "out": str(out), "config": loaded}
