"""Command surface: simulate, identities, picard, decay-fit, linear-check,
convergence.  Every command writes its outputs plus a manifest into --out.

The worker count for spectral transforms is capped by NULLWAVE_THREADS.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .config import LoadedConfig, load_config
from .decay import TimeSeries, fit_power_law, weighted_sup_value
from .energies import ENERGY_CSV_COLUMNS, gamma_energy_table, ghost_energy_step, initial_report
from .errors import NullwaveError, UnfittableError
from .evolve import SimConfig, make_initial_data, run
from .grid import Field2D, Grid2D, RegionMask
from .identities import run_corpus
from .io import RunManifest, write_csv, write_snapshot
from .linear import WAVE, propagate_free, propagate_sourced, representation_oracle
from .picard import (apply_T, contraction_ratio, divergence_decomposition,
                     normal_form_residual, picard_iterate, x_norm, zero_pair)
from .state import EvolState

_CAP_NOTES = [
    "data norms truncated at derivative order 4",
    "commuted strings truncated at length 1",
]

GAMMA_COLUMNS = ("t",) + tuple(f"E_u_{k}" for k in ("I", "Dt", "D1", "D2", "Omega12", "L1", "L2")) \
    + tuple(f"E_v_{k}" for k in ("I", "Dt", "D1", "D2", "Omega12", "L1", "L2"))

SERIES_COLUMNS = ("t", "v_sup", "u_sup", "du_sup", "du_sup_ball", "v_sup_weighted_t",
                  "u_sup_weighted_thalf", "du_cone_ball", "ddu_sup_interior")

FIT_COLUMNS = ("series_id", "exponent", "amplitude", "t_lo", "t_hi", "rsq")

PICARD_COLUMNS = ("iter", "x_norm_value", "diff_norm", "ratio", "wall_time_s")

STATS_COLUMNS = ("t", "sup_u", "sup_v", "boundary_max")


def _boundary_max(state: EvolState) -> float:
    worst = 0.0
    for f in (state.u, state.ut, state.v, state.vt):
        v = f.values
        worst = max(worst, float(np.max(np.abs(v[0, :]))), float(np.max(np.abs(v[-1, :]))),
                    float(np.max(np.abs(v[:, 0]))), float(np.max(np.abs(v[:, -1]))))
    return worst


def run_simulation(loaded: LoadedConfig, out_dir: str, progress: bool = True) -> dict:
    """Full simulate pipeline: evolve, diagnostics, CSVs, snapshots, manifest."""
    cfg = loaded.sim
    g = cfg.grid
    ball = RegionMask.ball(g, loaded.interior_ball)
    manifest = RunManifest("simulate", loaded.hash).start()
    manifest.notes.extend(_CAP_NOTES)

    energy_rows, gamma_rows, series_rows, stats_rows = [], [], [], []
    report = None
    prev = None
    snap_dir = os.path.join(out_dir, "snapshots")
    P = cfg.couplings

    for i, state in enumerate(run(cfg)):
        if report is None:
            report = initial_report(state, delta=cfg.delta)
        else:
            report = ghost_energy_step(report, prev, state)
        energy_rows.append(report.row())

        tab = gamma_energy_table(state, P)
        gamma_rows.append([state.t]
                          + [tab[("u", k)] for k in ("I", "Dt", "D1", "D2", "Omega12", "L1", "L2")]
                          + [tab[("v", k)] for k in ("I", "Dt", "D1", "D2", "Omega12", "L1", "L2")])

        interior = RegionMask.interior_cone(g, 2.0, state.t)
        ddu = (weighted_sup_value(state, "ddu", mask=interior, P=P)
               if interior.count() > 0 else float("nan"))
        series_rows.append([
            state.t,
            weighted_sup_value(state, "v"),
            weighted_sup_value(state, "u"),
            weighted_sup_value(state, "du"),
            weighted_sup_value(state, "du", mask=ball),
            weighted_sup_value(state, "v", weight="t"),
            weighted_sup_value(state, "u", weight="t-half"),
            weighted_sup_value(state, "du", weight=("cone", 0.75, 0.5), mask=ball),
            ddu,
        ])
        stats_rows.append([state.t, weighted_sup_value(state, "u"),
                           weighted_sup_value(state, "v"), _boundary_max(state)])
        if loaded.snapshots:
            manifest.add(*write_snapshot(snap_dir, i, state))
        if progress:
            print(f"  t = {state.t:8.3f}  sup|u| = {series_rows[-1][2]:.3e}  "
                  f"sup|v| = {series_rows[-1][1]:.3e}", flush=True)
        prev = state

    paths = {}
    for name, header, rows in (
        ("energies.csv", ENERGY_CSV_COLUMNS, energy_rows),
        ("gamma_energies.csv", GAMMA_COLUMNS, gamma_rows),
        ("decay_series.csv", SERIES_COLUMNS, series_rows),
        ("run_stats.csv", STATS_COLUMNS, stats_rows),
    ):
        p = os.path.join(out_dir, name)
        write_csv(p, header, rows)
        manifest.add(p)
        paths[name] = p

    fits = fit_series_csv(paths["decay_series.csv"], loaded.fit_window)
    fit_path = os.path.join(out_dir, "decay_fits.csv")
    write_csv(fit_path, FIT_COLUMNS,
              [[f.series_id, f.exponent, f.amplitude, f.t_lo, f.t_hi, f.rsq] for f in fits])
    manifest.add(fit_path)
    manifest.acceptance = {f.series_id: f.exponent for f in fits}
    manifest_path = manifest.finish(out_dir)
    return {"fits": fits, "series_rows": series_rows, "energy_rows": energy_rows,
            "gamma_rows": gamma_rows, "stats_rows": stats_rows,
            "manifest": manifest_path, "paths": paths}


def read_series_csv(path: str) -> list:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.array([[float(v) for v in line.strip().split(",")]
                         for line in fh if line.strip()])
    t = data[:, 0]
    return [TimeSeries(h, t, data[:, i]) for i, h in enumerate(header) if i > 0]


def fit_series_csv(path: str, window) -> list:
    fits = []
    for series in read_series_csv(path):
        keep = np.isfinite(series.values)
        series = TimeSeries(series.series_id, series.t[keep], series.values[keep])
        try:
            fits.append(fit_power_law(series, window))
        except (UnfittableError, ValueError):
            continue
    return fits


def cmd_simulate(args) -> int:
    loaded = load_config(args.config)
    out = args.out or "out"
    summary = run_simulation(loaded, out)
    print(f"wrote {summary['manifest']}")
    for f in summary["fits"]:
        print(f"  fit {f.series_id:22s} exponent {f.exponent:8.4f}  rsq {f.rsq:.5f}")
    return 0


def cmd_identities(args) -> int:
    out = args.out or "out"
    res = run_corpus()
    rows = []
    print(f"{'status':7s} {'identity':42s} {'residual':>10s} {'order':>6s}")
    for r in res.rows:
        order = f"{r.order:6.2f}" if r.order is not None else "     -"
        print(f"{'PASS' if r.passed else 'FAIL':7s} {r.name:42s} {r.residual:10.2e} {order}  {r.note}")
        rows.append([r.name, r.residual, int(r.passed),
                     r.order if r.order is not None else float("nan"), r.note])
    for k, v in res.constants.items():
        print(f"measured constant {k} = {v:.4f}")
    print(f"corpus wall time {res.elapsed:.2f} s")
    path = os.path.join(out, "identities.csv")
    write_csv(path, ("name", "relative_residual", "passed", "order", "note"), rows)
    manifest = RunManifest("identities", "-").start()
    manifest.notes.extend(_CAP_NOTES)
    manifest.acceptance = {"all_passed": res.all_passed, "elapsed_s": res.elapsed}
    manifest.add(path)
    manifest.finish(out)
    return 0 if res.all_passed else 1


def cmd_picard(args) -> int:
    loaded = load_config(args.config)
    if loaded.picard is None:
        print("config has no [picard] section", file=sys.stderr)
        return 2
    out = args.out or "out"
    cfg, pic = loaded.sim, loaded.picard
    g = cfg.grid
    data = make_initial_data(cfg.profile, pic.epsilon, g, cfg.width)

    res = picard_iterate(g, data, cfg.couplings, cfg.t_end, pic.dt,
                         pic.iterations, pic.delta)
    log_path = os.path.join(out, "picard_log.csv")
    write_csv(log_path, PICARD_COLUMNS, res.log_rows())
    for row in res.log_rows():
        print("iter {:d}  x_norm {:.6e}  diff {:.6e}  ratio {}".format(
            row[0], row[1], row[2],
            f"{row[3]:.4f}" if np.isfinite(row[3]) else "-"))

    free_pair = apply_T(zero_pair(g, cfg.t_end, pic.dt), cfg.couplings, data)
    ratio0 = contraction_ratio(free_pair, zero_pair(g, cfg.t_end, pic.dt),
                               cfg.couplings, data, pic.delta)
    print(f"contraction ratio against the zero pair: {ratio0:.4f}")

    final = res.pairs[-1]
    extras = x_norm(final, pic.delta, with_extras=True).extras
    print(f"weighted source norm of the final iterate: {extras['box_norm']:.4e}")

    dec = divergence_decomposition(final, cfg.couplings.P1, data)
    nf_t, nf_res = normal_form_residual(final, cfg.couplings.P1, dec)
    dec_path = os.path.join(out, "decomposition.csv")
    write_csv(dec_path, ("t", "reconstruction_gap"), list(zip(dec.times, dec.gap)))
    nf_path = os.path.join(out, "normal_form.csv")
    write_csv(nf_path, ("t", "residual"), list(zip(nf_t, nf_res)))
    print(f"reconstruction gap max {np.max(dec.gap):.3e}; "
          f"normal-form residual max {np.max(nf_res):.3e}")

    manifest = RunManifest("picard", loaded.hash).start()
    manifest.notes.extend(_CAP_NOTES)
    manifest.acceptance = {
        "ratios": res.ratios,
        "ratio_vs_zero": ratio0,
        "max_reconstruction_gap": float(np.max(dec.gap)),
        "max_normal_form_residual": float(np.max(nf_res)),
    }
    manifest.add(log_path, dec_path, nf_path)
    manifest.finish(out)
    return 0


def cmd_decay_fit(args) -> int:
    out = args.out or "out"
    window = tuple(float(v) for v in args.window.split(","))
    fits = fit_series_csv(args.csv, window)
    if not fits:
        print("no fittable series in input", file=sys.stderr)
        return 1
    for f in fits:
        print(f"{f.series_id:24s} exponent {f.exponent:8.4f} amplitude {f.amplitude:.4e} "
              f"rsq {f.rsq:.6f}")
    path = os.path.join(out, "decay_fits.csv")
    write_csv(path, FIT_COLUMNS,
              [[f.series_id, f.exponent, f.amplitude, f.t_lo, f.t_hi, f.rsq] for f in fits])
    manifest = RunManifest("decay-fit", "-").start()
    manifest.add(path)
    manifest.finish(out)
    print(f"wrote {path}")
    return 0


def cmd_linear_check(args) -> int:
    out = args.out or "out"
    g = Grid2D.square(512, 10.0)
    z = Field2D.zeros(g)
    bump = Field2D.from_function(g, lambda X, Y: np.exp(-((X - 0.5) ** 2 + Y**2)))
    t = 2.5
    w, _ = propagate_free(WAVE, z, bump, t)
    rng = np.random.default_rng(11)
    rows, worst = [], 0.0
    for _ in range(10):
        i = int(rng.integers(g.nx // 2 - 64, g.nx // 2 + 64))
        j = int(rng.integers(g.ny // 2 - 64, g.ny // 2 + 64))
        px, py = g.x0 + i * g.dx, g.y0 + j * g.dy
        oracle = representation_oracle(bump, t, (px, py))
        rel = abs(oracle - w.values[i, j]) / max(abs(oracle), 1e-30)
        rows.append([px, py, oracle, w.values[i, j], rel])
        worst = max(worst, rel)

    traj = propagate_sourced(WAVE, bump, z, None, 1.0, 0.125)
    wf, wtf = propagate_free(WAVE, bump, z, 1.0)
    zero_src_gap = max(float(np.max(np.abs(traj[-1][1].values - wf.values))),
                       float(np.max(np.abs(traj[-1][2].values - wtf.values))))

    print(f"oracle vs propagator worst relative error: {worst:.3e} (tolerance 1e-3)")
    print(f"zero-source propagator vs free flow gap:  {zero_src_gap:.3e} (tolerance 1e-12)")
    ok = worst < 1e-3 and zero_src_gap < 1e-12
    path = os.path.join(out, "linear_check.csv")
    write_csv(path, ("x", "y", "oracle", "propagator", "rel_err"), rows)
    manifest = RunManifest("linear-check", "-").start()
    manifest.acceptance = {"oracle_worst_rel": worst, "zero_source_gap": zero_src_gap,
                           "passed": ok}
    manifest.add(path)
    manifest.finish(out)
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_convergence(args) -> int:
    loaded = load_config(args.config)
    out = args.out or "out"
    cfg = loaded.sim
    finals = []
    for level in range(3):
        c = SimConfig(n=cfg.n, half_width=cfg.half_width, profile=cfg.profile,
                      epsilon=cfg.epsilon, couplings=cfg.couplings, t_end=cfg.t_end,
                      cfl=cfg.cfl / 2**level, output_stride=cfg.t_end,
                      delta=cfg.delta, width=cfg.width)
        last = None
        for s in run(c):
            last = s
        finals.append(last)
    rows = []
    ok = True
    for comp in ("u", "v"):
        a = getattr(finals[0], comp).values
        b = getattr(finals[1], comp).values
        c_ = getattr(finals[2], comp).values
        e1 = float(np.max(np.abs(a - b)))
        e2 = float(np.max(np.abs(b - c_)))
        order = float(np.log2(e1 / e2)) if e2 > 0 else float("inf")
        rows.append([comp, e1, e2, order])
        print(f"{comp}: |dt-dt/2| {e1:.3e}  |dt/2-dt/4| {e2:.3e}  order {order:.2f}")
        ok = ok and (order >= 3.5 or e2 < 1e-14)
    path = os.path.join(out, "convergence.csv")
    write_csv(path, ("component", "coarse_gap", "fine_gap", "order"), rows)
    manifest = RunManifest("convergence", loaded.hash).start()
    manifest.acceptance = {"orders": {r[0]: r[3] for r in rows}, "passed": ok}
    manifest.add(path)
    manifest.finish(out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nullwave",
                                 description="coupled wave/Klein-Gordon desk laboratory")
    ap.add_argument("--out", help="output directory (default ./out)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the nonlinear solver with diagnostics")
    p.add_argument("config")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("identities", help="run the exact-identity corpus")
    p.set_defaults(fn=cmd_identities)

    p = sub.add_parser("picard", help="fixed-point iteration and contraction report")
    p.add_argument("config")
    p.set_defaults(fn=cmd_picard)

    p = sub.add_parser("decay-fit", help="fit power laws to a series CSV")
    p.add_argument("csv")
    p.add_argument("--window", required=True, help="t_lo,t_hi")
    p.set_defaults(fn=cmd_decay_fit)

    p = sub.add_parser("linear-check", help="propagator vs representation oracle")
    p.set_defaults(fn=cmd_linear_check)

    p = sub.add_parser("convergence", help="dt-halving self-convergence study")
    p.add_argument("config")
    p.set_defaults(fn=cmd_convergence)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except NullwaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
