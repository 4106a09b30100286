"""Experiment pipelines behind the command line.

Each pipeline writes CSV files and PNG figures into an output directory and
returns a summary dict (resolved configuration, timings, audit values).
"""
import time
from pathlib import Path

import numpy as np

from . import arz, diagnostics, io, kinetic, montecarlo, plotting
from .config import SWEEPS
from .errors import ConfigError
from .gpc import build_haar_basis, compute_triple_products, gpc_mean, gpc_variance
from .grid import Mesh

SWEEP_COLUMNS = ("rho0", "sigma", "n_v", "gamma", "p")
FIELD_COLUMNS = ("x", "p", "band_lower", "band_upper", "mean")
KINETIC_COLUMNS = ("x", "rho_mean", "rho_var", "q_mean")


def _tag(t):
    return f"{t:.6g}".replace(".", "p")


def run_sweep(cfg, out_dir):
    """Steady-state or sigma sweep of P(mu <= 0), one curve per n_v (and rho0)."""
    out_dir = Path(out_dir)
    rows, curves = [], {}
    for n_v in cfg.n_v_values:
        params = cfg.physics(n_v)
        if cfg.scenario == "steady-sweep":
            tab = diagnostics.steady_state_sweep(cfg.grid_values("rho0_grid"), cfg.sigma,
                                                 params, cfg.n_xi, cfg.precedence)
            tables = [tab]
            curves[f"n_v = {n_v}"] = (tab.rho0, tab.probability)
        else:
            tables = [diagnostics.sigma_sweep(r0, cfg.grid_values("sigma_grid"), params,
                                              cfg.n_xi, cfg.precedence) for r0 in cfg.rho0]
            for r0, tab in zip(cfg.rho0, tables):
                curves[f"rho0 = {r0:g}, n_v = {n_v}"] = (tab.sigma, tab.probability)
        for tab in tables:
            rows.extend(tab.rows())
    name = cfg.scenario.replace("-", "_")
    meta = dict(scenario=cfg.scenario, gamma=cfg.gamma, n_xi=cfg.n_xi, precedence=cfg.precedence)
    files = [io.write_csv(out_dir / f"{name}.csv", SWEEP_COLUMNS, rows, meta)]
    xlabel = r"$\rho_0$" if cfg.scenario == "steady-sweep" else r"$\sigma$"
    files.append(plotting.plot_sweep(curves, xlabel, out_dir / f"{name}.png"))
    argmax = {label: float(x[int(np.argmax(p))]) for label, (x, p) in curves.items()}
    return dict(files=[str(f) for f in files], argmax=argmax)


def _field_rows(state, basis, params, cfg):
    p = diagnostics.probability_field(state.rho, basis, params, cfg.n_xi, cfg.precedence)
    lo, hi = diagnostics.confidence_band(state.rho, basis, cfg.band_level, cfg.n_xi)
    mean = gpc_mean(state.rho)
    rows = [dict(zip(FIELD_COLUMNS, vals)) for vals in zip(state.mesh.centers, p, lo, hi, mean)]
    return rows, p, lo, hi, mean


def run_riemann(cfg, out_dir, seed=montecarlo.DEFAULT_SEED):
    """gPC-ARZ run with probability fields, bands, and optional kinetic / MC runs."""
    out_dir = Path(out_dir)
    params = cfg.physics()
    mesh = Mesh(cfg.a, cfg.b, cfg.dx)
    basis = build_haar_basis(cfg.level)
    T = compute_triple_products(basis)
    initial = cfg.initial_data()
    state0 = arz.project_initial_data(initial, basis, mesh, params)
    t0 = time.perf_counter()
    run = arz.run_arz(state0, T, params, cfg.epsilon, cfg.t_final, cfl=cfg.cfl, bc=cfg.bc,
                      snapshot_times=cfg.snapshot_times, record_schedule=cfg.mc_samples > 0)
    summary = dict(arz=dict(n_steps=run.n_steps, wall_time=time.perf_counter() - t0,
                            min_nodal_density=run.min_nodal_density,
                            mass=[float(s.rho[:, 0].sum() * mesh.dx) for s in run.snapshots]))
    files, profiles, max_p = [], {}, {}
    for snap in run.snapshots:
        rows, p, lo, hi, mean = _field_rows(snap, basis, params, cfg)
        meta = dict(t=snap.time, K=basis.size, gamma=cfg.gamma, epsilon=cfg.epsilon, dx=cfg.dx,
                    n_v=cfg.n_v, n_xi=cfg.n_xi)
        files.append(io.write_csv(out_dir / f"field_t{_tag(snap.time)}.csv", FIELD_COLUMNS, rows, meta))
        profiles[snap.time] = p
        max_p[_tag(snap.time)] = float(p.max())
    final = run.final
    _, _, lo, hi, mean = _field_rows(final, basis, params, cfg)
    files.append(plotting.plot_probability_profiles(mesh.centers, profiles, out_dir / "probability.png",
                                                    title=f"{cfg.scenario}, K = {basis.size}"))
    extra = {}

    if cfg.kinetic:
        kp = cfg.physics()
        wgrid = kinetic.build_w_grid(kp)
        k0 = kinetic.equilibrium_state(state0.rho, kp, wgrid, basis, mesh)
        t0 = time.perf_counter()
        krun = kinetic.run_kinetic(k0, T, kp, cfg.epsilon, cfg.t_final, cfl=cfg.cfl, bc=cfg.bc,
                                   snapshot_times=cfg.snapshot_times)
        summary["kinetic"] = dict(n_steps=krun.n_steps, wall_time=time.perf_counter() - t0,
                                  positivity_violations=krun.positivity_violations,
                                  l1_to_arz=[float(np.abs(a.rho - b.rho).sum() * mesh.dx)
                                             for a, b in zip(krun.snapshots, run.snapshots)])
        for snap in krun.snapshots:
            rows = [dict(zip(KINETIC_COLUMNS, v)) for v in
                    zip(mesh.centers, gpc_mean(snap.rho), gpc_variance(snap.rho), gpc_mean(snap.q))]
            meta = dict(t=snap.time, K=basis.size, gamma=cfg.gamma, epsilon=cfg.epsilon, dx=cfg.dx)
            files.append(io.write_csv(out_dir / f"kinetic_t{_tag(snap.time)}.csv",
                                      KINETIC_COLUMNS, rows, meta))
        extra["kinetic mean"] = gpc_mean(krun.final.rho)

    if cfg.mc_samples > 0:
        t0 = time.perf_counter()
        mc = montecarlo.run_samples(initial, mesh, params, cfg.epsilon, cfg.t_final, cfg.mc_samples,
                                    sampling=cfg.mc_sampling, seed=seed, cfl=cfg.cfl, bc=cfg.bc,
                                    schedule=run.schedule)
        report = montecarlo.compare_with_gpc(mc, run.snapshots)
        meta = dict(K=basis.size, gamma=cfg.gamma, epsilon=cfg.epsilon, dx=cfg.dx,
                    n_samples=cfg.mc_samples, sampling=cfg.mc_sampling)
        files.append(io.write_csv(out_dir / "mc_report.csv", montecarlo.REPORT_COLUMNS, report.rows, meta))
        summary["monte_carlo"] = dict(wall_time=time.perf_counter() - t0, seed=mc.seed,
                                      l1_mean=report.l1_mean, l1_var=report.l1_var,
                                      linf_mean=report.linf_mean, linf_var=report.linf_var)
        extra["MC mean"] = mc.mean[-1]

    files.append(plotting.plot_band(mesh.centers, mean, lo, hi, out_dir / "band.png", extra=extra,
                                    title=f"t = {final.time:g}, {cfg.band_level:.0%} band"))
    summary.update(files=[str(f) for f in files], max_probability=max_p)
    return summary


def run_experiment(cfg, out_dir, seed=montecarlo.DEFAULT_SEED):
    start = time.perf_counter()
    if cfg.scenario in SWEEPS:
        result = run_sweep(cfg, out_dir)
    elif cfg.scenario in ("rarefaction", "shock", "custom"):
        result = run_riemann(cfg, out_dir, seed)
    else:
        raise ConfigError(f"unknown scenario {cfg.scenario!r}")
    summary = dict(config=cfg.resolved(), seed=seed, wall_time=time.perf_counter() - start, **result)
    summary["files"].append(str(io.write_summary(Path(out_dir) / "summary.json", summary)))
    return summary
