"""Non-intrusive validation: deterministic ARZ runs per xi sample.

Each sample is the gPC solver with a level-0 basis fed the initial data at one
xi, so grid, CFL rule, relaxation and boundaries are those of the Galerkin run.
Moments are accumulated with Welford's update (population variance).
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import arz
from .errors import ContractError
from .gpc import build_haar_basis, compute_triple_products, gpc_mean, gpc_variance

SAMPLINGS = ("uniform-grid", "pseudo-random")
DEFAULT_SEED = 20240101


@dataclass
class MonteCarloMoments:
    """Per-snapshot mean and variance of rho, shape (n_snapshots, n_cells)."""

    times: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    xi: np.ndarray
    sampling: str
    seed: object = None


def sample_points(n_samples, sampling="uniform-grid", seed=DEFAULT_SEED):
    if n_samples < 1:
        raise ContractError("n_samples must be >= 1")
    if sampling == "uniform-grid":
        return (np.arange(n_samples) + 0.5) / n_samples
    if sampling == "pseudo-random":
        rng = np.random.default_rng(seed)
        # open interval: reject the (measure-zero) endpoint 0
        xi = rng.random(n_samples)
        return np.where(xi > 0.0, xi, 0.5 / n_samples)
    raise ContractError(f"sampling must be one of {SAMPLINGS}")


def deterministic_run(initial, xi, mesh, params, epsilon, t_final, cfl=0.45,
                      bc="outflow", snapshot_times=None, schedule=None):
    """Run the level-0 scheme at a single xi; returns the ArzRun.

    A ``schedule`` recorded from a Galerkin run replays its time steps and
    interface dissipation, so only the xi-resolution differs.
    """
    basis = build_haar_basis(0)
    T = compute_triple_products(basis)
    state0 = arz.project_initial_data(initial, basis, mesh, params, xi=[xi])
    if schedule is not None:
        return arz.replay_arz(state0, T, params, epsilon, schedule)
    return arz.run_arz(state0, T, params, epsilon, t_final, cfl=cfl, bc=bc,
                       snapshot_times=snapshot_times)


def run_samples(initial, mesh, params, epsilon, t_final, n_samples,
                sampling="uniform-grid", seed=DEFAULT_SEED, cfl=0.45, bc="outflow",
                snapshot_times=None, workers=1, schedule=None):
    """Mean and variance of the density over xi samples.

    With ``uniform-grid`` the samples are the midpoints of n equal cells, which
    makes this a midpoint quadrature in xi.  A failing sample aborts the run.
    Samples may be solved in parallel; they are accumulated in index order so
    the result does not depend on ``workers``.  ``schedule`` is passed on to
    :func:`deterministic_run`.
    """
    xi = sample_points(n_samples, sampling, seed)
    solve = lambda x: deterministic_run(initial, x, mesh, params, epsilon, t_final,
                                        cfl, bc, snapshot_times, schedule)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = pool.map(solve, xi)
    else:
        runs = map(solve, xi)
    mean = m2 = times = None
    for n, (x, run) in enumerate(zip(xi, runs), start=1):
        rho = np.stack([s.rho[:, 0] for s in run.snapshots])
        if mean is None:
            times = np.array(run.times)
            mean = np.zeros_like(rho)
            m2 = np.zeros_like(rho)
        delta = rho - mean
        mean += delta / n
        m2 += delta * (rho - mean)
    return MonteCarloMoments(times, mean, m2 / len(xi), xi, sampling,
                             seed if sampling == "pseudo-random" else None)


@dataclass
class ComparisonReport:
    rows: list
    l1_mean: np.ndarray
    l1_var: np.ndarray
    linf_mean: np.ndarray
    linf_var: np.ndarray


REPORT_COLUMNS = ("t", "x", "mean_mc", "mean_gpc", "var_mc", "var_gpc", "abs_err_mean", "abs_err_var")


def compare_with_gpc(mc, gpc_snapshots):
    """L1 (times dx) and Linf errors in mean and variance per snapshot."""
    if len(gpc_snapshots) != len(mc.times):
        raise ContractError("snapshot count differs between Monte Carlo and gPC runs")
    rows, l1m, l1v, lim, liv = [], [], [], [], []
    for k, snap in enumerate(gpc_snapshots):
        if abs(snap.time - mc.times[k]) > 1e-12 or snap.rho.shape[0] != mc.mean.shape[1]:
            raise ContractError(f"snapshot {k}: grid or time mismatch")
        mg = gpc_mean(snap.rho)
        vg = gpc_variance(snap.rho)
        em = np.abs(mc.mean[k] - mg)
        ev = np.abs(mc.variance[k] - vg)
        dx = snap.mesh.dx
        l1m.append(em.sum() * dx)
        l1v.append(ev.sum() * dx)
        lim.append(em.max())
        liv.append(ev.max())
        for x, a, b, c, d, e, f in zip(snap.mesh.centers, mc.mean[k], mg, mc.variance[k], vg, em, ev):
            rows.append(dict(zip(REPORT_COLUMNS, (snap.time, x, a, b, c, d, e, f))))
    return ComparisonReport(rows, *(np.array(v) for v in (l1m, l1v, lim, liv)))
