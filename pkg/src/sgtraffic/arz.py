"""Stochastic Galerkin Aw-Rascle-Zhang system.

For coefficient vectors (rho, q) in each cell the system reads

    rho_t + (q - P(h(rho)) rho)_x = 0,
    q_t + (P(q) P(rho)^-1 q - P(h(rho)) q)_x = (P(V_eq(rho)) rho + P(h(rho)) rho - q) / eps,

with P(u) the Galerkin matrix.  The homogeneous part is advanced with a local
Lax-Friedrichs flux, the relaxation is integrated exactly (it is linear in q
at frozen rho).  A level-0 basis gives the deterministic scheme.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from . import physics
from .errors import CFLError, ContractError, VacuumError
from .gpc import galerkin_matrix, project_nonlinear
from .grid import Mesh, flux_difference, with_ghosts


@dataclass
class FluidState:
    rho: np.ndarray
    q: np.ndarray
    mesh: Mesh
    time: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        if self.rho.shape != self.q.shape or self.rho.shape[0] != self.mesh.n_cells:
            raise ContractError(f"rho{self.rho.shape} and q{self.q.shape} do not fit the mesh")

    def copy(self):
        return replace(self, rho=self.rho.copy(), q=self.q.copy())


def _matvec(A, x):
    return np.einsum("...ij,...j->...i", A, x)


def _nodal_positive(rho, basis, what="density"):
    nodal = basis.to_nodal(rho)
    if np.any(nodal <= 0):
        idx = tuple(int(i) for i in np.argwhere(nodal <= 0)[0])
        raise VacuumError(f"non-positive nodal {what} {nodal[idx]:.3e} at (cell, node) {idx}")
    return nodal


def arz_flux(rho, q, T, params):
    """Galerkin fluxes ``(q - P(h) rho, P(q) P(rho)^-1 q - P(h) q)``."""
    basis = T.basis
    _nodal_positive(rho, basis)
    h = project_nonlinear(lambda r: physics.hesitation(r, params), rho, basis)
    Ph = galerkin_matrix(h, T)
    Pr = galerkin_matrix(rho, T)
    Pq = galerkin_matrix(q, T)
    y = np.linalg.solve(Pr, q[..., None])[..., 0]
    return q - _matvec(Ph, rho), _matvec(Pq, y) - _matvec(Ph, q)


def nodal_wave_speeds(rho, q, basis, params):
    """max(|v|, |v - rho h'(rho)|) per cell and node."""
    r = _nodal_positive(rho, basis)
    qn = basis.to_nodal(q)
    v = qn / r - physics.hesitation(r, params)
    lam1 = v - r * physics.hesitation_drho(r, params)
    return np.maximum(np.abs(v), np.abs(lam1))


def cell_wave_speeds(rho, q, basis, params):
    return nodal_wave_speeds(rho, q, basis, params).max(axis=-1)


def max_wave_speed(state, T, params):
    return float(cell_wave_speeds(state.rho, state.q, T.basis, params).max())


def relaxation_target(rho, T, params):
    """Equilibrium flux P(V_eq(rho)) rho + P(h(rho)) rho."""
    basis = T.basis
    veq = project_nonlinear(lambda r: physics.v_eq(r, params), rho, basis)
    h = project_nonlinear(lambda r: physics.hesitation(r, params), rho, basis)
    return _matvec(galerkin_matrix(veq, T) + galerkin_matrix(h, T), rho)


def relax(rho, q, T, params, epsilon, dt):
    if np.isinf(epsilon):
        return q
    target = relaxation_target(rho, T, params)
    return target + (q - target) * np.exp(-dt / epsilon)


def interface_dissipation(rho, q, T, params, bc="outflow"):
    """Local Lax-Friedrichs coefficient at each of the n_cells + 1 interfaces."""
    s = cell_wave_speeds(with_ghosts(rho, bc), with_ghosts(q, bc), T.basis, params)
    return np.maximum(s[:-1], s[1:])


def arz_step(state, T, params, epsilon, dt, bc="outflow", alpha=None, cfl_limit=1.0):
    """One local Lax-Friedrichs step followed by exact relaxation.

    ``alpha`` overrides the interface dissipation coefficients (length
    n_cells + 1); this is how a set of deterministic runs can be made to use
    exactly the dissipation of a coupled Galerkin step.
    """
    dx = state.mesh.dx
    rg = with_ghosts(state.rho, bc)
    qg = with_ghosts(state.q, bc)
    speeds = cell_wave_speeds(rg, qg, T.basis, params)
    smax = float(speeds.max())
    if smax > 0 and dt * smax > cfl_limit * dx * (1 + 1e-12):
        raise CFLError(dt, cfl_limit * dx / smax)
    if alpha is None:
        alpha = np.maximum(speeds[:-1], speeds[1:])
    alpha = np.asarray(alpha, dtype=float)[:, None]
    Fr, Fq = arz_flux(rg, qg, T, params)
    Fr_hat = 0.5 * (Fr[:-1] + Fr[1:]) - 0.5 * alpha * (rg[1:] - rg[:-1])
    Fq_hat = 0.5 * (Fq[:-1] + Fq[1:]) - 0.5 * alpha * (qg[1:] - qg[:-1])
    rho = state.rho - dt / dx * flux_difference(Fr_hat)
    q = state.q - dt / dx * flux_difference(Fq_hat)
    _nodal_positive(rho, T.basis)
    q = relax(rho, q, T, params, epsilon, dt)
    return FluidState(rho, q, state.mesh, state.time + dt)


@dataclass
class ArzRun:
    snapshots: list
    n_steps: int
    min_nodal_density: list = field(default_factory=list)
    schedule: object = None

    @property
    def times(self):
        return [s.time for s in self.snapshots]

    @property
    def final(self):
        return self.snapshots[-1]


@dataclass
class StepSchedule:
    """Time steps and interface dissipation of a run, for replay at other xi.

    ``snapshot_steps[k]`` is the number of steps taken before snapshot k.
    """

    dts: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    snapshot_steps: list = field(default_factory=list)
    snapshot_times: list = field(default_factory=list)
    bc: str = "outflow"


def default_snapshot_times(t_final):
    return [0.0, 0.5 * t_final, t_final]


def _next_dt(t, t_target, dt_cfl):
    # land exactly on the target time instead of leaving a sliver
    remaining = t_target - t
    if dt_cfl >= remaining * (1 - 1e-12):
        return remaining, True
    return dt_cfl, False


def run_arz(state0, T, params, epsilon, t_final, cfl=0.45, bc="outflow",
            snapshot_times=None, dt=None, max_steps=1_000_000, record_schedule=False):
    """March to ``t_final`` recording the state at ``snapshot_times``.

    The step is ``cfl * dx / max_wave_speed`` unless a fixed ``dt`` is given.
    With ``record_schedule`` the steps and dissipation coefficients are kept
    in ``run.schedule`` (see :func:`replay_arz`).
    """
    if t_final < 0:
        raise ContractError("t_final must be >= 0")
    times = sorted(set(default_snapshot_times(t_final) if snapshot_times is None else snapshot_times))
    if any(t < state0.time or t > t_final for t in times):
        raise ContractError("snapshot times must lie in [t0, t_final]")
    state = state0.copy()
    snaps, audit = [], []
    sched = StepSchedule(bc=bc) if record_schedule else None
    n = 0
    for t_target in times:
        while state.time < t_target:
            if n >= max_steps:
                raise RuntimeError(f"exceeded {max_steps} steps before t={t_target}")
            step = dt if dt is not None else cfl * state.mesh.dx / max_wave_speed(state, T, params)
            step, last = _next_dt(state.time, t_target, step)
            alpha = None
            if sched is not None:
                alpha = interface_dissipation(state.rho, state.q, T, params, bc)
                sched.dts.append(step)
                sched.alphas.append(alpha)
            state = arz_step(state, T, params, epsilon, step, bc, alpha=alpha)
            if last:
                state.time = t_target
            n += 1
        if sched is not None:
            sched.snapshot_steps.append(n)
            sched.snapshot_times.append(state.time)
        snaps.append(state.copy())
        audit.append(float(T.basis.to_nodal(state.rho).min()))
    return ArzRun(snaps, n, audit, sched)


def replay_arz(state0, T, params, epsilon, schedule):
    """Re-run with the time steps and dissipation of another run."""
    state = state0.copy()
    snaps, audit = [], []
    n = 0
    for stop, t_snap in zip(schedule.snapshot_steps, schedule.snapshot_times):
        while n < stop:
            state = arz_step(state, T, params, epsilon, schedule.dts[n], schedule.bc,
                             alpha=schedule.alphas[n])
            n += 1
        state.time = t_snap
        snaps.append(state.copy())
        audit.append(float(T.basis.to_nodal(state.rho).min()))
    return ArzRun(snaps, n, audit, schedule)


def velocity_coeffs(state, basis, params):
    """Coefficients of v = q / rho - h(rho), evaluated nodally."""
    r = basis.to_nodal(state.rho)
    v = basis.to_nodal(state.q) / r - physics.hesitation(r, params)
    return basis.to_modal(v)


@dataclass(frozen=True)
class InitialData:
    """Density and velocity as functions of (x, xi).

    ``velocity`` may be None, meaning the equilibrium speed V_eq(rho).
    """

    name: str
    density: object
    velocity: object = None
    meta: dict = field(default_factory=dict)


def _affine(spec):
    if isinstance(spec, (tuple, list)):
        lo, hi = spec
        return lambda xi: lo + (hi - lo) * xi
    return lambda xi: spec + 0.0 * xi


def riemann(rho_left, rho_right, v_left, v_right, x_jump=1.0, name="riemann"):
    """Riemann data; a density given as ``(lo, hi)`` is uniform on that range via xi."""
    rl, rr = _affine(rho_left), _affine(rho_right)

    def density(x, xi):
        x, xi = np.broadcast_arrays(x, xi)
        return np.where(x < x_jump, rl(xi), rr(xi))

    def velocity(x, xi):
        x, xi = np.broadcast_arrays(x, xi)
        return np.where(x < x_jump, v_left, v_right) + 0.0 * xi

    meta = dict(rho_left=rho_left, rho_right=rho_right, v_left=v_left,
                v_right=v_right, x_jump=x_jump)
    return InitialData(name, density, velocity, meta)


def perturbed_constant(rho0, sigma, velocity=None):
    """rho = rho0 + sigma (xi - 1/2), constant in x."""
    def density(x, xi):
        x, xi = np.broadcast_arrays(x, xi)
        return rho0 + sigma * (xi - 0.5)
    vel = None if velocity is None else (lambda x, xi: velocity + 0.0 * np.asarray(x) * np.asarray(xi))
    return InitialData("rhoxi", density, vel, dict(rho0=rho0, sigma=sigma, velocity=velocity))


RAREFACTION = riemann((0.55, 0.85), 0.2, 0.2, 0.7, name="rarefaction")
SHOCK = riemann((0.15, 0.45), 0.75, 0.7, 0.3, name="shock")


def project_initial_data(initial, basis, mesh, params, xi=None):
    """Exact Haar projection of (rho, q) with q = rho (v + h(rho)) built nodally.

    ``xi`` replaces the dyadic midpoints, e.g. a single sample for a
    deterministic run at that xi with a level-0 basis.
    """
    nodes = basis.nodes if xi is None else np.atleast_1d(np.asarray(xi, dtype=float))
    if nodes.shape[0] != basis.size:
        raise ContractError(f"{nodes.shape[0]} xi values for a basis of size {basis.size}")
    x = mesh.centers[:, None]
    rho = np.asarray(initial.density(x, nodes[None, :]), dtype=float)
    if np.any(rho <= 0) or np.any(rho >= params.rho_max):
        raise ContractError(f"initial density leaves (0, {params.rho_max}): range "
                            f"[{rho.min():.4g}, {rho.max():.4g}]")
    if initial.velocity is None:
        v = physics.v_eq(rho, params)
    else:
        v = np.asarray(initial.velocity(x, nodes[None, :]), dtype=float)
    q = rho * (v + physics.hesitation(rho, params))
    return FluidState(basis.to_modal(rho), basis.to_modal(q), mesh, 0.0)
