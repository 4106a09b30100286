"""Stochastic Galerkin BGK model in the Lagrangian speed w = v + h(rho).

Unknowns are the coefficients g[c, j, i] (cell c, w-node j, mode i) of the
kinetic density on a fixed uniform w-grid.  A step transports each w-slice
with the matrix speed ``w_j Id - P(h(rho))``, upwinded in the eigenbasis of
the Galerkin matrices, and then relaxes exactly towards the projected
Maxwellian.
"""
import logging
from dataclasses import dataclass, replace

import numpy as np

from . import physics
from .arz import FluidState, _next_dt
from .errors import CFLError, ContractError, StateError
from .gpc import galerkin_matrix, project_nonlinear
from .grid import Mesh, flux_difference, with_ghosts

log = logging.getLogger(__name__)

PLACEMENTS = ("linear", "nearest")


@dataclass(frozen=True)
class WGrid:
    """Uniform nodes ``w_min + k dw`` covering [h(0), v_max + h(rho_max)]."""

    nodes: np.ndarray

    @property
    def dw(self):
        return float(self.nodes[1] - self.nodes[0])


def build_w_grid(params, dw=None):
    dw = params.v_max / (params.n_v - 1) if dw is None else dw
    w_min = float(physics.hesitation(0.0, params))
    w_max = params.v_max + float(physics.hesitation(params.rho_max, params))
    n = int(np.ceil((w_max - w_min) / dw - 1e-9)) + 1
    return WGrid(w_min + dw * np.arange(n))


def maxwellian_on_grid(rho, params, wgrid, placement="linear"):
    """M_g(rho) deposited on the w-grid, shape ``rho.shape + (n_w,)``.

    ``linear`` splits each Dirac between its two neighbouring nodes so that
    mass and first moment are kept exactly; ``nearest`` moves it to the
    closest node (mass only).
    """
    rho = np.asarray(rho, dtype=float)
    f = physics.maxwellian_weights(rho, params)
    w = physics.velocities(params) + physics.hesitation(rho, params)[..., None]
    s = (w - wgrid.nodes[0]) / wgrid.dw
    n_w = wgrid.nodes.size
    out = np.zeros(rho.shape + (n_w,))
    flat = out.reshape(-1, n_w)
    rows = np.repeat(np.arange(flat.shape[0]), params.n_v)
    s = s.reshape(-1)
    fw = f.reshape(-1)
    if placement == "nearest":
        k = np.clip(np.rint(s).astype(int), 0, n_w - 1)
        np.add.at(flat, (rows, k), fw)
    elif placement == "linear":
        k = np.clip(np.floor(s).astype(int), 0, n_w - 2)
        theta = s - k
        np.add.at(flat, (rows, k), (1.0 - theta) * fw)
        np.add.at(flat, (rows, k + 1), theta * fw)
    else:
        raise ContractError(f"placement must be one of {PLACEMENTS}")
    return out


def projected_maxwellian(rho_tilde, params, wgrid, basis, placement="linear"):
    """Coefficients of xi -> M_g(w_j; rho(xi)), shape (..., n_w, K+1).

    Evaluated at the nodal densities and transformed back, which is the exact
    projection for Haar fields.
    """
    nodal = basis.to_nodal(rho_tilde)
    if np.any(nodal < 0) or np.any(nodal > params.rho_max):
        raise StateError(f"nodal density range [{nodal.min():.4g}, {nodal.max():.4g}] "
                         f"outside [0, {params.rho_max}]")
    M = maxwellian_on_grid(nodal, params, wgrid, placement)  # (..., K+1 nodes, n_w)
    return basis.to_modal(np.swapaxes(M, -1, -2))


@dataclass
class KineticState:
    g: np.ndarray
    wgrid: WGrid
    mesh: Mesh
    time: float = 0.0
    positivity_violations: int = 0

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=float)
        if self.g.shape[:2] != (self.mesh.n_cells, self.wgrid.nodes.size):
            raise ContractError(f"g{self.g.shape} does not fit mesh and w-grid")

    def copy(self):
        return replace(self, g=self.g.copy())


def kinetic_moments(state):
    """(rho_tilde, q_tilde) per cell: discrete sums over the w-nodes."""
    rho = state.g.sum(axis=1)
    q = np.einsum("j,cji->ci", state.wgrid.nodes, state.g)
    return rho, q


def equilibrium_state(rho_tilde, params, wgrid, basis, mesh, placement="linear"):
    g = projected_maxwellian(rho_tilde, params, wgrid, basis, placement)
    return KineticState(g, wgrid, mesh, 0.0)


def _transport_speeds(g, wgrid, basis, params):
    """Nodal speeds w_j - h(rho_n), shape (cells, n_w, nodes)."""
    rho_nodal = basis.to_nodal(g.sum(axis=1))
    h = physics.hesitation(np.maximum(rho_nodal, 0.0), params)
    return wgrid.nodes[None, :, None] - h[:, None, :]


def transport_flux(gg, T, params, wgrid, route="nodal"):
    """Interface fluxes for ghost-padded coefficients ``gg`` (n+2, n_w, K+1).

    Flux splitting ``A_L^+ g_L + A_R^- g_R`` with ``A = w Id - P(h(rho))``.
    ``route="nodal"`` works on cell values of xi and transforms back;
    ``route="modal"`` assembles the Galerkin matrices and splits them with the
    shared eigenvectors.  Both give the same numbers for Haar.
    """
    basis = T.basis
    lam = _transport_speeds(gg, wgrid, basis, params)
    if route == "nodal":
        G = basis.to_nodal(gg)
        F = np.maximum(lam[:-1], 0.0) * G[:-1] + np.minimum(lam[1:], 0.0) * G[1:]
        return basis.to_modal(F)
    if route != "modal":
        raise ContractError("route must be 'modal' or 'nodal'")
    V = T.eigenvectors
    rho = gg.sum(axis=1)
    h = project_nonlinear(lambda r: physics.hesitation(np.maximum(r, 0.0), params), rho, basis)
    Ph = galerkin_matrix(h, T)
    A = wgrid.nodes[None, :, None, None] * np.eye(T.size) - Ph[:, None, :, :]
    absA = np.einsum("in,cjn,kn->cjik", V, np.abs(lam), V)
    Ap = 0.5 * (A + absA)
    Am = 0.5 * (A - absA)
    mv = lambda M, x: np.einsum("cjik,cjk->cji", M, x)
    return mv(Ap[:-1], gg[:-1]) + mv(Am[1:], gg[1:])


def bgk_step(state, T, params, epsilon, dt, bc="outflow", route="nodal",
             placement="linear", cfl_limit=1.0):
    """Transport then exact relaxation g <- M + (g - M) exp(-dt/eps)."""
    basis = T.basis
    dx = state.mesh.dx
    gg = with_ghosts(state.g, bc)
    lam = _transport_speeds(gg, state.wgrid, basis, params)
    smax = float(np.abs(lam).max())
    if smax > 0 and dt * smax > cfl_limit * dx * (1 + 1e-12):
        raise CFLError(dt, cfl_limit * dx / smax)
    F = transport_flux(gg, T, params, state.wgrid, route)
    g = state.g - dt / dx * flux_difference(F)
    if np.isfinite(epsilon):
        M = projected_maxwellian(g.sum(axis=1), params, state.wgrid, basis, placement)
        g = M + (g - M) * np.exp(-dt / epsilon)
    violations = state.positivity_violations
    if np.any(basis.to_nodal(g) < -1e-12):
        violations += 1
        log.warning("negative nodal kinetic density %.3e at t=%.4g",
                    basis.to_nodal(g).min(), state.time + dt)
    return KineticState(g, state.wgrid, state.mesh, state.time + dt, violations)


def max_transport_speed(state, T, params):
    return float(np.abs(_transport_speeds(state.g, state.wgrid, T.basis, params)).max())


@dataclass
class KineticRun:
    snapshots: list
    n_steps: int
    positivity_violations: int = 0

    @property
    def times(self):
        return [s.time for s in self.snapshots]

    @property
    def final(self):
        return self.snapshots[-1]


def run_kinetic(state0, T, params, epsilon, t_final, cfl=0.45, bc="outflow",
                snapshot_times=None, dt=None, route="nodal", placement="linear",
                max_steps=1_000_000):
    """March the kinetic system; snapshots hold the moments as FluidStates."""
    if t_final < 0:
        raise ContractError("t_final must be >= 0")
    times = sorted(set([0.0, 0.5 * t_final, t_final] if snapshot_times is None else snapshot_times))
    state = state0.copy()
    snaps = []
    n = 0
    for t_target in times:
        while state.time < t_target:
            if n >= max_steps:
                raise RuntimeError(f"exceeded {max_steps} steps before t={t_target}")
            step = dt if dt is not None else cfl * state.mesh.dx / max_transport_speed(state, T, params)
            step, last = _next_dt(state.time, t_target, step)
            state = bgk_step(state, T, params, epsilon, step, bc, route, placement)
            if last:
                state.time = t_target
            n += 1
        rho, q = kinetic_moments(state)
        snaps.append(FluidState(rho, q, state.mesh, state.time))
    return KineticRun(snaps, n, state.positivity_violations)
