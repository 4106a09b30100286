"""Closure functions of the traffic model.

Hesitation h(rho) = rho**gamma, equilibrium speed/flux, and the discrete-velocity
Maxwellian M_f with its Lagrangian counterpart M_g(w) = M_f(w - h(rho)).
Everything is vectorised over the density argument; weights come back with the
velocity index on the last axis.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError, NumericalModelError

VELOCITY_ORDERS = ("descending", "ascending")
RADICAND_READINGS = ("previous", "partial_sum")
V_EQ_MODELS = ("linear", "maxwellian")


@dataclass(frozen=True)
class PhysicsParams:
    """Model constants.

    velocity_order
        ``"descending"`` puts the first recursion weight on the fastest class,
        ``v_j = (N - j) / (N - 1) * v_max``; ``"ascending"`` uses
        ``v_j = (j - 1) / (N - 1) * v_max``.
    radicand
        Which weight enters the square root of the recursion: the previous
        weight ``f_{j-1}`` or the partial sum ``f_1 + ... + f_{j-1}``.
    v_eq_model
        ``"linear"``: V_eq = v_max (1 - 2 rho / rho_max).
        ``"maxwellian"``: V_eq = (1/rho) sum_j v_j f_j, the flux carried by M_f.
    """

    gamma: int = 1
    v_max: float = 1.0
    rho_max: float = 1.0
    n_v: int = 5
    velocity_order: str = "descending"
    radicand: str = "previous"
    v_eq_model: str = "linear"
    fd_delta: float = 1e-6

    def __post_init__(self):
        if self.gamma not in (1, 2, 3):
            raise ContractError(f"gamma must be 1, 2 or 3, got {self.gamma}")
        if self.n_v < 2:
            raise ContractError(f"n_v must be >= 2, got {self.n_v}")
        if not self.v_max > 0 or not self.rho_max > 0:
            raise ContractError("v_max and rho_max must be positive")
        if self.velocity_order not in VELOCITY_ORDERS:
            raise ContractError(f"velocity_order must be one of {VELOCITY_ORDERS}")
        if self.radicand not in RADICAND_READINGS:
            raise ContractError(f"radicand must be one of {RADICAND_READINGS}")
        if self.v_eq_model not in V_EQ_MODELS:
            raise ContractError(f"v_eq_model must be one of {V_EQ_MODELS}")
        if not self.fd_delta > 0:
            raise ContractError("fd_delta must be positive")


def hesitation(rho, params):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("hesitation is defined for rho >= 0 only")
    return rho ** params.gamma


def hesitation_drho(rho, params):
    rho = np.asarray(rho, dtype=float)
    if params.gamma == 1:
        return np.ones_like(rho)
    return params.gamma * rho ** (params.gamma - 1)


def velocities(params):
    j = np.arange(params.n_v)
    if params.velocity_order == "descending":
        j = j[::-1]
    return j / (params.n_v - 1) * params.v_max


def maxwellian_weights(rho, params):
    """Weights ``f_j(rho)`` of the discrete-velocity Maxwellian, shape ``rho.shape + (N,)``.

    In units rho_max = 1: for rho >= 1/2 all mass sits in the last class; below,
    for j = 1..N-1 with partial sum S and a = (1-2 rho) rho - 2 (1-rho) S,

        f_j = (a + sqrt(a**2 + 4 rho**2 (1-rho) c)) / (2 (1-rho)),

    where c is f_{j-1} (or S, see ``PhysicsParams.radicand``), and
    f_N = rho - S closes the normalisation.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0) or np.any(rho > params.rho_max * (1 + 1e-12)):
        raise DomainError(f"Maxwellian needs rho in [0, {params.rho_max}]")
    r = rho / params.rho_max
    N = params.n_v
    f = np.zeros(r.shape + (N,))
    free = r < 0.5
    rf = r[free]
    S = np.zeros_like(rf)
    prev = np.zeros_like(rf)
    for j in range(N - 1):
        a = (1.0 - 2.0 * rf) * rf - 2.0 * (1.0 - rf) * S
        c = prev if params.radicand == "previous" else S
        disc = a * a + 4.0 * rf * rf * (1.0 - rf) * c
        if np.any(disc < 0):
            k = int(np.argmin(disc))
            raise NumericalModelError(
                f"negative radicand {disc[k]:.3e} at rho={rf[k] * params.rho_max!r}, j={j + 1}"
            )
        fj = (a + np.sqrt(disc)) / (2.0 * (1.0 - rf))
        f[free, j] = fj
        S = S + fj
        prev = fj
    last = rf - S
    # the closing weight is a difference of nearly equal numbers; drop roundoff below zero
    last[(last < 0) & (last > -1e-14 * np.maximum(rf, 1.0))] = 0.0
    f[free, N - 1] = last
    f[~free, N - 1] = r[~free]
    return f * params.rho_max


def maxwellian_moment(order, rho, params):
    """``sum_j v_j**order f_j(rho)``; order 0 returns rho itself."""
    if order not in (0, 1, 2):
        raise ContractError("moment order must be 0, 1 or 2")
    rho = np.asarray(rho, dtype=float)
    f = maxwellian_weights(rho, params)
    if order == 0:
        return rho.copy()
    return f @ velocities(params) ** order


def _fd_drho(func, rho, params, delta):
    """Second-order finite difference of ``func`` in rho.

    Central where possible; one-sided three-point stencils at the ends of
    [0, rho_max] and at the branch point rho_max/2, taking the side that
    contains rho.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    half = 0.5 * params.rho_max
    lo_edge = np.where(rho >= half, half, 0.0)
    hi_edge = np.where(rho < half, half, params.rho_max)
    out = np.empty_like(rho)
    central = (rho - delta >= lo_edge) & (rho + delta < hi_edge)
    forward = ~central & (rho - delta < lo_edge)
    backward = ~central & ~forward
    r = rho[central]
    if r.size:
        out[central] = (func(r + delta) - func(r - delta)) / (2 * delta)
    r = rho[forward]
    if r.size:
        out[forward] = (-3 * func(r) + 4 * func(r + delta) - func(r + 2 * delta)) / (2 * delta)
    r = rho[backward]
    if r.size:
        out[backward] = (3 * func(r) - 4 * func(r - delta) + func(r - 2 * delta)) / (2 * delta)
    return out


def maxwellian_second_moment_drho(rho, params, delta=None):
    """d/drho of ``sum_j v_j**2 f_j(rho)`` by finite differences."""
    delta = params.fd_delta * params.rho_max if delta is None else delta
    if not delta > 0:
        raise ContractError("delta must be positive")
    shape = np.shape(rho)
    out = _fd_drho(lambda r: maxwellian_moment(2, r, params), rho, params, delta)
    return out.reshape(shape)


def v_eq(rho, params):
    rho = np.asarray(rho, dtype=float)
    if params.v_eq_model == "linear":
        return params.v_max * (1.0 - 2.0 * rho / params.rho_max)
    # flux of M_f divided by rho; at rho = 0 the limit is the speed of the first class
    r = np.where(rho > 0, rho, 1e-12 * params.rho_max)
    return maxwellian_moment(1, r, params) / r


def q_eq(rho, params):
    rho = np.asarray(rho, dtype=float)
    if params.v_eq_model == "linear":
        return rho * v_eq(rho, params)
    return maxwellian_moment(1, rho, params)


def q_eq_drho(rho, params):
    rho = np.asarray(rho, dtype=float)
    if params.v_eq_model == "linear":
        return params.v_max * (1.0 - 4.0 * rho / params.rho_max)
    shape = rho.shape
    out = _fd_drho(lambda r: maxwellian_moment(1, r, params), rho, params,
                   params.fd_delta * params.rho_max)
    return out.reshape(shape)


def mg_moments(rho, order, params):
    """Moments of M_g in the Lagrangian speed w_j = v_j + h(rho)."""
    rho = np.asarray(rho, dtype=float)
    f = maxwellian_weights(rho, params)
    if order == 0:
        return f.sum(axis=-1)
    if order == 1:
        w = velocities(params) + hesitation(rho, params)[..., None]
        return np.sum(w * f, axis=-1)
    raise ContractError("mg_moments supports order 0 or 1")


def m2_residual(rho, params):
    """|int w M_g dw - (rho V_eq + rho h)|, the mismatch of the flux identity."""
    rho = np.asarray(rho, dtype=float)
    target = rho * v_eq(rho, params) + rho * hesitation(rho, params)
    return np.abs(mg_moments(rho, 1, params) - target)
