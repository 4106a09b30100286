"""Chapman-Enskog diffusion coefficient and instability probabilities.

The effective diffusion of the first-order limit is

    mu(rho) = -(dQ_eq)^2 - h'(rho) dQ_eq rho + Q_eq h'(rho) + d/drho sum_j v_j^2 f_j(rho),

and a point (t, x) is flagged when mu(rho(t, x, xi)) <= 0 with positive
probability over xi.
"""
from dataclasses import dataclass

import numpy as np

from . import physics
from .errors import ContractError, DomainError
from .gpc import galerkin_matrix

PRECEDENCES = ("square_of_derivative", "derivative_of_square")


def mu_algebraic(rho, params, precedence="square_of_derivative"):
    """Part of mu built from Q_eq and h only (no Maxwellian term)."""
    rho = np.asarray(rho, dtype=float)
    Q = physics.q_eq(rho, params)
    dQ = physics.q_eq_drho(rho, params)
    dh = physics.hesitation_drho(rho, params)
    if precedence == "square_of_derivative":
        lead = -dQ ** 2
    elif precedence == "derivative_of_square":
        lead = -2.0 * Q * dQ
    else:
        raise ContractError(f"precedence must be one of {PRECEDENCES}")
    return lead - dh * dQ * rho + Q * dh


def mu(rho, params, precedence="square_of_derivative"):
    """Diffusion coefficient mu(rho) for densities in [0, rho_max]."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0) or np.any(rho > params.rho_max):
        raise DomainError(f"mu needs rho in [0, {params.rho_max}]")
    return (mu_algebraic(rho, params, precedence)
            + physics.maxwellian_second_moment_drho(rho, params))


def d_coefficient(rho, params):
    """Coefficient D(rho) of the unsimplified first-order correction (audit only)."""
    rho = np.asarray(rho, dtype=float)
    Q = physics.q_eq(rho, params)
    dQ = physics.q_eq_drho(rho, params)
    h = physics.hesitation(rho, params)
    dh = physics.hesitation_drho(rho, params)
    d_hrho = dh * rho + h
    return (dQ + d_hrho) * (dQ + h) + dh * (Q + h * rho)


def lwr_R(rho, rho_max=1.0):
    """Algebraic part of mu for h = rho and V_eq = rho_max - rho."""
    rho = np.asarray(rho, dtype=float)
    return -(rho_max - 2 * rho) ** 2 - (rho_max * rho - rho ** 2) + rho * (rho_max - rho)


def lwr_R_coeffs(rho_tilde, T, rho_max=1.0):
    """Coefficients of R(rho(xi)) written with Galerkin matrices only.

    ``one`` is the coefficient vector of the constant random variable 1.
    """
    rho_tilde = np.asarray(rho_tilde, dtype=float)
    one = np.zeros(T.size)
    one[0] = 1.0
    P = galerkin_matrix(rho_tilde, T)
    a = rho_max * one - 2 * rho_tilde
    Pa = galerkin_matrix(a, T)
    b = rho_max * one - rho_tilde
    mv = lambda A, x: np.einsum("...ij,...j->...i", A, x)
    return -mv(Pa, a) - rho_max * rho_tilde + mv(P, rho_tilde) + mv(P, b)


def _nonpositive(m):
    # the event is mu <= 0, so a tie counts as unstable
    return m <= 0.0


def _check_range(rho, params):
    rho = np.asarray(rho)
    if np.any(rho <= 0) or np.any(rho >= params.rho_max):
        bad = rho[(rho <= 0) | (rho >= params.rho_max)]
        raise DomainError(f"density {bad.flat[0]!r} outside (0, {params.rho_max})")


def probability_mu_nonpositive(rho_field, params, n_xi=10_000, precedence="square_of_derivative"):
    """Midpoint quadrature of P(mu(rho(xi)) <= 0) for a sampler ``rho_field(xi)``."""
    if n_xi < 1:
        raise ContractError("n_xi must be >= 1")
    xi = (np.arange(n_xi) + 0.5) / n_xi
    rho = np.asarray(rho_field(xi), dtype=float)
    _check_range(rho, params)
    return float(np.mean(_nonpositive(mu(rho, params, precedence))))


def rhoxi_sampler(rho0, sigma):
    """rho(xi) = rho0 + sigma (xi - 1/2)."""
    return lambda xi: rho0 + sigma * (np.asarray(xi) - 0.5)


def _probabilities_linear(rho0, sigma, params, n_xi, precedence):
    rho0 = np.asarray(rho0, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    xi = (np.arange(n_xi) + 0.5) / n_xi
    rho = rho0[..., None] + sigma[..., None] * (xi - 0.5)
    _check_range(rho, params)
    return np.mean(_nonpositive(mu(rho, params, precedence)), axis=-1)


@dataclass
class SweepTable:
    rho0: np.ndarray
    sigma: np.ndarray
    n_v: int
    gamma: int
    probability: np.ndarray

    def rows(self):
        for r, s, p in zip(self.rho0, self.sigma, self.probability):
            yield {"rho0": float(r), "sigma": float(s), "n_v": self.n_v,
                   "gamma": self.gamma, "p": float(p)}


def steady_state_sweep(rho0_grid, sigma, params, n_xi=10_000, precedence="square_of_derivative"):
    """P(mu <= 0) for the perturbed constant state at each rho0 in ``rho0_grid``."""
    rho0 = np.asarray(rho0_grid, dtype=float)
    sig = np.full_like(rho0, float(sigma))
    p = _probabilities_linear(rho0, sig, params, n_xi, precedence)
    return SweepTable(rho0, sig, params.n_v, params.gamma, p)


def sigma_sweep(rho0, sigma_grid, params, n_xi=10_000, precedence="square_of_derivative"):
    """P(mu <= 0) at fixed rho0 as the spread sigma varies."""
    sig = np.asarray(sigma_grid, dtype=float)
    r0 = np.full_like(sig, float(rho0))
    p = _probabilities_linear(r0, sig, params, n_xi, precedence)
    return SweepTable(r0, sig, params.n_v, params.gamma, p)


def xi_samples(rho_tilde, basis, n_xi):
    """Reconstructed values at the ``n_xi`` midpoint nodes, shape (..., n_xi)."""
    xi = (np.arange(n_xi) + 0.5) / n_xi
    return basis.to_nodal(rho_tilde)[..., basis.cell_index(xi)]


def probability_field(rho_tilde, basis, params, n_xi=100, precedence="square_of_derivative"):
    """Per-cell P(mu <= 0) for a field of gPC densities with shape (n_cells, K+1)."""
    samples = xi_samples(rho_tilde, basis, n_xi)
    _check_range(samples, params)
    return np.mean(_nonpositive(mu(samples, params, precedence)), axis=-1)


def confidence_band(u, basis, level=0.95, n_xi=100):
    """Empirical central band of the reconstructed field at the xi quadrature nodes."""
    if not 0 < level < 1:
        raise ContractError("level must lie in (0, 1)")
    samples = xi_samples(u, basis, n_xi)
    tail = 0.5 * (1.0 - level)
    lower, upper = np.quantile(samples, [tail, 1.0 - tail], axis=-1)
    return lower, upper
