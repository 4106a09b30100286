"""Haar wavelet chaos on the unit interval.

The random input xi is uniform on (0, 1).  A basis of level L holds the
2**L orthonormal Haar functions

    phi_0 = 1,
    phi_{2**l + k} = 2**(l/2) * (+1 on [k, k+1/2) / 2**l, -1 on [k+1/2, k+1) / 2**l),

for l = 0..L-1 and k = 0..2**l - 1.  Every function is constant on the 2**L
dyadic cells [n/2**L, (n+1)/2**L), so a coefficient vector is equivalent to
its vector of cell ("nodal") values.  All arrays keep the modal index on the
last axis so the helpers broadcast over cells, velocities and snapshots.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ContractError, DomainError, ResourceError

MAX_LEVEL = 12
MAX_TENSOR_LEVEL = 8


@dataclass(frozen=True)
class HaarBasis:
    """Orthonormal Haar system of size ``2**level`` with density f = 1 on (0, 1)."""

    level: int

    def __post_init__(self):
        if int(self.level) != self.level or self.level < 0:
            raise ContractError(f"basis level must be a nonnegative integer, got {self.level!r}")
        if self.level > MAX_LEVEL:
            raise ResourceError(f"basis level {self.level} exceeds the guard {MAX_LEVEL}")

    @property
    def size(self):
        return 2 ** self.level

    @property
    def nodes(self):
        """Midpoints of the dyadic cells, in node order."""
        return (np.arange(self.size) + 0.5) / self.size

    @cached_property
    def synthesis(self):
        """Matrix ``S`` with ``S[n, i] = phi_i(nodes[n])``."""
        return self.to_nodal(np.eye(self.size)).T

    def to_nodal(self, coeffs):
        """Cell values of the field(s) with coefficients ``coeffs[..., i]``."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != self.size:
            raise ContractError(f"expected {self.size} coefficients, got {coeffs.shape[-1]}")
        vals = coeffs[..., :1]
        for lev in range(self.level):
            d = coeffs[..., 2 ** lev: 2 ** (lev + 1)] * 2.0 ** (lev / 2)
            out = np.empty(coeffs.shape[:-1] + (2 ** (lev + 1),))
            out[..., 0::2] = vals + d
            out[..., 1::2] = vals - d
            vals = out
        return vals

    def to_modal(self, values):
        """Inverse of :meth:`to_nodal` (exact cell-average projection)."""
        vals = np.asarray(values, dtype=float)
        if vals.shape[-1] != self.size:
            raise ContractError(f"expected {self.size} nodal values, got {vals.shape[-1]}")
        coeffs = np.empty(vals.shape)
        for lev in range(self.level - 1, -1, -1):
            a = vals[..., 0::2]
            b = vals[..., 1::2]
            coeffs[..., 2 ** lev: 2 ** (lev + 1)] = 0.5 * (a - b) * 2.0 ** (-lev / 2)
            vals = 0.5 * (a + b)
        coeffs[..., 0] = vals[..., 0]
        return coeffs

    def cell_index(self, xi):
        """Dyadic cell of each ``xi`` using half-open, left-closed cells."""
        xi = np.asarray(xi, dtype=float)
        if np.any(~((xi > 0.0) & (xi < 1.0))):
            raise ContractError("xi must lie in the open unit interval")
        return np.minimum((xi * self.size).astype(int), self.size - 1)

    def evaluate(self, i, xi):
        """Value of ``phi_i`` at ``xi``."""
        return self.synthesis[self.cell_index(xi), i]

    def quadrature(self, n_nodes=None):
        """Uniform midpoint rule on (0, 1); exact for products of basis functions
        whenever ``n_nodes`` is a multiple of ``size``."""
        n = self.size if n_nodes is None else int(n_nodes)
        return (np.arange(n) + 0.5) / n, np.full(n, 1.0 / n)


def build_haar_basis(level):
    return HaarBasis(int(level))


@dataclass(frozen=True)
class TripleProductTensor:
    """The matrices ``M[l][i, j] = E[phi_i phi_j phi_l]`` and their common eigenvectors.

    ``matrices`` has shape (K+1, K+1, K+1) indexed ``[l, i, j]``.  For Haar all
    of them are diagonalised by ``eigenvectors = S.T / sqrt(K+1)``; the diagonal
    of ``V.T @ P(u) @ V`` is the vector of nodal values of ``u``.
    """

    basis: HaarBasis
    matrices: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def size(self):
        return self.basis.size


def compute_triple_products(basis):
    if basis.level > MAX_TENSOR_LEVEL:
        raise ResourceError(
            f"dense triple-product tensor limited to level {MAX_TENSOR_LEVEL}; got {basis.level}"
        )
    S = basis.synthesis
    n = basis.size
    # midpoint quadrature is exact: the integrand is constant on each dyadic cell
    pair = (S[:, :, None] * S[:, None, :]).reshape(n, n * n)
    M = (S.T @ pair).reshape(n, n, n) / n
    V = S.T / np.sqrt(n)
    M.setflags(write=False)
    V.setflags(write=False)
    return TripleProductTensor(basis, M, V)


def _check_size(u, T):
    if np.shape(u)[-1] != T.size:
        raise ContractError(f"gPC vector of length {np.shape(u)[-1]} does not match basis size {T.size}")


def galerkin_product(u, z, T):
    """Truncated product ``(u*z)_k = sum_ij u_i z_j M_k[i, j]``."""
    _check_size(u, T)
    _check_size(z, T)
    return np.einsum("...i,...j,kij->...k", u, z, T.matrices)


def galerkin_matrix(u, T):
    """``P(u) = sum_l u_l M_l``; broadcasts over leading axes of ``u``."""
    _check_size(u, T)
    return np.tensordot(np.asarray(u, dtype=float), T.matrices, axes=([-1], [0]))


def galerkin_diagonal(u, T):
    """Diagonal of ``V.T P(u) V``, i.e. the eigenvalues of ``P(u)`` in node order."""
    V = T.eigenvectors
    return np.einsum("ni,...ij,nj->...n", V.T, galerkin_matrix(u, T), V.T)


def project_nonlinear(f, u, basis):
    """Coefficients of ``xi -> f(u(xi))``.

    For Haar fields the composition is again piecewise constant on the dyadic
    cells, so applying ``f`` to the nodal values and transforming back is the
    exact projection.  It coincides with the matrix identity
    ``P(f(u)) = V diag(f(nodal u)) V.T`` used in the stochastic Galerkin system.
    """
    nodal = basis.to_nodal(u)
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = np.asarray(f(nodal), dtype=float)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = tuple(int(i[0]) for i in np.nonzero(bad))
        raise DomainError(f"f undefined at nodal value {nodal[idx]!r} (index {idx})")
    return basis.to_modal(vals)


def reconstruct(u, xi, basis):
    """Evaluate ``sum_i u_i phi_i(xi)``; ``xi`` may be an array."""
    u = np.asarray(u, dtype=float)
    nodal = basis.to_nodal(u)
    return nodal[..., basis.cell_index(xi)]


def gpc_mean(u):
    return np.asarray(u)[..., 0]


def gpc_variance(u):
    """Variance from coefficients (Parseval)."""
    u = np.asarray(u)
    return np.sum(u[..., 1:] ** 2, axis=-1)
