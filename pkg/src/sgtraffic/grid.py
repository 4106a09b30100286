"""Uniform 1-D finite-volume mesh and ghost-cell handling."""
from dataclasses import dataclass

import numpy as np

from .errors import ContractError

BOUNDARIES = ("outflow", "periodic")


@dataclass(frozen=True)
class Mesh:
    a: float = 0.0
    b: float = 2.0
    dx: float = 0.02

    def __post_init__(self):
        if not self.dx > 0 or not self.b > self.a:
            raise ContractError("mesh needs b > a and dx > 0")
        n = (self.b - self.a) / self.dx
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ContractError(f"dx={self.dx} does not divide [{self.a}, {self.b}]")

    @property
    def n_cells(self):
        return int(round((self.b - self.a) / self.dx))

    @property
    def centers(self):
        return self.a + (np.arange(self.n_cells) + 0.5) * self.dx


def with_ghosts(u, bc):
    """Pad axis 0 with one ghost cell on each side."""
    if bc == "outflow":
        return np.concatenate([u[:1], u, u[-1:]], axis=0)
    if bc == "periodic":
        return np.concatenate([u[-1:], u, u[:1]], axis=0)
    raise ContractError(f"boundary condition must be one of {BOUNDARIES}, got {bc!r}")


def flux_difference(F):
    """F has one entry per interface (n_cells + 1); returns F_{i+1/2} - F_{i-1/2}."""
    return F[1:] - F[:-1]
