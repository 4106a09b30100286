"""Stochastic Galerkin (Haar gPC) solvers for kinetic and ARZ traffic models,
with the instability probability P(mu <= 0)."""
from importlib.resources import files

from .arz import RAREFACTION, SHOCK, FluidState, project_initial_data, run_arz
from .diagnostics import mu, probability_field, probability_mu_nonpositive, steady_state_sweep
from .errors import (CFLError, ConfigError, ContractError, DomainError, NumericalModelError,
                     ResourceError, StateError, VacuumError)
from .gpc import HaarBasis, build_haar_basis, compute_triple_products, galerkin_product
from .grid import Mesh
from .kinetic import run_kinetic
from .physics import PhysicsParams

__version__ = "0.1.0"


def bundled_config(name):
    """Path of a shipped scenario file, e.g. ``bundled_config("rarefaction.cfg")``."""
    return files(__name__).joinpath("configs", name)
