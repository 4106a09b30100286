"""Exception types raised by the solvers and diagnostics."""


class ContractError(ValueError):
    """Inputs violate a documented precondition (shape, range, grid mismatch)."""


class DomainError(ValueError):
    """A scalar function was evaluated outside its domain."""


class ResourceError(MemoryError):
    """A requested basis or tensor would exceed the memory guard."""


class NumericalModelError(ArithmeticError):
    """The discrete-velocity Maxwellian recursion became ill-defined."""


class CFLError(RuntimeError):
    """Time step too large for the current wave speeds."""

    def __init__(self, dt, dt_max):
        self.dt = dt
        self.dt_max = dt_max
        super().__init__(f"dt={dt:.6g} violates CFL condition; required dt <= {dt_max:.6g}")


class VacuumError(RuntimeError):
    """A nodal density is non-positive where the fluid system needs rho > 0."""


class StateError(RuntimeError):
    """A nodal density left the admissible range [0, rho_max]."""


class ConfigError(ValueError):
    """A scenario configuration file could not be parsed or is inconsistent."""
