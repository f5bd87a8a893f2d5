"""Reduction of dimensional bench parameters to dimensionless model inputs.

The whole library works in natural units: lengths in L = N*kBT/F0 (the
equilibrium extent of the compressed gas column), energies in N*kBT, and the
confining potential characterized by the single slope parameter

    alpha = 1 + kappa*XM/F0.

This module is the only place raw dimensional quantities appear; everything
downstream takes (alpha, epsilon, N, nbar, r, tau) only.
"""

from dataclasses import dataclass

from .errors import InvalidParameterError


@dataclass(frozen=True)
class DimensionalParams:
    """Bench-level parameters of the membrane / piston / gas chain.

    kappa    -- membrane-piston coupling stiffness (force / length)
    F0       -- constant load force on the piston (force), > 0
    N        -- ideal-gas particle count, integer >= 1
    kBT      -- thermal energy (energy), > 0
    gamma    -- piston friction coefficient (force * time / length), > 0
    XM       -- membrane displacement (length)
    X0       -- mean membrane displacement (length)
    eps_bar  -- membrane displacement standard deviation (length), >= 0
    """

    kappa: float
    F0: float
    N: int
    kBT: float
    gamma: float = 1.0
    XM: float = 0.0
    X0: float = 0.0
    eps_bar: float = 0.0

    def __post_init__(self):
        if self.F0 <= 0:
            raise InvalidParameterError("F0 must be positive")
        if self.kBT <= 0:
            raise InvalidParameterError("kBT must be positive")
        if self.gamma <= 0:
            raise InvalidParameterError("gamma must be positive")
        if self.N < 1 or int(self.N) != self.N:
            raise InvalidParameterError("N must be an integer >= 1")
        if self.eps_bar < 0:
            raise InvalidParameterError("eps_bar must be >= 0")


def alpha_from(params):
    """Dimensionless potential slope for a membrane held at params.XM."""
    return 1.0 + params.kappa * params.XM / params.F0


def alpha0_from(params):
    """Dimensionless slope at the mean membrane position params.X0."""
    return 1.0 + params.kappa * params.X0 / params.F0


def epsilon_from(params):
    """Dimensionless standard deviation of the slope induced by membrane noise."""
    return params.kappa * params.eps_bar / params.F0


def length_unit(params):
    """Natural length L = N*kBT/F0 used to scale the piston position."""
    return params.N * params.kBT / params.F0
