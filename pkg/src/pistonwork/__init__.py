"""Work statistics of a gas-loaded Brownian piston under a noisy load.

The pipeline, end to end: a radiation state fixes the statistics of a
membrane position, which fixes the distribution of the dimensionless slope
alpha of the piston potential v(x) = alpha*x - ln(x); each stable slope
yields a Gamma-distributed piston position and a quasistatic work -ln(alpha);
averaging over the slope law (conditioned on stability) gives the mean
extracted work per state.  `langevin` verifies the equilibrium law
dynamically, `sweep`/`cli` turn everything into reproducible CSV datasets
and quick-look figures.
"""

from .errors import (
    DegenerateDistributionError,
    DomainError,
    IntegrationFailureError,
    InvalidParameterError,
    NoStableEnsembleError,
    NoStationaryStateError,
    PistonworkError,
)
from .version import VERSION as __version__

from . import cli, equilibrium, langevin, quad, rng, states, sweep, units, work

__all__ = [
    "__version__",
    "cli",
    "equilibrium",
    "langevin",
    "quad",
    "rng",
    "states",
    "sweep",
    "units",
    "work",
    "PistonworkError",
    "InvalidParameterError",
    "DomainError",
    "NoStationaryStateError",
    "DegenerateDistributionError",
    "NoStableEnsembleError",
    "IntegrationFailureError",
]
