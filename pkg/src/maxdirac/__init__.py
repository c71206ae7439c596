"""Ground states of the Maxwell-Dirac-Coulomb problem by a Foldy-Wouthuysen min-max scheme."""

__version__ = "0.1.0"

from .constants import ALPHA_FS, GAMMA_H, GAMMA_K, GAMMA_T  # noqa: E402
from .grid import SpectralGrid, SpinorField  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .solver import ConfigError, SolveReport, SolverConfig, SolverError, solve  # noqa: E402

__all__ = [
    "ALPHA_FS",
    "BACKEND",
    "GAMMA_H",
    "GAMMA_K",
    "GAMMA_T",
    "ConfigError",
    "SolveReport",
    "SolverConfig",
    "SolverError",
    "SpectralGrid",
    "SpinorField",
    "solve",
]
