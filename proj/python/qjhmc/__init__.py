"""Density-matrix preconditioned HMC and open-quantum-system numerics."""

from qjhmc._core import *  # noqa: F401,F403
from qjhmc import _core as core  # noqa: F401

__version__ = "0.1.0"
