"""Lattice gauge theory Monte Carlo engine (compact groups Z2, U(1), SU(2), SU(3))."""

from ._lgt import *  # noqa: F401,F403
from ._lgt import __doc__  # noqa: F401
