"""Null-space property failure bounds, phase curves and Monte Carlo checks."""

from ._nspbound import *  # noqa: F401,F403
from ._nspbound import __version__  # noqa: F401
