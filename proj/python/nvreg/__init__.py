"""Simulator and inverse-problem toolkit for a dipolar-coupled pair of S=1 spins.

Everything lives in the compiled extension; this package re-exports it.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
