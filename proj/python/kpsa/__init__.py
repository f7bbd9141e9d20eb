"""Python bindings for the kpsa traffic assignment library."""

from ._kpsa import *  # noqa: F401,F403
from ._kpsa import __doc__  # noqa: F401
