"""Critical times of the SIR epidemic model: first time the infected count
drops to a threshold (u) and the epidemic peak time (v)."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
