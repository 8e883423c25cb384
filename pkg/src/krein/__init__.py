"""Strings, their spectral measures, and the maps between them."""

from .errors import *  # noqa: F401,F403
from .strings import *  # noqa: F401,F403
from .propagation import *  # noqa: F401,F403
from .families import AlphaFamily
from .spectral import *  # noqa: F401,F403
from .scales import *  # noqa: F401,F403
from .stochastic import *  # noqa: F401,F403
from .asymptotics import *  # noqa: F401,F403
from .correspondence import *  # noqa: F401,F403
from .reports import Report

__version__ = "0.1.0"
