"""Maxwell-Bloch amplifier: scattering data, asymptotics and the characteristic oracle."""

from ._core import *  # noqa: F401,F403
from ._core import MbampError, __doc__  # noqa: F401
