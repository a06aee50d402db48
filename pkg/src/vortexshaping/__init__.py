"""Vortex-beam shaping of cold atomic clouds.

Beam optics (:mod:`~vortexshaping.jones`, :mod:`~vortexshaping.propagation`),
atom-cloud models (:mod:`~vortexshaping.cloud`), the two shaping schemes
(:mod:`~vortexshaping.dynamic`, :mod:`~vortexshaping.darkstate`), synthetic
absorption imaging and fitting (:mod:`~vortexshaping.imaging`,
:mod:`~vortexshaping.fitting`) and hyperfine saturation intensities
(:mod:`~vortexshaping.atomic`).
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
