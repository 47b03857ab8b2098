"""High-precision periods of fiber products of semistable elliptic surfaces.

The package computes the Z-module of periods of the holomorphic 3-form on
fiber products ``X = E1 x_P1 E2`` of semistable rational elliptic surfaces
(and on their small resolutions ``X^``) by continuing Picard-Fuchs solutions
along the real axis, extracting integer transformation / monodromy data and
assembling the period lattice from vanishing-cycle subgroups.
"""

from .errors import SchoenError
from .numerics import PrecisionContext, PowerSeries, RatPoly

__all__ = ["SchoenError", "PrecisionContext", "PowerSeries", "RatPoly"]
__version__ = "0.1.0"
