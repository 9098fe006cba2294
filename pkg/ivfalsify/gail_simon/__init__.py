"""
One-sided qualitative interaction test across covariate strata.
"""

from .chibar import chibar_squared_sf, gs_test, stratum_deltas
from .types import GsResult, StratumDelta

__all__ = [
    "GsResult",
    "StratumDelta",
    "chibar_squared_sf",
    "gs_test",
    "stratum_deltas",
]
