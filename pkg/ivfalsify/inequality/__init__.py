"""
Instrumental inequality statistics.

The four left-hand sides u^{dy} of the binary instrumental inequalities, their
two-by-two (Q against Z) reformulation, the octahedron geometry of the null
space and the implied bounds on the average controlled direct effect.
"""

from .core import (
    acde_bounds,
    acde_sign,
    delta,
    delta_of,
    membership_of,
    octahedron_membership,
    pair_q_table,
    q_table,
    u_stat,
    zeta_of,
)
from .types import CELLS, AcdeInterval, AcdeSign, DeltaEstimate, Membership, MembershipKind, TwoByTwo, ZetaPoint

__all__ = [
    "CELLS",
    "AcdeInterval",
    "AcdeSign",
    "DeltaEstimate",
    "Membership",
    "MembershipKind",
    "TwoByTwo",
    "ZetaPoint",
    "acde_bounds",
    "acde_sign",
    "delta",
    "delta_of",
    "membership_of",
    "octahedron_membership",
    "pair_q_table",
    "q_table",
    "u_stat",
    "zeta_of",
]
