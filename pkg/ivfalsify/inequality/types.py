from __future__ import annotations

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Tolerance on the simplex constraints when building a ZetaPoint from floats.
_SIMPLEX_TOL = 1e-12

Cell = tuple[int, int]
CELLS: tuple[Cell, ...] = ((0, 0), (0, 1), (1, 0), (1, 1))


class TwoByTwo(BaseModel):
    """Successes x1 of n1 in the instrument arm "1" against x0 of n0 in arm "0"."""

    model_config = ConfigDict(frozen=True)

    x1: int = Field(ge=0)
    n1: int = Field(ge=1)
    x0: int = Field(ge=0)
    n0: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_successes(self) -> TwoByTwo:
        if self.x1 > self.n1 or self.x0 > self.n0:
            raise ValueError(f"successes exceed arm size in ({self.x1}/{self.n1}, {self.x0}/{self.n0})")
        return self

    @property
    def p1(self) -> float:
        return self.x1 / self.n1

    @property
    def p0(self) -> float:
        return self.x0 / self.n0

    @property
    def difference(self) -> float:
        return self.p1 - self.p0

    @property
    def cells(self) -> tuple[int, int, int, int]:
        return self.x1, self.n1 - self.x1, self.x0, self.n0 - self.x0


class DeltaEstimate(BaseModel):
    """Estimated difference pr(Q=1 | arm 1) - pr(Q=1 | arm 0) with its unpooled standard error."""

    model_config = ConfigDict(frozen=True)

    estimate: float = Field(ge=-1, le=1)
    se: float = Field(ge=0)
    n1: int
    n0: int


class ZetaPoint(BaseModel):
    """Coordinates (u00, u01, u10) in the simplex; u11 is implied by the sum-to-two constraint."""

    model_config = ConfigDict(frozen=True)

    u00: float
    u01: float
    u10: float

    @model_validator(mode="after")
    def _check_simplex(self) -> ZetaPoint:
        if min(self.u00, self.u01, self.u10) < -_SIMPLEX_TOL:
            raise ValueError(f"coordinates must be non-negative, got {self.coordinates}")
        if self.u00 + self.u01 + self.u10 > 2 + _SIMPLEX_TOL:
            raise ValueError(f"coordinates must sum to at most 2, got {self.coordinates}")
        return self

    @property
    def u11(self) -> float:
        return 2.0 - self.u00 - self.u01 - self.u10

    @property
    def coordinates(self) -> tuple[float, float, float]:
        return self.u00, self.u01, self.u10

    def u(self, d: int, y: int) -> float:
        return {(0, 0): self.u00, (0, 1): self.u01, (1, 0): self.u10, (1, 1): self.u11}[(d, y)]


class MembershipKind(StrEnum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


class Membership(BaseModel):
    """Position of a point relative to the octahedron null space."""

    model_config = ConfigDict(frozen=True)

    kind: MembershipKind
    active: tuple[Cell, ...] = ()
    violated: tuple[Cell, ...] = ()


class AcdeSign(StrEnum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNDETERMINED = "undetermined"


class AcdeInterval(BaseModel):
    """Bounds on the average controlled direct effect of the instrument at a fixed treatment level."""

    model_config = ConfigDict(frozen=True)

    lower: float = Field(ge=-1, le=1)
    upper: float = Field(ge=-1, le=1)
