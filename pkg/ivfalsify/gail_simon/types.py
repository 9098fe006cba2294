from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ivfalsify.inequality.types import DeltaEstimate
from ivfalsify.tabulate.types import StratumKey


class StratumDelta(BaseModel):
    """Estimated Q-difference in one covariate stratum."""

    model_config = ConfigDict(frozen=True)

    key: StratumKey
    delta: Optional[DeltaEstimate] = None
    usable: bool
    # se computed after adding 0.5 to every cell of the stratum table
    corrected: bool = False

    @model_validator(mode="after")
    def _usable_has_delta(self) -> "StratumDelta":
        if self.usable and self.delta is None:
            raise ValueError(f"usable stratum {self.key} needs a delta estimate")
        return self


class GsResult(BaseModel):
    """One-sided qualitative interaction test of Delta(v) <= 0 for every stratum v."""

    model_config = ConfigDict(frozen=True)

    q_plus: float = Field(ge=0)
    k_used: int = Field(ge=1)
    p_value: float = Field(ge=0, le=1)
    dropped: list[StratumKey] = Field(default_factory=list)
    corrected: list[StratumKey] = Field(default_factory=list)
