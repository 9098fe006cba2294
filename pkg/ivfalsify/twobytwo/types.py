from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field


class TestMethod(StrEnum):
    WALD = "wald"
    BOSCHLOO = "boschloo"
    BERGER_BOOS = "berger_boos"
    # resolved per table to WALD or BOSCHLOO, never reported in a TestResult
    AUTO = "auto"


class TestResult(BaseModel):
    """Outcome of a one-sided test of p1 <= p0 against p1 > p0."""

    model_config = ConfigDict(frozen=True)

    p_value: float = Field(ge=0, le=1)
    statistic: float
    method: TestMethod
    gamma: float = Field(default=0.0, ge=0, lt=1)
