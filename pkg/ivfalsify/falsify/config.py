from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ivfalsify.exception import ConfigurationError
from ivfalsify.falsify.procedures import (
    test_conditional_discrete,
    test_conditional_gs,
    test_conditional_perlevel,
    test_discrete,
    test_unconditional,
)
from ivfalsify.falsify.types import FalsifyReport, ModelKind
from ivfalsify.tabulate.types import JointCounts, StratifiedCounts
from ivfalsify.twobytwo.types import TestMethod


class ProcedureConfig(BaseModel):
    """A fully specified falsification procedure that can be applied to data."""

    model_config = ConfigDict(frozen=True)

    model: ModelKind = ModelKind.UNCONDITIONAL_BINARY
    alpha: float = Field(default=0.05, gt=0, lt=1)
    method: TestMethod = TestMethod.WALD
    gamma: Optional[float] = Field(default=None, gt=0, lt=1)

    @model_validator(mode="after")
    def _gamma_iff_berger_boos(self) -> "ProcedureConfig":
        if (self.method == TestMethod.BERGER_BOOS) != (self.gamma is not None):
            raise ValueError("gamma must be given exactly when method is berger_boos")
        return self

    def run(self, data: JointCounts | StratifiedCounts) -> FalsifyReport:
        """Apply the procedure; unconditional models accept a single-stratum StratifiedCounts."""
        match self.model:
            case ModelKind.UNCONDITIONAL_BINARY:
                return test_unconditional(_as_table(data), self.alpha, self.method, self.gamma)
            case ModelKind.DISCRETE:
                return test_discrete(_as_table(data), self.alpha, self.method, self.gamma)
            case ModelKind.CONDITIONAL_BINARY_GS:
                return test_conditional_gs(_as_strata(data), self.alpha)
            case ModelKind.CONDITIONAL_BINARY_PERLEVEL:
                return test_conditional_perlevel(_as_strata(data), self.alpha, self.method, self.gamma)
            case ModelKind.CONDITIONAL_DISCRETE:
                return test_conditional_discrete(_as_strata(data), self.alpha, self.method, self.gamma)


def _as_table(data: JointCounts | StratifiedCounts) -> JointCounts:
    if isinstance(data, JointCounts):
        return data
    if data.K != 1:
        raise ConfigurationError(f"an unconditional procedure needs one stratum, got {data.K}")
    return data.collapse()


def _as_strata(data: JointCounts | StratifiedCounts) -> StratifiedCounts:
    if isinstance(data, StratifiedCounts):
        return data
    return StratifiedCounts.single(data)
