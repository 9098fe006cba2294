from enum import StrEnum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from ivfalsify.config import get_settings
from ivfalsify.twobytwo.types import TestMethod


class Subcommand(StrEnum):
    FALSIFY_UNCONDITIONAL = "falsify-unconditional"
    FALSIFY_CONDITIONAL = "falsify-conditional"
    FALSIFY_DISCRETE = "falsify-discrete"
    SIMULATE = "simulate"


class CliMethod(StrEnum):
    WALD = "wald"
    BOSCHLOO = "boschloo"
    BERGER_BOOS = "berger-boos"
    AUTO = "auto"

    @property
    def test_method(self) -> TestMethod:
        return TestMethod(self.value.replace("-", "_"))


class ConditionalMode(StrEnum):
    GAIL_SIMON = "gail-simon"
    PER_LEVEL = "per-level"


class Dichotomize(StrEnum):
    NONE = "none"
    MEDIAN = "median"


class OutputFormat(StrEnum):
    TEXT = "text"
    JSON = "json"


class RunConfig(BaseModel):
    """Everything one command-line invocation needs, validated before any data is read."""

    subcommand: Subcommand
    input: Optional[Path] = None

    # column mapping
    z: str = "z"
    d: str = "d"
    y: str = "y"
    covariates: list[str] = Field(default_factory=list)
    bins: dict[str, list[float]] = Field(default_factory=dict)

    alpha: float = Field(default_factory=lambda: get_settings().alpha, gt=0, lt=1)
    method: CliMethod = CliMethod.AUTO
    gamma: Optional[float] = Field(default=None, gt=0, lt=1)
    conditional_mode: ConditionalMode = ConditionalMode.GAIL_SIMON
    dichotomize: Dichotomize = Dichotomize.NONE
    output_format: OutputFormat = OutputFormat.TEXT

    # simulate
    scenarios: Optional[Path] = None
    log: Optional[Path] = None
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)
    workers: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_gamma(self) -> "RunConfig":
        if (self.method == CliMethod.BERGER_BOOS) != (self.gamma is not None):
            raise ValueError("--gamma must be given exactly when --method is berger-boos")
        if self.gamma is not None and self.gamma >= self.alpha / 2:
            raise ValueError(f"gamma must be below alpha/2 = {self.alpha / 2:g}, got {self.gamma}")
        return self

    @model_validator(mode="after")
    def _check_gail_simon_options(self) -> "RunConfig":
        gail_simon = (
            self.subcommand == Subcommand.FALSIFY_CONDITIONAL and self.conditional_mode == ConditionalMode.GAIL_SIMON
        )
        if gail_simon and (self.method != CliMethod.AUTO or self.gamma is not None):
            raise ValueError("--method and --gamma apply to 2x2 tests; use --mode per-level to choose them")
        return self

    @model_validator(mode="after")
    def _check_inputs(self) -> "RunConfig":
        if self.subcommand == Subcommand.SIMULATE:
            if self.scenarios is None or self.log is None:
                raise ValueError("simulate needs --scenarios and --log")
        elif self.input is None:
            raise ValueError(f"{self.subcommand} needs an input CSV file")
        unknown = sorted(set(self.bins) - set(self.covariates))
        if unknown:
            raise ValueError(f"--bin refers to columns {unknown} that are not listed in --covariates")
        return self

    @property
    def test_method(self) -> TestMethod:
        return self.method.test_method
