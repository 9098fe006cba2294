from __future__ import annotations

from enum import StrEnum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ivfalsify.inequality.types import AcdeSign
from ivfalsify.tabulate.types import StratumKey
from ivfalsify.twobytwo.types import TestMethod

SCHEMA_VERSION = "1.0"

RANDOMIZATION_NOTE = "ACDE sign conclusions are valid only if the instrument is randomized."
NON_REJECTION_CAVEAT = (
    "Failure to violate an instrumental variable inequality does not prove that Z is an instrument; "
    "that rests on subject-matter arguments for no unmeasured confounding given V and no direct effect of Z on Y."
)


class ModelKind(StrEnum):
    UNCONDITIONAL_BINARY = "unconditional_binary"
    CONDITIONAL_BINARY_GS = "conditional_binary_gs"
    CONDITIONAL_BINARY_PERLEVEL = "conditional_binary_perlevel"
    DISCRETE = "discrete"
    CONDITIONAL_DISCRETE = "conditional_discrete"


class IneqId(BaseModel):
    """Binary inequality (d, y), or discrete inequality p(Y=0, D=d | z1) + p(Y=1, D=d | z2) <= 1."""

    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=0)
    y: Optional[int] = Field(default=None, ge=0, le=1)
    z1: Optional[int] = Field(default=None, ge=0)
    z2: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _binary_or_discrete(self) -> IneqId:
        binary = self.y is not None
        discrete = self.z1 is not None and self.z2 is not None
        if binary == discrete or (binary and (self.z1, self.z2) != (None, None)):
            raise ValueError("an inequality is identified either by (d, y) or by (z1, z2, d)")
        if discrete and self.z1 == self.z2:
            raise ValueError(f"instrument levels must differ, got z1 = z2 = {self.z1}")
        return self

    @property
    def is_binary(self) -> bool:
        return self.y is not None

    @property
    def label(self) -> str:
        if self.is_binary:
            return f"H{self.d}{self.y}"
        return f"H({self.z1},{self.z2};{self.d})"

    @property
    def sort_key(self) -> tuple[int, ...]:
        if self.is_binary:
            return (self.d, self.y)
        return (self.z1, self.z2, self.d)


class ReportEntry(BaseModel):
    """Result of one inequality test at its per-test level."""

    model_config = ConfigDict(frozen=True)

    ineq: IneqId
    stratum: Optional[StratumKey] = None
    level: float = Field(gt=0, lt=1)
    p_value: Optional[float] = Field(default=None, ge=0, le=1)
    statistic: Optional[float] = None
    method: Optional[TestMethod] = None
    k_used: Optional[int] = None
    evaluable: bool = True
    reject: bool = False

    @model_validator(mode="after")
    def _decision_matches_p_value(self) -> ReportEntry:
        if self.evaluable != (self.p_value is not None):
            raise ValueError("evaluable entries carry a p-value, unevaluable ones do not")
        if self.reject != (self.p_value is not None and self.p_value <= self.level):
            raise ValueError(f"reject flag inconsistent with p={self.p_value} at level {self.level}")
        return self


class AcdeConclusion(BaseModel):
    """Sign of E{Y(z_hi, d)} - E{Y(z_lo, d)} implied by the rejected inequalities."""

    model_config = ConfigDict(frozen=True)

    d: int
    sign: AcdeSign
    z_hi: int = 1
    z_lo: int = 0
    stratum: Optional[StratumKey] = None
    # conditional Gail-Simon rejections locate the effect in some, unidentified, stratum
    in_some_stratum: bool = False


class ReportMetadata(BaseModel):
    method: Optional[TestMethod] = None
    gamma: Optional[float] = None
    n_strata: int = 1
    instrument_levels: int = 2
    treatment_levels: int = 2
    dropped_strata: list[StratumKey] = Field(default_factory=list)
    corrected_strata: list[StratumKey] = Field(default_factory=list)
    skipped_arms: list[int] = Field(default_factory=list)
    unevaluable: int = 0
    randomization_note: str = RANDOMIZATION_NOTE


class FalsifyReport(BaseModel):
    """Per-inequality p-values and decisions of one falsification procedure."""

    model_config = ConfigDict(frozen=True)

    schema_version: str = SCHEMA_VERSION
    model: ModelKind
    alpha: float = Field(gt=0, lt=1)
    entries: list[ReportEntry]
    overall_reject: bool
    acde_signs: list[AcdeConclusion] = Field(default_factory=list)
    metadata: ReportMetadata = Field(default_factory=ReportMetadata)

    @model_validator(mode="after")
    def _overall_is_disjunction(self) -> FalsifyReport:
        if self.overall_reject != any(entry.reject for entry in self.entries):
            raise ValueError("overall_reject must equal the disjunction of the entry rejections")
        return self

    @property
    def rejected(self) -> list[ReportEntry]:
        return [entry for entry in self.entries if entry.reject]
