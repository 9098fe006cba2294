from __future__ import annotations

from enum import StrEnum
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ivfalsify.falsify.config import ProcedureConfig

_PROB_TOL = 1e-12

# D(z) for z = 0, 1
COMPLIANCE_TYPES: dict[str, tuple[int, int]] = {
    "always_taker": (1, 1),
    "never_taker": (0, 0),
    "complier": (0, 1),
    "defier": (1, 0),
}
# (Y(d=0), Y(d=1))
RESPONSE_TYPES: tuple[tuple[int, int], ...] = ((0, 0), (0, 1), (1, 0), (1, 1))


def _check_probabilities(values: list[float], name: str) -> list[float]:
    array = np.asarray(values, dtype=float)
    if np.any(array < 0):
        raise ValueError(f"{name} must be non-negative, got {values}")
    if abs(array.sum() - 1.0) > _PROB_TOL:
        raise ValueError(f"{name} must sum to 1, got sum {array.sum()!r}")
    return values


class LatentSpec(BaseModel):
    """Binary IV model generated from 4 compliance x 4 response types independent of Z."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["latent"] = "latent"
    # index 4 * compliance + response, in COMPLIANCE_TYPES and RESPONSE_TYPES order
    type_probs: list[float] = Field(min_length=16, max_length=16)
    pz: float = Field(default=0.5, ge=0, le=1)

    @field_validator("type_probs")
    @classmethod
    def _simplex(cls, value: list[float]) -> list[float]:
        return _check_probabilities(value, "type_probs")

    def instrument_probs(self) -> np.ndarray:
        return np.array([1 - self.pz, self.pz])

    def arm_distributions(self) -> np.ndarray:
        """p(d, y | z) with shape (2, 2, 2)."""
        arms = np.zeros((2, 2, 2))
        for c, treatment in enumerate(COMPLIANCE_TYPES.values()):
            for r, response in enumerate(RESPONSE_TYPES):
                probability = self.type_probs[4 * c + r]
                for z in (0, 1):
                    d = treatment[z]
                    arms[z, d, response[d]] += probability
        return arms


class MarginsSpec(BaseModel):
    """Binary model given directly by p(d, y | Z=1) and p(d, y | Z=0), cells ordered (0,0), (0,1), (1,0), (1,1)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["margins"] = "margins"
    p1: list[float] = Field(min_length=4, max_length=4)
    p0: list[float] = Field(min_length=4, max_length=4)
    pz: float = Field(default=0.5, ge=0, le=1)

    @field_validator("p1", "p0")
    @classmethod
    def _simplex(cls, value: list[float]) -> list[float]:
        return _check_probabilities(value, "arm distribution")

    def instrument_probs(self) -> np.ndarray:
        return np.array([1 - self.pz, self.pz])

    def arm_distributions(self) -> np.ndarray:
        return np.stack([np.reshape(self.p0, (2, 2)), np.reshape(self.p1, (2, 2))])


class ArmsSpec(BaseModel):
    """Discrete instrument: one distribution over (d, y) per instrument level, cells ordered d-major."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["arms"] = "arms"
    arms: list[list[float]] = Field(min_length=2)
    pz: list[float]

    @model_validator(mode="after")
    def _shapes(self) -> ArmsSpec:
        widths = {len(arm) for arm in self.arms}
        if len(widths) != 1 or (width := widths.pop()) < 4 or width % 2:
            raise ValueError("every arm needs the same even number (2M >= 4) of cells")
        if len(self.pz) != len(self.arms):
            raise ValueError(f"pz has {len(self.pz)} entries for {len(self.arms)} arms")
        for z, arm in enumerate(self.arms):
            _check_probabilities(arm, f"arm {z}")
        _check_probabilities(self.pz, "pz")
        return self

    def instrument_probs(self) -> np.ndarray:
        return np.asarray(self.pz, dtype=float)

    def arm_distributions(self) -> np.ndarray:
        arms = np.asarray(self.arms, dtype=float)
        return arms.reshape(len(self.arms), -1, 2)


DgpSpec = Annotated[Union[LatentSpec, MarginsSpec, ArmsSpec], Field(discriminator="kind")]


class StratifiedSpec(BaseModel):
    """Independent generating distributions, one per covariate stratum."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["stratified"] = "stratified"
    strata: list[DgpSpec] = Field(min_length=1)


AnySpec = Annotated[Union[LatentSpec, MarginsSpec, ArmsSpec, StratifiedSpec], Field(discriminator="kind")]


class Regime(StrEnum):
    TWO_EQUALITIES = "two_equalities"
    ONE_EQUALITY = "one_equality"
    INTERIOR = "interior"
    EXTERIOR = "exterior"


class McResult(BaseModel):
    """Rejection count of a seeded Monte Carlo experiment."""

    model_config = ConfigDict(frozen=True)

    reps: int = Field(ge=1)
    rejections: int = Field(ge=0)
    rate: float
    mc_se: float
    seed: int
    unevaluable: int = 0

    @classmethod
    def from_counts(cls, rejections: int, reps: int, seed: int, unevaluable: int = 0) -> McResult:
        rate = rejections / reps
        return cls(
            reps=reps,
            rejections=rejections,
            rate=rate,
            mc_se=float(np.sqrt(rate * (1 - rate) / reps)),
            seed=seed,
            unevaluable=unevaluable,
        )

    @model_validator(mode="after")
    def _consistent(self) -> McResult:
        if self.rejections > self.reps:
            raise ValueError(f"{self.rejections} rejections out of {self.reps} replicates")
        return self


class Scenario(BaseModel):
    id: str
    spec: AnySpec
    n: int = Field(ge=1)
    reps: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**64)
    test: ProcedureConfig = Field(default_factory=ProcedureConfig)


class ScenarioFile(BaseModel):
    schema_version: str = "1.0"
    scenarios: list[Scenario]
